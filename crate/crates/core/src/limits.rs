//! Bulk scaling limits: the sine kernel `S(a, b) = sin π(a−b) / π(a−b)` and
//! the limiting two-point function
//!
//! ```text
//! W(β, α) = 1/(β − α) + ∫ sin(π(s − α)) / (π(s − α)(s − β)) ds
//!         = e^{±iπ(β − α)} / (β − α),   sign of Im β.
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_integrate;

/// Truncation parameters for the integral form of `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitParams {
    truncation: f64,
    tol: f64,
}

impl LimitParams {
    pub fn new(truncation: f64, tol: f64) -> Result<Self> {
        if !(truncation >= 10.0) || !truncation.is_finite() {
            return Err(Error::InvalidInput(format!("truncation L = {truncation} must be at least 10")));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self { truncation, tol })
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }
}

impl Default for LimitParams {
    fn default() -> Self {
        Self { truncation: 200.0, tol: 1e-10 }
    }
}

/// `sin(πz)/(πz)`, with the series `1 − (πz)²/6` near the removable singularity.
pub fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-8 {
        let pz = PI * z;
        return 1.0 - pz * pz / 6.0;
    }
    (PI * z).sin() / (PI * z)
}

/// Sine kernel `S(a, b)`.
pub fn sinc_kernel(a: Complex64, b: Complex64) -> Complex64 {
    sinc(a - b)
}

fn require_non_real(beta: Complex64) -> Result<()> {
    if beta.im == 0.0 {
        return Err(Error::Hypothesis(format!("β = {beta} must be non-real (Im β ≠ 0)")));
    }
    Ok(())
}

/// Closed form `e^{iπ(β−α)}/(β−α)` for `Im β > 0`, `e^{−iπ(β−α)}/(β−α)` for `Im β < 0`.
pub fn w_limit_closed(beta: Complex64, alpha: Complex64) -> Result<Complex64> {
    require_non_real(beta)?;
    let d = beta - alpha;
    let phase = if beta.im > 0.0 { Complex64::new(0.0, PI) } else { Complex64::new(0.0, -PI) };
    Ok((phase * d).exp() / d)
}

/// Limit of the scaled Cauchy transform of the kernel,
/// `∫ S(α, s)/(s − β) ds = (e^{±iπ(β−α)} − 1)/(β − α)`.
pub fn cauchy_limit(alpha: f64, beta: Complex64) -> Result<Complex64> {
    require_non_real(beta)?;
    let d = beta - alpha;
    let phase = if beta.im > 0.0 { Complex64::new(0.0, PI) } else { Complex64::new(0.0, -PI) };
    // exp_m1 form keeps accuracy when |β − α| is small
    let num = expm1(phase * d);
    Ok(num / d)
}

fn expm1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-5 {
        z + z * z / 2.0 + z * z * z / 6.0
    } else {
        z.exp() - 1.0
    }
}

/// Integral form of `W` truncated to `[α − L, α + L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitIntegral {
    pub value: Complex64,
    /// Rigorous bound on the neglected tails `|s − α| > L`.
    pub tail_bound: f64,
}

/// `1/(β − α) + ∫_{α−L}^{α+L} sin(π(s−α)) / (π(s−α)(s−β)) ds`, with the bound
/// `(2/(π|β−α|)) ln(L/(L − |β−α|))` on the discarded tails (about `2/(πL)`).
pub fn w_limit_integral(beta: Complex64, alpha: f64, p: LimitParams) -> Result<LimitIntegral> {
    require_non_real(beta)?;
    let d = beta - alpha;
    let dist = d.norm();
    let l = p.truncation;
    if !(l > dist) {
        return Err(Error::InvalidInput(format!("truncation L = {l} must exceed |β − α| = {dist}")));
    }
    let integrand = |u: f64| sinc(Complex64::new(u, 0.0)) / (u - d);
    let core = adaptive_integrate(integrand, -l, l, p.tol)?;
    Ok(LimitIntegral {
        value: 1.0 / d + core,
        tail_bound: 2.0 / (PI * dist) * (l / (l - dist)).ln(),
    })
}
