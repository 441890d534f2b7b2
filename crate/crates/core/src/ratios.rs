//! Averages of ratios of characteristic polynomials,
//!
//! ```text
//! ⟨ ∏_j D_n(α_j)/D_n(β_j) ⟩ = (−1)^{k(k+1)/2} Δ(β,α) / (Δ(β)² Δ(α)²) · det[W_n(β_i, α_j)],
//! ```
//!
//! where `Δ(v) = ∏_{i<j}(v_j − v_i)` and `Δ(β,α)` is the Vandermonde of the
//! concatenated vector `(β_1..β_k, α_1..α_k)`. The prefactor therefore reduces
//! to `∏_{i,j}(α_j − β_i) / (Δ(β) Δ(α))`, which is what is computed.

use num_complex::Complex64;

use crate::cauchy::TwoPointContext;
use crate::error::{Error, Result};
use crate::limits::w_limit_closed;
use crate::linalg::complex_det;

/// Minimum pairwise distance between the `2k` shifts of a query.
pub const MIN_SEPARATION: f64 = 1e-6;

/// Largest supported number of ratio factors.
pub const MAX_K: usize = 8;

/// Shifts `α_1..α_k` (numerator) and `β_1..β_k` (denominator).
#[derive(Debug, Clone, PartialEq)]
pub struct RatioQuery {
    alphas: Vec<Complex64>,
    betas: Vec<Complex64>,
}

impl RatioQuery {
    /// Validates non-real `β`s and pairwise separation of all `2k` shifts.
    pub fn new(alphas: Vec<Complex64>, betas: Vec<Complex64>) -> Result<Self> {
        let q = Self::unchecked(alphas, betas)?;
        let all: Vec<Complex64> = q.betas.iter().chain(&q.alphas).copied().collect();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                let d = (all[i] - all[j]).norm();
                if d < MIN_SEPARATION {
                    return Err(Error::Hypothesis(format!(
                        "shifts {} and {} are not pairwise distinct (separation {d:e} < {MIN_SEPARATION:e})",
                        all[i], all[j]
                    )));
                }
            }
        }
        Ok(q)
    }

    /// Real `α`s, complex `β`s.
    pub fn with_real_alphas(alphas: &[f64], betas: Vec<Complex64>) -> Result<Self> {
        Self::new(alphas.iter().map(|&a| Complex64::new(a, 0.0)).collect(), betas)
    }

    /// Checks everything but the separation floor; exact coincidences are
    /// still rejected.
    fn unchecked(alphas: Vec<Complex64>, betas: Vec<Complex64>) -> Result<Self> {
        if alphas.len() != betas.len() {
            return Err(Error::InvalidInput(format!(
                "need as many α as β shifts ({} vs {})",
                alphas.len(),
                betas.len()
            )));
        }
        if alphas.len() > MAX_K {
            return Err(Error::InvalidInput(format!("at most {MAX_K} ratio factors are supported")));
        }
        if alphas.iter().chain(&betas).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("shifts must be finite".into()));
        }
        if let Some(b) = betas.iter().find(|b| b.im == 0.0) {
            return Err(Error::Hypothesis(format!("β = {b} must be non-real (Im β ≠ 0)")));
        }
        let all: Vec<Complex64> = betas.iter().chain(&alphas).copied().collect();
        for i in 0..all.len() {
            if all[i + 1..].contains(&all[i]) {
                return Err(Error::Hypothesis(format!("shift {} appears twice", all[i])));
            }
        }
        Ok(Self { alphas, betas })
    }

    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Complex64] {
        &self.betas
    }

    pub fn has_real_alphas(&self) -> bool {
        self.alphas.iter().all(|a| a.im == 0.0)
    }

    /// Same query with `β` replaced by `conj(β)`.
    pub fn conjugate_betas(&self) -> Self {
        Self { alphas: self.alphas.clone(), betas: self.betas.iter().map(|b| b.conj()).collect() }
    }

    /// `x + v/scale` applied to every shift.
    fn shifted(&self, x: f64, scale: f64) -> Result<Self> {
        let map = |v: &Complex64| Complex64::new(x, 0.0) + v / scale;
        Self::unchecked(self.alphas.iter().map(map).collect(), self.betas.iter().map(map).collect())
    }
}

fn vandermonde(v: &[Complex64]) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            prod *= v[j] - v[i];
        }
    }
    prod
}

fn sign(k: usize) -> f64 {
    if (k * (k + 1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `Δ(β,α) / (Δ(β)² Δ(α)²) = ∏_{i,j}(α_j − β_i) / (Δ(β) Δ(α))`.
pub fn vandermonde_factor(q: &RatioQuery) -> Complex64 {
    let mut cross = Complex64::new(1.0, 0.0);
    for b in &q.betas {
        for a in &q.alphas {
            cross *= a - b;
        }
    }
    cross / (vandermonde(&q.betas) * vandermonde(&q.alphas))
}

fn determinantal<F>(q: &RatioQuery, entry: F) -> Result<Complex64>
where
    F: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    let k = q.k();
    if k == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut m = Vec::with_capacity(k * k);
    for b in &q.betas {
        for a in &q.alphas {
            m.push(entry(*b, *a)?);
        }
    }
    Ok(sign(k) * vandermonde_factor(q) * complex_det(m, k)?)
}

/// `⟨∏ D_n(α_j)/D_n(β_j)⟩` for the ensemble of `ctx`, via the determinant of
/// two-point functions.
pub fn ratio_average(ctx: &TwoPointContext, q: &RatioQuery) -> Result<Complex64> {
    if q.k() > ctx.n() {
        return Err(Error::Hypothesis(format!(
            "need 1 ≤ k ≤ n, got k = {} and n = {}",
            q.k(),
            ctx.n()
        )));
    }
    determinantal(q, |b, a| ctx.w_two_point(b, a))
}

fn require_real_alphas(q: &RatioQuery) -> Result<()> {
    if !q.has_real_alphas() {
        return Err(Error::Hypothesis("scaled averages need real α shifts".into()));
    }
    Ok(())
}

/// `⟨∏ D_n(x + α_j/K̃)/D_n(x + β_j/K̃)⟩` with `K̃ = K̃_n(x, x)`.
pub fn scaled_ratio_average(ctx: &TwoPointContext, x: f64, q: &RatioQuery) -> Result<Complex64> {
    require_real_alphas(q)?;
    let kt = ctx.evaluator().normalized_diag(x)?;
    ratio_average(ctx, &q.shifted(x, kt)?)
}

/// Large-`n` limit of [`scaled_ratio_average`]: the same determinantal
/// expression with the limiting two-point function.
pub fn limit_ratio_average(q: &RatioQuery) -> Result<Complex64> {
    require_real_alphas(q)?;
    determinantal(q, w_limit_closed)
}
