//! Cauchy transforms of the orthonormal polynomials and of the reproducing
//! kernel, and the two-point function
//!
//! ```text
//! W_n(β, α) = 1/(β − α) + ∫ K_n(t, α) dμ(t) / (t − β).
//! ```
//!
//! With pole extraction, `∫ f(t) dμ(t)/(t − β)` for a polynomial `f` is split
//! into `∫ (f(t) − f(β))/(t − β) dμ(t)`, whose integrand is again a polynomial
//! and is integrated exactly by a Gauss rule, plus `f(β) G(β)` with the
//! Stieltjes transform `G` of the measure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::KernelEvaluator;
use crate::orthopoly::{recurrence, stieltjes_transform};
use crate::quadrature::{adaptive_integrate, golub_welsch, QuadratureRule};
use crate::DEFAULT_TOL;

/// How integrals against `dμ(t)/(t − β)` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PoleMethod {
    /// Exact polynomial part plus `f(β) G(β)`.
    #[default]
    PoleExtraction,
    /// Plain Gauss quadrature with `10 n` nodes; only reliable when `|Im β|`
    /// is not small.
    DirectQuadrature,
}

/// Outcome of the tail diagnostic for the scaled Cauchy transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailDiagnostic {
    /// `|(1/K̃) ∫_{ℝ∖I_n} K_n(x + α/K̃, t) / (t − x − β/K̃) dμ(t)|`.
    pub tail: f64,
    /// `8 √(‖w‖_J / (w(x) M))`.
    pub bound: f64,
    /// Full scaled transform, for reference.
    pub scaled_total: Complex64,
    /// Half-width `M / K̃` of the excluded window `I_n`.
    pub window: f64,
}

/// Evaluation context for `W_n` at a fixed measure and order.
#[derive(Debug, Clone)]
pub struct TwoPointContext {
    ev: KernelEvaluator,
    method: PoleMethod,
    tol: f64,
    poly_rule: QuadratureRule,
    far_rule: QuadratureRule,
    direct_rule: Option<QuadratureRule>,
}

/// Nodes of the rule used for `β` far from the support, `2n + FAR_EXTRA`.
const FAR_EXTRA: usize = 8;

/// Bernstein ellipse parameter of `β` relative to the support: `|z + √(z²−1)|`
/// with `z` the image of `β` on `[−1, 1]`.
fn ellipse_rho(beta: Complex64, support: (f64, f64)) -> f64 {
    let c = 0.5 * (support.0 + support.1);
    let h = 0.5 * (support.1 - support.0);
    let z = (beta - c) / h;
    let s = (z - 1.0).sqrt() * (z + 1.0).sqrt();
    (z + s).norm().max((z - s).norm())
}

fn require_non_real(beta: Complex64) -> Result<()> {
    if beta.im == 0.0 {
        return Err(Error::Hypothesis(format!("β = {beta} must be non-real (Im β ≠ 0)")));
    }
    Ok(())
}

impl TwoPointContext {
    pub fn new(ev: KernelEvaluator, method: PoleMethod) -> Result<Self> {
        let n = ev.n();
        let poly_rule = golub_welsch(ev.recurrence(), n.div_ceil(2) + 2)?;
        let m_far = 2 * n + FAR_EXTRA;
        let far_rule = golub_welsch(&recurrence(ev.spec(), m_far)?, m_far)?;
        let direct_rule = match method {
            PoleMethod::PoleExtraction => None,
            PoleMethod::DirectQuadrature => {
                let m = 10 * n;
                Some(golub_welsch(&recurrence(ev.spec(), m)?, m)?)
            }
        };
        Ok(Self { ev, method, tol: DEFAULT_TOL, poly_rule, far_rule, direct_rule })
    }

    /// Pole-extraction context for `spec` at order `n`.
    pub fn for_spec(spec: crate::orthopoly::WeightSpec, n: usize) -> Result<Self> {
        Self::new(KernelEvaluator::new(spec, n)?, PoleMethod::PoleExtraction)
    }

    /// Tolerance used where the Stieltjes transform needs adaptive quadrature.
    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn evaluator(&self) -> &KernelEvaluator {
        &self.ev
    }

    pub fn method(&self) -> PoleMethod {
        self.method
    }

    pub fn n(&self) -> usize {
        self.ev.n()
    }

    /// `G(β) = ∫ dμ(t)/(t − β)`.
    pub fn stieltjes(&self, beta: Complex64) -> Result<Complex64> {
        stieltjes_transform(self.ev.spec(), beta, self.tol)
    }

    /// `∫ f(t) dμ(t)/(t − β)` for a polynomial `f` of degree `≤ degree`.
    ///
    /// Pole extraction loses about `ρ^degree` ulps to cancellation in
    /// `f(β) G(β)`; the far rule errs by about `ρ^{−(2m − degree)}`. The
    /// cheaper error wins.
    fn polynomial_cauchy<F>(&self, f: F, degree: usize, beta: Complex64) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Complex64,
    {
        require_non_real(beta)?;
        match &self.direct_rule {
            Some(rule) => rule.integrate(|t| f(Complex64::new(t, 0.0)) / (t - beta)),
            None if ellipse_rho(beta, self.ev.spec().support()).powi(2 * self.far_rule.len() as i32) >= 1e16 => {
                self.far_rule.integrate(|t| f(Complex64::new(t, 0.0)) / (t - beta))
            }
            None => {
                let fb = f(beta);
                let owned;
                let rule = if self.poly_rule.degree_exact() + 1 >= degree {
                    &self.poly_rule
                } else {
                    owned = golub_welsch(self.ev.recurrence(), degree.div_ceil(2) + 1)?;
                    &owned
                };
                let smooth = rule.integrate(|t| (f(Complex64::new(t, 0.0)) - fb) / (t - beta))?;
                Ok(smooth + fb * self.stieltjes(beta)?)
            }
        }
    }

    /// `h_l(β) = ∫ p_l(t) dμ(t) / (t − β)`.
    pub fn cauchy_orthopoly(&self, l: usize, beta: Complex64) -> Result<Complex64> {
        let rec = self.ev.recurrence();
        if l >= rec.depth() {
            return Err(Error::InsufficientDepth { required: l + 1, available: rec.depth() });
        }
        self.polynomial_cauchy(
            |z| {
                if l == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    rec.eval_top_pair(l, z).expect("depth checked").1
                }
            },
            l,
            beta,
        )
    }

    /// `∫ K_n(t, α) dμ(t) / (t − β)`.
    pub fn kernel_cauchy(&self, beta: Complex64, alpha: Complex64) -> Result<Complex64> {
        let n = self.ev.n();
        self.polynomial_cauchy(|z| self.ev.kernel(z, alpha), n - 1, beta)
    }

    fn check_pair(beta: Complex64, alpha: Complex64) -> Result<()> {
        require_non_real(beta)?;
        if beta == alpha {
            return Err(Error::Hypothesis(format!("α and β must be distinct (both {beta})")));
        }
        Ok(())
    }

    /// `W_n(β, α) = 1/(β − α) + ∫ K_n(t, α) dμ(t)/(t − β)`.
    pub fn w_two_point(&self, beta: Complex64, alpha: Complex64) -> Result<Complex64> {
        Self::check_pair(beta, alpha)?;
        Ok(1.0 / (beta - alpha) + self.kernel_cauchy(beta, alpha)?)
    }

    /// `W_n(β, α) = (γ_{n−1}/γ_n)(h_n(β)p_{n−1}(α) − h_{n−1}(β)p_n(α)) / (β − α)`.
    pub fn w_two_point_cd(&self, beta: Complex64, alpha: Complex64) -> Result<Complex64> {
        Self::check_pair(beta, alpha)?;
        let n = self.ev.n();
        let rec = self.ev.recurrence();
        let h_n = self.cauchy_orthopoly(n, beta)?;
        let h_nm1 = self.cauchy_orthopoly(n - 1, beta)?;
        let (p_nm1, p_n) = rec.eval_top_pair(n, alpha)?;
        let ratio = rec.leading_coeff_ratio(n)?;
        Ok(ratio * (h_n * p_nm1 - h_nm1 * p_n) / (beta - alpha))
    }

    /// `(1/K̃) ∫ K_n(x + α/K̃, t) / (t − x − β/K̃) dμ(t)` with `K̃ = K̃_n(x, x)`.
    ///
    /// This is `W_n` at the shifted arguments with its `1/(β′ − α′)` term
    /// removed, divided by `K̃`.
    pub fn scaled_cauchy(&self, x: f64, alpha: f64, beta: Complex64) -> Result<Complex64> {
        require_non_real(beta)?;
        let kt = self.ev.normalized_diag(x)?;
        let (a, b) = self.shifted(x, kt, alpha, beta);
        Ok(self.kernel_cauchy(b, a)? / kt)
    }

    fn shifted(&self, x: f64, kt: f64, alpha: f64, beta: Complex64) -> (Complex64, Complex64) {
        (Complex64::new(x + alpha / kt, 0.0), Complex64::new(x, 0.0) + beta / kt)
    }

    /// Splits the scaled Cauchy transform at the window
    /// `I_n = [x − M/K̃, x + M/K̃]` and reports the outer part next to the
    /// bound `8 √(‖w‖_J / (w(x) M))`, `J = [j_lo, j_hi]`.
    pub fn tail_diagnostic(
        &self,
        x: f64,
        alpha: f64,
        beta: Complex64,
        big_m: f64,
        j: (f64, f64),
    ) -> Result<TailDiagnostic> {
        require_non_real(beta)?;
        if !(big_m >= 2.0 * beta.norm()) {
            return Err(Error::InvalidInput(format!("window M = {big_m} must be at least 2|β|")));
        }
        if !(j.0 <= x && x <= j.1) {
            return Err(Error::InvalidInput(format!("x = {x} must lie in J = [{}, {}]", j.0, j.1)));
        }
        let spec = self.ev.spec();
        let kt = self.ev.normalized_diag(x)?;
        let (a, b) = self.shifted(x, kt, alpha, beta);
        let total = self.kernel_cauchy(b, a)?;

        let window = big_m / kt;
        let (lo, hi) = (x - window, x + window);
        let (s_lo, s_hi) = spec.support();
        if !(lo > s_lo && hi < s_hi) {
            return Err(Error::InvalidInput(format!(
                "window [{lo}, {hi}] leaves the support; increase n or decrease M"
            )));
        }
        let tol = self.tol * total.norm().max(1.0);
        let inner = adaptive_integrate(
            |t| {
                let tc = Complex64::new(t, 0.0);
                self.ev.kernel(a, tc) * spec.density(t) / (tc - b)
            },
            lo,
            hi,
            tol,
        )?;

        let w_sup = spec.density_sup(j.0, j.1);
        let w_x = spec.density(x);
        Ok(TailDiagnostic {
            tail: ((total - inner) / kt).norm(),
            bound: 8.0 * (w_sup / (w_x * big_m)).sqrt(),
            scaled_total: total / kt,
            window,
        })
    }
}
