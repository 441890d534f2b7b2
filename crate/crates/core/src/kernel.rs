//! The reproducing (Christoffel–Darboux) kernel `K_n(x, y) = Σ_{k<n} p_k(x) p_k(y)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthopoly::{recurrence, RecurrenceTable, WeightSpec};

/// Relative separation below which the Christoffel–Darboux quotient is
/// replaced by the direct sum.
const CD_NEAR_DIAGONAL: f64 = 1e-8;

/// Kernel of order `n` for a fixed measure.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    spec: WeightSpec,
    rec: RecurrenceTable,
    n: usize,
}

impl KernelEvaluator {
    /// Builds the recurrence table to the depth the kernel needs (a small
    /// margin above `n` so Gauss rules of order `⌈n/2⌉ + 2` are available).
    pub fn new(spec: WeightSpec, n: usize) -> Result<Self> {
        let rec = recurrence(&spec, n + 4)?;
        Self::with_recurrence(spec, rec, n)
    }

    pub fn with_recurrence(spec: WeightSpec, rec: RecurrenceTable, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("kernel order n must be at least 1".into()));
        }
        if n >= rec.depth() {
            return Err(Error::InsufficientDepth { required: n + 1, available: rec.depth() });
        }
        Ok(Self { spec, rec, n })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn recurrence(&self) -> &RecurrenceTable {
        &self.rec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `Σ_{k=0}^{n−1} p_k(x) p_k(y)`.
    pub fn kernel_sum(&self, x: Complex64, y: Complex64) -> Complex64 {
        let px = self.rec.eval_orthonormal(self.n - 1, x).expect("depth checked at construction");
        let py = self.rec.eval_orthonormal(self.n - 1, y).expect("depth checked at construction");
        px.iter().zip(&py).map(|(a, b)| a * b).sum()
    }

    /// Christoffel–Darboux form
    /// `(γ_{n−1}/γ_n)(p_n(x)p_{n−1}(y) − p_{n−1}(x)p_n(y)) / (x − y)`,
    /// falling back to the sum near the diagonal.
    pub fn kernel_cd(&self, x: Complex64, y: Complex64) -> Complex64 {
        if (x - y).norm() < CD_NEAR_DIAGONAL * (1.0 + x.norm()) {
            return self.kernel_sum(x, y);
        }
        let (xm, xn) = self.rec.eval_top_pair(self.n, x).expect("depth checked at construction");
        let (ym, yn) = self.rec.eval_top_pair(self.n, y).expect("depth checked at construction");
        let ratio = self.rec.b()[self.n - 1];
        ratio * (xn * ym - xm * yn) / (x - y)
    }

    /// The production evaluation path (Christoffel–Darboux).
    pub fn kernel(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.kernel_cd(x, y)
    }

    /// `K_n(x, x)` for real `x`, a sum of squares.
    pub fn diagonal(&self, x: f64) -> f64 {
        let p = self.rec.eval_orthonormal_real(self.n - 1, x).expect("depth checked at construction");
        p.iter().map(|v| v * v).sum()
    }

    /// `K̃_n(x, x) = w(x) K_n(x, x)`, the local particle density.
    pub fn normalized_diag(&self, x: f64) -> Result<f64> {
        let w = self.spec.density(x);
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::ZeroDensity(x));
        }
        Ok(w * self.diagonal(x))
    }

    /// `K_n(x + a/K̃, x + b/K̃) / K_n(x, x)` with `K̃ = K̃_n(x, x)`.
    pub fn scaled_kernel(&self, x: f64, a: Complex64, b: Complex64) -> Result<Complex64> {
        let kt = self.normalized_diag(x)?;
        let xc = Complex64::new(x, 0.0);
        Ok(self.kernel(xc + a / kt, xc + b / kt) / self.diagonal(x))
    }
}
