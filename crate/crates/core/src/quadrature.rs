//! Gauss rules from recurrence coefficients and adaptive Gauss–Kronrod integration.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthopoly::RecurrenceTable;

/// Sweep budget per eigenvalue for the implicit QL iteration.
const MAX_QL_SWEEPS: usize = 60;

/// Maximum bisection depth of [`adaptive_integrate`].
pub const MAX_ADAPTIVE_DEPTH: usize = 50;

/// Hard cap on the number of Gauss–Kronrod panels evaluated by one adaptive call.
const MAX_PANELS: usize = 1 << 21;

/// A positive quadrature rule for a probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds a rule after checking positivity, unit mass and strictly increasing nodes.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "rule needs matching non-empty node/weight vectors (got {} and {})",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::InvalidInput(format!("non-positive quadrature weight {w}")));
        }
        if nodes.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidInput("quadrature nodes must be strictly increasing".into()));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("rule mass {mass} differs from 1")));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest polynomial degree integrated exactly, `2m − 1`.
    pub fn degree_exact(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// `Σ w_i f(t_i)`, failing on the first non-finite sample.
    pub fn integrate<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(t);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite { node: t, value: v });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Real-valued convenience wrapper around [`QuadratureRule::integrate`].
    pub fn integrate_real<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        self.integrate(|t| Complex64::new(f(t), 0.0)).map(|z| z.re)
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each normalized eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub first_components: Vec<f64>,
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, accumulating only the
/// first row of the eigenvector matrix.
///
/// Eigenvalues are returned in ascending order. The sign of each first
/// component is whatever the rotations produce; only its square is meaningful
/// for Gauss weights.
pub fn tridiag_eigen(diag: &[f64], offdiag: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty tridiagonal matrix".into()));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::InvalidInput(format!(
            "off-diagonal length {} must be diagonal length {} minus one",
            offdiag.len(),
            n
        )));
    }
    if let Some(e) = offdiag.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::InvalidInput(format!("off-diagonal entry {e} is not positive")));
    }

    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::EigenNoConvergence { index: l, sweeps: MAX_QL_SWEEPS });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    Ok(TridiagEigen {
        values: order.iter().map(|&i| d[i]).collect(),
        first_components: order.iter().map(|&i| z[i]).collect(),
    })
}

/// The `m`-point Gauss rule of the measure whose Jacobi matrix is given by `rec`.
pub fn golub_welsch(rec: &RecurrenceTable, m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::InvalidInput("Gauss rule needs at least one node".into()));
    }
    if m > rec.depth() {
        return Err(Error::InsufficientDepth { required: m, available: rec.depth() });
    }
    let eig = tridiag_eigen(&rec.a()[..m], &rec.b()[..m - 1])?;
    let mut weights: Vec<f64> = eig.first_components.iter().map(|v| v * v).collect();
    // Rotations preserve the norm of the first row only up to rounding.
    let mass: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= mass);
    QuadratureRule::new(eig.values, weights)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (weights sum to 2), by
/// Newton iteration on the classical Legendre recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // p1 = P_m(x), p0 = P_{m-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = mf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss 7-point weights, paired with XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    kronrod: Complex64,
    error: f64,
    abs_mass: f64,
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Panel
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_mass = WGK[7] * fc.norm();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * WGK[j];
        abs_mass += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    Panel {
        kronrod: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
        abs_mass: abs_mass * half.abs(),
    }
}

struct Adaptive<'f, F> {
    f: &'f F,
    tol_density: f64,
    panels: usize,
    failed: bool,
}

impl<F> Adaptive<'_, F>
where
    F: Fn(f64) -> Complex64,
{
    fn run(&mut self, a: f64, b: f64, depth: usize) -> (Complex64, f64) {
        let panel = gk15(self.f, a, b);
        self.panels += 1;
        let local_tol = self.tol_density * (b - a).abs();
        let floor = 50.0 * f64::EPSILON * panel.abs_mass;
        if panel.error <= local_tol.max(floor) {
            return (panel.kronrod, panel.error);
        }
        if depth >= MAX_ADAPTIVE_DEPTH || self.panels >= MAX_PANELS {
            self.failed = true;
            return (panel.kronrod, panel.error);
        }
        let mid = 0.5 * (a + b);
        let (l, el) = self.run(a, mid, depth + 1);
        let (r, er) = self.run(mid, b, depth + 1);
        (l + r, el + er)
    }
}

/// Recursive bisection with the 7/15-point Gauss–Kronrod pair.
///
/// The tolerance is distributed over subintervals in proportion to their
/// width, so a converged result carries estimated absolute error `≤ tol`.
pub fn adaptive_integrate<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput("integration limits must be finite".into()));
    }
    if lo == hi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut state = Adaptive { f: &f, tol_density: tol / (hi - lo).abs(), panels: 0, failed: false };
    let (value, error) = state.run(lo, hi, 0);
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite { node: f64::NAN, value });
    }
    if state.failed && error > tol {
        return Err(Error::ToleranceNotMet { estimate: value, achieved: error });
    }
    Ok(value)
}

/// [`adaptive_integrate`] for real integrands.
pub fn adaptive_integrate_real<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    adaptive_integrate(|t| Complex64::new(f(t), 0.0), lo, hi, tol).map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn one_by_one_matrix() {
        let eig = tridiag_eigen(&[0.0], &[]).unwrap();
        assert_eq!(eig.values, vec![0.0]);
        assert_eq!(eig.first_components.iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![1.0]);
    }

    #[test]
    fn two_by_two_jacobi_matrix() {
        let eig = tridiag_eigen(&[0.0, 0.0], &[1.0 / 3f64.sqrt()]).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(eig.values[0], -r, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], r, epsilon = 1e-14);
        for v in eig.first_components {
            assert_abs_diff_eq!(v.abs(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        }
    }

    #[test]
    fn chebyshev_three_by_three() {
        let eig = tridiag_eigen(&[0.0; 3], &[std::f64::consts::FRAC_1_SQRT_2, 0.5]).unwrap();
        let h = 3f64.sqrt() / 2.0;
        for (got, want) in eig.values.iter().zip([-h, 0.0, h]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn eigen_rejects_bad_shapes() {
        assert!(tridiag_eigen(&[], &[]).is_err());
        assert!(tridiag_eigen(&[0.0, 0.0], &[]).is_err());
        assert!(tridiag_eigen(&[0.0, 0.0], &[0.0]).is_err());
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial_roots() {
        // Random Jacobi matrix; check det(T - λI) = 0 via the Sturm recurrence.
        let diag = [0.3, -0.1, 0.7, 0.2, -0.5, 0.05];
        let off = [0.4, 0.9, 0.25, 0.6, 0.33];
        let eig = tridiag_eigen(&diag, &off).unwrap();
        for &lam in &eig.values {
            let (mut q0, mut q1) = (1.0, diag[0] - lam);
            for i in 1..diag.len() {
                let q2 = (diag[i] - lam) * q1 - off[i - 1] * off[i - 1] * q0;
                q0 = q1;
                q1 = q2;
            }
            assert!(q1.abs() < 1e-12, "residual {q1} at {lam}");
        }
        let total: f64 = eig.first_components.iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn gauss_legendre_is_exact() {
        let (x, w) = gauss_legendre(5);
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        let m8: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert_abs_diff_eq!(m8, 2.0 / 9.0, epsilon = 1e-14);
        let (x1, w1) = gauss_legendre(1);
        assert_eq!((x1[0], w1[0]), (0.0, 2.0));
    }

    #[test]
    fn rule_rejects_invalid_weights() {
        assert!(QuadratureRule::new(vec![0.0, 1.0], vec![0.5, 0.4]).is_err());
        assert!(QuadratureRule::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(QuadratureRule::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn integrate_reports_non_finite_node() {
        let rule = QuadratureRule::new(vec![-0.5, 0.5], vec![0.5, 0.5]).unwrap();
        match rule.integrate(|t| c(1.0 / (t - 0.5))) {
            Err(Error::NonFinite { node, .. }) => assert_eq!(node, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn adaptive_constant() {
        let v = adaptive_integrate(|_| c(1.0), 0.0, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn adaptive_sinc_window() {
        // Oracle: Si(x) = π/2 − f(x)cos x − g(x)sin x with the asymptotic
        // series f(x) ~ (1/x)Σ(−1)^k (2k)!/x^{2k}; at x = 50π, sin x = 0.
        let x = 50.0 * std::f64::consts::PI;
        let f_aux: f64 = (0..6)
            .map(|k| {
                let fact: f64 = (1..=2 * k).map(|j| j as f64).product();
                (-1f64).powi(k as i32) * fact / x.powi(2 * k as i32 + 1)
            })
            .sum();
        let expected = 1.0 - 2.0 / std::f64::consts::PI * f_aux;
        let v = adaptive_integrate_real(
            |s| if s == 0.0 { 1.0 } else { (std::f64::consts::PI * s).sin() / (std::f64::consts::PI * s) },
            -50.0,
            50.0,
            1e-8,
        )
        .unwrap();
        assert_abs_diff_eq!(v, expected, epsilon = 1e-8);
    }

    #[test]
    fn adaptive_lorentzian() {
        let v = adaptive_integrate_real(|s| 1.0 / (s * s + 1.0), -100.0, 100.0, 1e-8).unwrap();
        assert_abs_diff_eq!(v, 2.0 * 100f64.atan(), epsilon = 1e-8);
    }

    #[test]
    fn adaptive_reports_failure_with_estimate() {
        match adaptive_integrate(|t| c(1.0 / t.abs().sqrt().max(1e-300).powi(3)), -1.0, 1.0, 1e-10) {
            Err(Error::ToleranceNotMet { achieved, .. }) => assert!(achieved > 1e-10),
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(adaptive_integrate(|_| c(1.0), 0.0, 1.0, 0.0).is_err());
    }
}
