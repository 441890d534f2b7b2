use num_complex::Complex64;

use super::weight::{jacobi_reference_normalization, Family, WeightSpec};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Jacobi coefficients of the orthonormal family, `a_1..a_N` and `b_1..b_N`
/// (stored zero-based).
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl RecurrenceTable {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidInput(format!(
                "recurrence needs equally many a and b coefficients ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite diagonal recurrence coefficient".into()));
        }
        if let Some(v) = b.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!("off-diagonal coefficient {v} is not positive")));
        }
        Ok(Self { a, b })
    }

    pub fn depth(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n >= self.depth() {
            return Err(Error::InsufficientDepth { required: n + 1, available: self.depth() });
        }
        Ok(())
    }

    /// Leading coefficient `γ_n = 1 / (b_1 ⋯ b_n)` of `p_n`.
    pub fn leading_coeff(&self, n: usize) -> Result<f64> {
        self.check_order(n)?;
        Ok(1.0 / self.b[..n].iter().product::<f64>())
    }

    /// `γ_{n−1} / γ_n`, which is just `b_n`; avoids forming `γ_n` itself.
    pub fn leading_coeff_ratio(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidInput("ratio γ_{n-1}/γ_n needs n ≥ 1".into()));
        }
        self.check_order(n)?;
        Ok(self.b[n - 1])
    }

    /// `p_0(z), …, p_n(z)` by forward recurrence.
    pub fn eval_orthonormal(&self, n: usize, z: Complex64) -> Result<Vec<Complex64>> {
        self.check_order(n)?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(Complex64::new(1.0, 0.0));
        let mut prev = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let cur = out[k];
            let back = if k == 0 { 0.0 } else { self.b[k - 1] };
            let next = ((z - self.a[k]) * cur - back * prev) / self.b[k];
            prev = cur;
            out.push(next);
        }
        Ok(out)
    }

    /// `(p_{n−1}(z), p_n(z))` without storing the whole sequence; `n ≥ 1`.
    pub fn eval_top_pair(&self, n: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
        if n == 0 {
            return Err(Error::InvalidInput("top pair needs n ≥ 1".into()));
        }
        self.check_order(n)?;
        let mut prev = Complex64::new(0.0, 0.0);
        let mut cur = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let back = if k == 0 { 0.0 } else { self.b[k - 1] };
            let next = ((z - self.a[k]) * cur - back * prev) / self.b[k];
            prev = cur;
            cur = next;
        }
        Ok((prev, cur))
    }

    /// Real-argument evaluation of `p_0..p_n`.
    pub fn eval_orthonormal_real(&self, n: usize, x: f64) -> Result<Vec<f64>> {
        self.check_order(n)?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(1.0);
        let mut prev = 0.0;
        for k in 0..n {
            let cur = out[k];
            let back = if k == 0 { 0.0 } else { self.b[k - 1] };
            let next = ((x - self.a[k]) * cur - back * prev) / self.b[k];
            prev = cur;
            out.push(next);
        }
        Ok(out)
    }

    /// First `depth` coefficient pairs.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        if depth > self.depth() {
            return Err(Error::InsufficientDepth { required: depth, available: self.depth() });
        }
        Ok(Self { a: self.a[..depth].to_vec(), b: self.b[..depth].to_vec() })
    }
}

/// Closed-form recurrence coefficients of a catalog family to depth `depth`.
pub fn catalog_recurrence(spec: &WeightSpec, depth: usize) -> Result<RecurrenceTable> {
    if depth == 0 {
        return Err(Error::InvalidInput("recurrence depth must be at least 1".into()));
    }
    let (a_ref, b_ref): (Vec<f64>, Vec<f64>) = match spec.family() {
        Family::Chebyshev => (
            vec![0.0; depth],
            (1..=depth).map(|k| if k == 1 { std::f64::consts::FRAC_1_SQRT_2 } else { 0.5 }).collect(),
        ),
        Family::Legendre => (
            vec![0.0; depth],
            (1..=depth)
                .map(|k| {
                    let k = k as f64;
                    k / (4.0 * k * k - 1.0).sqrt()
                })
                .collect(),
        ),
        Family::Jacobi { alpha, beta } => {
            (0..depth).map(|k| jacobi_coefficients(*alpha, *beta, k)).unzip()
        }
        Family::Table(_) => {
            return Err(Error::InvalidInput(
                "table densities have no closed-form recurrence; use stieltjes_recurrence".into(),
            ))
        }
    };
    let (c, h) = spec.affine();
    RecurrenceTable::new(
        a_ref.into_iter().map(|a| c + h * a).collect(),
        b_ref.into_iter().map(|b| h * b).collect(),
    )
}

/// `(a_{k+1}, b_{k+1})` of the normalized Jacobi weight on `[-1, 1]`.
fn jacobi_coefficients(alpha: f64, beta: f64, k: usize) -> (f64, f64) {
    let s = alpha + beta;
    let kf = k as f64;
    let a = if k == 0 {
        (beta - alpha) / (s + 2.0)
    } else {
        let t = 2.0 * kf + s;
        (beta * beta - alpha * alpha) / (t * (t + 2.0))
    };
    let n = kf + 1.0;
    let t = 2.0 * n + s;
    let b2 = if k == 0 {
        // (s + 1) cancelled analytically; it vanishes for the arcsine case
        4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s) * (2.0 + s) * (3.0 + s))
    } else {
        4.0 * n * (n + alpha) * (n + beta) * (n + s) / (t * t * (t + 1.0) * (t - 1.0))
    };
    (a, b2.sqrt())
}

/// Discrete approximation of `μ`: nodes and positive weights (mass ≈ 1),
/// exact for polynomials up to `poly_degree` on tables and spectrally
/// accurate on catalog families.
pub(crate) fn discretize(spec: &WeightSpec, m: usize, poly_degree: usize) -> (Vec<f64>, Vec<f64>) {
    match spec.family() {
        Family::Table(table) => {
            let t = table.grid();
            let w = table.samples();
            let cells = t.len() - 1;
            let per_cell = m.div_ceil(cells).max(poly_degree / 2 + 1);
            let (gx, gw) = gauss_legendre(per_cell);
            let mut nodes = Vec::with_capacity(cells * per_cell);
            let mut weights = Vec::with_capacity(cells * per_cell);
            for j in 0..cells {
                let half = 0.5 * (t[j + 1] - t[j]);
                let mid = 0.5 * (t[j + 1] + t[j]);
                for (x, gwi) in gx.iter().zip(&gw) {
                    let s = 0.5 * (x + 1.0);
                    let density = w[j] * (1.0 - s) + w[j + 1] * s;
                    let weight = spec.normalization() * density * gwi * half;
                    if weight > 0.0 {
                        nodes.push(mid + half * x);
                        weights.push(weight);
                    }
                }
            }
            (nodes, weights)
        }
        _ => {
            // u = cos 2φ turns (1−u)^α (1+u)^β du into
            // C 2^{α+β+2} sin^{2α+1}φ cos^{2β+1}φ dφ on [0, π/2].
            let (alpha, beta) = spec.jacobi_exponents().unwrap();
            let (c, h) = spec.affine();
            let scale = jacobi_reference_normalization(alpha, beta) * (alpha + beta + 2.0).exp2();
            let quarter = std::f64::consts::FRAC_PI_4;
            let (gx, gw) = gauss_legendre(m);
            let mut pairs: Vec<(f64, f64)> = gx
                .iter()
                .zip(&gw)
                .map(|(x, gwi)| {
                    let phi = quarter * (x + 1.0);
                    let (s, co) = phi.sin_cos();
                    let weight =
                        scale * s.powf(2.0 * alpha + 1.0) * co.powf(2.0 * beta + 1.0) * gwi * quarter;
                    (c + h * (2.0 * phi).cos(), weight)
                })
                .collect();
            pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
            pairs.into_iter().unzip()
        }
    }
}

/// Recurrence coefficients by the discretized Stieltjes procedure.
///
/// `m` is the minimum size of the discrete approximation of `μ` and must be at
/// least `4 · depth`. Tabulated densities get enough Gauss–Legendre points per
/// grid cell to integrate `t^{2·depth}` against the piecewise-linear density exactly.
pub fn stieltjes_recurrence(spec: &WeightSpec, depth: usize, m: usize) -> Result<RecurrenceTable> {
    if depth == 0 {
        return Err(Error::InvalidInput("recurrence depth must be at least 1".into()));
    }
    if m < 4 * depth {
        return Err(Error::InvalidInput(format!(
            "discretization size {m} must be at least 4 × depth = {}",
            4 * depth
        )));
    }
    let (nodes, weights) = discretize(spec, m, 2 * depth);
    let (lo, hi) = spec.support();
    let floor = 1e-12 * (hi - lo);

    let mass: f64 = weights.iter().sum();
    let mut prev = vec![0.0; nodes.len()];
    let mut cur = vec![1.0 / mass.sqrt(); nodes.len()];
    let mut next = vec![0.0; nodes.len()];
    let (mut a, mut b) = (Vec::with_capacity(depth), Vec::with_capacity(depth));
    let mut b_prev = 0.0;
    for step in 1..=depth {
        let ak: f64 = nodes.iter().zip(&weights).zip(&cur).map(|((t, w), q)| w * t * q * q).sum();
        let mut norm2 = 0.0;
        for i in 0..nodes.len() {
            next[i] = (nodes[i] - ak) * cur[i] - b_prev * prev[i];
            norm2 += weights[i] * next[i] * next[i];
        }
        let bk = norm2.sqrt();
        if !(bk > floor) {
            return Err(Error::LostPositivity { step, achievable: step - 1 });
        }
        next.iter_mut().for_each(|v| *v /= bk);
        a.push(ak);
        b.push(bk);
        b_prev = bk;
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    RecurrenceTable::new(a, b)
}

/// Closed form for catalog families, discretized Stieltjes otherwise.
pub fn recurrence(spec: &WeightSpec, depth: usize) -> Result<RecurrenceTable> {
    if spec.is_catalog() {
        catalog_recurrence(spec, depth)
    } else {
        stieltjes_recurrence(spec, depth, (4 * depth).max(200))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_tables_close(x: &RecurrenceTable, y: &RecurrenceTable, tol: f64) {
        assert_eq!(x.depth(), y.depth());
        for k in 0..x.depth() {
            assert_abs_diff_eq!(x.a()[k], y.a()[k], epsilon = tol);
            assert_abs_diff_eq!(x.b()[k], y.b()[k], epsilon = tol);
        }
    }

    #[test]
    fn chebyshev_catalog() {
        let rec = catalog_recurrence(&WeightSpec::chebyshev(), 3).unwrap();
        assert_eq!(rec.a(), &[0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(rec.b()[0], 0.707_106_78, epsilon = 1e-8);
        assert_eq!(&rec.b()[1..], &[0.5, 0.5]);
    }

    #[test]
    fn legendre_catalog_and_jacobi_zero() {
        let leg = catalog_recurrence(&WeightSpec::legendre(), 2).unwrap();
        assert_abs_diff_eq!(leg.b()[0], 0.577_350_27, epsilon = 1e-8);
        assert_abs_diff_eq!(leg.b()[1], 0.516_397_78, epsilon = 1e-8);
        let jac = catalog_recurrence(&WeightSpec::jacobi(0.0, 0.0).unwrap(), 2).unwrap();
        assert_tables_close(&leg, &jac, 1e-15);
        let cheb = catalog_recurrence(&WeightSpec::chebyshev(), 10).unwrap();
        let jac = catalog_recurrence(&WeightSpec::jacobi(-0.5, -0.5).unwrap(), 10).unwrap();
        assert_tables_close(&cheb, &jac, 1e-15);
    }

    #[test]
    fn table_has_no_catalog() {
        let spec = WeightSpec::table(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(catalog_recurrence(&spec, 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn affine_support_moves_coefficients() {
        let spec = WeightSpec::legendre().with_support(1.0, 5.0).unwrap();
        let rec = catalog_recurrence(&spec, 3).unwrap();
        let base = catalog_recurrence(&WeightSpec::legendre(), 3).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(rec.a()[k], 3.0, epsilon = 1e-15);
            assert_abs_diff_eq!(rec.b()[k], 2.0 * base.b()[k], epsilon = 1e-15);
        }
    }

    #[test]
    fn stieltjes_matches_chebyshev_catalog() {
        let spec = WeightSpec::chebyshev();
        let s = stieltjes_recurrence(&spec, 3, 200).unwrap();
        assert_tables_close(&s, &catalog_recurrence(&spec, 3).unwrap(), 1e-10);
    }

    #[test]
    fn stieltjes_on_uniform_table_matches_legendre() {
        let t: Vec<f64> = (0..400).map(|i| -1.0 + 2.0 * i as f64 / 399.0).collect();
        let spec = WeightSpec::table(t, vec![1.0; 400]).unwrap();
        let s = stieltjes_recurrence(&spec, 2, 200).unwrap();
        assert_tables_close(&s, &catalog_recurrence(&WeightSpec::legendre(), 2).unwrap(), 1e-8);
    }

    #[test]
    fn first_step_is_mean_and_standard_deviation() {
        // Triangular density on [0, 2]: mean 1, variance 1/6.
        let spec = WeightSpec::table(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        let s = stieltjes_recurrence(&spec, 1, 4).unwrap();
        assert_abs_diff_eq!(s.a()[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.b()[0], (1.0f64 / 6.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn stieltjes_guards() {
        let spec = WeightSpec::chebyshev();
        assert!(stieltjes_recurrence(&spec, 10, 39).is_err());
        // A two-atom-like discretization is exhausted after a few steps.
        let narrow = WeightSpec::table(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        match stieltjes_recurrence(&narrow, 300, 1200) {
            Ok(_) => {}
            Err(Error::LostPositivity { achievable, .. }) => assert!(achievable < 300),
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn eval_examples() {
        let cheb = catalog_recurrence(&WeightSpec::chebyshev(), 4).unwrap();
        let p = cheb.eval_orthonormal(2, Complex64::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(p[0].re, 1.0);
        assert_abs_diff_eq!(p[1].re, 0.0);
        assert_abs_diff_eq!(p[2].re, -std::f64::consts::SQRT_2, epsilon = 1e-14);
        let leg = catalog_recurrence(&WeightSpec::legendre(), 4).unwrap();
        let p = leg.eval_orthonormal(2, Complex64::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(p[1].re, 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(p[2].re, 5f64.sqrt(), epsilon = 1e-14);
        assert_eq!(leg.eval_orthonormal(0, Complex64::new(7.0, 1.0)).unwrap().len(), 1);
        assert!(leg.eval_orthonormal(4, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn leading_coefficients() {
        let cheb = catalog_recurrence(&WeightSpec::chebyshev(), 4).unwrap();
        assert_eq!(cheb.leading_coeff(0).unwrap(), 1.0);
        assert_abs_diff_eq!(cheb.leading_coeff(2).unwrap(), 2.0 * std::f64::consts::SQRT_2, epsilon = 1e-14);
        let leg = catalog_recurrence(&WeightSpec::legendre(), 4).unwrap();
        assert_abs_diff_eq!(leg.leading_coeff(1).unwrap(), 3f64.sqrt(), epsilon = 1e-14);
        assert!(leg.leading_coeff(4).is_err());
        assert_eq!(leg.leading_coeff_ratio(2).unwrap(), leg.b()[1]);
    }
}
