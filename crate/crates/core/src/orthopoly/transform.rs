use num_complex::Complex64;

use super::weight::{jacobi_reference_normalization, Family, WeightSpec};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_integrate;

/// Stieltjes transform `G(β) = ∫ dμ(t) / (t − β)` for non-real `β`.
///
/// Chebyshev and Legendre use closed forms whose branches are fixed by
/// `G(β) ~ −1/β` at infinity. Tabulated densities are integrated exactly
/// cell by cell (the density is piecewise linear). Other Jacobi weights are
/// integrated adaptively to `tol` after the substitution `t = cos 2φ`, which
/// absorbs the endpoint singularities.
pub fn stieltjes_transform(spec: &WeightSpec, beta: Complex64, tol: f64) -> Result<Complex64> {
    if beta.im == 0.0 {
        return Err(Error::Hypothesis(format!(
            "Stieltjes transform needs a non-real argument, got {beta} (pole on the support)"
        )));
    }
    let (c, h) = spec.affine();
    match spec.family() {
        Family::Chebyshev => {
            let u = (beta - c) / h;
            let root = (u - 1.0).sqrt() * (u + 1.0).sqrt();
            Ok(-1.0 / (root * h))
        }
        Family::Legendre => {
            let u = (beta - c) / h;
            Ok(0.5 * ((u - 1.0) / (u + 1.0)).ln() / h)
        }
        Family::Jacobi { alpha, beta: b } => {
            let (alpha, b) = (*alpha, *b);
            let scale = jacobi_reference_normalization(alpha, b) * (alpha + b + 2.0).exp2();
            let integrand = |phi: f64| {
                let (s, co) = phi.sin_cos();
                let w = scale * s.powf(2.0 * alpha + 1.0) * co.powf(2.0 * b + 1.0);
                let t = c + h * (2.0 * phi).cos();
                Complex64::new(w, 0.0) / (t - beta)
            };
            adaptive_integrate(integrand, 0.0, std::f64::consts::FRAC_PI_2, tol)
        }
        Family::Table(table) => {
            let t = table.grid();
            let w = table.samples();
            let norm = spec.normalization();
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..t.len() - 1 {
                // ∫ (w0 + s(τ − t0)) / (τ − β) dτ over the cell
                let dt = t[j + 1] - t[j];
                let slope = (w[j + 1] - w[j]) / dt;
                let log_ratio = ((t[j + 1] - beta) / (t[j] - beta)).ln();
                acc += slope * dt + (w[j] + slope * (beta - t[j])) * log_ratio;
            }
            Ok(acc * norm)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_integrate;
    use approx::assert_abs_diff_eq;

    fn i(y: f64) -> Complex64 {
        Complex64::new(0.0, y)
    }

    #[test]
    fn chebyshev_at_two_i() {
        let g = stieltjes_transform(&WeightSpec::chebyshev(), i(2.0), 1e-10).unwrap();
        assert_abs_diff_eq!(g.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.im, 1.0 / 5f64.sqrt(), epsilon = 1e-15);
        // quadrature cross-check with t = cos θ
        let q = adaptive_integrate(
            |th| Complex64::new(1.0 / std::f64::consts::PI, 0.0) / (th.cos() - i(2.0)),
            0.0,
            std::f64::consts::PI,
            1e-12,
        )
        .unwrap();
        assert_abs_diff_eq!((g - q).norm(), 0.0, epsilon = 1e-11);
    }

    #[test]
    fn legendre_at_two_i() {
        let g = stieltjes_transform(&WeightSpec::legendre(), i(2.0), 1e-10).unwrap();
        assert_abs_diff_eq!(g.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.im, 0.5f64.atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.im, 0.463_647_61, epsilon = 1e-8);
    }

    #[test]
    fn real_argument_rejected() {
        let err = stieltjes_transform(&WeightSpec::legendre(), Complex64::new(0.3, 0.0), 1e-10);
        assert!(matches!(err, Err(Error::Hypothesis(_))));
    }

    #[test]
    fn decay_at_infinity() {
        let y = 1e3;
        for spec in [WeightSpec::chebyshev(), WeightSpec::legendre(), WeightSpec::jacobi(0.5, 0.5).unwrap()] {
            let g = stieltjes_transform(&spec, i(y), 1e-12).unwrap();
            assert!((g - i(1.0 / y)).norm() <= 1e-6 * g.norm(), "{spec}: {g}");
        }
        // without symmetry the mean enters at order 1/Y²
        let table = WeightSpec::table(vec![-1.0, 0.0, 1.0], vec![0.2, 1.0, 0.4]).unwrap();
        let table_mean = {
            let m0 = crate::quadrature::adaptive_integrate_real(|t| table.density(t), -1.0, 1.0, 1e-14).unwrap();
            crate::quadrature::adaptive_integrate_real(|t| t * table.density(t), -1.0, 1.0, 1e-14).unwrap() / m0
        };
        // Jacobi mean (b − a)/(a + b + 2)
        let cases = [(WeightSpec::jacobi(0.5, -0.5).unwrap(), -0.5), (table, table_mean)];
        for (spec, mean) in &cases {
            let g = stieltjes_transform(spec, i(y), 1e-12).unwrap();
            let expansion = i(1.0 / y) + mean / (y * y);
            assert!((g - expansion).norm() <= 1e-6 * g.norm(), "{spec}: {g} vs {expansion}");
        }
    }

    #[test]
    fn jacobi_matches_closed_forms() {
        for beta in [i(0.5), Complex64::new(0.4, -0.2), Complex64::new(-1.3, 0.05)] {
            let cheb = stieltjes_transform(&WeightSpec::chebyshev(), beta, 1e-12).unwrap();
            let jac = stieltjes_transform(&WeightSpec::jacobi(-0.5, -0.5).unwrap(), beta, 1e-12).unwrap();
            assert_abs_diff_eq!((cheb - jac).norm(), 0.0, epsilon = 1e-10);
            let leg = stieltjes_transform(&WeightSpec::legendre(), beta, 1e-12).unwrap();
            let jac = stieltjes_transform(&WeightSpec::jacobi(0.0, 0.0).unwrap(), beta, 1e-12).unwrap();
            assert_abs_diff_eq!((leg - jac).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn uniform_table_matches_legendre() {
        let t: Vec<f64> = (0..41).map(|k| -1.0 + k as f64 / 20.0).collect();
        let spec = WeightSpec::table(t, vec![3.0; 41]).unwrap();
        for beta in [i(2.0), Complex64::new(0.3, 0.01), Complex64::new(-0.7, -0.4)] {
            let a = stieltjes_transform(&spec, beta, 1e-12).unwrap();
            let b = stieltjes_transform(&WeightSpec::legendre(), beta, 1e-12).unwrap();
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn shifted_support() {
        let spec = WeightSpec::chebyshev().with_support(2.0, 6.0).unwrap();
        let beta = Complex64::new(3.0, 1.0);
        let g = stieltjes_transform(&spec, beta, 1e-12).unwrap();
        // t = 4 + 2 cos θ, dμ = dθ/π
        let q = adaptive_integrate(
            |th| Complex64::new(1.0 / std::f64::consts::PI, 0.0) / (4.0 + 2.0 * th.cos() - beta),
            0.0,
            std::f64::consts::PI,
            1e-13,
        )
        .unwrap();
        assert_abs_diff_eq!((g - q).norm(), 0.0, epsilon = 1e-11);
    }
}
