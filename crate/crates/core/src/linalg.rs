use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivots smaller than this are treated as singular.
pub(crate) const PIVOT_FLOOR: f64 = 1e-30;

/// Determinant of a small dense complex matrix (row-major, `k × k`) by LU
/// factorization with partial pivoting.
pub(crate) fn complex_det(mut a: Vec<Complex64>, k: usize) -> Result<Complex64> {
    debug_assert_eq!(a.len(), k * k);
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&i, &j| a[i * k + col].norm().total_cmp(&a[j * k + col].norm()))
            .unwrap();
        let pivot = a[pivot_row * k + col];
        if !(pivot.norm() >= PIVOT_FLOOR) {
            return Err(Error::SingularPivot(pivot.norm()));
        }
        if pivot_row != col {
            for j in 0..k {
                a.swap(col * k + j, pivot_row * k + j);
            }
            det = -det;
        }
        det *= pivot;
        for i in col + 1..k {
            let factor = a[i * k + col] / pivot;
            for j in col + 1..k {
                let upd = factor * a[col * k + j];
                a[i * k + j] -= upd;
            }
        }
    }
    Ok(det)
}
