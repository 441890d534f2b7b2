//! Shared fixtures for the criterion benches.

use opke::{Complex64, RatioQuery, Result, TwoPointContext, WeightSpec};

/// Orders the benches sweep over.
pub const ORDERS: [usize; 3] = [16, 64, 256];

pub fn weights() -> Vec<(&'static str, WeightSpec)> {
    vec![("chebyshev", WeightSpec::chebyshev()), ("jacobi", WeightSpec::jacobi(0.5, -0.3).expect("valid parameters"))]
}

pub fn context(spec: &WeightSpec, n: usize) -> Result<TwoPointContext> {
    TwoPointContext::for_spec(spec.clone(), n)
}

/// Two real shifts and two shifts on either side of the axis.
pub fn k2_query() -> RatioQuery {
    RatioQuery::new(
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.4, 0.0)],
        vec![Complex64::new(0.1, 1.0), Complex64::new(-0.2, -0.7)],
    )
    .expect("distinct shifts")
}
