//! Averages of ratios of random characteristic polynomials for orthogonal
//! polynomial ensembles.
//!
//! For a probability measure `μ` on the real line and `n` particles distributed
//! with density proportional to `Δ(x)² ∏ dμ(x_i)`, this crate evaluates
//!
//! ```text
//! ⟨ ∏_j D_n(α_j) / D_n(β_j) ⟩,   D_n(z) = ∏_i (z − x_i)
//! ```
//!
//! exactly through a `k × k` determinant of two-point functions built from the
//! Christoffel–Darboux kernel, together with its bulk scaling limit expressed
//! through the sine kernel. Brute-force tensor quadrature and a Metropolis
//! sampler provide independent ground truth.
//!
//! Module map:
//! - [`quadrature`]: Golub–Welsch Gauss rules and adaptive Gauss–Kronrod.
//! - [`orthopoly`]: weight catalog, recurrence coefficients, Stieltjes transforms.
//! - [`kernel`]: reproducing kernel `K_n`, its normalized diagonal and bulk scaling.
//! - [`cauchy`]: Cauchy transforms and the two-point function `W_n`.
//! - [`ratios`]: the determinantal ratio formula and its scaling limit.
//! - [`limits`]: sine kernel and the limiting two-point function.
//! - [`oracle`]: brute-force and Monte Carlo references.

pub mod cauchy;
pub mod error;
pub mod kernel;
pub mod limits;
mod linalg;
pub mod oracle;
pub mod orthopoly;
pub mod quadrature;
pub mod ratios;

pub use num_complex::Complex64;

pub use cauchy::{PoleMethod, TailDiagnostic, TwoPointContext};
pub use error::{Error, Result};
pub use kernel::KernelEvaluator;
pub use limits::LimitParams;
pub use oracle::{EnsembleDensity, McmcEstimate, McmcRun};
pub use orthopoly::{Family, RecurrenceTable, WeightSpec};
pub use quadrature::QuadratureRule;
pub use ratios::RatioQuery;

/// Default absolute tolerance for adaptive integration.
pub const DEFAULT_TOL: f64 = 1e-10;
