//! Orthonormal polynomials of a probability measure on the real line.
//!
//! A [`WeightSpec`] describes the measure (catalog Jacobi-type family on an
//! interval, or a tabulated density). A [`RecurrenceTable`] holds the Jacobi
//! coefficients `a_k`, `b_k` of the three-term recurrence
//!
//! ```text
//! b_{k+1} p_{k+1}(z) = (z − a_{k+1}) p_k(z) − b_k p_{k−1}(z),   p_0 = 1,
//! ```
//!
//! either in closed form ([`catalog_recurrence`]) or from a discretization of
//! the density ([`stieltjes_recurrence`]).

mod recurrence;
mod transform;
mod weight;

pub use recurrence::{catalog_recurrence, recurrence, stieltjes_recurrence, RecurrenceTable};
pub use transform::stieltjes_transform;
pub use weight::{Family, TableDensity, WeightSpec};

