//! Truncated multivariate Laurent series over ℚ(i) and the differential
//! operators acting on them.
//!
//! The variables are `√λ`, `√N`, `√2`, a Laurent variable `z` and the
//! coupling constants `t^c_p`. Every [`Series`] carries the [`TruncSpec`]
//! that decides which monomials survive arithmetic.

mod diffop;
mod monomial;
#[allow(clippy::module_inception)]
mod series;
mod trunc;

pub use diffop::DiffOp;
pub use monomial::{normalize_s2, Monomial, TimeExps, TimeVar};
pub(crate) use series::two_pow;
pub use series::Series;
pub use trunc::{DegreeSlack, TruncSpec};
