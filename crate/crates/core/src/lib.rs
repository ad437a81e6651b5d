//! Exact verification of the quartic melonic tensor model identities.
//!
//! Everything is computed over ℚ(i) as truncated series in `√λ`, `√N`,
//! the coupling constants and a residue variable `z`.

pub mod bilinear;
pub mod decomposition;
pub mod error;
pub mod graphs;
pub mod matrix;
pub mod scalar;
pub mod series;
pub mod wick;

pub use error::{Error, Result};
pub use scalar::GaussRat;
pub use series::{DegreeSlack, DiffOp, Monomial, Series, TimeExps, TimeVar, TruncSpec};
