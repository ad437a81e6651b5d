//! Exact Gaussian moments by Wick pairing enumeration.

mod hermitian;
mod oracle;
pub mod pairing;
mod tensor;

pub use hermitian::{face_histogram, hermitian_moment, hermitian_moment_at, hermitian_patterns, TraceWord};
pub use oracle::{hermitian_oracle, tensor_oracle, ORACLE_BUDGET};
pub use tensor::{tensor_moment, tensor_patterns, TensorContraction};

use crate::scalar::GaussRat;
use crate::series::{Monomial, Series, TruncSpec};

/// One labelled pairing together with its weight `N^{n_exp}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WickPattern {
    /// Pairs of slots (matrix entries) or `(T, T̄)` indices.
    pub pairing: Vec<(usize, usize)>,
    pub n_exp: i32,
}

impl WickPattern {
    pub fn weight(&self) -> Series {
        Series::from_term(Monomial::n_pow(self.n_exp), GaussRat::from_int(1), TruncSpec::wide())
    }
}
