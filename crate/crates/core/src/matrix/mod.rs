//! The Hermitian one-matrix model as a formal series in its couplings.
//!
//! `Z[t] = ⟨exp(−N Σ_p t_p Tr M^p)⟩` with the Gaussian weight `e^{−(N/2)Tr M²}`
//! normalized to one, so the coefficient of `t^α` is
//! `∏_p (−N)^{α_p}/α_p! · ⟨∏_p (Tr M^p)^{α_p}⟩`.

mod free_energy;
mod orthopoly;
mod virasoro;

pub use free_energy::{planar_two_point, quartic_free_energy, quartic_partition_function, tutte_closed_form};
pub use orthopoly::{
    charpoly_expectation, eigenvalue_partition_function, kn_identity_residual, measure_moment,
    orthogonality_residual, KnResidual, OrthoPoly,
};
pub use virasoro::{virasoro_operator, virasoro_residual};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::scalar::GaussRat;
use crate::series::{Monomial, Series, TimeExps, TimeVar, TruncSpec};
use crate::wick::{hermitian_moment, hermitian_moment_at, TraceWord};

/// How `N` enters: as the formal variable `√N²`, or as a fixed matrix size
/// that also sets the Gaussian scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum NMode {
    Symbolic,
    Concrete(u32),
}

/// A 1-matrix model whose couplings are the time variables `t[color,p]`
/// (or `tt[color,p]` for `set = 1`).
#[derive(Clone, Debug)]
pub struct OneMatrixModel {
    pub color: u8,
    pub set: u8,
    pub n_mode: NMode,
    pub trunc: TruncSpec,
}

impl OneMatrixModel {
    pub fn new(trunc: TruncSpec) -> Self {
        OneMatrixModel { color: 1, set: 0, n_mode: NMode::Symbolic, trunc }
    }

    pub fn with_color(mut self, color: u8) -> Self {
        self.color = color;
        self
    }

    pub fn with_set(mut self, set: u8) -> Self {
        self.set = set;
        self
    }

    pub fn with_n_mode(mut self, n_mode: NMode) -> Self {
        self.n_mode = n_mode;
        self
    }

    pub fn var(&self, p: u8) -> TimeVar {
        TimeVar { set: self.set, color: self.color, p }
    }

    /// Exponent vectors `α` allowed by the truncation, with `Σ p α_p` even.
    fn exponent_vectors(&self) -> Vec<Vec<u32>> {
        let tr = &self.trunc;
        let mut deg_bound = tr.max_time_deg + tr.slack.total_per_hl * tr.max_hl;
        if let Some(c) = tr.slack.color_per_hl {
            deg_bound = deg_bound.min(tr.max_time_deg + c * tr.max_hl);
        }
        let weight_bound = tr.max_weight.unwrap_or(u32::MAX);
        let mut out = Vec::new();
        let mut alpha = vec![0u32; tr.p_max as usize + 1];
        fn rec(p: usize, deg: u32, weight: u32, alpha: &mut Vec<u32>, deg_bound: u32, wb: u32, out: &mut Vec<Vec<u32>>) {
            if p == alpha.len() {
                if weight % 2 == 0 {
                    out.push(alpha.clone());
                }
                return;
            }
            let mut e = 0;
            loop {
                let w = weight as u64 + (p as u64) * (e as u64);
                if deg + e > deg_bound || w > wb as u64 {
                    break;
                }
                alpha[p] = e;
                rec(p + 1, deg + e, w as u32, alpha, deg_bound, wb, out);
                e += 1;
            }
            alpha[p] = 0;
        }
        rec(0, 0, 0, &mut alpha, deg_bound, weight_bound, &mut out);
        out
    }

    /// `Z_1MM` within the model's truncation.
    pub fn partition_function(&self) -> Series {
        let alphas = self.exponent_vectors();
        let terms: Vec<(Monomial, GaussRat)> = alphas
            .par_iter()
            .filter_map(|alpha| {
                let times = TimeExps::from_pairs(
                    alpha.iter().enumerate().map(|(p, &e)| (self.var(p as u8), e)),
                );
                let mono = Monomial::from_times(times);
                if !self.trunc.admits(&mono) {
                    return None;
                }
                let powers: Vec<u32> =
                    alpha.iter().enumerate().flat_map(|(p, &e)| std::iter::repeat(p as u32).take(e as usize)).collect();
                let k: u32 = alpha.iter().sum();
                let mut prefactor = BigRational::one();
                for &e in alpha {
                    prefactor /= BigRational::from_integer(factorial(e));
                }
                if k % 2 == 1 {
                    prefactor = -prefactor;
                }
                let word = TraceWord::new(powers);
                Some(match self.n_mode {
                    NMode::Symbolic => hermitian_moment(&word)
                        .terms()
                        .map(|(m, c)| (mono.clone().with_hn(m.hn + 2 * k as i32), c.scale(&prefactor)))
                        .collect::<Vec<_>>(),
                    NMode::Concrete(n) => {
                        let nr = BigRational::from_integer(BigInt::from(n));
                        let v = hermitian_moment_at(&word, n, &nr) * num_traits::pow(nr, k as usize) * prefactor;
                        vec![(mono, GaussRat::real(v))]
                    }
                })
            })
            .flatten()
            .collect();
        Series::from_terms(terms, self.trunc.clone())
    }
}

/// `Z_1MM` for the times `t[color,p]`.
pub fn z1mm_series(model: &OneMatrixModel) -> Series {
    model.partition_function()
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(p: u8) -> TimeVar {
        TimeVar::new(1, p)
    }

    #[test]
    fn low_order_coefficients() {
        let z = z1mm_series(&OneMatrixModel::new(TruncSpec::new(0, 2, 4, (0, 0))));
        assert_eq!(z.constant_term(), GaussRat::one());
        assert_eq!(
            z.coeff_of(&Monomial::time(t(2)).with_hn(4)).unwrap(),
            GaussRat::from_int(-1)
        );
        assert_eq!(
            z.coeff_of(&Monomial::time_pow(t(1), 2).with_hn(4)).unwrap(),
            GaussRat::from_ratio(1, 2)
        );
        assert_eq!(z.coeff_of(&Monomial::time(t(0)).with_hn(4)).unwrap(), GaussRat::from_int(-1));
        assert!(z.coeff(&Monomial::time(t(3))).is_zero());
    }

    #[test]
    fn concrete_size_matches_symbolic_evaluation() {
        let tr = TruncSpec::new(0, 3, 4, (0, 0));
        let sym = z1mm_series(&OneMatrixModel::new(tr.clone()));
        for n in [1, 2] {
            let conc = z1mm_series(&OneMatrixModel::new(tr.clone()).with_n_mode(NMode::Concrete(n)));
            assert_eq!(sym.eval_n(n).unwrap(), conc);
        }
    }

    use num_traits::Zero;
}
