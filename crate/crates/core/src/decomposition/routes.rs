//! Three independent expansions of the melonic partition function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{build_y, gamma_power, index_tuples, multinomial, MelonicModel};
use crate::error::{Error, Result};
use crate::matrix::{z1mm_series, OneMatrixModel};
use crate::scalar::GaussRat;
use crate::series::{Monomial, Series, TimeVar, TruncSpec};
use crate::wick::{hermitian_moment, hermitian_oracle, tensor_moment, tensor_oracle, TensorContraction, TraceWord};

/// Ordered color tuples `[1..=d]^k`.
fn color_tuples(d: u8, k: u32) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=d as usize).map(move |a| {
                    let mut u = t.clone();
                    u.push(a);
                    u
                })
            })
            .collect();
    }
    out
}

/// `(−1/4)^k / k!`.
fn interaction_prefactor(k: u32) -> BigRational {
    let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    BigRational::new(sign, crate::matrix::factorial(k) * num_traits::pow(BigInt::from(4), k as usize))
}

fn direct_with(model: &MelonicModel, moment: impl Fn(&TensorContraction) -> Result<Series>) -> Result<Series> {
    let d = model.d as usize;
    let mut out = Series::zero(model.scalar_trunc());
    for k in 0..=model.k {
        let pref = GaussRat::real(interaction_prefactor(k));
        let mut acc = Series::zero(TruncSpec::wide());
        for colors in color_tuples(model.d, k) {
            let factors: Vec<TensorContraction> =
                colors.iter().map(|&a| TensorContraction::quartic_melonic(d, a)).collect();
            acc = &acc + &moment(&TensorContraction::product(d, &factors))?;
        }
        let lam = Monomial::sqrt_lambda(2 * k).with_hn(2 * (d as i32 - 1) * k as i32);
        out = &out + &acc.mul_term(&lam, &pref).with_trunc(model.scalar_trunc());
    }
    Ok(out)
}

/// `⟨exp(−(λ/4) N^{D−1} Σ_a I_a)⟩` expanded through `λ^K` with every tensor
/// correlator from the pairing enumerator.
pub fn direct_tensor_z(model: &MelonicModel) -> Series {
    direct_with(model, |tc| Ok(tensor_moment(tc))).expect("symbolic moments are infallible")
}

/// The same expansion at a concrete size, with explicit index sums.
pub fn direct_tensor_z_at(model: &MelonicModel, n: u32) -> Result<Series> {
    direct_with(model, |tc| {
        Ok(Series::constant(GaussRat::real(tensor_oracle(tc, n)?), TruncSpec::wide()))
    })?
    .eval_n(n)
}

fn trace_symbol(c: usize, q: u32) -> TimeVar {
    TimeVar::new(c as u8 + 1, q as u8)
}

/// `−Tr log(1 + iγ Σ_c σ_c)` with `Tr σ_c^q` written as the symbol `t[c,q]`
/// and `Tr σ⁰ = N`.
fn log_det_exponent(model: &MelonicModel) -> Series {
    let max = model.max_hl();
    let trunc = TruncSpec::new(max, max, max, (0, 0));
    let mut e = Series::zero(trunc);
    for q in index_tuples(model.d, max) {
        let n: u32 = q.iter().sum();
        let zeros = q.iter().filter(|&&x| x == 0).count() as i32;
        let c = GaussRat::i_pow(-(n as i64)).scale(&BigRational::new(multinomial(&q), BigInt::from(n)));
        let mut m = gamma_power(model.d, n);
        m.hn += 2 * zeros;
        for (col, &p) in q.iter().enumerate() {
            if p > 0 {
                m.times.add(trace_symbol(col, p), 1);
            }
        }
        e.add_term(m, c);
    }
    e
}

/// Splits the trace symbols of a monomial into one trace word per color.
fn words_by_color(m: &Monomial, d: u8) -> Vec<TraceWord> {
    (1..=d)
        .map(|c| {
            let powers = m
                .times
                .iter()
                .filter(|(v, _)| v.color == c)
                .flat_map(|&(v, e)| std::iter::repeat(v.p as u32).take(e as usize))
                .collect();
            TraceWord::new(powers)
        })
        .collect()
}

fn intermediate_with(model: &MelonicModel, n: Option<u32>) -> Result<Series> {
    let mut expanded = log_det_exponent(model).exp_trunc()?;
    if let Some(n) = n {
        expanded = expanded.eval_n(n)?;
    }
    let mut out = Series::zero(model.scalar_trunc());
    for (m, c) in expanded.terms() {
        let mut value = Series::from_term(m.scalar_part(), c.clone(), TruncSpec::wide());
        for w in words_by_color(m, model.d) {
            let moment = match n {
                None => hermitian_moment(&w),
                Some(n) => Series::constant(GaussRat::real(hermitian_oracle(&w, n)?), TruncSpec::wide()),
            };
            value = &value * &moment;
            if value.is_zero() {
                break;
            }
        }
        out = &out + &value.with_trunc(model.scalar_trunc());
    }
    Ok(out)
}

/// `⟨e^{−Tr log(1 + iγ Σ_c σ_c)}⟩` over independent Gaussian `σ_c`, each
/// `⟨∏_c Tr σ_c^{q_c}⟩` factorizing into per-color matrix moments.
pub fn intermediate_field_z(model: &MelonicModel) -> Series {
    intermediate_with(model, None).expect("symbolic expansion is infallible")
}

pub fn intermediate_field_z_at(model: &MelonicModel, n: u32) -> Result<Series> {
    intermediate_with(model, Some(n))
}

/// `e^Ŷ ∏_c Z_1MM(t^c)` at `t = 0`.
pub fn y_route_z(model: &MelonicModel) -> Result<Series> {
    let max = model.max_hl();
    let d = model.d as u32;
    // every retained term of ∏Z is consumed by at most 2K applications of Ŷ,
    // so per color both degree and weight stay below 2K
    let per_color = TruncSpec::new(0, max, max, (0, 0)).with_weight(max);
    let joint = TruncSpec::new(max, d * max, max, (0, 0)).with_weight(d * max);
    let mut prod = Series::one(joint.clone());
    for c in 1..=model.d {
        let z = z1mm_series(&OneMatrixModel::new(per_color.clone()).with_color(c));
        prod = &prod * &z.with_trunc(joint.clone());
    }
    let y = build_y(model.d, model.k);
    let applied = y.exp_apply(&prod, max as usize + 1)?;
    Ok(applied.at_times_zero().with_trunc(model.scalar_trunc()))
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub model: MelonicModel,
    pub direct: Series,
    pub intermediate: Series,
    pub y_route: Series,
    /// `e^Ŷ ∏Z|_{t=0} − intermediate`.
    pub r1: Series,
    /// `intermediate − direct`.
    pub r2: Series,
    /// Symbolic minus explicit-index evaluation at each size, for the direct
    /// and intermediate expansions.
    pub oracle: Vec<(u32, Series, Series)>,
}

impl DecompositionReport {
    pub fn is_zero(&self) -> bool {
        self.r1.is_zero() && self.r2.is_zero() && self.oracle.iter().all(|(_, a, b)| a.is_zero() && b.is_zero())
    }
}

pub fn decomposition_residual(model: &MelonicModel, oracle_sizes: &[u32]) -> Result<DecompositionReport> {
    let (direct, (intermediate, y_route)) =
        rayon::join(|| direct_tensor_z(model), || rayon::join(|| intermediate_field_z(model), || y_route_z(model)));
    let y_route = y_route?;
    let r1 = &y_route - &intermediate;
    let r2 = &intermediate - &direct;
    let mut oracle = Vec::new();
    for &n in oracle_sizes {
        let a = &direct.eval_n(n)? - &direct_tensor_z_at(model, n)?;
        let b = &intermediate.eval_n(n)? - &intermediate_field_z_at(model, n)?;
        oracle.push((n, a, b));
    }
    Ok(DecompositionReport { model: *model, direct, intermediate, y_route, r1, r2, oracle })
}

/// `log Z` of the direct expansion, checked to contain only `N^{D − 2ω/(D−1)!}`.
pub fn degree_grading(model: &MelonicModel) -> Result<Series> {
    let f = direct_tensor_z(model).log_trunc()?;
    let d = model.d as i64;
    let jackets_factor: i64 = (1..d).product::<i64>(); // (D−1)!
    for (m, _) in f.terms() {
        // D − e = 2ω/(D−1)!  ⇔  ω = (D − e)(D−1)!/2 with e = hn/2
        let twice_omega = (2 * d - m.hn as i64) * jackets_factor / 2;
        let ok = (2 * d - m.hn as i64) * jackets_factor % 2 == 0 && twice_omega >= 0 && twice_omega % 2 == 0;
        if !ok || m.s2 != 0 {
            return Err(Error::Grading {
                exponent: format!("sqrtN^{}", m.hn),
                expected: format!("N^({d} - 2w/{jackets_factor}), w >= 0"),
            });
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_order_d3() -> Series {
        // −(3/4) N²(N + 1) λ
        Series::from_terms(
            [
                (Monomial::one(), GaussRat::one()),
                (Monomial::sqrt_lambda(2).with_hn(6), GaussRat::from_ratio(-3, 4)),
                (Monomial::sqrt_lambda(2).with_hn(4), GaussRat::from_ratio(-3, 4)),
            ],
            MelonicModel::new(3, 1).scalar_trunc(),
        )
    }

    #[test]
    fn direct_first_order() {
        assert_eq!(direct_tensor_z(&MelonicModel::new(3, 1)), first_order_d3());
    }

    #[test]
    fn intermediate_first_order() {
        assert_eq!(intermediate_field_z(&MelonicModel::new(3, 1)), first_order_d3());
    }

    #[test]
    fn y_route_first_order() {
        assert_eq!(y_route_z(&MelonicModel::new(3, 1)).unwrap(), first_order_d3());
    }

    #[test]
    fn zeroth_order_is_one() {
        let m = MelonicModel::new(3, 0);
        let one = Series::one(m.scalar_trunc());
        assert_eq!(direct_tensor_z(&m), one);
        assert_eq!(intermediate_field_z(&m), one);
        assert_eq!(y_route_z(&m).unwrap(), one);
    }

    #[test]
    fn d2_agrees_with_oracle() {
        let r = decomposition_residual(&MelonicModel::new(2, 1), &[1, 2]).unwrap();
        assert!(r.is_zero(), "{r:?}");
    }
}
