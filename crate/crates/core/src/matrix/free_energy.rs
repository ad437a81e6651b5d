//! Quartic matrix model `e^{−N(Tr M²/2 + (t_4/4) Tr M⁴)}`: free energy and
//! the planar two-point function.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;

use super::factorial;
use crate::error::{Error, Result};
use crate::scalar::GaussRat;
use crate::series::{Monomial, Series, TimeVar, TruncSpec};
use crate::wick::{hermitian_moment, TraceWord};

pub(crate) const T4: TimeVar = TimeVar::new(1, 4);

fn quartic_trunc(order: u32) -> TruncSpec {
    TruncSpec::new(0, order, 4, (0, 0))
}

/// `Σ_k (−N t_4/4)^k/k! ⟨(Tr M^extra)·(Tr M⁴)^k⟩` through `t_4^order`.
fn weighted_moment(extra: &[u32], order: u32) -> Series {
    let mut out = Series::zero(quartic_trunc(order));
    for k in 0..=order {
        let mut powers = extra.to_vec();
        powers.extend(std::iter::repeat(4).take(k as usize));
        let pref = GaussRat::real(BigRational::new(
            if k % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) },
            factorial(k) * num_traits::pow(BigInt::from(4), k as usize),
        ));
        for (m, c) in hermitian_moment(&TraceWord::new(powers)).terms() {
            let mono = Monomial::time_pow(T4, k).with_hn(m.hn + 2 * k as i32);
            out.add_term(mono, c * &pref);
        }
    }
    out
}

/// `Z(t_4)` through `t_4^order`, symbolic in `N`.
pub fn quartic_partition_function(order: u32) -> Series {
    weighted_moment(&[], order)
}

/// `F = log Z` through `t_4^order`, checked to contain only `N^{2−2g}`.
pub fn quartic_free_energy(order: u32) -> Result<Series> {
    let f = quartic_partition_function(order).log_trunc()?;
    for (m, _) in f.terms() {
        // hn is the exponent of √N
        if m.hn % 4 != 0 || m.hn > 4 {
            return Err(Error::Grading {
                exponent: format!("N^{}", m.hn as f64 / 2.0),
                expected: "N^(2-2g), g >= 0".into(),
            });
        }
    }
    Ok(f)
}

/// `2·3ⁿ/((n+2)(n+1)) · C(2n, n)`.
pub fn tutte_closed_form(n: u32) -> BigInt {
    let num = BigInt::from(2) * num_traits::pow(BigInt::from(3), n as usize) * binomial(BigInt::from(2 * n), BigInt::from(n));
    num / BigInt::from((n + 2) * (n + 1))
}

/// Planar part of `(1/N)⟨Tr M²⟩` through `t_4^{n_max}`.
///
/// The raw coefficient of `t_4ⁿ` is `(−1)ⁿ` times a count of rooted planar
/// quartic maps; the returned values carry that sign removed.
pub fn planar_two_point(n_max: u32) -> Result<Vec<GaussRat>> {
    let z = quartic_partition_function(n_max);
    let w = weighted_moment(&[2], n_max);
    let ratio = &w * &z.inv_trunc()?;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        // (1/N)⟨Tr M²⟩ at N⁰ is the N¹ coefficient of ⟨Tr M²⟩
        let raw = ratio.coeff_of(&Monomial::time_pow(T4, n).with_hn(2))?;
        out.push(if n % 2 == 0 { raw } else { -raw });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn first_order_free_energy() {
        let f = quartic_free_energy(1).unwrap();
        assert_eq!(f.coeff(&Monomial::time(T4).with_hn(4)), GaussRat::from_ratio(-1, 2));
        assert_eq!(f.coeff(&Monomial::time(T4)), GaussRat::from_ratio(-1, 4));
        assert_eq!(f.len(), 2);
        assert!(quartic_free_energy(0).unwrap().is_zero());
    }

    #[test]
    fn closed_form_values() {
        let v: Vec<BigInt> = (0..5).map(tutte_closed_form).collect();
        assert_eq!(v, [1, 2, 9, 54, 378].map(BigInt::from));
    }

    #[test]
    fn planar_counts_low_orders() {
        let got = planar_two_point(2).unwrap();
        assert_eq!(got, vec![GaussRat::from_int(1), GaussRat::from_int(2), GaussRat::from_int(9)]);
        assert!(got.iter().all(|c| !c.is_zero()));
    }
}
