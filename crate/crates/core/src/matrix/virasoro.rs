//! Virasoro constraints of the 1-matrix model.
//!
//! Invariance of the integral under `M → M + ε M^{n+1}`, with the Gaussian
//! term written as a shift `T_2 = t_2 + 1/2`, gives for `n ≥ −1`
//!
//! `L_n = N⁻² Σ_{k=0}^{n} ∂_k ∂_{n−k} + Σ_{p≥1} p T_p ∂_{p+n}`,
//!
//! the double sum being empty for `n = −1`. Each `∂_0` stands for the
//! insertion of `Tr 1 = N`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::GaussRat;
use crate::series::{DiffOp, Monomial, Series, TimeExps, TruncSpec};

use super::{z1mm_series, OneMatrixModel};

/// `L_n` on the times `t[color,p]`, `p ≤ p_max + n`.
pub fn virasoro_operator(n: i32, color: u8, p_max: u32) -> Result<DiffOp> {
    if n < -1 {
        return Err(Error::Config(format!("L_{n} is defined for n >= -1")));
    }
    let v = |p: i32| crate::series::TimeVar::new(color, p as u8);
    let mut op = DiffOp::zero(0);
    for k in 0..=n {
        let derivs = TimeExps::from_vars([v(k), v(n - k)]);
        op.add_term(Monomial::n_pow(-2), derivs, GaussRat::one());
    }
    for p in 1..=p_max as i32 {
        if p + n < 0 {
            continue;
        }
        let d = TimeExps::from_pairs([(v(p + n), 1)]);
        op.add_term(Monomial::time(v(p)), d.clone(), GaussRat::from_int(p as i64));
        if p == 2 {
            op.add_term(Monomial::one(), d, GaussRat::one());
        }
    }
    Ok(op)
}

/// `L_n Z_1MM` restricted to `p ≤ p_max` and time degree `≤ deg`.
///
/// `Z` is computed in a larger window so every retained coefficient of
/// the result is exact.
pub fn virasoro_residual(n: i32, p_max: u32, deg: u32) -> Result<Series> {
    let shift = n.max(0) as u32;
    let ext_p = p_max + shift;
    let ext = TruncSpec::new(0, deg + 2, ext_p, (0, 0)).with_weight(deg * p_max + shift + 2);
    let z = z1mm_series(&OneMatrixModel::new(ext));
    let op = virasoro_operator(n, 1, p_max)?;
    let out = op.apply(&z);
    Ok(out.with_trunc(TruncSpec::new(0, deg, p_max, (0, 0))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_and_dilaton_equations() {
        for n in [-1, 0] {
            let r = virasoro_residual(n, 3, 2).unwrap();
            assert!(r.is_zero(), "L_{n}: {r}");
        }
    }

    #[test]
    fn operator_rejects_low_index() {
        assert!(virasoro_operator(-2, 1, 4).is_err());
    }

    #[test]
    fn perturbed_operator_is_detected() {
        // dropping the Gaussian shift breaks the constraint
        let ext = TruncSpec::new(0, 3, 3, (0, 0));
        let z = z1mm_series(&OneMatrixModel::new(ext));
        let op = virasoro_operator(0, 1, 3).unwrap();
        let broken = op.sub(&DiffOp::derivative(crate::series::TimeVar::new(1, 2), 0));
        assert!(!broken.apply(&z).with_trunc(TruncSpec::new(0, 1, 3, (0, 0))).is_zero());
    }
}
