//! The quartic melonic tensor model and its rewriting as `e^Ŷ` acting on a
//! product of `D` Hermitian one-matrix models.
//!
//! With `γ = √(λ / 2N^{D−2})`,
//!
//! `Ŷ = Σ_{q ≠ 0} (−1)^D (−i)^{|q|} / (N^D |q|) · γ^{|q|} · C(|q|; q) · ∂_{t^1_{q_1}} ⋯ ∂_{t^D_{q_D}}`
//!
//! and `X̂ = −Σ t^c_p ∂_{t^c_p}`, so that `[X̂, Ŷ] = D Ŷ`.

mod bch;
mod routes;

pub use bch::{bch_coefficients, bch_series_check, bernoulli_series, half_angle_series, BchCheck};
pub use routes::{
    decomposition_residual, degree_grading, direct_tensor_z, direct_tensor_z_at, intermediate_field_z,
    intermediate_field_z_at, y_route_z, DecompositionReport,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::scalar::GaussRat;
use crate::series::{DiffOp, Monomial, Series, TimeExps, TimeVar, TruncSpec};

/// Rank `d` model truncated at `√λ^{2k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MelonicModel {
    pub d: u8,
    pub k: u32,
}

impl MelonicModel {
    pub fn new(d: u8, k: u32) -> Self {
        assert!(d >= 2, "rank must be at least 2");
        MelonicModel { d, k }
    }

    pub fn max_hl(&self) -> u32 {
        2 * self.k
    }

    /// Window for results that carry no time variables.
    pub fn scalar_trunc(&self) -> TruncSpec {
        TruncSpec::new(self.max_hl(), 0, 0, (0, 0))
    }
}

/// All `q ∈ ℕ^d` with `1 ≤ |q| ≤ max`, in lexicographic order.
pub fn index_tuples(d: u8, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; d as usize];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            if cur.iter().any(|&x| x > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, max, &mut cur, &mut out);
    out
}

pub fn multinomial(q: &[u32]) -> BigInt {
    let n: u32 = q.iter().sum();
    let mut out = crate::matrix::factorial(n);
    for &x in q {
        out /= crate::matrix::factorial(x);
    }
    out
}

/// The scalar part `γ^{|q|}` as a monomial: `√λ^{|q|} √2^{−|q|} √N^{−(D−2)|q|}`.
fn gamma_power(d: u8, n: u32) -> Monomial {
    Monomial { hl: n, hn: -((d as i32 - 2) * n as i32), s2: -(n as i32), ..Monomial::one() }
}

/// `Ŷ` truncated to `|q| ≤ 2k`.
pub fn build_y(d: u8, k: u32) -> DiffOp {
    let max = 2 * k;
    let mut op = DiffOp::zero(max);
    for q in index_tuples(d, max) {
        let n: u32 = q.iter().sum();
        let sign = if d % 2 == 0 { 1 } else { -1 };
        let c = GaussRat::i_pow(-(n as i64))
            .scale(&BigRational::new(BigInt::from(sign) * multinomial(&q), BigInt::from(n)));
        let mut m = gamma_power(d, n);
        m.hn -= 2 * d as i32;
        let derivs = TimeExps::from_vars(q.iter().enumerate().map(|(c, &p)| TimeVar::new(c as u8 + 1, p as u8)));
        op.add_term(m, derivs, c);
    }
    op
}

/// `X̂ = −Σ_{c ≤ d, p ≤ p_max} t^c_p ∂_{t^c_p}`.
pub fn build_x(d: u8, p_max: u32, max_hl: u32) -> DiffOp {
    let mut op = DiffOp::zero(max_hl);
    for c in 1..=d {
        for p in 0..=p_max {
            let v = TimeVar::new(c, p as u8);
            op.add_term(Monomial::time(v), TimeExps::from_vars([v]), -GaussRat::one());
        }
    }
    op
}

/// All monomials in `t^c_p` (`c ≤ d`, `p ≤ p_max`) of degree `≤ deg`.
pub fn basis_monomials(d: u8, p_max: u32, deg: u32) -> Vec<TimeExps> {
    let vars: Vec<TimeVar> =
        (1..=d).flat_map(|c| (0..=p_max).map(move |p| TimeVar::new(c, p as u8))).collect();
    let mut out = vec![TimeExps::new()];
    let mut frontier = vec![(TimeExps::new(), 0usize)];
    for _ in 0..deg {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for (i, &v) in vars.iter().enumerate().skip(*start) {
                let mut e = m.clone();
                e.add(v, 1);
                out.push(e.clone());
                next.push((e, i));
            }
        }
        frontier = next;
    }
    out
}

/// Result of applying `[X̂, Ŷ] − DŶ` to every basis monomial.
#[derive(Clone, Debug)]
pub struct CommutatorCheck {
    pub monomials: usize,
    pub y_terms: usize,
    /// First monomial with a nonzero residual, with that residual.
    pub failure: Option<(TimeExps, Series)>,
}

/// Applies `X̂(Ŷm) − Ŷ(X̂m) − DŶm` to every basis monomial `m`.
pub fn commutator_residual(d: u8, p_max: u32, deg: u32, k: u32) -> CommutatorCheck {
    let y = build_y(d, k);
    let x = build_x(d, p_max.max(2 * k), 2 * k);
    let tr = TruncSpec::new(2 * k, deg, p_max.max(2 * k), (0, 0));
    let basis = basis_monomials(d, p_max, deg);
    let dd = GaussRat::from_int(d as i64);
    use rayon::prelude::*;
    let failure = basis
        .par_iter()
        .map(|m| {
            let s = Series::from_term(Monomial::from_times(m.clone()), GaussRat::one(), tr.clone());
            let ys = y.apply(&s);
            let lhs = &x.apply(&ys) - &y.apply(&x.apply(&s));
            let r = &lhs - &ys.scale(&dd);
            (m, r)
        })
        .filter(|(_, r)| !r.is_zero())
        .min_by(|a, b| a.0.cmp(b.0))
        .map(|(m, r)| (m.clone(), r));
    CommutatorCheck { monomials: basis.len(), y_terms: y.len(), failure }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::binomial;

    #[test]
    fn y_term_counts_per_level() {
        for d in 2..=4u8 {
            let y = build_y(d, 2);
            for m in 1..=4u32 {
                let count = y.terms().filter(|(c, _, _)| c.hl == m).count();
                assert_eq!(count as u64, binomial(m as u64 + d as u64 - 1, d as u64 - 1));
            }
        }
    }

    #[test]
    fn y_level_one_coefficient() {
        // D = 2, q = (1, 0): (−i) · γ / N²
        let y = build_y(2, 1);
        let (m, _, c) = y
            .terms()
            .find(|(_, d, _)| **d == TimeExps::from_vars([TimeVar::new(1, 1), TimeVar::new(2, 0)]))
            .unwrap();
        // √2^{−1} is stored as √2/2
        assert_eq!(*c, GaussRat::i().scale(&BigRational::new((-1).into(), 2.into())));
        assert_eq!((m.hl, m.hn, m.s2), (1, -4, 1));
    }

    #[test]
    fn commutator_small() {
        let r = commutator_residual(3, 2, 2, 1);
        assert!(r.failure.is_none());
        assert_eq!(r.monomials, basis_monomials(3, 2, 2).len());
    }

    #[test]
    fn opposite_sign_gives_minus_d() {
        let y = build_y(2, 1);
        let x = build_x(2, 2, 2).scale(&-GaussRat::one());
        assert_eq!(x.commutator(&y), y.scale(&GaussRat::from_int(-2)));
    }

    #[test]
    fn basis_size() {
        // 2 colors × 2 indices: 1 + 4 + 10
        assert_eq!(basis_monomials(2, 1, 2).len(), 15);
    }
}
