//! `V^c_±(z, λ) = e^Ŷ V^c_±(z) e^{−Ŷ}` in closed form.
//!
//! Since `ad²_Â Ŷ = 0` and `[B̂, Ŷ] = 0`, conjugation only adds the factor
//! `e^{∓[NÂ, Ŷ]}`, a pure-derivative operator in the colors other than `c`.
//! The charge commutes with `Ŷ` as well and is left out here.

use rayon::prelude::*;
use serde::Serialize;

use super::Sign;
use crate::decomposition::{basis_monomials, build_y};
use crate::error::Result;
use num_traits::One;

use crate::scalar::GaussRat;
use crate::series::{DegreeSlack, DiffOp, Monomial, Series, TimeExps, TimeVar, TruncSpec};

/// `e^{±NÂ} · e^{middle} · e^{b}` for one color and sign, with symbolic `N`.
#[derive(Clone, Debug)]
pub struct ConjugatedVertexOp {
    pub color: u8,
    pub sign: Sign,
    pub d: u8,
    pub k: u32,
    pub p_max: u32,
    /// `∓[NÂ, Ŷ]`.
    pub middle: DiffOp,
    /// `∓B̂`.
    pub b: DiffOp,
}

/// Multiplication by `Σ_{n ≤ p_max} zⁿ t^c_n`.
fn a_hat(color: u8, p_max: u32, max_hl: u32) -> DiffOp {
    let mut op = DiffOp::zero(max_hl);
    for n in 0..=p_max {
        op.add_term(Monomial::time(TimeVar::new(color, n as u8)).with_z(n as i32), TimeExps::new(), GaussRat::one());
    }
    op
}

/// `B̂ = Σ_{1 ≤ n ≤ p_max} z^{−n}/(nN) ∂_{t^c_n}`.
fn b_hat(color: u8, p_max: u32, max_hl: u32) -> DiffOp {
    let mut op = DiffOp::zero(max_hl);
    for n in 1..=p_max {
        op.add_term(
            Monomial::n_pow(-1).with_z(-(n as i32)),
            TimeExps::from_vars([TimeVar::new(color, n as u8)]),
            GaussRat::from_ratio(1, n as i64),
        );
    }
    op
}

/// Builds the closed form term by term from `Ŷ`: each `c_q ∂^q` becomes
/// `±N c_q z^{q_c} ∏_{c' ≠ c} ∂_{t^{c'}_{q_{c'}}}`.
pub fn build_conjugated_vertex(color: u8, sign: Sign, d: u8, k: u32, p_max: u32) -> ConjugatedVertexOp {
    let y = build_y(d, k);
    let s = GaussRat::from_int(sign.value());
    let mut middle = DiffOp::zero(y.max_hl());
    for (m, derivs, c) in y.terms() {
        let qc = derivs.iter().find(|(v, _)| v.color == color).map(|(v, _)| v.p as i32).unwrap_or(0);
        let rest = TimeExps::from_pairs(derivs.iter().filter(|(v, _)| v.color != color).copied());
        let mut m = m.clone().with_z(m.z + qc);
        m.hn += 2;
        middle.add_term(m, rest, c * &s);
    }
    let b = b_hat(color, p_max, y.max_hl()).scale(&-s);
    ConjugatedVertexOp { color, sign, d, k, p_max, middle, b }
}

impl ConjugatedVertexOp {
    fn max_hl(&self) -> u32 {
        2 * self.k
    }

    /// `±N Σ_{n ≤ p_max} zⁿ t^c_n`.
    pub fn a_exponent(&self, trunc: &TruncSpec) -> Series {
        let c = GaussRat::from_int(self.sign.value());
        let terms = (0..=self.p_max)
            .map(|n| (Monomial::time(TimeVar::new(self.color, n as u8)).with_z(n as i32).with_hn(2), c.clone()));
        Series::from_terms(terms, trunc.clone())
    }

    /// The closed form applied to a polynomial.
    pub fn apply(&self, s: &Series) -> Result<Series> {
        let cap = 2 * s.terms().map(|(m, _)| m.time_degree()).max().unwrap_or(0) as usize + 2;
        let shifted = self.b.exp_apply(s, cap)?;
        let mid = self.middle.exp_apply(&shifted, self.max_hl() as usize + 1)?;
        Ok(self.a_exponent(s.trunc()).exp_trunc()?.mul_series(&mid))
    }

    /// `e^Ŷ (e^{±NÂ} e^{∓B̂} (e^{−Ŷ} s))`, computed without the closed form.
    pub fn sandwich(&self, s: &Series) -> Result<Series> {
        let y = build_y(self.d, self.k);
        let cap = self.max_hl() as usize + 1;
        let inner = y.scale(&-GaussRat::one()).exp_apply(s, cap)?;
        let bcap = 2 * inner.terms().map(|(m, _)| m.time_degree()).max().unwrap_or(0) as usize + 2;
        let undeformed = self.a_exponent(s.trunc()).exp_trunc()?.mul_series(&self.b.exp_apply(&inner, bcap)?);
        y.exp_apply(&undeformed, cap)
    }
}

/// Outcome of the closed-form versus sandwich comparison and the operator
/// identities behind it.
#[derive(Clone, Debug, Serialize)]
pub struct ConjugationCheck {
    pub d: u8,
    pub k: u32,
    pub p_max: u32,
    pub deg: u32,
    pub monomials: usize,
    /// `(color, sign, monomial, closed − sandwich)` for every mismatch.
    pub failures: Vec<(u8, Sign, String, String)>,
    pub b_commutes: bool,
    pub ad2_vanishes: bool,
    pub commutator_pure_derivative: bool,
    pub commutator_commutes_with_y: bool,
    pub commutator_commutes_with_b: bool,
    pub charge_commutes: bool,
    pub closed_form_matches_commutator: bool,
}

impl ConjugationCheck {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
            && self.b_commutes
            && self.ad2_vanishes
            && self.commutator_pure_derivative
            && self.commutator_commutes_with_y
            && self.commutator_commutes_with_b
            && self.charge_commutes
            && self.closed_form_matches_commutator
    }
}

/// Compares both sides on every basis monomial of degree `≤ deg` in
/// `t^c_p` (`p ≤ p_max`), for every color and both signs.
pub fn conjugation_residual(d: u8, k: u32, p_max: u32, deg: u32) -> Result<ConjugationCheck> {
    let max_hl = 2 * k;
    let y = build_y(d, k);
    let zw = 4 * p_max as i32 * (deg + d as u32 * max_hl + 2) as i32;
    let work = TruncSpec::new(max_hl, deg, p_max, (-zw, zw))
        .with_slack(DegreeSlack { total_per_hl: d as u32, color_per_hl: Some(1) });
    let exact = TruncSpec::new(max_hl, deg, p_max, (-zw, zw));
    let basis = basis_monomials(d, p_max, deg);

    let mut b_commutes = true;
    let mut ad2_vanishes = true;
    let mut pure = true;
    let mut with_y = true;
    let mut with_b = true;
    let mut charge = true;
    let mut matches = true;
    for c in 1..=d {
        let a = a_hat(c, p_max, max_hl);
        let b = b_hat(c, p_max, max_hl);
        let ay = a.commutator(&y);
        b_commutes &= b.commutator(&y).is_zero();
        ad2_vanishes &= a.commutator(&ay).is_zero();
        pure &= ay.is_pure_derivative();
        with_y &= ay.commutator(&y).is_zero();
        with_b &= ay.commutator(&b).is_zero();
        charge &= DiffOp::derivative(TimeVar::new(c, 0), max_hl).commutator(&y).is_zero();
        for sign in [Sign::Plus, Sign::Minus] {
            let v = build_conjugated_vertex(c, sign, d, k, p_max);
            let n_ay = ay.compose(&DiffOp::multiplication(Monomial::n_pow(1), GaussRat::one(), max_hl));
            matches &= v.middle == n_ay.scale(&GaussRat::from_int(-sign.value()));
        }
        // [B̂, Ŷ] on the basis, not only as an operator
        let by = b.commutator(&y);
        b_commutes &= basis.iter().all(|e| by.apply(&Series::from_term(Monomial::from_times(e.clone()), GaussRat::one(), work.clone())).is_zero());
    }

    let jobs: Vec<(u8, Sign, &TimeExps)> = (1..=d)
        .flat_map(|c| [Sign::Plus, Sign::Minus].into_iter().map(move |s| (c, s)))
        .flat_map(|(c, s)| basis.iter().map(move |e| (c, s, e)))
        .collect();
    let ops: Vec<ConjugatedVertexOp> = (1..=d)
        .flat_map(|c| [Sign::Plus, Sign::Minus].into_iter().map(move |s| build_conjugated_vertex(c, s, d, k, p_max)))
        .collect();
    let results: Vec<Result<Option<(u8, Sign, String, String)>>> = jobs
        .par_iter()
        .map(|&(c, s, e)| {
            let op = ops.iter().find(|o| o.color == c && o.sign == s).expect("operator built for every color");
            let m = Series::from_term(Monomial::from_times(e.clone()), GaussRat::one(), work.clone());
            let closed = op.apply(&m)?.with_trunc(exact.clone());
            let direct = op.sandwich(&m)?.with_trunc(exact.clone());
            let diff = closed.sub_series(&direct);
            Ok(if diff.is_zero() {
                None
            } else {
                Some((c, s, Monomial::from_times(e.clone()).to_string(), diff.to_text()))
            })
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok(ConjugationCheck {
        d,
        k,
        p_max,
        deg,
        monomials: basis.len(),
        failures,
        b_commutes,
        ad2_vanishes,
        commutator_pure_derivative: pure,
        commutator_commutes_with_y: with_y,
        commutator_commutes_with_b: with_b,
        charge_commutes: charge,
        closed_form_matches_commutator: matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_zero_is_undeformed() {
        let v = build_conjugated_vertex(1, Sign::Plus, 3, 0, 4);
        assert!(v.middle.is_zero());
    }

    #[test]
    fn middle_factor_shape() {
        let v = build_conjugated_vertex(2, Sign::Minus, 3, 1, 4);
        for (m, derivs, _) in v.middle.terms() {
            assert!(derivs.iter().all(|(v, _)| v.color != 2));
            assert!(m.z >= 0 && m.z <= 2);
        }
        assert_eq!(v.middle.len(), build_y(3, 1).len());
    }

    #[test]
    fn small_conjugation_sweep() {
        let check = conjugation_residual(2, 1, 2, 1).unwrap();
        assert!(check.passes(), "{check:?}");
    }

    #[test]
    fn constant_monomial() {
        let tr = TruncSpec::new(2, 0, 2, (-32, 32)).with_slack(DegreeSlack { total_per_hl: 2, color_per_hl: Some(1) });
        let v = build_conjugated_vertex(1, Sign::Plus, 2, 1, 2);
        let one = Series::one(tr.clone());
        let exact = TruncSpec::new(2, 0, 2, (-32, 32));
        assert_eq!(v.apply(&one).unwrap().with_trunc(exact.clone()), v.sandwich(&one).unwrap().with_trunc(exact));
    }
}
