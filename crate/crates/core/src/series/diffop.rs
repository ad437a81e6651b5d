use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use super::monomial::{normalize_s2, Monomial, TimeExps, TimeVar};
use super::series::{derive_monomial, two_pow, Series};
use crate::error::{Error, Result};
use crate::scalar::GaussRat;

/// A finite differential operator in normal order: every term is
/// `c · m · ∂^α`, multiplication to the left of all derivatives.
///
/// Coefficients with `√λ`-degree above `max_hl` are discarded, which is what
/// makes exponentials of `√λ`-carrying operators finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    terms: BTreeMap<(Monomial, TimeExps), GaussRat>,
    max_hl: u32,
}

impl DiffOp {
    pub fn zero(max_hl: u32) -> Self {
        DiffOp { terms: BTreeMap::new(), max_hl }
    }

    pub fn identity(max_hl: u32) -> Self {
        let mut op = DiffOp::zero(max_hl);
        op.add_term(Monomial::one(), TimeExps::new(), GaussRat::one());
        op
    }

    /// Multiplication by `c·m`.
    pub fn multiplication(m: Monomial, c: GaussRat, max_hl: u32) -> Self {
        let mut op = DiffOp::zero(max_hl);
        op.add_term(m, TimeExps::new(), c);
        op
    }

    /// `∂/∂v`.
    pub fn derivative(v: TimeVar, max_hl: u32) -> Self {
        let mut op = DiffOp::zero(max_hl);
        op.add_term(Monomial::one(), TimeExps::from_pairs([(v, 1)]), GaussRat::one());
        op
    }

    pub fn max_hl(&self) -> u32 {
        self.max_hl
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &TimeExps, &GaussRat)> + '_ {
        self.terms.iter().map(|((m, d), c)| (m, d, c))
    }

    /// Whether no term multiplies by a time variable.
    pub fn is_pure_derivative(&self) -> bool {
        self.terms.keys().all(|(m, _)| m.times.is_empty())
    }

    pub fn add_term(&mut self, mut m: Monomial, derivs: TimeExps, mut c: GaussRat) {
        if c.is_zero() || m.hl > self.max_hl {
            return;
        }
        if m.s2 < 0 || m.s2 > 1 {
            let (s2, twos) = normalize_s2(m.s2);
            m.s2 = s2;
            c = c.scale(&two_pow(twos));
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((m, derivs)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero(self.max_hl.min(other.max_hl));
        for ((m, d), c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(m.clone(), d.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.scale(&-GaussRat::one()))
    }

    pub fn scale(&self, c: &GaussRat) -> DiffOp {
        let mut out = DiffOp::zero(self.max_hl);
        for ((m, d), x) in &self.terms {
            out.add_term(m.clone(), d.clone(), x * c);
        }
        out
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial, &TimeExps) -> bool) -> DiffOp {
        DiffOp {
            terms: self
                .terms
                .iter()
                .filter(|((m, d), _)| keep(m, d))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
            max_hl: self.max_hl,
        }
    }

    /// Renames every time variable, e.g. to move an operator onto `t̃`.
    pub fn map_vars(&self, f: impl Fn(TimeVar) -> TimeVar) -> DiffOp {
        let mut out = DiffOp::zero(self.max_hl);
        for ((m, d), c) in &self.terms {
            let mut m = m.clone();
            m.times = TimeExps::from_pairs(m.times.iter().map(|&(v, e)| (f(v), e)));
            let d = TimeExps::from_pairs(d.iter().map(|&(v, e)| (f(v), e)));
            out.add_term(m, d, c.clone());
        }
        out
    }

    /// Substitutes a concrete `N` in every coefficient.
    pub fn eval_n(&self, n: u32) -> Result<DiffOp> {
        let mut out = DiffOp::zero(self.max_hl);
        for ((m, d), c) in &self.terms {
            let s = Series::from_term(m.clone(), c.clone(), super::TruncSpec::wide().with_max_hl(self.max_hl));
            for (m2, c2) in s.eval_n(n)?.terms() {
                out.add_term(m2.clone(), d.clone(), c2.clone());
            }
        }
        Ok(out)
    }

    /// `self ∘ other`, brought back to normal order with the Leibniz rule
    /// `∂^α b = Σ_{γ≤α} C(α,γ) (∂^γ b) ∂^{α−γ}`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero(self.max_hl.min(other.max_hl));
        for ((a, alpha), c1) in &self.terms {
            for ((b, beta), c2) in &other.terms {
                if a.hl + b.hl > out.max_hl {
                    continue;
                }
                let c12 = c1 * c2;
                for gamma in sub_multi_indices(alpha, &b.times) {
                    let Some((db, falling)) = derive_monomial(b, &gamma) else { continue };
                    let mut factor = falling;
                    let mut rest = alpha.clone();
                    for &(v, g) in gamma.iter() {
                        factor *= binomial(BigInt::from(alpha.exp(v)), BigInt::from(g));
                        rest.remove(v, g);
                    }
                    let (m, twos) = a.mul(&db);
                    let mut coeff = &c12 * &GaussRat::from_bigint(factor);
                    if twos != 0 {
                        coeff = coeff.scale(&two_pow(twos));
                    }
                    out.add_term(m, rest.merged(beta), coeff);
                }
            }
        }
        out
    }

    /// `[self, other] = self∘other − other∘self`.
    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        self.compose(other).sub(&other.compose(self))
    }

    /// `e^A B e^{−A} = Σ_k ad_A^k(B)/k!`, failing if the nested commutators
    /// have not vanished after `cap` steps.
    pub fn conjugate_exp(a: &DiffOp, b: &DiffOp, cap: usize) -> Result<DiffOp> {
        let mut out = b.clone();
        let mut term = b.clone();
        for k in 1..=cap {
            term = a.commutator(&term).scale(&GaussRat::from_ratio(1, k as i64));
            if term.is_zero() {
                return Ok(out);
            }
            out = out.add(&term);
        }
        Err(Error::NoNilpotency(cap))
    }

    /// Applies the operator: derivatives act first, then multiplication.
    pub fn apply(&self, s: &Series) -> Series {
        let mut by_derivs: BTreeMap<&TimeExps, Vec<(&Monomial, &GaussRat)>> = BTreeMap::new();
        for ((m, d), c) in &self.terms {
            by_derivs.entry(d).or_default().push((m, c));
        }
        let mut out = Series::zero(s.trunc().clone());
        for (d, mults) in by_derivs {
            let ds = if d.is_empty() { s.clone() } else { s.derive_multi(d) };
            if ds.is_zero() {
                continue;
            }
            for (m, c) in mults {
                out = out.add_series(&ds.mul_term(m, c));
            }
        }
        out
    }

    /// `Σ_k op^k(s)/k!`, failing if the terms have not vanished after `cap`
    /// applications.
    pub fn exp_apply(&self, s: &Series, cap: usize) -> Result<Series> {
        let mut out = s.clone();
        let mut term = s.clone();
        for k in 1..=cap {
            term = self.apply(&term).scale(&GaussRat::from_ratio(1, k as i64));
            if term.is_zero() {
                return Ok(out);
            }
            out = out.add_series(&term);
        }
        Err(Error::NoNilpotency(cap))
    }
}

/// All `γ ≤ α` that can act nontrivially on a monomial with exponents `avail`.
fn sub_multi_indices(alpha: &TimeExps, avail: &TimeExps) -> Vec<TimeExps> {
    let mut out = vec![TimeExps::new()];
    for &(v, a) in alpha.iter() {
        let top = a.min(avail.exp(v));
        if top == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * (top as usize + 1));
        for g in &out {
            for k in 0..=top {
                let mut h = g.clone();
                h.add(v, k);
                next.push(h);
            }
        }
        out = next;
    }
    out
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((m, d), c)| {
                let mut s = format!("({c})");
                if !m.is_one() {
                    s.push_str(&format!(" * {m}"));
                }
                for (v, e) in d.iter() {
                    s.push_str(&format!(" * d{v}^{e}"));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TruncSpec;

    fn t(p: u8) -> TimeVar {
        TimeVar::new(1, p)
    }

    #[test]
    fn euler_operator_counts_degree() {
        let e = DiffOp::multiplication(Monomial::time(t(1)), GaussRat::one(), 8).compose(&DiffOp::derivative(t(1), 8));
        let s = Series::from_term(Monomial::time_pow(t(1), 5), GaussRat::one(), TruncSpec::wide());
        assert_eq!(e.apply(&s), s.scale(&GaussRat::from_int(5)));
    }

    #[test]
    fn canonical_commutation() {
        let d = DiffOp::derivative(t(2), 8);
        let x = DiffOp::multiplication(Monomial::time(t(2)), GaussRat::one(), 8);
        assert_eq!(d.commutator(&x), DiffOp::identity(8));
    }

    #[test]
    fn shift_by_conjugation() {
        let d = DiffOp::derivative(t(1), 8);
        let x = DiffOp::multiplication(Monomial::time(t(1)), GaussRat::one(), 8);
        let got = DiffOp::conjugate_exp(&d, &x, 10).unwrap();
        assert_eq!(got, x.add(&DiffOp::identity(8)));
    }

    #[test]
    fn nilpotency_cap_is_reported() {
        // ad_{t∂} never terminates on t
        let e = DiffOp::multiplication(Monomial::time(t(1)), GaussRat::one(), 8).compose(&DiffOp::derivative(t(1), 8));
        let x = DiffOp::multiplication(Monomial::time(t(1)), GaussRat::one(), 8);
        assert_eq!(DiffOp::conjugate_exp(&e, &x, 5), Err(Error::NoNilpotency(5)));
    }

    #[test]
    fn second_derivative_composition() {
        let d = DiffOp::derivative(t(1), 8);
        let s = Series::from_term(Monomial::time_pow(t(1), 2), GaussRat::one(), TruncSpec::wide());
        assert_eq!(d.compose(&d).apply(&s), Series::constant(GaussRat::from_int(2), TruncSpec::wide()));
    }
}
