//! Vertex operators, formal residues in `z`, and the bilinear identities
//! satisfied by the 1-matrix partition function and by its `e^Ŷ`-deformed
//! tensor counterpart.
//!
//! `V_±(z) = e^{±s Σ_{n≥0} zⁿ t_n} · z^{∓N} · e^{∓Σ_{n≥1} z^{−n}/(nN) ∂_{t_n}}`
//! where the `z^{∓N}` factor realizes the `t_0`-shift at a concrete size and
//! `s` is the normalization of the multiplicative part (see [`AScale`]).

mod conjugation;
mod hirota;

pub use conjugation::{build_conjugated_vertex, conjugation_residual, ConjugatedVertexOp, ConjugationCheck};
pub use hirota::{
    calibrate_convention, hirota_factor, hirota_residual_1mm, tensor_bilinear_factor, tensor_bilinear_residual,
    tensor_reduction_residuals,
    BilinearCheck, BilinearParams, Calibration, TensorBilinearCheck,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use num_traits::One;

use crate::scalar::GaussRat;
use crate::series::{Monomial, Series, TimeExps, TimeVar, TruncSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Normalization of the multiplicative part `e^{±s Σ zⁿ t_n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AScale {
    /// `s = N`, matching the `N` in `e^{−N Σ t_p Tr M^p}`.
    N,
    /// `s = 1`.
    Unit,
}

/// Bookkeeping choices that the residue identity depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VertexConvention {
    pub a_scale: AScale,
    /// Sign of the `z^{±N}` charge carried by `V_+`; `V_−` carries the
    /// opposite one unless `same_charge` is set.
    pub plus_charge: i8,
    pub same_charge: bool,
}

impl Default for VertexConvention {
    fn default() -> Self {
        VertexConvention { a_scale: AScale::N, plus_charge: -1, same_charge: false }
    }
}

impl VertexConvention {
    /// Exponent of `z` in the charge factor of `V_sign` at size `n`.
    pub fn charge(&self, sign: Sign, n: u32) -> i32 {
        let s = self.plus_charge as i32;
        match sign {
            Sign::Plus => s * n as i32,
            Sign::Minus if self.same_charge => s * n as i32,
            Sign::Minus => -s * n as i32,
        }
    }
}

/// `V_±(z)` acting on the times `t[color, ·]` of one set, at matrix size `size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VertexOp {
    pub sign: Sign,
    pub color: u8,
    pub set: u8,
    pub size: u32,
    pub convention: VertexConvention,
}

impl VertexOp {
    pub fn new(sign: Sign, size: u32) -> Self {
        VertexOp { sign, color: 1, set: 0, size, convention: VertexConvention::default() }
    }

    pub fn with_color(mut self, color: u8) -> Self {
        self.color = color;
        self
    }

    pub fn with_set(mut self, set: u8) -> Self {
        self.set = set;
        self
    }

    pub fn with_convention(mut self, convention: VertexConvention) -> Self {
        self.convention = convention;
        self
    }

    fn var(&self, p: u32) -> TimeVar {
        TimeVar { set: self.set, color: self.color, p: p as u8 }
    }

    fn a_coefficient(&self) -> GaussRat {
        let s = match self.convention.a_scale {
            AScale::N => self.size as i64,
            AScale::Unit => 1,
        };
        GaussRat::from_int(self.sign.value() * s)
    }

    /// `±s Σ_{n=0}^{p_max} zⁿ t_n`.
    pub fn a_exponent(&self, p_max: u32, trunc: &TruncSpec) -> Series {
        let c = self.a_coefficient();
        let terms = (0..=p_max).map(|n| (Monomial::time(self.var(n)).with_z(n as i32), c.clone()));
        Series::from_terms(terms, trunc.clone())
    }

    /// `e^{±s Σ_{n≤p_max} zⁿ t_n}` within `trunc`.
    pub fn a_part(&self, p_max: u32, trunc: &TruncSpec) -> Result<Series> {
        self.a_exponent(p_max, trunc).exp_trunc()
    }

    pub fn charge(&self) -> i32 {
        self.convention.charge(self.sign, self.size)
    }

    /// `e^{∓B}`: the shift `t_n → t_n ∓ z^{−n}/(nN)` for every `n ≥ 1`.
    ///
    /// With `exact_weight = Some(w)` the input is taken to be complete up to
    /// weight `w` in this color, and only output terms that cannot receive
    /// contributions from beyond that weight are kept: a term `z^{−b} t^γ` of
    /// `√λ`-degree `hl` survives iff `b + weight_c(γ) + hl ≤ w`.
    pub fn b_shift(&self, s: &Series, exact_weight: Option<u32>) -> Series {
        let sgn = -self.sign.value();
        let mut out = Series::zero(s.trunc().clone());
        for (m, c) in s.terms() {
            let (mine, others): (Vec<(TimeVar, u32)>, Vec<(TimeVar, u32)>) = m
                .times
                .iter()
                .copied()
                .partition(|(v, _)| v.set == self.set && v.color == self.color && v.p >= 1);
            let mut parts = vec![(TimeExps::new(), 0i32, GaussRat::one())];
            for (v, e) in mine {
                let a = GaussRat::real(BigRational::new(
                    BigInt::from(sgn),
                    BigInt::from(v.p as i64 * self.size as i64),
                ));
                let mut next = Vec::with_capacity(parts.len() * (e as usize + 1));
                for (t, zp, cc) in &parts {
                    let mut ak = GaussRat::one();
                    for k in 0..=e {
                        let mut t2 = t.clone();
                        t2.add(v, e - k);
                        let coef = cc * &ak.scale(&BigRational::from_integer(binomial(BigInt::from(e), BigInt::from(k))));
                        next.push((t2, zp - v.p as i32 * k as i32, coef));
                        ak = &ak * &a;
                    }
                }
                parts = next;
            }
            let others = TimeExps::from_pairs(others);
            for (t, zp, cc) in parts {
                if let Some(w) = exact_weight {
                    if (-zp) as u32 + t.weight() + m.hl > w {
                        continue;
                    }
                }
                let mono = Monomial { times: others.merged(&t), z: m.z + zp, ..m.clone() };
                out.add_term(mono, c * &cc);
            }
        }
        out
    }

    /// `V_±(z) s`: the B-part acts first, then the charge, then the A-part.
    ///
    /// `s` must be complete up to weight `exact_weight` in this color; the
    /// A-part uses times up to `trunc.p_max`.
    pub fn apply(&self, s: &Series, exact_weight: u32, trunc: &TruncSpec) -> Result<Series> {
        let shifted = self.b_shift(&s.with_trunc(widen_z(s.trunc(), trunc)), Some(exact_weight)).with_trunc(trunc.clone());
        let charged = shifted.mul_term(&Monomial::z_pow(self.charge()), &GaussRat::one());
        Ok(self.a_part(trunc.p_max, trunc)?.mul_series(&charged))
    }
}

/// `from` with its z-window replaced by that of `to`.
fn widen_z(from: &TruncSpec, to: &TruncSpec) -> TruncSpec {
    from.clone().with_z_window(to.z_window)
}

fn check_window(s: &Series) -> Result<()> {
    let (lo, hi) = s.trunc().z_window;
    if lo >= -1 || hi <= -1 {
        return Err(Error::WindowInsufficient { min: lo, max: hi, reason: "z^-1 is not interior".into() });
    }
    Ok(())
}

/// Coefficient of `z^{−1}`.
pub fn residue_z(s: &Series) -> Result<Series> {
    check_window(s)?;
    let (lo, hi) = s.trunc().z_window;
    if let Some((zmin, zmax)) = s.z_range() {
        if zmin <= lo || zmax >= hi {
            return Err(Error::WindowInsufficient {
                min: lo,
                max: hi,
                reason: format!("terms reach z^{zmin}..z^{zmax}"),
            });
        }
    }
    let terms = s.terms().filter(|(m, _)| m.z == -1).map(|(m, c)| (m.clone().with_z(0), c.clone()));
    Ok(Series::from_terms(terms, s.trunc().clone()))
}

/// `residue_z(f·g)` without forming the full product.
///
/// The factors' low-`z` tails are truncated by construction (they come from
/// a finite-weight partition function), so only the upper edge of each
/// window is checked: a term there means the positive part was cut.
pub fn residue_of_product(f: &Series, g: &Series, out: &TruncSpec) -> Result<Series> {
    for s in [f, g] {
        check_window(s)?;
        let (lo, hi) = s.trunc().z_window;
        if let Some((_, zmax)) = s.z_range() {
            if zmax >= hi {
                return Err(Error::WindowInsufficient { min: lo, max: hi, reason: format!("a factor reaches z^{zmax}") });
            }
        }
    }
    let mut by_z: BTreeMap<i32, Vec<(&Monomial, &GaussRat)>> = BTreeMap::new();
    for (m, c) in g.terms() {
        by_z.entry(m.z).or_default().push((m, c));
    }
    let mut res = Series::zero(out.clone());
    for (m1, c1) in f.terms() {
        let Some(partners) = by_z.get(&(-1 - m1.z)) else { continue };
        for (m2, c2) in partners {
            if m1.hl + m2.hl > out.max_hl || m1.time_degree() + m2.time_degree() > out.max_time_deg {
                continue;
            }
            let (p, twos) = m1.mul(m2);
            let mut c = c1 * *c2;
            if twos != 0 {
                c = c.scale(&crate::series::two_pow(twos));
            }
            res.add_term(p.with_z(0), c);
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr() -> TruncSpec {
        TruncSpec::new(0, 3, 4, (-6, 6))
    }

    #[test]
    fn residue_examples() {
        assert!(residue_z(&Series::one(tr())).unwrap().is_zero());
        let t = Monomial::time(TimeVar::new(1, 1));
        let s = Series::from_term(t.clone().with_z(-1), GaussRat::one(), tr());
        assert_eq!(residue_z(&s).unwrap(), Series::from_term(t, GaussRat::one(), tr()));
        let s = Series::from_terms(
            [(Monomial::z_pow(2), GaussRat::one()), (Monomial::z_pow(-2), GaussRat::one())],
            tr(),
        );
        assert!(residue_z(&s).unwrap().is_zero());
    }

    #[test]
    fn residue_rejects_boundary_terms() {
        let s = Series::from_term(Monomial::z_pow(6), GaussRat::one(), tr());
        assert!(matches!(residue_z(&s), Err(Error::WindowInsufficient { .. })));
        let narrow = Series::one(TruncSpec::new(0, 0, 0, (-1, 3)));
        assert!(residue_z(&narrow).is_err());
    }

    #[test]
    fn vertex_on_one_is_the_charge() {
        for n in 1..=3 {
            let v = VertexOp::new(Sign::Plus, n);
            let one = Series::one(TruncSpec::new(0, 0, 0, (-8, 8)));
            let got = v.apply(&one, 4, one.trunc()).unwrap();
            assert_eq!(got, Series::from_term(Monomial::z_pow(-(n as i32)), GaussRat::one(), one.trunc().clone()));
        }
    }

    #[test]
    fn b_part_fixes_constants_and_shifts_times() {
        let v = VertexOp::new(Sign::Plus, 2);
        let c = Series::constant(GaussRat::from_int(7), tr());
        assert_eq!(v.b_shift(&c, None), c);
        let t2 = Series::var(TimeVar::new(1, 2), tr());
        // t_2 → t_2 − z^{−2}/(2·2)
        let want = Series::from_terms(
            [(Monomial::time(TimeVar::new(1, 2)), GaussRat::one()), (Monomial::z_pow(-2), GaussRat::from_ratio(-1, 4))],
            tr(),
        );
        assert_eq!(v.b_shift(&t2, None), want);
    }

    #[test]
    fn a_part_on_one() {
        let v = VertexOp::new(Sign::Minus, 1);
        let trunc = TruncSpec::new(0, 2, 1, (-6, 6));
        let a = v.a_part(1, &trunc).unwrap();
        let t0 = Monomial::time(TimeVar::new(1, 0));
        assert_eq!(a.coeff(&t0), GaussRat::from_int(-1));
        assert_eq!(a.coeff(&Monomial::time_pow(TimeVar::new(1, 1), 2).with_z(2)), GaussRat::from_ratio(1, 2));
    }
}
