use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use super::monomial::{normalize_s2, Monomial, TimeExps, TimeVar};
use super::trunc::TruncSpec;
use crate::error::{Error, Result};
use crate::scalar::GaussRat;

const MAX_SERIES_STEPS: usize = 10_000;

/// A truncated multivariate Laurent series with Gaussian-rational coefficients.
///
/// Terms are kept in canonical monomial order; zero coefficients are never
/// stored and every stored monomial is admitted by `trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    terms: BTreeMap<Monomial, GaussRat>,
    trunc: TruncSpec,
}

pub(crate) fn two_pow(k: i32) -> BigRational {
    let p = BigRational::from_integer(BigInt::one() << k.unsigned_abs());
    if k >= 0 {
        p
    } else {
        p.recip()
    }
}

impl Series {
    pub fn zero(trunc: TruncSpec) -> Self {
        Series { terms: BTreeMap::new(), trunc }
    }

    pub fn one(trunc: TruncSpec) -> Self {
        Self::constant(GaussRat::one(), trunc)
    }

    pub fn constant(c: GaussRat, trunc: TruncSpec) -> Self {
        Self::from_term(Monomial::one(), c, trunc)
    }

    pub fn from_term(m: Monomial, c: GaussRat, trunc: TruncSpec) -> Self {
        let mut s = Series::zero(trunc);
        s.add_term(m, c);
        s
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, GaussRat)>, trunc: TruncSpec) -> Self {
        let mut s = Series::zero(trunc);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    /// A single time variable with coefficient one.
    pub fn var(v: TimeVar, trunc: TruncSpec) -> Self {
        Self::from_term(Monomial::time(v), GaussRat::one(), trunc)
    }

    pub fn trunc(&self) -> &TruncSpec {
        &self.trunc
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRat)> + '_ {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, GaussRat> {
        self.terms
    }

    /// Adds `c·m`, normalizing the `√2` exponent; silently dropped if `m` is
    /// outside the window.
    pub fn add_term(&mut self, mut m: Monomial, mut c: GaussRat) {
        if c.is_zero() {
            return;
        }
        if m.s2 < 0 || m.s2 > 1 {
            let (s2, twos) = normalize_s2(m.s2);
            m.s2 = s2;
            c = c.scale(&two_pow(twos));
        }
        if !self.trunc.admits(&m) {
            return;
        }
        accumulate(&mut self.terms, m, c);
    }

    /// Exact coefficient of `m`; errors if `m` lies outside the window.
    pub fn coeff_of(&self, m: &Monomial) -> Result<GaussRat> {
        if !self.trunc.admits(m) {
            return Err(Error::OutsideTruncation(m.to_string()));
        }
        Ok(self.coeff(m))
    }

    /// Coefficient of `m` without the window check.
    pub fn coeff(&self, m: &Monomial) -> GaussRat {
        self.terms.get(m).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn constant_term(&self) -> GaussRat {
        self.coeff(&Monomial::one())
    }

    pub fn with_trunc(&self, trunc: TruncSpec) -> Series {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| trunc.admits(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Series { terms, trunc }
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Series {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| keep(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Series { terms, trunc: self.trunc.clone() }
    }

    /// Sets every time variable to zero.
    pub fn at_times_zero(&self) -> Series {
        self.filter(|m| m.times.is_empty())
    }

    /// Drops every term containing a variable rejected by `keep_var`.
    pub fn restrict_vars(&self, keep_var: impl Fn(&TimeVar) -> bool) -> Series {
        self.filter(|m| m.times.iter().all(|(v, _)| keep_var(v)))
    }

    pub fn scale(&self, c: &GaussRat) -> Series {
        if c.is_zero() {
            return Series::zero(self.trunc.clone());
        }
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        Series { terms, trunc: self.trunc.clone() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &GaussRat) -> Series {
        let mut out = Series::zero(self.trunc.clone());
        for (k, x) in &self.terms {
            let (p, twos) = k.mul(m);
            if !out.trunc.admits(&p) {
                continue;
            }
            let mut v = x * c;
            if twos != 0 {
                v = v.scale(&two_pow(twos));
            }
            accumulate(&mut out.terms, p, v);
        }
        out
    }

    pub fn add_series(&self, other: &Series) -> Series {
        let trunc = self.trunc.meet(&other.trunc);
        let mut terms = BTreeMap::new();
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            if trunc.admits(m) {
                accumulate(&mut terms, m.clone(), c.clone());
            }
        }
        Series { terms, trunc }
    }

    pub fn sub_series(&self, other: &Series) -> Series {
        self.add_series(&-other)
    }

    /// Truncated product; the stricter window of the two operands is used.
    pub fn mul_series(&self, other: &Series) -> Series {
        let trunc = self.trunc.meet(&other.trunc);
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc: FxHashMap<Monomial, GaussRat> = FxHashMap::default();
        for (m1, c1) in &small.terms {
            for (m2, c2) in &large.terms {
                if m1.hl + m2.hl > trunc.max_hl {
                    // terms are ordered by hl first
                    break;
                }
                let (p, twos) = m1.mul(m2);
                if !trunc.admits(&p) {
                    continue;
                }
                let mut v = c1 * c2;
                if twos != 0 {
                    v = v.scale(&two_pow(twos));
                }
                match acc.get_mut(&p) {
                    Some(x) => *x += &v,
                    None => {
                        acc.insert(p, v);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Series { terms, trunc }
    }

    pub fn pow(&self, k: u32) -> Series {
        let mut acc = Series::one(self.trunc.clone());
        for _ in 0..k {
            acc = acc.mul_series(self);
        }
        acc
    }

    fn check_nilpotent(&self, allow_constant: bool) -> Result<()> {
        for m in self.terms.keys() {
            let grows = m.hl > 0 || !m.times.is_empty();
            if !grows && !(allow_constant && m.is_one()) {
                return Err(Error::NotNilpotent(m.to_string()));
            }
        }
        Ok(())
    }

    /// `Σ_k a^k / k!`, truncated.
    pub fn exp_trunc(&self) -> Result<Series> {
        self.check_nilpotent(false)?;
        let mut out = Series::one(self.trunc.clone());
        let mut power = Series::one(self.trunc.clone());
        for k in 1..MAX_SERIES_STEPS {
            power = power.mul_series(self).scale(&GaussRat::from_ratio(1, k as i64));
            if power.is_zero() {
                return Ok(out);
            }
            out = out.add_series(&power);
        }
        Err(Error::Budget("exp_trunc did not terminate".into()))
    }

    /// Principal logarithm of a series whose constant term is exactly 1.
    pub fn log_trunc(&self) -> Result<Series> {
        if self.constant_term() != GaussRat::one() {
            return Err(Error::NotInvertible);
        }
        let u = self.sub_series(&Series::one(self.trunc.clone()));
        u.check_nilpotent(false)?;
        let mut out = Series::zero(self.trunc.clone());
        let mut power = Series::one(self.trunc.clone());
        for k in 1..MAX_SERIES_STEPS {
            power = power.mul_series(&u);
            if power.is_zero() {
                return Ok(out);
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add_series(&power.scale(&GaussRat::from_ratio(sign, k as i64)));
        }
        Err(Error::Budget("log_trunc did not terminate".into()))
    }

    /// Multiplicative inverse for a series `c0·(1 + u)` with `u` nilpotent.
    pub fn inv_trunc(&self) -> Result<Series> {
        let c0 = self.constant_term().inv().ok_or(Error::NotInvertible)?;
        let normalized = self.scale(&c0);
        let u = normalized.sub_series(&Series::one(self.trunc.clone()));
        u.check_nilpotent(false)?;
        let neg_u = -&u;
        let mut out = Series::one(self.trunc.clone());
        let mut power = Series::one(self.trunc.clone());
        for _ in 1..MAX_SERIES_STEPS {
            power = power.mul_series(&neg_u);
            if power.is_zero() {
                return Ok(out.scale(&c0));
            }
            out = out.add_series(&power);
        }
        Err(Error::Budget("inv_trunc did not terminate".into()))
    }

    /// Formal partial derivative in a time variable.
    pub fn derive(&self, v: TimeVar) -> Series {
        self.derive_multi(&TimeExps::from_pairs([(v, 1)]))
    }

    /// `∂^α` for a multi-index `α`.
    pub fn derive_multi(&self, alpha: &TimeExps) -> Series {
        let mut out = Series::zero(self.trunc.clone());
        for (m, c) in &self.terms {
            if let Some((dm, factor)) = derive_monomial(m, alpha) {
                if out.trunc.admits(&dm) {
                    accumulate(&mut out.terms, dm, c * &GaussRat::from_bigint(factor));
                }
            }
        }
        out
    }

    /// Substitutes `√N = √n` for a concrete size `n`.
    ///
    /// Odd powers of `√N` are only representable when `n` is a perfect
    /// square or twice one.
    pub fn eval_n(&self, n: u32) -> Result<Series> {
        if n == 0 {
            return Err(Error::Evaluation { n, reason: "N must be positive".into() });
        }
        let root = integer_sqrt(n);
        let half_root = if n % 2 == 0 { integer_sqrt(n / 2) } else { None };
        let mut out = Series::zero(self.trunc.clone());
        for (m, c) in &self.terms {
            let (base, odd) = (m.hn.div_euclid(2), m.hn.rem_euclid(2));
            let mut coeff = c.scale(&rat_pow(n as i64, base));
            let mut mono = m.clone();
            mono.hn = 0;
            if odd == 1 {
                if let Some(r) = root {
                    coeff = coeff.scale(&BigRational::from_integer(BigInt::from(r)));
                } else if let Some(k) = half_root {
                    coeff = coeff.scale(&BigRational::from_integer(BigInt::from(k)));
                    mono.s2 += 1;
                } else {
                    return Err(Error::Evaluation {
                        n,
                        reason: format!("odd power of sqrt(N) in {m}"),
                    });
                }
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }

    /// Highest and lowest `z` exponents present.
    pub fn z_range(&self) -> Option<(i32, i32)> {
        let lo = self.terms.keys().map(|m| m.z).min()?;
        let hi = self.terms.keys().map(|m| m.z).max()?;
        Some((lo, hi))
    }

    /// One term per line: `(re,im) * sqrtLam^a * sqrtN^b * sqrt2^c * z^d * t[c,p]^e ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in self.text_lines() {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn text_lines(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let coeff = format!("({},{})", fmt_rat(&c.re), fmt_rat(&c.im));
                if m.is_one() {
                    coeff
                } else {
                    format!("{coeff} * {m}")
                }
            })
            .collect()
    }

    pub fn parse(text: &str, trunc: TruncSpec) -> Result<Series> {
        let mut s = Series::zero(trunc);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (m, c) = parse_term(line)?;
            s.add_term(m, c);
        }
        Ok(s)
    }
}

fn accumulate(terms: &mut BTreeMap<Monomial, GaussRat>, m: Monomial, c: GaussRat) {
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += &c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// `∂^α m` as `(monomial, falling-factorial factor)`, `None` if it vanishes.
pub(crate) fn derive_monomial(m: &Monomial, alpha: &TimeExps) -> Option<(Monomial, BigInt)> {
    let mut out = m.clone();
    let mut factor = BigInt::one();
    for &(v, k) in alpha.iter() {
        let e = m.times.exp(v);
        if e < k {
            return None;
        }
        for j in 0..k {
            factor *= e - j;
        }
        out.times.remove(v, k);
    }
    Some((out, factor))
}

fn integer_sqrt(n: u32) -> Option<u32> {
    let r = (n as f64).sqrt().round() as u32;
    (r * r == n).then_some(r)
}

fn rat_pow(base: i64, e: i32) -> BigRational {
    let p = BigRational::from_integer(num_traits::pow(BigInt::from(base), e.unsigned_abs() as usize));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rat(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn parse_term(line: &str) -> Result<(Monomial, GaussRat)> {
    let bad = || Error::Parse(format!("bad term `{line}`"));
    let mut parts = line.split(" * ");
    let coeff = parts.next().ok_or_else(bad)?;
    let inner = coeff.strip_prefix('(').and_then(|c| c.strip_suffix(')')).ok_or_else(bad)?;
    let (re, im) = inner.split_once(',').ok_or_else(bad)?;
    let c = GaussRat::new(parse_rat(re)?, parse_rat(im)?);
    let mut m = Monomial::one();
    for factor in parts {
        let (name, exp) = factor.rsplit_once('^').ok_or_else(bad)?;
        let e: i64 = exp.parse().map_err(|_| bad())?;
        match name {
            "sqrtLam" => m.hl = u32::try_from(e).map_err(|_| bad())?,
            "sqrtN" => m.hn = e as i32,
            "sqrt2" => m.s2 = e as i32,
            "z" => m.z = e as i32,
            _ => {
                let (set, rest) = if let Some(r) = name.strip_prefix("tt[") {
                    (1, r)
                } else if let Some(r) = name.strip_prefix("t[") {
                    (0, r)
                } else {
                    return Err(bad());
                };
                let (c, p) = rest.strip_suffix(']').and_then(|r| r.split_once(',')).ok_or_else(bad)?;
                let v = TimeVar {
                    set,
                    color: c.parse().map_err(|_| bad())?,
                    p: p.parse().map_err(|_| bad())?,
                };
                m.times.add(v, u32::try_from(e).map_err(|_| bad())?);
            }
        }
    }
    Ok((m, c))
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", self.text_lines().join(" + "))
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        self.add_series(o)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        self.sub_series(o)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        self.mul_series(o)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(&-GaussRat::one())
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        -&self
    }
}


/// Serialized as the list of its text lines.
impl serde::Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.text_lines())
    }
}
