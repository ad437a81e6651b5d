use std::fmt;

use smallvec::SmallVec;

/// A coupling constant `t^c_p` (or `t̃^c_p` when `set == 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeVar {
    pub set: u8,
    pub color: u8,
    pub p: u8,
}

impl TimeVar {
    pub const fn new(color: u8, p: u8) -> Self {
        TimeVar { set: 0, color, p }
    }

    pub const fn tilde(color: u8, p: u8) -> Self {
        TimeVar { set: 1, color, p }
    }

    pub fn with_set(self, set: u8) -> Self {
        TimeVar { set, ..self }
    }
}

impl fmt::Display for TimeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.set == 0 { "t" } else { "tt" };
        write!(f, "{}[{},{}]", name, self.color, self.p)
    }
}

/// Sorted sparse exponent vector over time variables; exponents are positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeExps(SmallVec<[(TimeVar, u32); 4]>);

impl TimeExps {
    pub fn new() -> Self {
        TimeExps(SmallVec::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (TimeVar, u32)>) -> Self {
        let mut out = TimeExps::new();
        for (v, e) in pairs {
            out.add(v, e);
        }
        out
    }

    /// Multiset of variables (repeats allowed).
    pub fn from_vars(vars: impl IntoIterator<Item = TimeVar>) -> Self {
        Self::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(TimeVar, u32)> + '_ {
        self.0.iter()
    }

    pub fn exp(&self, v: TimeVar) -> u32 {
        match self.0.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn add(&mut self, v: TimeVar, e: u32) {
        if e == 0 {
            return;
        }
        match self.0.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => self.0[i].1 += e,
            Err(i) => self.0.insert(i, (v, e)),
        }
    }

    /// Lowers the exponent of `v` by `e`; `false` (and no change) if it would go negative.
    pub fn remove(&mut self, v: TimeVar, e: u32) -> bool {
        match self.0.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => {
                let cur = self.0[i].1;
                if cur < e {
                    return false;
                }
                if cur == e {
                    self.0.remove(i);
                } else {
                    self.0[i].1 = cur - e;
                }
                true
            }
            Err(_) => e == 0,
        }
    }

    pub fn merged(&self, other: &TimeExps) -> TimeExps {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        TimeExps(out)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// `Σ p·e`: the grading under which `t_p` has weight `p`.
    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(v, e)| v.p as u32 * e).sum()
    }

    pub fn max_p(&self) -> u32 {
        self.0.iter().map(|(v, _)| v.p as u32).max().unwrap_or(0)
    }

    /// Largest total degree carried by a single `(set, color)` family.
    pub fn max_color_degree(&self) -> u32 {
        let mut best = 0;
        let mut cur_key = None;
        let mut cur = 0;
        for (v, e) in self.0.iter() {
            let key = (v.set, v.color);
            if cur_key != Some(key) {
                cur_key = Some(key);
                cur = 0;
            }
            cur += e;
            best = best.max(cur);
        }
        best
    }

    /// Whether `self` divides `other` as monomials.
    pub fn divides(&self, other: &TimeExps) -> bool {
        self.0.iter().all(|&(v, e)| other.exp(v) >= e)
    }
}

/// `√λ^hl · √N^hn · √2^s2 · z^z · ∏ t^e`.
///
/// `s2` is kept in `{0, 1}`: even powers of `√2` are folded into the
/// coefficient by the series arithmetic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub hl: u32,
    pub hn: i32,
    pub s2: i32,
    pub z: i32,
    pub times: TimeExps,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn is_one(&self) -> bool {
        self.hl == 0 && self.hn == 0 && self.s2 == 0 && self.z == 0 && self.times.is_empty()
    }

    pub fn sqrt_lambda(k: u32) -> Self {
        Monomial { hl: k, ..Default::default() }
    }

    pub fn sqrt_n(k: i32) -> Self {
        Monomial { hn: k, ..Default::default() }
    }

    /// `N^k`.
    pub fn n_pow(k: i32) -> Self {
        Monomial { hn: 2 * k, ..Default::default() }
    }

    pub fn z_pow(k: i32) -> Self {
        Monomial { z: k, ..Default::default() }
    }

    pub fn time(v: TimeVar) -> Self {
        Self::time_pow(v, 1)
    }

    pub fn time_pow(v: TimeVar, e: u32) -> Self {
        Monomial { times: TimeExps::from_pairs([(v, e)]), ..Default::default() }
    }

    pub fn from_times(times: TimeExps) -> Self {
        Monomial { times, ..Default::default() }
    }

    pub fn with_hl(mut self, hl: u32) -> Self {
        self.hl = hl;
        self
    }

    pub fn with_hn(mut self, hn: i32) -> Self {
        self.hn = hn;
        self
    }

    pub fn with_z(mut self, z: i32) -> Self {
        self.z = z;
        self
    }

    pub fn time_degree(&self) -> u32 {
        self.times.degree()
    }

    /// Product, together with the number of factors of 2 released by
    /// normalizing the `√2` exponent.
    pub fn mul(&self, other: &Monomial) -> (Monomial, i32) {
        let (s2, twos) = normalize_s2(self.s2 + other.s2);
        (
            Monomial {
                hl: self.hl + other.hl,
                hn: self.hn + other.hn,
                s2,
                z: self.z + other.z,
                times: if other.times.is_empty() {
                    self.times.clone()
                } else if self.times.is_empty() {
                    other.times.clone()
                } else {
                    self.times.merged(&other.times)
                },
            },
            twos,
        )
    }

    /// Same monomial without its time part.
    pub fn scalar_part(&self) -> Monomial {
        Monomial { times: TimeExps::new(), ..self.clone() }
    }
}

/// Splits `√2^k` into `√2^{k mod 2} · 2^{⌊k/2⌋}`.
pub fn normalize_s2(k: i32) -> (i32, i32) {
    let r = k.rem_euclid(2);
    (r, (k - r) / 2)
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.hl != 0 {
            parts.push(format!("sqrtLam^{}", self.hl));
        }
        if self.hn != 0 {
            parts.push(format!("sqrtN^{}", self.hn));
        }
        if self.s2 != 0 {
            parts.push(format!("sqrt2^{}", self.s2));
        }
        if self.z != 0 {
            parts.push(format!("z^{}", self.z));
        }
        for (v, e) in self.times.iter() {
            parts.push(format!("{v}^{e}"));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}
