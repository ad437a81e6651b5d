//! Gaussian Hermitian-matrix moments `⟨∏ Tr M^{p_i}⟩` with
//! `⟨M_ij M_kl⟩ = δ_il δ_jk / N`.
//!
//! Each Wick pairing `π` of the `n = Σ p_i` matrix slots contributes
//! `N^{c(γπ) − n/2}` where `γ` cycles the slots of each trace and `c` counts
//! cycles (the faces of the glued surface). The enumerator keeps the cycle
//! structure of the partial permutation up to date while pairing, so each
//! leaf of the recursion costs O(1). Results are stored as face-count
//! histograms and memoized by the sorted list of powers.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::pairing::{cycle_count, matchings};
use super::WickPattern;
use crate::scalar::GaussRat;
use crate::series::{Monomial, Series, TruncSpec};

/// Multiset of trace powers. Zero powers stand for `Tr 1 = N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceWord {
    powers: Vec<u32>,
}

impl TraceWord {
    pub fn new(mut powers: Vec<u32>) -> Self {
        powers.sort_unstable();
        TraceWord { powers }
    }

    pub fn powers(&self) -> &[u32] {
        &self.powers
    }

    /// Number of matrix slots `Σ p_i`.
    pub fn slots(&self) -> usize {
        self.powers.iter().map(|&p| p as usize).sum()
    }

    fn zeros(&self) -> usize {
        self.powers.iter().filter(|&&p| p == 0).count()
    }

    fn nonzero(&self) -> Vec<u32> {
        self.powers.iter().copied().filter(|&p| p > 0).collect()
    }
}

impl From<&[u32]> for TraceWord {
    fn from(p: &[u32]) -> Self {
        TraceWord::new(p.to_vec())
    }
}

/// `γ`: successor of each slot inside its trace.
fn trace_successor(powers: &[u32]) -> Vec<u32> {
    let mut gamma = Vec::with_capacity(powers.iter().sum::<u32>() as usize);
    let mut offset = 0u32;
    for &p in powers {
        for j in 0..p {
            gamma.push(offset + (j + 1) % p);
        }
        offset += p;
    }
    gamma
}

/// Incremental cycle tracker for `σ = γ∘π` while `π` is built pair by pair.
#[derive(Clone)]
struct Tracker {
    gamma: Vec<u32>,
    paired: Vec<bool>,
    // start_of[e]: start of the open path ending at e; end_of[s] likewise
    start_of: Vec<u32>,
    end_of: Vec<u32>,
    cycles: u32,
    hist: Vec<u64>,
}

enum Undo {
    Closed,
    Merged { s: u32, e: u32, u: u32, v: u32 },
}

impl Tracker {
    fn new(gamma: Vec<u32>) -> Self {
        let n = gamma.len();
        Tracker {
            gamma,
            paired: vec![false; n],
            start_of: (0..n as u32).collect(),
            end_of: (0..n as u32).collect(),
            cycles: 0,
            hist: vec![0; n + 1],
        }
    }

    fn add_arc(&mut self, u: u32, v: u32) -> Undo {
        let s = self.start_of[u as usize];
        if s == v {
            self.cycles += 1;
            return Undo::Closed;
        }
        let e = self.end_of[v as usize];
        self.end_of[s as usize] = e;
        self.start_of[e as usize] = s;
        Undo::Merged { s, e, u, v }
    }

    fn undo(&mut self, x: Undo) {
        match x {
            Undo::Closed => self.cycles -= 1,
            Undo::Merged { s, e, u, v } => {
                self.end_of[s as usize] = u;
                self.start_of[e as usize] = v;
            }
        }
    }

    /// Pairs `a` with `b`: `σ(a) = γ(b)`, `σ(b) = γ(a)`.
    fn pair(&mut self, a: u32, b: u32) -> (Undo, Undo) {
        self.paired[a as usize] = true;
        self.paired[b as usize] = true;
        let x = self.add_arc(a, self.gamma[b as usize]);
        let y = self.add_arc(b, self.gamma[a as usize]);
        (x, y)
    }

    fn unpair(&mut self, a: u32, b: u32, (x, y): (Undo, Undo)) {
        self.undo(y);
        self.undo(x);
        self.paired[a as usize] = false;
        self.paired[b as usize] = false;
    }

    fn first_free(&self, from: usize) -> Option<usize> {
        (from..self.paired.len()).find(|&i| !self.paired[i])
    }

    fn run(&mut self, from: usize) {
        let Some(a) = self.first_free(from) else {
            self.hist[self.cycles as usize] += 1;
            return;
        };
        for b in a + 1..self.paired.len() {
            if self.paired[b] {
                continue;
            }
            let undo = self.pair(a as u32, b as u32);
            self.run(a + 1);
            self.unpair(a as u32, b as u32, undo);
        }
    }
}

fn enumerate_histogram(powers: &[u32]) -> Vec<u64> {
    let gamma = trace_successor(powers);
    let n = gamma.len();
    if n % 2 == 1 {
        return vec![0; n + 1];
    }
    if n < 10 {
        let mut t = Tracker::new(gamma);
        t.run(0);
        return t.hist;
    }
    // split on the partner of slot 0
    let base = Tracker::new(gamma);
    (1..n)
        .into_par_iter()
        .map(|b| {
            let mut t = base.clone();
            t.pair(0, b as u32);
            t.run(1);
            t.hist
        })
        .reduce(
            || vec![0; n + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

static HISTOGRAMS: Lazy<RwLock<FxHashMap<Vec<u32>, Arc<Vec<u64>>>>> = Lazy::new(Default::default);

/// Number of pairings with each face count, for the nonzero powers of `w`.
///
/// Index `f` of the result counts pairings whose glued surface has `f`
/// faces (ignoring `Tr 1` factors).
pub fn face_histogram(w: &TraceWord) -> Arc<Vec<u64>> {
    let key = w.nonzero();
    if let Some(h) = HISTOGRAMS.read().get(&key) {
        return h.clone();
    }
    let h = Arc::new(enumerate_histogram(&key));
    HISTOGRAMS.write().entry(key).or_insert(h).clone()
}

/// `⟨∏ Tr M^{p_i}⟩` as a Laurent polynomial in `N`.
pub fn hermitian_moment(w: &TraceWord) -> Series {
    let hist = face_histogram(w);
    let half = (w.slots() / 2) as i32;
    let zeros = w.zeros() as i32;
    let mut out = Series::zero(TruncSpec::wide());
    for (f, &count) in hist.iter().enumerate() {
        if count > 0 {
            out.add_term(Monomial::n_pow(f as i32 + zeros - half), GaussRat::from_bigint(count.into()));
        }
    }
    out
}

/// The moment for an `size × size` matrix with covariance `1/scale`.
pub fn hermitian_moment_at(w: &TraceWord, size: u32, scale: &BigRational) -> BigRational {
    if w.slots() % 2 == 1 {
        return BigRational::zero();
    }
    let hist = face_histogram(w);
    let size = BigInt::from(size);
    let zeros = w.zeros();
    let mut total = BigInt::zero();
    for (f, &count) in hist.iter().enumerate() {
        if count > 0 {
            total += BigInt::from(count) * num_traits::pow(size.clone(), f + zeros);
        }
    }
    let denom = num_traits::pow(scale.clone(), w.slots() / 2);
    BigRational::from_integer(total) / denom
}

/// Every pairing of the slots of `w` with its weight `N^{c(γπ) + #zeros − n/2}`,
/// computed from scratch for each pattern.
pub fn hermitian_patterns(w: &TraceWord) -> impl Iterator<Item = WickPattern> {
    let nonzero = w.nonzero();
    let gamma = trace_successor(&nonzero);
    let shift = w.zeros() as i32 - (w.slots() / 2) as i32;
    matchings(gamma.len()).map(move |pairing| {
        let mut sigma = vec![0usize; gamma.len()];
        for &(a, b) in &pairing {
            sigma[a] = gamma[b] as usize;
            sigma[b] = gamma[a] as usize;
        }
        WickPattern { n_exp: cycle_count(&sigma) as i32 + shift, pairing }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn moment(p: &[u32]) -> Series {
        hermitian_moment(&TraceWord::from(p))
    }

    fn laurent(pairs: &[(i32, i64)]) -> Series {
        Series::from_terms(pairs.iter().map(|&(k, c)| (Monomial::n_pow(k), GaussRat::from_int(c))), TruncSpec::wide())
    }

    #[test]
    fn low_moments() {
        assert_eq!(moment(&[2]), laurent(&[(1, 1)]));
        assert_eq!(moment(&[4]), laurent(&[(1, 2), (-1, 1)]));
        assert_eq!(moment(&[2, 2]), laurent(&[(2, 1), (0, 2)]));
        assert_eq!(moment(&[1, 1]), laurent(&[(0, 1)]));
        assert!(moment(&[3]).is_zero());
        assert_eq!(moment(&[]), laurent(&[(0, 1)]));
        assert_eq!(moment(&[0, 2]), laurent(&[(2, 1)]));
    }

    #[test]
    fn genus_expansion_of_tr_m6() {
        // 5 planar, 10 genus one
        assert_eq!(moment(&[6]), laurent(&[(1, 5), (-1, 10)]));
    }

    #[test]
    fn parallel_and_sequential_agree_with_patterns() {
        for w in [vec![4, 4, 2], vec![3, 3, 2, 2], vec![6, 4]] {
            let word = TraceWord::new(w);
            let mut hist = vec![0u64; word.slots() + 1];
            let shift = (word.slots() / 2) as i32;
            for pat in hermitian_patterns(&word) {
                hist[(pat.n_exp + shift) as usize] += 1;
            }
            assert_eq!(*face_histogram(&word), hist);
        }
    }

    #[test]
    fn concrete_evaluation() {
        let w = TraceWord::from(&[4u32][..]);
        assert_eq!(hermitian_moment_at(&w, 1, &BigRational::one()), BigRational::from_integer(3.into()));
        let half = BigRational::new(1.into(), 2.into());
        // size 2, scale 2: (2·8 + 2)/4
        assert_eq!(
            hermitian_moment_at(&w, 2, &BigRational::from_integer(2.into())),
            BigRational::new(18.into(), 4.into())
        );
        assert_eq!(hermitian_moment_at(&TraceWord::from(&[2u32][..]), 1, &half), BigRational::from_integer(2.into()));
    }
}
