//! Gaussian moments of products of tensor invariants with covariance
//! `⟨T_i T̄_j⟩ = N^{1−D} ∏_c δ_{i_c j_c}`.
//!
//! An invariant with `k` pairs of `T, T̄` is stored as one permutation per
//! color: `sigma[c][w]` is the `T̄` joined to the `T` number `w` by the color-`c`
//! index. A Wick pairing `π` joins `T_w` to `T̄_{π(w)}`, and each color then
//! closes `cycles(π⁻¹ σ_c)` index loops.

use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use super::pairing::{bijections, cycle_count};
use super::WickPattern;
use crate::scalar::GaussRat;
use crate::series::{Monomial, Series, TruncSpec};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorContraction {
    d: usize,
    sigma: Vec<Vec<usize>>,
}

impl TensorContraction {
    /// `sigma` must hold `d` permutations of the same length.
    pub fn new(sigma: Vec<Vec<usize>>) -> Self {
        let d = sigma.len();
        let k = sigma.first().map_or(0, Vec::len);
        assert!(sigma.iter().all(|s| s.len() == k), "color permutations differ in length");
        TensorContraction { d, sigma }
    }

    /// The empty invariant (the constant 1) at rank `d`.
    pub fn empty(d: usize) -> Self {
        TensorContraction { d, sigma: vec![Vec::new(); d] }
    }

    /// `T̄·T`: a single pair contracted on every color.
    pub fn full(d: usize) -> Self {
        TensorContraction { d, sigma: vec![vec![0]; d] }
    }

    /// The quartic melonic invariant `(T̄·_â T)·_a(T̄·_â T)` for color `a` (1-based).
    pub fn quartic_melonic(d: usize, a: usize) -> Self {
        let sigma = (1..=d).map(|c| if c == a { vec![1, 0] } else { vec![0, 1] }).collect();
        TensorContraction { d, sigma }
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    /// Number of `T` (equivalently `T̄`) fields.
    pub fn pairs(&self) -> usize {
        self.sigma.first().map_or(0, Vec::len)
    }

    pub fn sigma(&self) -> &[Vec<usize>] {
        &self.sigma
    }

    /// Product of two invariants.
    pub fn disjoint_union(&self, other: &TensorContraction) -> TensorContraction {
        assert_eq!(self.d, other.d, "rank mismatch");
        let k = self.pairs();
        let sigma = self
            .sigma
            .iter()
            .zip(&other.sigma)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&x| x + k)).collect())
            .collect();
        TensorContraction { d: self.d, sigma }
    }

    pub fn product<'a>(d: usize, factors: impl IntoIterator<Item = &'a TensorContraction>) -> TensorContraction {
        factors.into_iter().fold(TensorContraction::empty(d), |acc, f| acc.disjoint_union(f))
    }

    /// Applies a permutation of colors: color `c` becomes `perm[c]` (0-based).
    pub fn recolor(&self, perm: &[usize]) -> TensorContraction {
        let mut sigma = vec![Vec::new(); self.d];
        for (c, s) in self.sigma.iter().enumerate() {
            sigma[perm[c]] = s.clone();
        }
        TensorContraction { d: self.d, sigma }
    }

    /// Index loops closed by the pairing `pi` (`T_w` with `T̄_{pi[w]}`).
    pub fn loops(&self, pi: &[usize]) -> usize {
        let mut inv = vec![0; pi.len()];
        for (w, &b) in pi.iter().enumerate() {
            inv[b] = w;
        }
        self.sigma
            .iter()
            .map(|s| {
                let composed: Vec<usize> = s.iter().map(|&b| inv[b]).collect();
                cycle_count(&composed)
            })
            .sum()
    }
}

static TENSOR_MEMO: Lazy<RwLock<FxHashMap<TensorContraction, Arc<Vec<u64>>>>> = Lazy::new(Default::default);

/// Loop-count histogram over the `k!` pairings.
fn loop_histogram(tc: &TensorContraction) -> Arc<Vec<u64>> {
    if let Some(h) = TENSOR_MEMO.read().get(tc) {
        return h.clone();
    }
    let k = tc.pairs();
    let mut hist = vec![0u64; k * tc.d + 1];
    for pi in bijections(k) {
        hist[tc.loops(&pi)] += 1;
    }
    let h = Arc::new(hist);
    TENSOR_MEMO.write().entry(tc.clone()).or_insert(h).clone()
}

/// `⟨B(T, T̄)⟩` as a Laurent polynomial in `N`.
pub fn tensor_moment(tc: &TensorContraction) -> Series {
    let k = tc.pairs() as i32;
    let shift = k * (tc.d as i32 - 1);
    let mut out = Series::zero(TruncSpec::wide());
    for (loops, &count) in loop_histogram(tc).iter().enumerate() {
        if count > 0 {
            out.add_term(Monomial::n_pow(loops as i32 - shift), GaussRat::from_bigint(count.into()));
        }
    }
    out
}

pub fn tensor_patterns(tc: &TensorContraction) -> impl Iterator<Item = WickPattern> + '_ {
    let k = tc.pairs() as i32;
    let shift = k * (tc.d as i32 - 1);
    bijections(tc.pairs()).map(move |pi| WickPattern {
        n_exp: tc.loops(&pi) as i32 - shift,
        pairing: pi.into_iter().enumerate().collect(),
    })
}
