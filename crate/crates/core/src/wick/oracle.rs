//! Brute-force Gaussian moments at a concrete size: explicit index sums
//! over every pairing, with no cycle counting involved.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::hermitian::TraceWord;
use super::pairing::{bijections, matchings};
use super::tensor::TensorContraction;
use crate::error::{Error, Result};

/// Largest `index assignments × pairings` product the oracle accepts.
pub const ORACLE_BUDGET: u128 = 50_000_000;

fn check_budget(n: u32, indices: usize, pairings: u128) -> Result<()> {
    let work = (n as u128).checked_pow(indices as u32).and_then(|x| x.checked_mul(pairings));
    match work {
        Some(w) if w <= ORACLE_BUDGET => Ok(()),
        _ => Err(Error::Budget(format!("oracle at N = {n} with {indices} indices"))),
    }
}

/// Calls `f` on every assignment in `[0, n)^len`.
fn for_each_assignment(n: u32, len: usize, mut f: impl FnMut(&[u32])) {
    let mut idx = vec![0u32; len];
    loop {
        f(&idx);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// `⟨∏ Tr M^{p_i}⟩` for an `n × n` matrix with `⟨M_ij M_kl⟩ = δ_il δ_jk / n`.
///
/// `Tr M^p = Σ M_{i_1 i_2} M_{i_2 i_3} ⋯ M_{i_p i_1}`: one summed index per
/// slot, slot `h` carrying the entry `(i_h, i_{next(h)})`.
pub fn hermitian_oracle(w: &TraceWord, n: u32) -> Result<BigRational> {
    let zeros = w.powers().iter().filter(|&&p| p == 0).count();
    let mut row_of = Vec::new();
    let mut col_of = Vec::new();
    let mut offset = 0usize;
    for &p in w.powers().iter().filter(|&&p| p > 0) {
        let p = p as usize;
        for j in 0..p {
            row_of.push(offset + j);
            col_of.push(offset + (j + 1) % p);
        }
        offset += p;
    }
    let slots = row_of.len();
    if slots % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let pairings: Vec<Vec<(usize, usize)>> = matchings(slots).collect();
    check_budget(n, slots, pairings.len() as u128)?;
    let mut hits: u64 = 0;
    for_each_assignment(n, slots, |idx| {
        for pairing in &pairings {
            let ok = pairing.iter().all(|&(a, b)| {
                idx[row_of[a]] == idx[col_of[b]] && idx[col_of[a]] == idx[row_of[b]]
            });
            if ok {
                hits += 1;
            }
        }
    });
    let size = BigInt::from(n);
    let num = BigInt::from(hits) * num_traits::pow(size.clone(), zeros);
    Ok(BigRational::new(num, num_traits::pow(size, slots / 2)))
}

/// `⟨B(T, T̄)⟩` at size `n`, summing one index per edge of the invariant
/// and every `T`–`T̄` matching with weight `n^{1−D}` per propagator.
pub fn tensor_oracle(tc: &TensorContraction, n: u32) -> Result<BigRational> {
    let (d, k) = (tc.rank(), tc.pairs());
    // edge (w, c) carries index slot w·d + c; T̄_b's color-c index is the
    // slot of the unique white joined to b by color c
    let mut tbar_slot = vec![vec![0usize; d]; k];
    for (c, s) in tc.sigma().iter().enumerate() {
        for (w, &b) in s.iter().enumerate() {
            tbar_slot[b][c] = w * d + c;
        }
    }
    let pairings: Vec<Vec<usize>> = bijections(k).collect();
    check_budget(n, k * d, pairings.len() as u128)?;
    let mut hits: u64 = 0;
    for_each_assignment(n, k * d, |idx| {
        for pi in &pairings {
            let ok = (0..k).all(|w| (0..d).all(|c| idx[w * d + c] == idx[tbar_slot[pi[w]][c]]));
            if ok {
                hits += 1;
            }
        }
    });
    let exp = (k * (d - 1)) as i32;
    let scale = num_traits::pow(BigInt::from(n), exp as usize);
    Ok(BigRational::new(BigInt::from(hits), scale))
}
