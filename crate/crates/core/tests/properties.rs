//! Property tests for the series algebra, Wick moments and colored graphs.

use melonic_core::bilinear::residue_z;
use melonic_core::decomposition::build_y;
use melonic_core::graphs::{canonical_form, jacket_cycles, ColoredGraph};
use melonic_core::wick::{hermitian_moment, tensor_moment, TensorContraction, TraceWord};
use melonic_core::{DiffOp, GaussRat, Monomial, Series, TimeExps, TimeVar, TruncSpec};
use num_traits::{One, Signed};
use proptest::prelude::*;

const VARS: [TimeVar; 4] = [TimeVar::new(1, 1), TimeVar::new(1, 2), TimeVar::new(2, 0), TimeVar::new(3, 2)];

fn coeff() -> impl Strategy<Value = GaussRat> {
    (-3i64..=3, -3i64..=3, 1i64..=3).prop_map(|(a, b, d)| GaussRat::from_ratio(a, d) + GaussRat::i() * GaussRat::from_ratio(b, d))
}

fn times() -> impl Strategy<Value = TimeExps> {
    prop::collection::vec(0u32..=2, VARS.len())
        .prop_map(|e| TimeExps::from_pairs(VARS.iter().copied().zip(e).filter(|&(_, e)| e > 0)))
}

fn monomial(z: std::ops::RangeInclusive<i32>) -> impl Strategy<Value = Monomial> {
    (0u32..=2, -2i32..=2, 0i32..=1, z, times()).prop_map(|(hl, hn, s2, z, times)| Monomial { hl, hn, s2, z, times })
}

fn series_in(trunc: TruncSpec, z: std::ops::RangeInclusive<i32>) -> impl Strategy<Value = Series> {
    prop::collection::vec((monomial(z), coeff()), 0..6).prop_map(move |t| Series::from_terms(t, trunc.clone()))
}

fn series() -> impl Strategy<Value = Series> {
    series_in(TruncSpec::wide(), 0..=0)
}

/// Series without a constant part, so that `exp` terminates.
fn nilpotent(trunc: TruncSpec) -> impl Strategy<Value = Series> {
    series_in(trunc, 0..=0).prop_map(|s| s.filter(|m| m.hl > 0 || !m.times.is_empty()))
}

/// z-free operator mixing multiplications and derivatives.
fn diffop() -> impl Strategy<Value = DiffOp> {
    prop::collection::vec((times(), times(), coeff(), -1i32..=1), 0..5).prop_map(|terms| {
        let mut op = DiffOp::zero(64);
        for (mult, derivs, c, hn) in terms {
            op.add_term(Monomial::from_times(mult).with_hn(hn), derivs, c);
        }
        op
    })
}

fn permutation(p: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..p).collect::<Vec<_>>()).prop_shuffle()
}

/// Random bipartite `d`-colored graph on `p` white and `p` black vertices.
fn graph() -> impl Strategy<Value = (Vec<Vec<usize>>, Vec<usize>, Vec<usize>, Vec<usize>)> {
    (3usize..=4, 1usize..=4).prop_flat_map(|(d, p)| {
        (prop::collection::vec(permutation(p), d), permutation(p), permutation(p), permutation(d))
    })
}

/// `σ_c ↦ β σ_c α⁻¹`, then colors permuted by `perm`.
fn relabel(sigma: &[Vec<usize>], alpha: &[usize], beta: &[usize], perm: &[usize]) -> Vec<Vec<usize>> {
    let p = alpha.len();
    let mut inv_a = vec![0; p];
    for (i, &a) in alpha.iter().enumerate() {
        inv_a[a] = i;
    }
    let moved: Vec<Vec<usize>> = sigma.iter().map(|s| (0..p).map(|w| beta[s[inv_a[w]]]).collect()).collect();
    let mut out = vec![Vec::new(); sigma.len()];
    for (c, s) in moved.into_iter().enumerate() {
        out[perm[c]] = s;
    }
    out
}

fn trace_word() -> impl Strategy<Value = TraceWord> {
    prop::collection::vec(0u32..=4, 1..=3)
        .prop_filter("even, at most 8 slots", |p| p.iter().sum::<u32>() % 2 == 0 && p.iter().sum::<u32>() <= 8)
        .prop_map(TraceWord::new)
}

fn is_count(c: &GaussRat) -> bool {
    c.is_real() && c.re.is_integer() && !c.re.is_negative()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert_eq!(a.add_series(&b), b.add_series(&a));
        prop_assert_eq!(a.mul_series(&b), b.mul_series(&a));
        prop_assert_eq!(a.mul_series(&b).mul_series(&c), a.mul_series(&b.mul_series(&c)));
        prop_assert_eq!(a.mul_series(&b.add_series(&c)), a.mul_series(&b).add_series(&a.mul_series(&c)));
        prop_assert!(a.sub_series(&a).is_zero());
        prop_assert_eq!(a.mul_series(&Series::one(a.trunc().clone())), a.clone());
    }

    #[test]
    fn truncated_exp_is_invertible(a in nilpotent(TruncSpec::new(3, 3, 4, (0, 0)))) {
        let e = a.exp_trunc().unwrap();
        let inv = (-&a).exp_trunc().unwrap();
        prop_assert_eq!(e.mul_series(&inv), Series::one(a.trunc().clone()));
        prop_assert_eq!(e.log_trunc().unwrap(), a.clone());
        prop_assert_eq!(e.inv_trunc().unwrap(), inv);
    }

    #[test]
    fn leibniz(a in series(), b in series(), v in 0usize..VARS.len()) {
        let v = VARS[v];
        let lhs = a.mul_series(&b).derive(v);
        let rhs = a.derive(v).mul_series(&b).add_series(&a.mul_series(&b.derive(v)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn apply_is_linear(op in diffop(), a in series(), b in series(), c in coeff()) {
        let lhs = op.apply(&a.add_series(&b.scale(&c)));
        let rhs = op.apply(&a).add_series(&op.apply(&b).scale(&c));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_matches_sequential_application(f in diffop(), g in diffop(), a in series()) {
        prop_assert_eq!(f.compose(&g).apply(&a), f.apply(&g.apply(&a)));
    }

    #[test]
    fn conjugation_matches_sandwich(d in 2u8..=3, v in 0usize..3, deriv in any::<bool>(), s in series_in(TruncSpec::new(2, 64, 64, (0, 0)), 0..=0)) {
        let y = build_y(d, 1);
        let var = TimeVar::new(1 + v as u8 % d, v as u8);
        let b = if deriv {
            DiffOp::derivative(var, 2)
        } else {
            DiffOp::multiplication(Monomial::time(var), GaussRat::one(), 2)
        };
        let conj = DiffOp::conjugate_exp(&y, &b, 6).unwrap();
        let inner = y.scale(&-GaussRat::one()).exp_apply(&s, 16).unwrap();
        let sandwich = y.exp_apply(&b.apply(&inner), 16).unwrap();
        prop_assert_eq!(conj.apply(&s), sandwich);
    }

    #[test]
    fn text_round_trip(s in series_in(TruncSpec::wide(), -3..=3)) {
        let back = Series::parse(&s.to_text(), TruncSpec::wide()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn residue_commutes_with_z_free_operators(op in diffop(), s in series_in(TruncSpec::wide().with_z_window((-6, 6)), -3..=3)) {
        let lhs = residue_z(&op.apply(&s)).unwrap();
        let rhs = op.apply(&residue_z(&s).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hermitian_moments_count_pairings(w in trace_word()) {
        let m = hermitian_moment(&w);
        prop_assert!(m.terms().all(|(_, c)| is_count(c)));
        let total = m.terms().fold(GaussRat::from_int(0), |acc, (_, c)| acc + c.clone());
        let pairings = (1..w.slots() as i64).step_by(2).product::<i64>();
        prop_assert_eq!(total, GaussRat::from_int(pairings));
    }

    #[test]
    fn tensor_moments_are_relabel_invariant((sigma, alpha, beta, perm) in graph()) {
        let tc = TensorContraction::new(sigma.clone());
        let moved = TensorContraction::new(relabel(&sigma, &alpha, &beta, &perm));
        let m = tensor_moment(&tc);
        prop_assert!(m.terms().all(|(_, c)| is_count(c)));
        prop_assert_eq!(m, tensor_moment(&moved));
    }

    #[test]
    fn degree_is_relabel_invariant((sigma, alpha, beta, perm) in graph()) {
        let g = ColoredGraph::from_permutations(&sigma);
        let h = ColoredGraph::from_permutations(&relabel(&sigma, &alpha, &beta, &perm));
        prop_assert_eq!(g.degree().unwrap().value, h.degree().unwrap().value);
        let ident: Vec<usize> = (0..perm.len()).collect();
        let same_colors = ColoredGraph::from_permutations(&relabel(&sigma, &alpha, &beta, &ident));
        prop_assert_eq!(canonical_form(&g).unwrap(), canonical_form(&same_colors).unwrap());
    }
}

#[test]
fn jacket_counts_follow_factorial() {
    for d in 3u8..=6 {
        let cycles = jacket_cycles(d);
        let expected = (1..d as usize).product::<usize>() / 2;
        assert_eq!(cycles.len(), expected, "D = {d}");
        for c in &cycles {
            let mut sorted = c.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (1..=d).collect::<Vec<_>>());
        }
    }
}

#[test]
fn y_level_counts() {
    for d in 2u8..=4 {
        for k in 1..=2 {
            let y = build_y(d, k);
            for n in 1..=2 * k {
                let count = y.terms().filter(|(m, _, _)| m.hl == n).count() as u64;
                let expected = num_integer::binomial((n + d as u32 - 1) as u64, (d - 1) as u64);
                assert_eq!(count, expected, "D = {d}, |q| = {n}");
            }
        }
    }
}
