//! D-colored bipartite graphs: tensor invariants, their jackets and the
//! Gurau degree.
//!
//! Every computation goes through the color permutations `σ_c`, where
//! `σ_c(w)` is the black vertex joined to white vertex `w` by color `c`.
//! Faces of color pair `(a, b)` are the cycles of `σ_b⁻¹ σ_a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wick::pairing::{bijections, cycle_count, factorial};
use crate::wick::TensorContraction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub w: usize,
    pub b: usize,
    /// Color in `1..=D`.
    pub c: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredGraph {
    #[serde(rename = "D")]
    pub d: u8,
    pub white: usize,
    pub black: usize,
    pub edges: Vec<Edge>,
}

/// First structural problem found by [`ColoredGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Offending edge, when one can be singled out.
    pub edge: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Jacket {
    /// Cyclic order of the colors, starting at color 1.
    pub cycle: Vec<u8>,
    pub vertices: usize,
    pub edges: usize,
    /// Face count for each consecutive color pair of the cycle.
    pub faces: Vec<((u8, u8), usize)>,
    pub components: usize,
}

impl Jacket {
    pub fn face_count(&self) -> usize {
        self.faces.iter().map(|(_, f)| f).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.face_count() as i64
    }

    /// Genus summed over connected components.
    pub fn genus(&self) -> Result<u32> {
        let twice = 2 * self.components as i64 - self.euler_characteristic();
        if twice < 0 || twice % 2 != 0 {
            return Err(Error::InvalidGraph(format!(
                "jacket {:?} has Euler characteristic {}",
                self.cycle,
                self.euler_characteristic()
            )));
        }
        Ok((twice / 2) as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Degree {
    pub value: u32,
    pub jackets: usize,
    pub components: usize,
    /// Set when the input was disconnected and per-component degrees were summed.
    pub notice: Option<String>,
}

impl ColoredGraph {
    /// The graph whose color-`c` edges join `w` to `sigma[c−1][w]`.
    pub fn from_permutations(sigma: &[Vec<usize>]) -> Self {
        let p = sigma.first().map_or(0, Vec::len);
        let mut edges = Vec::with_capacity(p * sigma.len());
        for w in 0..p {
            for (c, s) in sigma.iter().enumerate() {
                edges.push(Edge { w, b: s[w], c: c as u8 + 1 });
            }
        }
        ColoredGraph { d: sigma.len() as u8, white: p, black: p, edges }
    }

    /// Two vertices joined by all `d` colors.
    pub fn dipole(d: u8) -> Self {
        Self::from_permutations(&vec![vec![0]; d as usize])
    }

    /// The quartic melonic invariant of color `a`.
    pub fn quartic_melonic(d: u8, a: u8) -> Self {
        Self::from_permutations(TensorContraction::quartic_melonic(d as usize, a as usize).sigma())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    /// Checks bipartite D-regularity and proper coloring.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let bad = |edge, message: String| Err(Violation { edge, message });
        if self.white != self.black {
            return bad(None, format!("{} white vs {} black vertices", self.white, self.black));
        }
        if self.d == 0 && !self.edges.is_empty() {
            return bad(Some(0), "rank 0 graph with edges".into());
        }
        let d = self.d as usize;
        let mut at_white = vec![vec![false; d]; self.white];
        let mut at_black = vec![vec![false; d]; self.black];
        for (i, e) in self.edges.iter().enumerate() {
            if e.c == 0 || e.c as usize > d {
                return bad(Some(i), format!("color {} outside 1..={}", e.c, d));
            }
            if e.w >= self.white || e.b >= self.black {
                return bad(Some(i), format!("endpoint ({}, {}) out of range", e.w, e.b));
            }
            let c = e.c as usize - 1;
            if std::mem::replace(&mut at_white[e.w][c], true) {
                return bad(Some(i), format!("white vertex {} has two edges of color {}", e.w, e.c));
            }
            if std::mem::replace(&mut at_black[e.b][c], true) {
                return bad(Some(i), format!("black vertex {} has two edges of color {}", e.b, e.c));
            }
        }
        if self.edges.len() != self.white * d {
            return bad(None, format!("{} edges, expected {}", self.edges.len(), self.white * d));
        }
        Ok(())
    }

    fn checked(&self) -> Result<()> {
        self.validate().map_err(|v| match v.edge {
            Some(i) => Error::InvalidGraph(format!("edge {i}: {}", v.message)),
            None => Error::InvalidGraph(v.message),
        })
    }

    /// `σ_c` for each color, 0-based in the color index.
    pub fn permutations(&self) -> Result<Vec<Vec<usize>>> {
        self.checked()?;
        let mut sigma = vec![vec![0; self.white]; self.d as usize];
        for e in &self.edges {
            sigma[e.c as usize - 1][e.w] = e.b;
        }
        Ok(sigma)
    }

    pub fn to_contraction(&self) -> Result<TensorContraction> {
        Ok(TensorContraction::new(self.permutations()?))
    }

    pub fn components(&self) -> Result<usize> {
        let sigma = self.permutations()?;
        Ok(components_of(&sigma))
    }

    pub fn jackets(&self) -> Result<Vec<Jacket>> {
        let sigma = self.permutations()?;
        let comps = components_of(&sigma);
        let p = self.white;
        Ok(jacket_cycles(self.d)
            .into_iter()
            .map(|cycle| {
                let faces = (0..cycle.len())
                    .map(|k| {
                        let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                        ((a, b), face_cycles(&sigma[a as usize - 1], &sigma[b as usize - 1]))
                    })
                    .collect();
                Jacket { cycle, vertices: 2 * p, edges: p * self.d as usize, faces, components: comps }
            })
            .collect())
    }

    /// Sum of the jacket genera.
    pub fn degree(&self) -> Result<Degree> {
        let jackets = self.jackets()?;
        let mut value = 0;
        for j in &jackets {
            value += j.genus()?;
        }
        let components = self.components()?;
        let notice = (components > 1).then(|| format!("graph has {components} components; degrees summed"));
        Ok(Degree { value, jackets: jackets.len(), components, notice })
    }
}

/// Cyclic color orders up to reversal, starting at color 1.
pub fn jacket_cycles(d: u8) -> Vec<Vec<u8>> {
    if d < 2 {
        return vec![(1..=d).collect()];
    }
    let rest: Vec<u8> = (2..=d).collect();
    bijections(rest.len())
        .map(|perm| perm.iter().map(|&i| rest[i]).collect::<Vec<u8>>())
        .filter(|r| r.len() < 2 || r[0] < r[r.len() - 1])
        .map(|r| std::iter::once(1).chain(r).collect())
        .collect()
}

/// Cycles of `σ_b⁻¹ σ_a` on the white vertices.
fn face_cycles(sa: &[usize], sb: &[usize]) -> usize {
    let mut inv_b = vec![0; sb.len()];
    for (w, &b) in sb.iter().enumerate() {
        inv_b[b] = w;
    }
    let perm: Vec<usize> = sa.iter().map(|&b| inv_b[b]).collect();
    cycle_count(&perm)
}

fn components_of(sigma: &[Vec<usize>]) -> usize {
    let p = sigma.first().map_or(0, Vec::len);
    // whites 0..p, blacks p..2p
    let mut parent: Vec<usize> = (0..2 * p).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for s in sigma {
        for (w, &b) in s.iter().enumerate() {
            let (x, y) = (find(&mut parent, w), find(&mut parent, p + b));
            parent[x] = y;
        }
    }
    (0..2 * p).filter(|&x| find(&mut parent, x) == x).count()
}

/// Largest `(p!)^D` accepted by [`enumerate_patterns`].
pub const PATTERN_BUDGET: u128 = 2_000_000;

/// All labelled contraction patterns of order `2p` in rank `d`.
pub fn enumerate_patterns(d: u8, p: usize) -> Result<Vec<ColoredGraph>> {
    let count = factorial(p).checked_pow(d as u32);
    if count.map_or(true, |c| c > PATTERN_BUDGET) {
        return Err(Error::Budget(format!("({p}!)^{d} labelled patterns")));
    }
    let perms: Vec<Vec<usize>> = bijections(p).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; d as usize];
    loop {
        let sigma: Vec<Vec<usize>> = choice.iter().map(|&i| perms[i].clone()).collect();
        out.push(ColoredGraph::from_permutations(&sigma));
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < perms.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Canonical representative under relabeling of white and black vertices.
///
/// Relabeling acts as `σ_c ↦ β σ_c α⁻¹`; choosing `β = α σ_1⁻¹` fixes
/// `σ_1 = id`, leaving conjugation by `α`, which is searched exhaustively.
pub fn canonical_form(g: &ColoredGraph) -> Result<Vec<Vec<usize>>> {
    let sigma = g.permutations()?;
    let p = g.white;
    if sigma.is_empty() {
        return Ok(sigma);
    }
    let mut inv1 = vec![0; p];
    for (w, &b) in sigma[0].iter().enumerate() {
        inv1[b] = w;
    }
    let tau: Vec<Vec<usize>> = sigma.iter().map(|s| s.iter().map(|&b| inv1[b]).collect()).collect();
    let mut best: Option<Vec<Vec<usize>>> = None;
    for alpha in bijections(p) {
        let mut inv_a = vec![0; p];
        for (i, &a) in alpha.iter().enumerate() {
            inv_a[a] = i;
        }
        // (α τ α⁻¹)(x) = α(τ(α⁻¹ x))
        let conj: Vec<Vec<usize>> =
            tau.iter().map(|t| (0..p).map(|x| alpha[t[inv_a[x]]]).collect()).collect();
        if best.as_ref().map_or(true, |b| conj < *b) {
            best = Some(conj);
        }
    }
    Ok(best.expect("at least one relabeling"))
}

/// Isomorphism classes (white/black relabelings, colors fixed) with the
/// number of labelled patterns in each.
pub fn dedup_patterns(patterns: &[ColoredGraph]) -> Result<Vec<(ColoredGraph, usize)>> {
    let mut classes: std::collections::BTreeMap<Vec<Vec<usize>>, (ColoredGraph, usize)> = Default::default();
    for g in patterns {
        let key = canonical_form(g)?;
        classes.entry(key).or_insert_with(|| (g.clone(), 0)).1 += 1;
    }
    Ok(classes.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat;
    use crate::series::{Monomial, Series, TruncSpec};
    use crate::wick::tensor_patterns;

    #[test]
    fn jacket_counts() {
        assert_eq!(jacket_cycles(2).len(), 1);
        assert_eq!(jacket_cycles(3).len(), 1);
        assert_eq!(jacket_cycles(4).len(), 3);
        assert_eq!(jacket_cycles(5).len(), 12);
        assert_eq!(jacket_cycles(6).len(), 60);
    }

    #[test]
    fn dipoles_are_melonic() {
        for d in 2..=5 {
            let g = ColoredGraph::dipole(d);
            for j in g.jackets().unwrap() {
                assert_eq!((j.vertices, j.edges, j.face_count()), (2, d as usize, d as usize));
                assert_eq!(j.genus().unwrap(), 0);
            }
            assert_eq!(g.degree().unwrap().value, 0);
        }
    }

    #[test]
    fn quartic_melonic_degree() {
        for a in 1..=3 {
            let g = ColoredGraph::quartic_melonic(3, a);
            let j = &g.jackets().unwrap()[0];
            assert_eq!(j.face_count(), 4);
            assert_eq!(j.genus().unwrap(), 0);
        }
    }

    #[test]
    fn non_melonic_examples() {
        // the complete bipartite graph K_{3,3}
        let k33 = ColoredGraph::from_permutations(&[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
        assert_eq!(k33.degree().unwrap().value, 1);
        let d4 = ColoredGraph::from_permutations(&[vec![0, 1], vec![0, 1], vec![1, 0], vec![1, 0]]);
        assert_eq!(d4.degree().unwrap().value, 1);
    }

    #[test]
    fn validation() {
        assert!(ColoredGraph::dipole(3).validate().is_ok());
        let empty = ColoredGraph { d: 3, white: 0, black: 0, edges: vec![] };
        assert!(empty.validate().is_ok());
        let mut g = ColoredGraph::dipole(3);
        g.edges[1].c = 1;
        let v = g.validate().unwrap_err();
        assert_eq!(v.edge, Some(1));
    }

    #[test]
    fn disconnected_graph_sums_components() {
        let g = ColoredGraph::from_permutations(&[vec![0, 1], vec![0, 1], vec![0, 1]]);
        let deg = g.degree().unwrap();
        assert_eq!((deg.value, deg.components), (0, 2));
        assert!(deg.notice.is_some());
    }

    #[test]
    fn json_round_trip() {
        let g = ColoredGraph::from_json(r#"{"D":3,"white":1,"black":1,"edges":[{"w":0,"b":0,"c":1},{"w":0,"b":0,"c":2},{"w":0,"b":0,"c":3}]}"#).unwrap();
        assert_eq!(g, ColoredGraph::dipole(3));
        assert_eq!(ColoredGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn pattern_enumeration() {
        assert_eq!(enumerate_patterns(3, 1).unwrap().len(), 1);
        assert_eq!(enumerate_patterns(2, 1).unwrap().len(), 1);
        let p2 = enumerate_patterns(3, 2).unwrap();
        assert_eq!(p2.len(), 8);
        assert!(p2.iter().all(|g| g.validate().is_ok()));
        // two disjoint dipoles and the three melonic quartics
        let classes = dedup_patterns(&p2).unwrap();
        assert_eq!(classes.iter().map(|c| c.1).sum::<usize>(), 8);
        assert_eq!(classes.len(), 4);
        assert!(matches!(enumerate_patterns(5, 6), Err(Error::Budget(_))));
    }

    #[test]
    fn identity_pairing_counts_color_cycles() {
        for p in 1..=2 {
            for g in enumerate_patterns(3, p).unwrap() {
                let tc = g.to_contraction().unwrap();
                let identity = tensor_patterns(&tc).next().unwrap();
                let loops: usize = tc.sigma().iter().map(|s| cycle_count(s)).sum();
                assert_eq!(identity.n_exp, loops as i32 - 2 * p as i32);
                let w = identity.weight();
                let want = Series::from_term(Monomial::n_pow(identity.n_exp), GaussRat::from_int(1), TruncSpec::wide());
                assert_eq!(w, want);
            }
        }
    }
}
