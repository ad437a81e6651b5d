//! Deterministic enumeration of Wick pairings.

/// All perfect matchings of `0..n`, in lexicographic order of the pair
/// lists. Yields `(n−1)!!` matchings for even `n`, none for odd `n`, and a
/// single empty matching for `n = 0`.
pub fn matchings(n: usize) -> Matchings {
    Matchings::new(n)
}

pub struct Matchings {
    n: usize,
    // partner choice made at each level of the recursion
    stack: Vec<usize>,
    done: bool,
}

impl Matchings {
    fn new(n: usize) -> Self {
        Matchings { n, stack: Vec::new(), done: n % 2 == 1 }
    }

    fn decode(&self) -> Vec<(usize, usize)> {
        let mut free: Vec<usize> = (0..self.n).collect();
        let mut out = Vec::with_capacity(self.n / 2);
        for &choice in &self.stack {
            let a = free.remove(0);
            let b = free.remove(choice);
            out.push((a, b));
        }
        out
    }
}

impl Iterator for Matchings {
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.stack.is_empty() && self.n > 0 {
            self.stack = vec![0; self.n / 2];
            return Some(self.decode());
        }
        if self.n == 0 {
            self.done = true;
            return Some(Vec::new());
        }
        // odometer: level i has n − 2i − 1 choices
        let mut level = self.stack.len();
        loop {
            if level == 0 {
                self.done = true;
                return None;
            }
            level -= 1;
            let choices = self.n - 2 * level - 1;
            if self.stack[level] + 1 < choices {
                self.stack[level] += 1;
                for s in &mut self.stack[level + 1..] {
                    *s = 0;
                }
                return Some(self.decode());
            }
        }
    }
}

/// All bijections of `0..k` (as image vectors) in lexicographic order.
pub fn bijections(k: usize) -> Bijections {
    Bijections { cur: (0..k).collect(), first: true, done: false }
}

pub struct Bijections {
    cur: Vec<usize>,
    first: bool,
    done: bool,
}

impl Iterator for Bijections {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.first {
            self.first = false;
            return Some(self.cur.clone());
        }
        let v = &mut self.cur;
        let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
            self.done = true;
            return None;
        };
        let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
        v.swap(i - 1, j);
        v[i..].reverse();
        Some(v.clone())
    }
}

/// Number of cycles of a permutation given as an image vector.
pub fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
        }
    }
    cycles
}

pub fn double_factorial_odd(n: usize) -> u128 {
    // (2n−1)!!
    (1..=n as u128).map(|k| 2 * k - 1).product()
}

pub fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_counts() {
        assert_eq!(matchings(0).count(), 1);
        assert_eq!(matchings(3).count(), 0);
        for n in 1..=5 {
            assert_eq!(matchings(2 * n).count() as u128, double_factorial_odd(n));
        }
    }

    #[test]
    fn four_slots() {
        let all: Vec<_> = matchings(4).collect();
        assert_eq!(all, vec![vec![(0, 1), (2, 3)], vec![(0, 2), (1, 3)], vec![(0, 3), (1, 2)]]);
    }

    #[test]
    fn matchings_are_distinct_and_perfect() {
        let all: Vec<_> = matchings(8).collect();
        let set: std::collections::BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for m in &all {
            let mut seen: Vec<usize> = m.iter().flat_map(|&(a, b)| [a, b]).collect();
            seen.sort();
            assert_eq!(seen, (0..8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn bijection_counts() {
        assert_eq!(bijections(0).count(), 1);
        assert_eq!(bijections(2).collect::<Vec<_>>(), vec![vec![0, 1], vec![1, 0]]);
        for k in 1..=6 {
            assert_eq!(bijections(k).count() as u128, factorial(k));
        }
    }

    #[test]
    fn cycles() {
        assert_eq!(cycle_count(&[0, 1, 2]), 3);
        assert_eq!(cycle_count(&[1, 2, 0]), 1);
        assert_eq!(cycle_count(&[]), 0);
    }
}
