//! Simple undirected graphs and graph generators.

use std::collections::BTreeSet;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Undirected graph on vertices `0..n` without loops or parallel edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    n: usize,
    /// Edges `(u, v)` with `u < v`, sorted.
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::structure(format!("edge ({u}, {v}) names a vertex outside 0..{n}")));
            }
            if u == v {
                return Err(Error::structure(format!("self-loop at vertex {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::structure(format!("parallel edge ({u}, {v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(SimpleGraph { n, edges: set, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Bit mask of `v` and its neighbors; requires `n <= 32`.
    pub fn closed_neighborhood_mask(&self, v: usize) -> u32 {
        self.adj[v].iter().fold(1 << v, |m, &u| m | 1 << u)
    }
}

/// `G(n, 1/2)` drawn from a ChaCha8 stream seeded with `seed`.
pub fn random_graph(n: usize, seed: u64) -> SimpleGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    SimpleGraph::new(n, edges).expect("pairs u < v are valid")
}

/// One representative of every isomorphism class of graphs on exactly `n`
/// vertices (`n <= 6`), in order of the canonical edge mask.
pub fn nonisomorphic_graphs(n: usize) -> Vec<SimpleGraph> {
    assert!(n <= 6, "isomorphism classes are enumerated by brute force");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let index = |u: usize, v: usize| pairs.iter().position(|&p| p == (u.min(v), u.max(v))).expect("pair exists");
    let perms = permutations(n);
    // For each permutation, where each pair index goes.
    let moves: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| pairs.iter().map(|&(u, v)| index(p[u], p[v])).collect())
        .collect();
    let mut canon = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let best = moves
            .iter()
            .map(|mv| {
                (0..pairs.len())
                    .filter(|&k| mask >> k & 1 == 1)
                    .fold(0u32, |acc, k| acc | 1 << mv[k])
            })
            .min()
            .expect("at least the identity permutation");
        canon.insert(best);
    }
    canon
        .into_iter()
        .map(|mask| {
            let edges = (0..pairs.len()).filter(|&k| mask >> k & 1 == 1).map(|k| pairs[k]);
            SimpleGraph::new(n, edges).expect("pairs are valid")
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts() {
        let counts: Vec<usize> = (0..=5).map(|n| nonisomorphic_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11, 34]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(SimpleGraph::new(2, vec![(0, 0)]).is_err());
        assert!(SimpleGraph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(SimpleGraph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn random_graphs_are_reproducible() {
        assert_eq!(random_graph(5, 11), random_graph(5, 11));
    }
}
