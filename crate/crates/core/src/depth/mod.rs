//! Depth reduction of SBPs to semi-unbounded circuits by recursively cutting
//! realizable paths (and paths with a gap) into pieces of at most half the
//! length.
//!
//! A plain description `(a, b, i)` stands for the realizable `a`-`b` paths of
//! length `i`. A gap description `(a, (c, d, j), b, i)` stands for a path
//! `a ~> c` followed by a path `d ~> b`, of total length `i - j`, that becomes
//! realizable once `c` and `d` are glued. Every gap built here is *closed*:
//! the part after `d` is empty or starts with a pop. Closedness is what makes
//! the decomposition of a path unique, so each path is summed exactly once.

mod decompose;

pub use decompose::{all_decompositions, decompose_oracle, stack_height, Decomposition, GappedPath};

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{Valuation, Var};
use crate::circuits::{Circuit, CircuitBuilder};
use crate::evaluators::SbpDpTable;
use crate::programs::{Sbp, StackOp};
use crate::transforms::remove_nops;

/// `(a, b, i)`: realizable paths from `a` to `b` of even length `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PathDescription {
    pub a: usize,
    pub b: usize,
    pub i: usize,
}

/// `(a, (c, d, j), b, i)`: a path with a gap of length `j` from `c` to `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GapDescription {
    pub a: usize,
    pub c: usize,
    pub d: usize,
    pub j: usize,
    pub b: usize,
    pub i: usize,
}

/// Memoization key: one circuit gate per distinct description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateIndex {
    Plain(PathDescription),
    Gap(GapDescription),
}

/// Shape of a depth-reduced circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthReport {
    pub input_size: usize,
    /// Vertices of the nop-free program the recursion runs on.
    pub dp_vertices: usize,
    /// Longest even path length `L` of the nop-free program.
    pub max_len: usize,
    pub size: usize,
    pub depth: usize,
    pub depth_bound: usize,
    pub within_bound: bool,
    pub plain_descriptions: usize,
    pub gap_descriptions: usize,
}

/// `16 (ceil(log2(L + 2)) + 1)`.
pub fn depth_bound(max_len: usize) -> usize {
    let mut log = 0;
    while (1usize << log) < max_len + 2 {
        log += 1;
    }
    16 * (log + 1)
}

/// Every variable is possibly nonzero; used to find structurally empty cells.
struct Support;

impl Valuation<bool> for Support {
    fn var(&self, _: Var) -> bool {
        true
    }
}

struct Reducer<'a> {
    g: &'a Sbp,
    n: usize,
    /// `reach[i][a * n + b]`: some `a`-`b` path has exactly `i` edges.
    reach: Vec<Vec<bool>>,
    realizable: SbpDpTable<bool>,
    push_edges: Vec<usize>,
    b: CircuitBuilder,
    one: usize,
    weights: Vec<usize>,
    memo: HashMap<GateIndex, Option<usize>>,
}

impl Reducer<'_> {
    fn reach(&self, a: usize, b: usize, len: usize) -> bool {
        len < self.reach.len() && self.reach[len][a * self.n + b]
    }

    /// A `d`-`b` path of length `len` that is empty or starts with a pop.
    fn closed_reach(&self, d: usize, b: usize, len: usize) -> bool {
        if len == 0 {
            return d == b;
        }
        self.g.out_edges(d).iter().any(|&id| {
            let e = self.g.edge(id);
            matches!(e.op, StackOp::Pop(_)) && self.reach(e.to, b, len - 1)
        })
    }

    fn gap_possible(&self, k: &GapDescription) -> bool {
        if k.j > k.i || k.j % 2 == 1 || k.i % 2 == 1 {
            return false;
        }
        let rest = k.i - k.j;
        (0..=rest).any(|x| self.reach(k.a, k.c, x) && self.closed_reach(k.d, k.b, rest - x))
    }

    fn plain_possible(&self, a: usize, b: usize, i: usize) -> bool {
        i % 2 == 0 && self.realizable.get(a, b, i)
    }

    /// Product of up to five factors as a balanced fanin-2 tree; factors
    /// equal to the constant one are dropped.
    fn term(&mut self, factors: &[usize]) -> usize {
        let kept: Vec<usize> = factors.iter().copied().filter(|&f| f != self.one).collect();
        if kept.is_empty() {
            self.one
        } else {
            self.b.product(&kept)
        }
    }

    fn plain(&mut self, a: usize, b: usize, i: usize) -> Option<usize> {
        if i == 0 {
            return (a == b).then_some(self.one);
        }
        if !self.plain_possible(a, b, i) {
            return None;
        }
        let key = GateIndex::Plain(PathDescription { a, b, i });
        if let Some(&g) = self.memo.get(&key) {
            return g;
        }
        let half = i / 2;
        let mut terms = Vec::new();
        for pi in 0..self.push_edges.len() {
            let push = self.push_edges[pi];
            let (c, e, s) = self.push_parts(push);
            for d in 0..self.n {
                for j in (half + 1..=i).filter(|j| j % 2 == 0) {
                    let outer_key = GapDescription { a, c, d, j, b, i };
                    if !self.gap_possible(&outer_key) {
                        continue;
                    }
                    debug_assert!(2 * (i - j) < i, "gap measure halves");
                    let Some(outer) = self.gap(outer_key) else { continue };
                    for i1 in (0..=half.min(j - 2)).filter(|x| x % 2 == 0) {
                        let i2 = j - 2 - i1;
                        if i2 > half {
                            continue;
                        }
                        for f in 0..self.n {
                            if !self.plain_possible(e, f, i1) {
                                continue;
                            }
                            for pop in self.pops_from(f, s) {
                                let gv = self.g.edge(pop).to;
                                if !self.plain_possible(gv, d, i2) {
                                    continue;
                                }
                                let (Some(p2), Some(p3)) = (self.plain(e, f, i1), self.plain(gv, d, i2)) else {
                                    continue;
                                };
                                let t = self.term(&[outer, p2, p3, self.weights[push], self.weights[pop]]);
                                terms.push(t);
                            }
                        }
                    }
                }
            }
        }
        let out = (!terms.is_empty()).then(|| self.b.sum(terms));
        self.memo.insert(key, out);
        out
    }

    fn gap(&mut self, k: GapDescription) -> Option<usize> {
        if k.j == k.i {
            return (k.a == k.c && k.b == k.d).then_some(self.one);
        }
        if !self.gap_possible(&k) {
            return None;
        }
        let key = GateIndex::Gap(k);
        if let Some(&g) = self.memo.get(&key) {
            return g;
        }
        let GapDescription { a, c, d, j, b, i } = k;
        let mu = i - j;
        let half = mu / 2;
        let mut terms = Vec::new();
        for pi in 0..self.push_edges.len() {
            let push = self.push_edges[pi];
            let (c1, e, s) = self.push_parts(push);
            for d1 in 0..self.n {
                for j1 in (j + half + 1..=i).filter(|x| x % 2 == 0) {
                    let outer_key = GapDescription {
                        a,
                        c: c1,
                        d: d1,
                        j: j1,
                        b,
                        i,
                    };
                    if !self.gap_possible(&outer_key) {
                        continue;
                    }
                    debug_assert!(2 * (i - j1) < mu, "outer gap measure halves");
                    let Some(outer) = self.gap(outer_key) else { continue };
                    // The gap lies in the inner part of the first block.
                    for i1 in (j..=(j + half).min(j1 - 2)).filter(|x| x % 2 == 0) {
                        let i2 = j1 - 2 - i1;
                        for f in 0..self.n {
                            let inner_key = GapDescription { a: e, c, d, j, b: f, i: i1 };
                            if !self.gap_possible(&inner_key) {
                                continue;
                            }
                            for pop in self.pops_from(f, s) {
                                let gv = self.g.edge(pop).to;
                                if !self.plain_possible(gv, d1, i2) {
                                    continue;
                                }
                                let (Some(p2), Some(p3)) = (self.gap(inner_key), self.plain(gv, d1, i2)) else {
                                    continue;
                                };
                                let t = self.term(&[outer, p2, p3, self.weights[push], self.weights[pop]]);
                                terms.push(t);
                            }
                        }
                    }
                    // The gap lies in the rest of the run after the first block.
                    for i2 in (j..=(j + half).min(j1 - 2)).filter(|x| x % 2 == 0) {
                        let i1 = j1 - 2 - i2;
                        for f in 0..self.n {
                            if !self.plain_possible(e, f, i1) {
                                continue;
                            }
                            for pop in self.pops_from(f, s) {
                                let gv = self.g.edge(pop).to;
                                let tail_key = GapDescription {
                                    a: gv,
                                    c,
                                    d,
                                    j,
                                    b: d1,
                                    i: i2,
                                };
                                let (Some(p2), Some(p3)) = (self.plain(e, f, i1), self.gap(tail_key)) else {
                                    continue;
                                };
                                let t = self.term(&[outer, p2, p3, self.weights[push], self.weights[pop]]);
                                terms.push(t);
                            }
                        }
                    }
                }
            }
        }
        let out = (!terms.is_empty()).then(|| self.b.sum(terms));
        self.memo.insert(key, out);
        out
    }

    fn push_parts(&self, id: usize) -> (usize, usize, u32) {
        let e = self.g.edge(id);
        let StackOp::Push(s) = e.op else { unreachable!("push edge list holds pushes") };
        (e.from, e.to, s)
    }

    fn pops_from(&self, f: usize, s: u32) -> Vec<usize> {
        self.g
            .out_edges(f)
            .iter()
            .copied()
            .filter(|&id| self.g.edge(id).op == StackOp::Pop(s))
            .collect()
    }
}

/// Semi-unbounded circuit for `f_G` whose depth is logarithmic in the
/// longest path length.
///
/// Gates are created top-down from the descriptions `(s, t, i)` for every
/// even `i <= L`, memoized, and only for descriptions that can hold a path.
/// A plain description sums, over the unique first block `c -push-> e ~> f
/// -pop-> g` of the cut-out run `c ~> d` and the remaining run `g ~> d`,
/// products of the form `w(gap) w(e, f, i1) w(g, d, i2) w(ce) w(fg)` with
/// `i1, i2 <= i / 2 < j`. A gap description does the same with the run that
/// contains the gap, requiring only the gap-holding piece to be at most
/// half the measure `i - j`. Each product is a fanin-2 tree of depth at
/// most 3 and each description is one unbounded sum. Nop edges are removed
/// first.
pub fn depth_reduce(g: &Sbp) -> (Circuit, DepthReport) {
    let owned;
    let h = if g.has_nops() {
        owned = remove_nops(g).0;
        &owned
    } else {
        g
    };
    let n = h.n_vertices();
    let longest = h.longest_path();
    let max_len = longest - longest % 2;
    let mut reach = vec![vec![false; n * n]; longest + 1];
    for v in 0..n {
        reach[0][v * n + v] = true;
    }
    for len in 1..=longest {
        for a in 0..n {
            for &id in h.out_edges(a) {
                let to = h.edge(id).to;
                for b in 0..n {
                    if reach[len - 1][to * n + b] {
                        reach[len][a * n + b] = true;
                    }
                }
            }
        }
    }
    let push_edges: Vec<usize> = (0..h.n_edges())
        .filter(|&id| matches!(h.edge(id).op, StackOp::Push(_)))
        .collect();
    let mut b = CircuitBuilder::new();
    let one = b.constant(1);
    let weights = h.edges().iter().map(|e| b.input(e.weight)).collect();
    let mut r = Reducer {
        g: h,
        n,
        reach,
        realizable: SbpDpTable::build(h, &Support),
        push_edges,
        b,
        one,
        weights,
        memo: HashMap::new(),
    };
    let mut outputs = Vec::new();
    for i in (0..=max_len).step_by(2) {
        if let Some(gate) = r.plain(h.source(), h.sink(), i) {
            outputs.push(gate);
        }
    }
    let out = r.b.sum(outputs);
    let plain_descriptions = r.memo.keys().filter(|k| matches!(k, GateIndex::Plain(_))).count();
    let gap_descriptions = r.memo.len() - plain_descriptions;
    let circuit = r.b.finish(out, true).expect("description circuit is well formed");
    let depth = circuit.stats().depth;
    let bound = depth_bound(max_len);
    let report = DepthReport {
        input_size: g.size(),
        dp_vertices: n,
        max_len,
        size: circuit.size(),
        depth,
        depth_bound: bound,
        within_bound: depth <= bound,
        plain_descriptions,
        gap_descriptions,
    };
    (circuit, report)
}
