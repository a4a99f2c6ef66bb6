use std::collections::BTreeMap;

use crate::algebra::{Ring, Valuation};
use crate::programs::{Sbp, StackOp};
use crate::transforms::remove_nops;

/// Table of `w(v, u, i)`: the summed weight of realizable `v`-`u` paths of
/// length `i` in a nop-free SBP.
///
/// Only even lengths are stored, since a nop-free realizable path has as
/// many pushes as pops. Rows are filled in reverse topological order and
/// kept sparse: each row lists its structurally reachable cells `(u, i)`
/// in ascending order.
#[derive(Clone, Debug)]
pub struct SbpDpTable<R> {
    n: usize,
    half_len: usize,
    rows: Vec<Vec<(usize, R)>>,
    steps: u64,
}

/// Sorts `(key, value)` pairs and adds up values with equal keys.
fn merge_sorted<R: Ring>(mut terms: Vec<(usize, R)>) -> Vec<(usize, R)> {
    terms.sort_by_key(|t| t.0);
    let mut out: Vec<(usize, R)> = Vec::with_capacity(terms.len());
    for (key, value) in terms {
        match out.last_mut() {
            Some((k, acc)) if *k == key => acc.add_assign(&value),
            _ => out.push((key, value)),
        }
    }
    out
}

impl<R: Ring> SbpDpTable<R> {
    /// Fills every row and cell for `g`, which must not contain nop edges.
    pub fn build<V: Valuation<R>>(g: &Sbp, val: &V) -> Self {
        let n = g.n_vertices();
        Self::fill(g, val, &vec![true; n], &vec![true; n])
    }

    /// Fills only what `sum_i w(s, t, i)` depends on: rows of vertices on
    /// some `s`-`t` path, and cells `(u, i)` where `u = t` or `u` has a pop
    /// edge into a vertex that reaches `t`. Other entries read as zero.
    pub fn build_for_total<V: Valuation<R>>(g: &Sbp, val: &V) -> Self {
        let n = g.n_vertices();
        let fwd = reach_set(g, g.source(), false);
        let bwd = reach_set(g, g.sink(), true);
        let rows: Vec<bool> = (0..n).map(|v| fwd[v] && bwd[v]).collect();
        let cells: Vec<bool> = (0..n)
            .map(|u| {
                u == g.sink()
                    || g.out_edges(u)
                        .iter()
                        .any(|&id| matches!(g.edge(id).op, StackOp::Pop(_)) && bwd[g.edge(id).to])
            })
            .collect();
        Self::fill(g, val, &rows, &cells)
    }

    fn fill<V: Valuation<R>>(g: &Sbp, val: &V, keep_row: &[bool], keep_cell: &[bool]) -> Self {
        assert!(!g.has_nops(), "dynamic program expects a nop-free SBP");
        let n = g.n_vertices();
        let half_len = g.longest_path() / 2;
        let width = half_len + 1;
        let weights: Vec<R> = g.edges().iter().map(|e| e.weight.value(val)).collect();
        let mut rows: Vec<Vec<(usize, R)>> = vec![Vec::new(); n];
        let mut steps = 0u64;

        for &v in g.topological_order().iter().rev() {
            if !keep_row[v] {
                continue;
            }
            // M(v, c, k): matched blocks v -push-> a ~> b -pop-> c of length 2k.
            let mut blocks: Vec<(usize, R)> = Vec::new();
            for &push in g.out_edges(v) {
                let StackOp::Push(s) = g.edge(push).op else { continue };
                let a = g.edge(push).to;
                for (cell, inner) in &rows[a] {
                    let (b, kj) = (cell / width, cell % width);
                    let head = weights[push].mul(inner);
                    for &pop in g.out_edges(b) {
                        if g.edge(pop).op != StackOp::Pop(s) {
                            continue;
                        }
                        let c = g.edge(pop).to;
                        if !keep_row[c] {
                            continue;
                        }
                        blocks.push((c * width + kj + 1, head.mul(&weights[pop])));
                        steps += 1;
                    }
                }
            }

            // w(v, u, 2k + 2k') += M(v, c, k) * w(c, u, 2k').
            let mut terms: Vec<(usize, R)> = Vec::new();
            if keep_cell[v] {
                terms.push((v * width, R::one()));
            }
            for (key, m) in merge_sorted(blocks) {
                let (c, k) = (key / width, key % width);
                for (cell, tail) in &rows[c] {
                    let (u, kk) = (cell / width, cell % width);
                    terms.push((u * width + k + kk, m.mul(tail)));
                    steps += 1;
                }
            }
            rows[v] = merge_sorted(terms);
        }
        SbpDpTable {
            n,
            half_len,
            rows,
            steps,
        }
    }

    /// `w(v, u, i)`; zero for odd `i`, for lengths beyond the longest path
    /// and for entries a pruned table did not fill.
    pub fn get(&self, v: usize, u: usize, i: usize) -> R {
        if i % 2 == 1 || i / 2 > self.half_len {
            return R::zero();
        }
        let key = u * (self.half_len + 1) + i / 2;
        match self.rows[v].binary_search_by_key(&key, |c| c.0) {
            Ok(pos) => self.rows[v][pos].1.clone(),
            Err(_) => R::zero(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    /// Largest even length stored.
    pub fn max_len(&self) -> usize {
        2 * self.half_len
    }

    /// Multiply-add operations spent filling the table.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Number of stored cells.
    pub fn n_cells(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `sum_i w(s, t, i)`.
    pub fn total(&self, s: usize, t: usize) -> R {
        let width = self.half_len + 1;
        let mut acc = R::zero();
        for (cell, value) in &self.rows[s] {
            if cell / width == t {
                acc.add_assign(value);
            }
        }
        acc
    }
}

fn reach_set(g: &Sbp, start: usize, backward: bool) -> Vec<bool> {
    let mut seen = vec![false; g.n_vertices()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        let ids = if backward { g.in_edges(v) } else { g.out_edges(v) };
        for &id in ids {
            let e = g.edge(id);
            let next = if backward { e.from } else { e.to };
            if !seen[next] {
                seen[next] = true;
                stack.push(next);
            }
        }
    }
    seen
}

/// Result of [`eval_sbp_counted`]: the value and the work spent.
#[derive(Clone, Debug)]
pub struct SbpEvaluation<R> {
    pub value: R,
    pub steps: u64,
    /// Vertex and edge counts of the nop-free program the table was built on.
    pub dp_vertices: usize,
    pub dp_edges: usize,
}

/// Sum of the weights of all stack-realizable s-t paths.
pub fn eval_sbp<R: Ring, V: Valuation<R>>(g: &Sbp, val: &V) -> R {
    eval_sbp_counted(g, val).value
}

/// [`eval_sbp`] together with its operation count.
pub fn eval_sbp_counted<R: Ring, V: Valuation<R>>(g: &Sbp, val: &V) -> SbpEvaluation<R> {
    let owned;
    let h = if g.has_nops() {
        owned = remove_nops(g).0;
        &owned
    } else {
        g
    };
    let table = SbpDpTable::build_for_total(h, val);
    SbpEvaluation {
        value: table.total(h.source(), h.sink()),
        steps: table.steps(),
        dp_vertices: h.n_vertices(),
        dp_edges: h.n_edges(),
    }
}

/// Independent exact evaluator: forward exploration of (vertex, stack)
/// states in topological order. Handles nop edges directly. Exponential in
/// the worst case; used as a cross-check.
pub fn eval_sbp_by_stack_states<R: Ring, V: Valuation<R>>(g: &Sbp, val: &V) -> R {
    let n = g.n_vertices();
    let mut states: Vec<BTreeMap<Vec<u32>, R>> = vec![BTreeMap::new(); n];
    states[g.source()].insert(Vec::new(), R::one());
    for &v in g.topological_order() {
        let here = std::mem::take(&mut states[v]);
        if v == g.sink() {
            return here.get(&Vec::new()).cloned().unwrap_or_else(R::zero);
        }
        for (stack, value) in &here {
            for &id in g.out_edges(v) {
                let e = g.edge(id);
                let mut next = stack.clone();
                match e.op {
                    StackOp::Push(s) => next.push(s),
                    StackOp::Pop(s) => {
                        if next.pop() != Some(s) {
                            continue;
                        }
                    }
                    StackOp::Nop => {}
                }
                let term = value.mul(&e.weight.value(val));
                states[e.to]
                    .entry(next)
                    .and_modify(|x| x.add_assign(&term))
                    .or_insert(term);
            }
        }
    }
    R::zero()
}
