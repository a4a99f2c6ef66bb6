//! Brute-force oracles that realize the program semantics by listing paths.

use super::{BranchingProgram, Edge, MemoryOp, RelaxedSbp, StackOp};
use crate::algebra::{Ring, SparsePoly, Symbolic};
use crate::{Error, Result};

/// One contributing path or walk: its edge ids and the product of its weights.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTerm {
    pub edges: Vec<usize>,
    pub weight: SparsePoly,
}

impl PathTerm {
    fn new<O: MemoryOp>(all: &[Edge<O>], edges: Vec<usize>) -> Self {
        let weight = edges
            .iter()
            .fold(SparsePoly::one(), |acc, &id| acc.mul(&all[id].weight.value(&Symbolic)));
        PathTerm { edges, weight }
    }
}

/// Sum of the weights of the listed terms.
pub fn definitional_polynomial(terms: &[PathTerm]) -> SparsePoly {
    let mut acc = SparsePoly::zero();
    for t in terms {
        acc.add_assign(&t.weight);
    }
    acc
}

/// All s-t paths whose operation sequence is realizable.
///
/// Every s-t path is listed and its full sequence handed to the realizability
/// check, so this follows the definition literally. The budget bounds the
/// number of s-t paths examined, realizable or not. When `s = t` the only
/// path is the empty one, of weight 1.
pub fn enumerate_realizable_paths<O: MemoryOp>(
    g: &BranchingProgram<O>,
    max_count: usize,
) -> Result<Vec<PathTerm>> {
    let reach = reaches(g.n_vertices(), g.edges(), g.sink());
    let mut out = Vec::new();
    let mut seen = 0usize;
    let mut path: Vec<usize> = Vec::new();
    // Explicit DFS stack of (vertex, next out-edge index).
    let mut stack = vec![(g.source(), 0usize)];
    if !reach[g.source()] {
        return Ok(out);
    }
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if *next == 0 && v == g.sink() {
            seen += 1;
            if seen > max_count {
                return Err(Error::BudgetExceeded {
                    what: "s-t paths",
                    limit: max_count,
                });
            }
            let ops: Vec<O> = path.iter().map(|&id| g.edge(id).op).collect();
            if O::seq_realizable(&ops) {
                out.push(PathTerm::new(g.edges(), path.clone()));
            }
        }
        let outs = g.out_edges(v);
        // Skip edges leading where the sink cannot be reached.
        while *next < outs.len() && !reach[g.edge(outs[*next]).to] {
            *next += 1;
        }
        if *next < outs.len() {
            let id = outs[*next];
            *next += 1;
            path.push(id);
            stack.push((g.edge(id).to, 0));
        } else {
            stack.pop();
            path.pop();
        }
    }
    Ok(out)
}

/// All stack-realizable s-t walks of length exactly `m` in a relaxed SBP.
///
/// Walk prefixes that already underflow, pop a mismatched symbol or hold
/// more symbols than the remaining steps could pop are cut, since no
/// extension of them is realizable. The budget bounds the number of
/// realizable walks returned.
pub fn enumerate_realizable_walks(g: &RelaxedSbp, m: usize, max_count: usize) -> Result<Vec<PathTerm>> {
    let n = g.n_vertices();
    // hit[k][v]: some walk of exactly k steps leads from v to the sink.
    let mut hit = vec![vec![false; n]; m + 1];
    hit[0][g.sink()] = true;
    for k in 1..=m {
        for e in g.edges() {
            if hit[k - 1][e.to] {
                hit[k][e.from] = true;
            }
        }
    }
    let mut out = Vec::new();
    if !hit[m][g.source()] {
        return Ok(out);
    }
    let mut walk: Vec<usize> = Vec::new();
    let mut symbols: Vec<u32> = Vec::new();
    // Frames: (vertex, next out-edge index, symbol popped on entry).
    let mut frames: Vec<(usize, usize, Option<u32>)> = vec![(g.source(), 0, None)];
    while let Some(&mut (v, ref mut next, _)) = frames.last_mut() {
        let depth = walk.len();
        if depth == m {
            if v == g.sink() && symbols.is_empty() {
                if out.len() == max_count {
                    return Err(Error::BudgetExceeded {
                        what: "realizable walks",
                        limit: max_count,
                    });
                }
                out.push(PathTerm::new(g.edges(), walk.clone()));
            }
            backtrack(&mut frames, &mut walk, &mut symbols, g.edges());
            continue;
        }
        let outs = g.out_edges(v);
        let mut chosen = None;
        while *next < outs.len() {
            let id = outs[*next];
            *next += 1;
            let e = &g.edges()[id];
            if !hit[m - depth - 1][e.to] {
                continue;
            }
            let fits = match e.op {
                StackOp::Push(_) => symbols.len() < m - depth - 1,
                StackOp::Pop(s) => symbols.last() == Some(&s),
                StackOp::Nop => symbols.len() < m - depth,
            };
            if fits {
                chosen = Some(id);
                break;
            }
        }
        match chosen {
            Some(id) => {
                let e = &g.edges()[id];
                let popped = match e.op {
                    StackOp::Push(s) => {
                        symbols.push(s);
                        None
                    }
                    StackOp::Pop(_) => symbols.pop(),
                    StackOp::Nop => None,
                };
                walk.push(id);
                frames.push((e.to, 0, popped));
            }
            None => backtrack(&mut frames, &mut walk, &mut symbols, g.edges()),
        }
    }
    Ok(out)
}

/// Leaves the current frame, undoing the stack effect of the edge that entered it.
fn backtrack(
    frames: &mut Vec<(usize, usize, Option<u32>)>,
    walk: &mut Vec<usize>,
    symbols: &mut Vec<u32>,
    edges: &[Edge<StackOp>],
) {
    let (_, _, popped) = frames.pop().expect("non-empty frame stack");
    if let Some(id) = walk.pop() {
        match edges[id].op {
            StackOp::Push(_) => {
                symbols.pop();
            }
            StackOp::Pop(_) => symbols.push(popped.expect("pop recorded its symbol")),
            StackOp::Nop => {}
        }
    }
}

/// Vertices from which `target` is reachable.
fn reaches<O>(n: usize, edges: &[Edge<O>], target: usize) -> Vec<bool> {
    let mut preds = vec![Vec::new(); n];
    for e in edges {
        preds[e.to].push(e.from);
    }
    let mut seen = vec![false; n];
    seen[target] = true;
    let mut stack = vec![target];
    while let Some(v) = stack.pop() {
        for &u in &preds[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Var, Weight};
    use crate::programs::{RamOp, Sbp, SymbolTable};

    fn x(i: u32) -> Weight {
        Weight::Var(Var(i))
    }

    fn syms() -> SymbolTable {
        SymbolTable::from_names(["a", "b"]).unwrap()
    }

    #[test]
    fn push_pop_pair() {
        let g = Sbp::new(
            3,
            vec![Edge::new(0, 1, x(1), StackOp::Push(0)), Edge::new(1, 2, x(2), StackOp::Pop(0))],
            0,
            2,
            syms(),
        )
        .unwrap();
        let terms = enumerate_realizable_paths(&g, 100).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].edges, vec![0, 1]);
        assert_eq!(terms[0].weight.to_string(), "X1*X2");

        let bad = Sbp::new(
            3,
            vec![Edge::new(0, 1, x(1), StackOp::Push(0)), Edge::new(1, 2, x(2), StackOp::Pop(1))],
            0,
            2,
            syms(),
        )
        .unwrap();
        assert!(enumerate_realizable_paths(&bad, 100).unwrap().is_empty());
    }

    #[test]
    fn parallel_branches_and_budget() {
        let g = Sbp::new(
            4,
            vec![
                Edge::new(0, 1, x(1), StackOp::Push(0)),
                Edge::new(0, 2, x(2), StackOp::Push(1)),
                Edge::new(1, 3, Weight::ONE, StackOp::Pop(0)),
                Edge::new(2, 3, Weight::ONE, StackOp::Pop(1)),
            ],
            0,
            3,
            syms(),
        )
        .unwrap();
        let terms = enumerate_realizable_paths(&g, 100).unwrap();
        assert_eq!(definitional_polynomial(&terms).to_string(), "X1 + X2");
        assert!(matches!(
            enumerate_realizable_paths(&g, 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn empty_path_when_source_is_sink() {
        let g = Sbp::new(1, vec![], 0, 0, syms()).unwrap();
        let terms = enumerate_realizable_paths(&g, 10).unwrap();
        assert_eq!(terms.len(), 1);
        assert!(terms[0].edges.is_empty());
        assert_eq!(terms[0].weight, SparsePoly::one());
    }

    #[test]
    fn ram_paths() {
        let g = BranchingProgram::new(
            3,
            vec![Edge::new(0, 1, x(1), RamOp::Write(0)), Edge::new(1, 2, x(2), RamOp::Delete(0))],
            0,
            2,
            syms(),
        )
        .unwrap();
        assert_eq!(enumerate_realizable_paths(&g, 10).unwrap().len(), 1);
    }

    #[test]
    fn walks() {
        let loop_g = RelaxedSbp::new(
            2,
            vec![Edge::new(0, 1, x(1), StackOp::Push(0)), Edge::new(1, 0, x(2), StackOp::Pop(0))],
            0,
            0,
            syms(),
        )
        .unwrap();
        let w0 = enumerate_realizable_walks(&loop_g, 0, 10).unwrap();
        assert_eq!(w0.len(), 1);
        assert_eq!(w0[0].weight, SparsePoly::one());
        assert!(enumerate_realizable_walks(&loop_g, 1, 10).unwrap().is_empty());
        let w2 = enumerate_realizable_walks(&loop_g, 2, 10).unwrap();
        assert_eq!(w2.len(), 1);
        assert_eq!(w2[0].edges, vec![0, 1]);
        assert_eq!(enumerate_realizable_walks(&loop_g, 4, 10).unwrap().len(), 1);

        let apart = loop_g.with_endpoints(0, 1).unwrap();
        assert!(enumerate_realizable_walks(&apart, 0, 10).unwrap().is_empty());
    }

    #[test]
    fn walks_with_nesting() {
        // Self-loops pushing and popping at one vertex: at m = 4 the
        // realizable sequences are (push pop push pop) and (push push pop pop).
        let g = RelaxedSbp::new(
            1,
            vec![Edge::new(0, 0, x(1), StackOp::Push(0)), Edge::new(0, 0, x(2), StackOp::Pop(0))],
            0,
            0,
            SymbolTable::from_names(["a"]).unwrap(),
        )
        .unwrap();
        let w = enumerate_realizable_walks(&g, 4, 10).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(definitional_polynomial(&w).to_string(), "2*X1^2*X2^2");
    }
}
