//! Extraction of a circuit from the SBP dynamic program.

use std::collections::BTreeMap;

use super::{remove_nops, SizeReport};
use crate::circuits::{Circuit, CircuitBuilder};
use crate::programs::{Sbp, StackOp};

/// Materializes the table `w(v, u, i)` of the SBP dynamic program as a
/// circuit with fanin-2 sums.
///
/// One gate stands for each structurally reachable cell. A matched block
/// `v -push(s)-> a ~> b -pop(s)-> c` of length `j + 2` contributes
/// `w(va) * w(a, b, j) * w(bc)` to the block gate `M(v, c, j + 2)`, and
/// `w(v, u, i)` sums `M(v, c, k) * w(c, u, i - k)`. Products with the base
/// cell `w(c, c, 0) = 1` are skipped. The output sums `w(s, t, i)` over
/// all even `i`. Nop edges are removed first.
///
/// The size is reported against `|V'|^4`, where `V'` is the vertex set of
/// the nop-free program the table is built on.
pub fn sbp_to_circuit(g: &Sbp) -> (Circuit, SizeReport) {
    let owned;
    let h = if g.has_nops() {
        owned = remove_nops(g).0;
        &owned
    } else {
        g
    };
    let n = h.n_vertices();
    let mut b = CircuitBuilder::new();
    let weights: Vec<usize> = h.edges().iter().map(|e| b.input(e.weight)).collect();
    // rows[v]: cell (u, half length) -> gate, or None for the base cell.
    let mut rows: Vec<BTreeMap<(usize, usize), Option<usize>>> = vec![BTreeMap::new(); n];

    for &v in h.topological_order().iter().rev() {
        let mut blocks: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for &push in h.out_edges(v) {
            let StackOp::Push(s) = h.edge(push).op else { continue };
            let a = h.edge(push).to;
            for (&(bv, kj), &inner) in &rows[a] {
                let head = match inner {
                    None => weights[push],
                    Some(gate) => b.prod(weights[push], gate),
                };
                for &pop in h.out_edges(bv) {
                    if h.edge(pop).op != StackOp::Pop(s) {
                        continue;
                    }
                    let term = b.prod(head, weights[pop]);
                    blocks.entry((h.edge(pop).to, kj + 1)).or_default().push(term);
                }
            }
        }
        let mut cells: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for ((c, k), terms) in blocks {
            let block = b.binary_sum(&terms);
            for (&(u, kk), &tail) in &rows[c] {
                let term = match tail {
                    None => block,
                    Some(gate) => b.prod(block, gate),
                };
                cells.entry((u, k + kk)).or_default().push(term);
            }
        }
        let mut row: BTreeMap<(usize, usize), Option<usize>> = BTreeMap::new();
        row.insert((v, 0), None);
        for (cell, terms) in cells {
            row.insert(cell, Some(b.binary_sum(&terms)));
        }
        rows[v] = row;
    }

    let mut outputs = Vec::new();
    for (&(u, _), &gate) in &rows[h.source()] {
        if u == h.sink() {
            outputs.push(gate.unwrap_or_else(|| b.constant(1)));
        }
    }
    let out = if outputs.is_empty() {
        b.constant(0)
    } else {
        b.binary_sum(&outputs)
    };
    let circuit = b.finish(out, false).expect("table circuit is well formed");
    let report = SizeReport::new(g.size(), circuit.size(), "|V'|^4 (V' = nop-free vertex set)", n.pow(4));
    (circuit, report)
}
