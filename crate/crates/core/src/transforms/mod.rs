//! Structural constructions between the program models.
//!
//! Each transform returns its output together with a [`SizeReport`]
//! comparing the output size against the bound the construction promises.

mod compile;
mod extract;
mod width2;

pub use compile::{circuit_to_relaxed, circuit_to_sbp, CompileTrace, GateRecord};
pub use extract::sbp_to_circuit;
pub use width2::width2_reduce;

use serde::Serialize;

use crate::algebra::Weight;
use crate::programs::{Abp, Edge, MemoryOp, RelaxedSbp, Sbp, StackOp, SymbolTable};
use crate::{Error, Result};

/// Output size of a transform checked against a stated bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeReport {
    pub input_size: usize,
    pub output_size: usize,
    /// Human-readable form of the bound, e.g. `|V| + |E|`.
    pub bound_formula: String,
    pub bound_value: usize,
    pub within_bound: bool,
}

impl SizeReport {
    pub fn new(input_size: usize, output_size: usize, bound_formula: impl Into<String>, bound_value: usize) -> Self {
        SizeReport {
            input_size,
            output_size,
            bound_formula: bound_formula.into(),
            bound_value,
            within_bound: output_size <= bound_value,
        }
    }
}

/// Name of the symbol reserved for converted nop edges.
pub const NOP_SYMBOL: &str = "s*";

/// Subdivides every edge `uv` into `u -> v_e -> v`.
///
/// The first half carries the weight and the second half weight 1. A nop
/// edge becomes `push(s*)` then `pop(s*)` for a fresh symbol `s*`; any
/// other edge repeats its operation on both halves, which doubles every
/// symbol on the stack and so preserves realizability. The subdivision
/// vertex of edge `e` gets id `|V| + e`. A layering `l` becomes `2l` on old
/// vertices and `2l(u) + 1` on subdivision vertices.
pub fn remove_nops(g: &Sbp) -> (Sbp, SizeReport) {
    let n = g.n_vertices();
    let mut symbols = g.symbols().clone();
    let star = g.has_nops().then(|| symbols.fresh(NOP_SYMBOL));
    let mut edges = Vec::with_capacity(2 * g.n_edges());
    for (id, e) in g.edges().iter().enumerate() {
        let mid = n + id;
        let (first, second) = match e.op {
            StackOp::Nop => {
                let s = star.expect("fresh symbol allocated when nops exist");
                (StackOp::Push(s), StackOp::Pop(s))
            }
            op => (op, op),
        };
        edges.push(Edge::new(e.from, mid, e.weight, first));
        edges.push(Edge::new(mid, e.to, Weight::ONE, second));
    }
    let out = Sbp::new(n + g.n_edges(), edges, g.source(), g.sink(), symbols)
        .expect("subdividing an acyclic program keeps it acyclic");
    let out = match g.layers() {
        Some(layers) => {
            let mut l: Vec<usize> = layers.iter().map(|&x| 2 * x).collect();
            l.extend(g.edges().iter().map(|e| 2 * layers[e.from] + 1));
            out.with_layers(l).expect("subdivision of a layered program is layered")
        }
        None => out,
    };
    let report = SizeReport::new(n, out.n_vertices(), "|V| + |E|", n + g.n_edges());
    (out, report)
}

/// Unrolls a relaxed SBP into `m + 1` layers of vertex copies.
///
/// Copy `v_i` (step `i`) exists for every vertex `v`; each edge `uv` yields
/// `u_i -> v_{i+1}` with the same weight and operation. The source is `s_0`
/// and the sink `t_m`. Copies that lie on no `s_0`-`t_m` path are dropped,
/// which changes no walk, so the output has at most `(m + 1)|V|` vertices
/// and width at most `|V|`.
pub fn unwind(g: &RelaxedSbp, m: usize) -> (Sbp, SizeReport) {
    let n = g.n_vertices();
    let (s, t) = (g.source(), g.sink());
    // fwd[i][v]: v_i reachable from s_0; bwd[i][v]: t_m reachable from v_i.
    let mut fwd = vec![vec![false; n]; m + 1];
    let mut bwd = vec![vec![false; n]; m + 1];
    fwd[0][s] = true;
    bwd[m][t] = true;
    for i in 0..m {
        for e in g.edges() {
            if fwd[i][e.from] {
                fwd[i + 1][e.to] = true;
            }
        }
    }
    for i in (0..m).rev() {
        for e in g.edges() {
            if bwd[i + 1][e.to] {
                bwd[i][e.from] = true;
            }
        }
    }
    let mut id = vec![vec![usize::MAX; n]; m + 1];
    let mut layers = Vec::new();
    let mut next = 0;
    for i in 0..=m {
        for v in 0..n {
            let endpoint = (i == 0 && v == s) || (i == m && v == t);
            if endpoint || (fwd[i][v] && bwd[i][v]) {
                id[i][v] = next;
                layers.push(i);
                next += 1;
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..m {
        for e in g.edges() {
            let (a, b) = (id[i][e.from], id[i + 1][e.to]);
            if a != usize::MAX && b != usize::MAX && fwd[i][e.from] && bwd[i + 1][e.to] {
                edges.push(Edge::new(a, b, e.weight, e.op));
            }
        }
    }
    let out = Sbp::new(next, edges, id[0][s], id[m][t], g.symbols().clone())
        .expect("unwound program is acyclic")
        .with_layers(layers)
        .expect("unwound edges advance one step");
    let report = SizeReport::new(n, next, "(m + 1)|V|", (m + 1) * n);
    (out, report)
}

/// Collapses an SBP with at most one stack symbol into an ABP that tracks
/// the stack height in its vertices.
///
/// With `m = |V|`, vertex `v` gets copies `v_0..v_m` (id `h |V| + v`). Push
/// edges raise the height, pop edges lower it and nop edges keep it. The
/// source is `s_0` and the sink `t_0`, so the output has exactly `(m + 1)|V|`
/// vertices.
pub fn one_symbol_to_abp(g: &Sbp) -> Result<(Abp, SizeReport)> {
    if g.symbols().len() > 1 {
        return Err(Error::TooManySymbols(g.symbols().len()));
    }
    let n = g.n_vertices();
    let m = n;
    let at = |v: usize, h: usize| h * n + v;
    let mut edges = Vec::new();
    for e in g.edges() {
        for h in 0..=m {
            let target = match e.op {
                StackOp::Push(_) if h < m => h + 1,
                StackOp::Pop(_) if h >= 1 => h - 1,
                StackOp::Nop => h,
                _ => continue,
            };
            edges.push(Edge::new(at(e.from, h), at(e.to, target), e.weight, ()));
        }
    }
    let size = (m + 1) * n;
    let abp = Abp::new(size, edges, at(g.source(), 0), at(g.sink(), 0), SymbolTable::default())?;
    let report = SizeReport::new(n, size, "(m + 1)|G| with m = |V|", size);
    Ok((abp, report))
}

/// Reads every ABP edge as a nop edge. The result has an empty symbol
/// table, so after [`remove_nops`] it uses exactly one symbol.
pub fn abp_to_one_symbol_sbp(g: &Abp) -> Sbp {
    g.map_ops(SymbolTable::default(), |_| StackOp::nop())
        .expect("relabeling keeps the structure valid")
}
