//! Branching programs: plain ABPs, stack branching programs (SBPs), their
//! cyclic relaxation and random access branching programs (RABPs).
//!
//! All four share one representation, [`BranchingProgram`], parameterised
//! by the per-edge memory operation. Vertices are dense indices, edges carry
//! ids (their position) so parallel edges are allowed.

mod enumerate;
mod ops;

pub use enumerate::{
    definitional_polynomial, enumerate_realizable_paths, enumerate_realizable_walks, PathTerm,
};
pub use ops::{ram_seq_realizable, stack_seq_realizable, MemoryOp, RamOp, StackOp, Sym, SymbolTable};

use crate::algebra::Weight;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge<O> {
    pub from: usize,
    pub to: usize,
    pub weight: Weight,
    pub op: O,
}

impl<O> Edge<O> {
    pub fn new(from: usize, to: usize, weight: Weight, op: O) -> Self {
        Edge { from, to, weight, op }
    }
}

/// Weighted digraph with source, sink and per-edge operations.
///
/// Programs built with [`BranchingProgram::new`] are acyclic; the cyclic
/// variant only exists inside [`RelaxedSbp`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingProgram<O> {
    n_vertices: usize,
    edges: Vec<Edge<O>>,
    source: usize,
    sink: usize,
    symbols: SymbolTable,
    layers: Option<Vec<usize>>,
    topo: Vec<usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

pub type Abp = BranchingProgram<()>;
pub type Sbp = BranchingProgram<StackOp>;
pub type Rabp = BranchingProgram<RamOp>;

impl<O: MemoryOp> BranchingProgram<O> {
    pub fn new(
        n_vertices: usize,
        edges: Vec<Edge<O>>,
        source: usize,
        sink: usize,
        symbols: SymbolTable,
    ) -> Result<Self> {
        let mut g = Self::build(n_vertices, edges, source, sink, symbols)?;
        g.topo = topological_order(n_vertices, &g.out_edges, &g.edges)
            .ok_or_else(|| Error::structure("program graph has a cycle"))?;
        Ok(g)
    }

    fn build(
        n_vertices: usize,
        edges: Vec<Edge<O>>,
        source: usize,
        sink: usize,
        symbols: SymbolTable,
    ) -> Result<Self> {
        for (name, v) in [("source", source), ("sink", sink)] {
            if v >= n_vertices {
                return Err(Error::structure(format!(
                    "{name} {v} is not among the {n_vertices} vertices"
                )));
            }
        }
        let mut out_edges = vec![Vec::new(); n_vertices];
        let mut in_edges = vec![Vec::new(); n_vertices];
        for (id, e) in edges.iter().enumerate() {
            if e.from >= n_vertices || e.to >= n_vertices {
                return Err(Error::structure(format!(
                    "edge {id} ({} -> {}) leaves the vertex range 0..{n_vertices}",
                    e.from, e.to
                )));
            }
            if let Some(s) = e.op.symbol() {
                if s as usize >= symbols.len() {
                    return Err(Error::structure(format!(
                        "edge {id} uses symbol {s} outside the symbol table"
                    )));
                }
            }
            out_edges[e.from].push(id);
            in_edges[e.to].push(id);
        }
        Ok(BranchingProgram {
            n_vertices,
            edges,
            source,
            sink,
            symbols,
            layers: None,
            topo: Vec::new(),
            out_edges,
            in_edges,
        })
    }

    /// Attaches a layering; every edge must go from layer `i` to `i + 1`.
    pub fn with_layers(mut self, layers: Vec<usize>) -> Result<Self> {
        if layers.len() != self.n_vertices {
            return Err(Error::structure(format!(
                "layering has {} entries for {} vertices",
                layers.len(),
                self.n_vertices
            )));
        }
        for (id, e) in self.edges.iter().enumerate() {
            if layers[e.to] != layers[e.from] + 1 {
                return Err(Error::structure(format!(
                    "edge {id} goes from layer {} to layer {}",
                    layers[e.from], layers[e.to]
                )));
            }
        }
        self.layers = Some(layers);
        Ok(self)
    }

    /// Same program with a layering derived from path lengths, if one exists.
    pub fn with_derived_layers(self) -> Result<Self> {
        let layers = derive_layers(&self).ok_or(Error::NotLayered)?;
        self.with_layers(layers)
    }

    pub fn without_layers(mut self) -> Self {
        self.layers = None;
        self
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Size of a program is its number of vertices.
    pub fn size(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<O>] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge<O> {
        &self.edges[id]
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn layers(&self) -> Option<&[usize]> {
        self.layers.as_deref()
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Vertices ordered so every edge goes forward; ties broken by id.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn max_var(&self) -> u32 {
        self.edges.iter().map(|e| e.weight.var_index()).max().unwrap_or(0)
    }

    pub fn has_nops(&self) -> bool {
        self.edges.iter().any(|e| e.op.is_nop())
    }

    /// Largest number of variable-weighted edges on any path, an upper bound
    /// on the degree of every path weight.
    pub fn degree_bound(&self) -> u64 {
        let mut best = vec![0u64; self.n_vertices];
        for &v in self.topo.iter().rev() {
            for &id in &self.out_edges[v] {
                let e = &self.edges[id];
                best[v] = best[v].max(best[e.to] + e.weight.degree());
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    /// Number of edges on the longest path in the program.
    pub fn longest_path(&self) -> usize {
        let mut best = vec![0usize; self.n_vertices];
        for &v in self.topo.iter().rev() {
            for &id in &self.out_edges[v] {
                best[v] = best[v].max(best[self.edges[id].to] + 1);
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    /// Same graph, weights and layering with every operation replaced by `f`.
    pub fn map_ops<P: MemoryOp>(&self, symbols: SymbolTable, f: impl Fn(&O) -> P) -> Result<BranchingProgram<P>> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.from, e.to, e.weight, f(&e.op)))
            .collect();
        let g = BranchingProgram::new(self.n_vertices, edges, self.source, self.sink, symbols)?;
        match &self.layers {
            Some(l) => g.with_layers(l.clone()),
            None => Ok(g),
        }
    }
}

/// SBP whose underlying digraph may contain cycles. It computes one
/// polynomial `f_{G,m}` per walk length `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxedSbp {
    inner: BranchingProgram<StackOp>,
}

impl RelaxedSbp {
    pub fn new(
        n_vertices: usize,
        edges: Vec<Edge<StackOp>>,
        source: usize,
        sink: usize,
        symbols: SymbolTable,
    ) -> Result<Self> {
        Ok(RelaxedSbp {
            inner: BranchingProgram::build(n_vertices, edges, source, sink, symbols)?,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.inner.n_vertices
    }

    pub fn size(&self) -> usize {
        self.inner.n_vertices
    }

    pub fn edges(&self) -> &[Edge<StackOp>] {
        &self.inner.edges
    }

    pub fn source(&self) -> usize {
        self.inner.source
    }

    pub fn sink(&self) -> usize {
        self.inner.sink
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.inner.symbols
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.inner.out_edges[v]
    }

    pub fn max_var(&self) -> u32 {
        self.inner.max_var()
    }

    /// Same graph with a different source and sink.
    pub fn with_endpoints(&self, source: usize, sink: usize) -> Result<Self> {
        let g = &self.inner;
        RelaxedSbp::new(g.n_vertices, g.edges.clone(), source, sink, g.symbols.clone())
    }

    pub fn is_acyclic(&self) -> bool {
        topological_order(self.inner.n_vertices, &self.inner.out_edges, &self.inner.edges).is_some()
    }
}

/// Number of vertices in the largest layer.
pub fn width_of<O: MemoryOp>(g: &BranchingProgram<O>) -> Result<usize> {
    let layers = g.layers().ok_or(Error::NotLayered)?;
    let mut counts = std::collections::HashMap::new();
    for &l in layers {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    Ok(counts.into_values().max().unwrap_or(0))
}

/// Layer of each vertex when every path between two vertices has the same
/// length, anchored so the minimum layer in each weakly connected
/// component is zero. `None` if no consistent layering exists.
fn derive_layers<O>(g: &BranchingProgram<O>) -> Option<Vec<usize>> {
    let n = g.n_vertices;
    let mut layer: Vec<Option<i64>> = vec![None; n];
    for start in 0..n {
        if layer[start].is_some() {
            continue;
        }
        layer[start] = Some(0);
        let mut component = vec![start];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let lv = layer[v].expect("assigned before push");
            let forward = g.out_edges[v].iter().map(|&id| (g.edges[id].to, lv + 1));
            let backward = g.in_edges[v].iter().map(|&id| (g.edges[id].from, lv - 1));
            for (u, want) in forward.chain(backward).collect::<Vec<_>>() {
                match layer[u] {
                    None => {
                        layer[u] = Some(want);
                        component.push(u);
                        stack.push(u);
                    }
                    Some(l) if l != want => return None,
                    Some(_) => {}
                }
            }
        }
        let min = component.iter().map(|&v| layer[v].unwrap()).min().unwrap_or(0);
        for v in component {
            layer[v] = Some(layer[v].unwrap() - min);
        }
    }
    Some(layer.into_iter().map(|l| l.unwrap() as usize).collect())
}

/// Kahn's algorithm with a min-heap, so ties go to the smallest vertex id.
fn topological_order<O>(n: usize, out_edges: &[Vec<usize>], edges: &[Edge<O>]) -> Option<Vec<usize>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut indeg = vec![0usize; n];
    for e in edges {
        indeg[e.to] += 1;
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = heap.pop() {
        order.push(v);
        for &id in &out_edges[v] {
            let u = edges[id].to;
            indeg[u] -= 1;
            if indeg[u] == 0 {
                heap.push(Reverse(u));
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Var;

    fn x(i: u32) -> Weight {
        Weight::Var(Var(i))
    }

    #[test]
    fn rejects_cycles_and_dangling_edges() {
        let cyc = vec![Edge::new(0, 1, x(1), ()), Edge::new(1, 0, x(2), ())];
        assert!(Abp::new(2, cyc.clone(), 0, 1, SymbolTable::default()).is_err());
        assert!(Abp::new(2, vec![Edge::new(0, 5, x(1), ())], 0, 1, SymbolTable::default()).is_err());
        let mut syms = SymbolTable::default();
        let a = syms.intern("a");
        let relaxed = RelaxedSbp::new(
            2,
            vec![Edge::new(0, 1, x(1), StackOp::Push(a)), Edge::new(1, 0, x(2), StackOp::Pop(a))],
            0,
            0,
            syms,
        )
        .unwrap();
        assert!(!relaxed.is_acyclic());
    }

    #[test]
    fn widths() {
        let path = Abp::new(3, vec![Edge::new(0, 1, x(1), ()), Edge::new(1, 2, x(2), ())], 0, 2, SymbolTable::default())
            .unwrap()
            .with_derived_layers()
            .unwrap();
        assert_eq!(width_of(&path).unwrap(), 1);
        let diamond = Abp::new(
            4,
            vec![
                Edge::new(0, 1, x(1), ()),
                Edge::new(1, 3, x(2), ()),
                Edge::new(0, 2, x(3), ()),
                Edge::new(2, 3, x(4), ()),
            ],
            0,
            3,
            SymbolTable::default(),
        )
        .unwrap();
        assert_eq!(width_of(&diamond), Err(Error::NotLayered));
        let diamond = diamond.with_derived_layers().unwrap();
        assert_eq!(width_of(&diamond).unwrap(), 2);
        // A shortcut edge makes layering impossible.
        let skip = Abp::new(
            3,
            vec![Edge::new(0, 1, x(1), ()), Edge::new(1, 2, x(2), ()), Edge::new(0, 2, x(3), ())],
            0,
            2,
            SymbolTable::default(),
        )
        .unwrap();
        assert!(skip.with_derived_layers().is_err());
    }

    #[test]
    fn topological_ties_by_id() {
        let g = Abp::new(
            4,
            vec![Edge::new(3, 1, x(1), ()), Edge::new(2, 0, x(1), ())],
            3,
            0,
            SymbolTable::default(),
        )
        .unwrap();
        assert_eq!(g.topological_order(), &[2, 0, 3, 1]);
    }
}
