//! Dominating-set and vertex-cover polynomials: brute-force oracles, the
//! width-2 RABP computing the dominating-set polynomial and the projection
//! of vertex-cover polynomials to dominating-set polynomials.
//!
//! Vertex `v` (0-based) carries the variable `X_{v+1}`.

mod graph;

pub use graph::{nonisomorphic_graphs, random_graph, SimpleGraph};

use crate::algebra::{Ring, Valuation, Var, Weight};
use crate::programs::{Edge, RamOp, Rabp, SymbolTable};
use crate::{Error, Result};

/// Largest vertex count the subset oracles accept.
pub const ORACLE_MAX_VERTICES: usize = 20;

fn vertex_var(v: usize) -> Var {
    Var(v as u32 + 1)
}

fn check_oracle_size(g: &SimpleGraph) -> Result<()> {
    if g.n() > ORACLE_MAX_VERTICES {
        return Err(Error::BudgetExceeded {
            what: "oracle vertices",
            limit: ORACLE_MAX_VERTICES,
        });
    }
    Ok(())
}

fn subset_sum<R: Ring, V: Valuation<R>>(n: usize, val: &V, keep: impl Fn(u32) -> bool) -> Result<R> {
    let xs: Vec<R> = (0..n).map(|v| val.var(vertex_var(v))).collect();
    let mut acc = R::zero();
    for set in 0u32..(1 << n) {
        if !keep(set) {
            continue;
        }
        let mut term = R::one();
        for (v, x) in xs.iter().enumerate() {
            if set >> v & 1 == 1 {
                term = term.mul(x);
            }
        }
        acc.add_assign(&term);
    }
    Ok(acc)
}

/// `sum over dominating sets D of prod_{v in D} X_v`. The empty graph has
/// the empty set as its only dominating set, so its polynomial is 1.
pub fn dsp_oracle<R: Ring, V: Valuation<R>>(g: &SimpleGraph, val: &V) -> Result<R> {
    check_oracle_size(g)?;
    let closed: Vec<u32> = (0..g.n()).map(|v| g.closed_neighborhood_mask(v)).collect();
    subset_sum(g.n(), val, |set| closed.iter().all(|&m| m & set != 0))
}

/// `sum over vertex covers S of prod_{v in S} X_v`.
pub fn vcp_oracle<R: Ring, V: Valuation<R>>(g: &SimpleGraph, val: &V) -> Result<R> {
    check_oracle_size(g)?;
    let edges: Vec<u32> = g.edges().map(|(u, v)| (1 << u) | (1 << v)).collect();
    subset_sum(g.n(), val, |set| edges.iter().all(|&m| m & set != 0))
}

/// Layered width-2 RABP over the symbol set `V` computing the
/// dominating-set polynomial of `g`.
///
/// The first stage has one choose gadget per vertex `v` (ascending id): an
/// upper path writing `v` on an edge of weight `X_v` and then each neighbor
/// of `v`, and a parallel lower path of nop edges. A vertex without
/// neighbors gets one extra nop edge on the upper path so both paths have
/// two edges. After it, memory holds one copy of `v` for `v` itself (if
/// chosen) and one per chosen neighbor.
///
/// The second stage has one check gadget per vertex of degree `d` with
/// `d + 3` layers: the first edge deletes `v`, then the path stays on a
/// deleting row for up to `d` more deletes or moves to a nop row. Between
/// 1 and `d + 1` deletes are possible, each count by exactly one path, so a
/// realizable path exists exactly when `v` is dominated. All edges other
/// than the choose edges have weight 1.
pub fn build_dsp_rabp(g: &SimpleGraph) -> Rabp {
    let mut b = Layered::default();
    let mut at = b.vertex(0);
    for v in 0..g.n() {
        let nbrs = g.neighbors(v);
        let x_v = Weight::Var(vertex_var(v));
        let mut upper = vec![(x_v, RamOp::Write(v as u32))];
        upper.extend(nbrs.iter().map(|&u| (Weight::ONE, RamOp::Write(u as u32))));
        if nbrs.is_empty() {
            upper.push((Weight::ONE, RamOp::Nop));
        }
        let len = upper.len();
        let base = b.layer_of(at);
        let exit = b.vertex(base + len);
        let (mut hi, mut lo) = (at, at);
        for (k, (w, op)) in upper.into_iter().enumerate() {
            let (next_hi, next_lo) = if k + 1 == len {
                (exit, exit)
            } else {
                (b.vertex(base + k + 1), b.vertex(base + k + 1))
            };
            b.edge(hi, next_hi, w, op);
            b.edge(lo, next_lo, Weight::ONE, RamOp::Nop);
            hi = next_hi;
            lo = next_lo;
        }
        at = exit;
    }
    for v in 0..g.n() {
        let d = g.neighbors(v).len();
        let del = RamOp::Delete(v as u32);
        let base = b.layer_of(at);
        let exit = b.vertex(base + d + 2);
        // low[t] deletes, high[t] idles; t = 1..=d+1 (high[1] is unreachable).
        let low: Vec<usize> = (1..=d + 1).map(|t| b.vertex(base + t)).collect();
        let high: Vec<usize> = (2..=d + 1).map(|t| b.vertex(base + t)).collect();
        b.edge(at, low[0], Weight::ONE, del);
        for t in 0..d {
            b.edge(low[t], low[t + 1], Weight::ONE, del);
            b.edge(low[t], high[t], Weight::ONE, RamOp::Nop);
            if t > 0 {
                b.edge(high[t - 1], high[t], Weight::ONE, RamOp::Nop);
            }
        }
        b.edge(low[d], exit, Weight::ONE, RamOp::Nop);
        if d > 0 {
            b.edge(high[d - 1], exit, Weight::ONE, RamOp::Nop);
        }
        at = exit;
    }
    let symbols = SymbolTable::from_names((0..g.n()).map(|v| format!("v{}", v + 1))).expect("distinct vertex names");
    let n = b.layers.len();
    Rabp::new(n, b.edges, 0, at, symbols)
        .expect("gadget chain is acyclic")
        .with_layers(b.layers)
        .expect("gadget chain is layered")
}

#[derive(Default)]
struct Layered {
    layers: Vec<usize>,
    edges: Vec<Edge<RamOp>>,
}

impl Layered {
    fn vertex(&mut self, layer: usize) -> usize {
        self.layers.push(layer);
        self.layers.len() - 1
    }

    fn layer_of(&self, v: usize) -> usize {
        self.layers[v]
    }

    fn edge(&mut self, from: usize, to: usize, w: Weight, op: RamOp) {
        self.edges.push(Edge::new(from, to, w, op));
    }
}

/// Substitution of the variables of a larger graph's polynomial:
/// `X_k := images[k - 1]`, where an image is a variable of the smaller
/// graph or a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub images: Vec<Weight>,
}

impl Projection {
    /// A valuation for the larger graph induced by one for the smaller one.
    pub fn through<'a, V>(&'a self, inner: &'a V) -> Projected<'a, V> {
        Projected { p: self, inner }
    }
}

pub struct Projected<'a, V> {
    p: &'a Projection,
    inner: &'a V,
}

impl<R: Ring, V: Valuation<R>> Valuation<R> for Projected<'_, V> {
    fn var(&self, v: Var) -> R {
        match self.p.images.get(v.0 as usize - 1) {
            Some(w) => w.value(self.inner),
            None => R::zero(),
        }
    }
}

/// Graph `g'` and projection with `DSP_{g'}` projected equal to `VCP_g`.
///
/// Every edge `uv` gets a new vertex `v_e` adjacent to `u` and `v`, with
/// `X_{v_e} := 0`: a dominating set must then dominate `v_e` through `u` or
/// `v`. An isolated vertex `v` would be forced into every dominating set
/// while a vertex cover may omit it, so it gets a pendant path `v - a - b`
/// with `X_a := 1` and `X_b := 0`; `b` forces `a` into the set and `a`
/// dominates `v`. The original vertices keep their ids and variables.
pub fn vcp_via_dsp(g: &SimpleGraph) -> (SimpleGraph, Projection) {
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    let mut images: Vec<Weight> = (0..g.n()).map(|v| Weight::Var(vertex_var(v))).collect();
    let mut next = g.n();
    for (u, v) in g.edges() {
        edges.push((u, next));
        edges.push((v, next));
        images.push(Weight::Const(0));
        next += 1;
    }
    for v in 0..g.n() {
        if g.neighbors(v).is_empty() {
            edges.push((v, next));
            edges.push((next, next + 1));
            images.push(Weight::Const(1));
            images.push(Weight::Const(0));
            next += 2;
        }
    }
    let big = SimpleGraph::new(next, edges).expect("construction adds no loops or duplicates");
    (big, Projection { images })
}
