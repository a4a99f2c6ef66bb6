//! Reduction of an SBP to width 2 over the stack alphabet {0, 1}.

use super::SizeReport;
use crate::algebra::Weight;
use crate::programs::{Edge, Sbp, StackOp, SymbolTable};

/// Width-2 SBP over the symbols `0` and `1` computing the same polynomial.
///
/// 1. Normalize: a new source with the single edge `e_s` into the old
///    source and a new sink entered by the single nop edge `e_t` of weight
///    1. Edges on no source-sink path are dropped.
/// 2. Order the edges so that `uv` precedes `vw`: walk the vertices in
///    topological order and append the edges entering each one.
/// 3. For every pair of consecutive edges `(e, e')` add a six-vertex gadget
///    with a weighted path `pop(e)`, `w(e)/sigma(e)`, `push(e')` and a
///    parallel nop path; gadgets are chained in lexicographic pair order.
/// 4. Push `e_s` on entry and pop `e_t` on exit.
/// 5. Encode each symbol of `S` and `E` as an `l`-bit string and replace
///    every edge by a path of `l` edges that pushes the bits in order,
///    pops them in reverse, or does nothing; the first edge of the path
///    carries the weight.
///
/// The layering is explicit and every layer holds at most two vertices.
pub fn width2_reduce(g: &Sbp) -> (Sbp, SizeReport) {
    // Step 1: normalized edge list. Old vertices keep their ids; the new
    // source and sink come after them.
    let n = g.n_vertices();
    let (src, snk) = (n, n + 1);
    let mut edges: Vec<Edge<StackOp>> = Vec::with_capacity(g.n_edges() + 2);
    let e_s = 0;
    edges.push(Edge::new(src, g.source(), Weight::ONE, StackOp::Nop));
    let fwd = reach(n, g.edges(), g.source(), false);
    let bwd = reach(n, g.edges(), g.sink(), true);
    for e in g.edges() {
        if fwd[e.from] && bwd[e.to] {
            edges.push(*e);
        }
    }
    let e_t = edges.len();
    edges.push(Edge::new(g.sink(), snk, Weight::ONE, StackOp::Nop));

    // Step 2: edge order from a topological vertex order (ties by id).
    let mut order_v: Vec<usize> = vec![src];
    order_v.extend(g.topological_order().iter().copied());
    order_v.push(snk);
    let mut entering: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    for (id, e) in edges.iter().enumerate() {
        entering[e.to].push(id);
    }
    let mut rank = vec![0usize; edges.len()];
    let mut order_e = Vec::with_capacity(edges.len());
    for &v in &order_v {
        for &id in &entering[v] {
            rank[id] = order_e.len();
            order_e.push(id);
        }
    }

    // Step 3: gadget pairs (e, e') ordered by (rank e, rank e').
    let mut leaving: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    for (id, e) in edges.iter().enumerate() {
        leaving[e.from].push(id);
    }
    let mut pairs = Vec::new();
    for &e in &order_e {
        let mut next: Vec<usize> = leaving[edges[e].to].clone();
        next.sort_by_key(|&id| rank[id]);
        pairs.extend(next.into_iter().map(|e2| (e, e2)));
    }

    // Symbols S then one per normalized edge.
    let n_symbols = g.symbols().len() + edges.len();
    let edge_sym = |id: usize| (g.symbols().len() + id) as u32;
    let bits = bit_length(n_symbols);

    // Build the wide-alphabet program G' as a list of (layer-advancing) edges.
    let mut wide = Wide::default();
    let start = wide.vertex(0);
    let mut prev = start;
    let mut layer = 0;
    let mut first_edge = true;
    for &(e, e2) in &pairs {
        let op_in = if first_edge {
            StackOp::Push(edge_sym(e_s))
        } else {
            StackOp::Nop
        };
        first_edge = false;
        let v1 = wide.vertex(layer + 1);
        wide.edge(prev, v1, Weight::ONE, op_in);
        let (v2, v3) = (wide.vertex(layer + 2), wide.vertex(layer + 2));
        let (v4, v5) = (wide.vertex(layer + 3), wide.vertex(layer + 3));
        let v6 = wide.vertex(layer + 4);
        wide.edge(v1, v2, Weight::ONE, StackOp::Pop(edge_sym(e)));
        wide.edge(v2, v4, edges[e].weight, edges[e].op);
        wide.edge(v4, v6, Weight::ONE, StackOp::Push(edge_sym(e2)));
        wide.edge(v1, v3, Weight::ONE, StackOp::Nop);
        wide.edge(v3, v5, Weight::ONE, StackOp::Nop);
        wide.edge(v5, v6, Weight::ONE, StackOp::Nop);
        prev = v6;
        layer += 4;
    }
    let end = wide.vertex(layer + 1);
    wide.edge(prev, end, Weight::ONE, StackOp::Pop(edge_sym(e_t)));
    let wide_vertices = wide.layers.len();
    let wide_edges = wide.edges.len();

    // Step 5: binary encoding, each edge becomes a path of `bits` edges.
    let mut layers: Vec<usize> = wide.layers.iter().map(|&l| l * bits).collect();
    let mut out_edges = Vec::with_capacity(wide.edges.len() * bits);
    for e in &wide.edges {
        let code = |s: u32| (0..bits).map(move |k| (s >> (bits - 1 - k)) & 1);
        let ops: Vec<StackOp> = match e.op {
            StackOp::Push(s) => code(s).map(StackOp::Push).collect(),
            StackOp::Pop(s) => {
                let mut v: Vec<StackOp> = code(s).map(StackOp::Pop).collect();
                v.reverse();
                v
            }
            StackOp::Nop => vec![StackOp::Nop; bits],
        };
        let mut cur = e.from;
        for (k, op) in ops.into_iter().enumerate() {
            let next = if k + 1 == bits {
                e.to
            } else {
                layers.push(wide.layers[e.from] * bits + k + 1);
                layers.len() - 1
            };
            let w = if k == 0 { e.weight } else { Weight::ONE };
            out_edges.push(Edge::new(cur, next, w, op));
            cur = next;
        }
    }
    let symbols = SymbolTable::from_names(["0", "1"]).expect("distinct names");
    let n_out = layers.len();
    let out = Sbp::new(n_out, out_edges, start, end, symbols)
        .expect("gadget chain is acyclic")
        .with_layers(layers)
        .expect("gadget chain is layered");
    // Expected size: G' has 6P + 2 vertices and 7P + 1 edges, and the
    // encoding adds l - 1 vertices per edge.
    let p = pairs.len();
    debug_assert_eq!(wide_vertices, 6 * p + 2);
    debug_assert_eq!(wide_edges, 7 * p + 1);
    let bound = 6 * p + 2 + (bits - 1) * (7 * p + 1);
    let report = SizeReport::new(g.size(), n_out, "6P + 2 + (l - 1)(7P + 1), P = consecutive edge pairs", bound);
    (out, report)
}

/// `ceil(log2 k)`, at least 1.
fn bit_length(k: usize) -> usize {
    let mut bits = 1;
    while (1usize << bits) < k {
        bits += 1;
    }
    bits
}

#[derive(Default)]
struct Wide {
    layers: Vec<usize>,
    edges: Vec<Edge<StackOp>>,
}

impl Wide {
    fn vertex(&mut self, layer: usize) -> usize {
        self.layers.push(layer);
        self.layers.len() - 1
    }

    fn edge(&mut self, from: usize, to: usize, w: Weight, op: StackOp) {
        self.edges.push(Edge::new(from, to, w, op));
    }
}

fn reach(n: usize, edges: &[Edge<StackOp>], start: usize, backward: bool) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        if backward {
            adj[e.to].push(e.from);
        } else {
            adj[e.from].push(e.to);
        }
    }
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
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
    use crate::algebra::{pit_equal, poly_expand_small, Fp, Var};
    use crate::programs::width_of;

    #[test]
    fn two_edge_program() {
        let g = Sbp::new(
            3,
            vec![
                Edge::new(0, 1, Weight::Var(Var(1)), StackOp::Push(0)),
                Edge::new(1, 2, Weight::Var(Var(2)), StackOp::Pop(0)),
            ],
            0,
            2,
            SymbolTable::from_names(["a"]).unwrap(),
        )
        .unwrap();
        let (h, report) = width2_reduce(&g);
        assert_eq!(width_of(&h).unwrap(), 2);
        assert_eq!(h.symbols().names(), &["0".to_string(), "1".to_string()]);
        assert_eq!(report.output_size, report.bound_value);
        assert_eq!(poly_expand_small(&h, 10).unwrap().to_string(), "X1*X2");
        assert!(pit_equal::<Fp, _, _>(&g, &h, 50, 5).unwrap().is_equal());
    }

    #[test]
    fn source_equals_sink() {
        let g = Sbp::new(1, vec![], 0, 0, SymbolTable::default()).unwrap();
        let (h, _) = width2_reduce(&g);
        assert_eq!(poly_expand_small(&h, 10).unwrap().to_string(), "1");
    }

    #[test]
    fn bit_lengths() {
        assert_eq!(bit_length(1), 1);
        assert_eq!(bit_length(2), 1);
        assert_eq!(bit_length(3), 2);
        assert_eq!(bit_length(8), 3);
        assert_eq!(bit_length(9), 4);
    }
}
