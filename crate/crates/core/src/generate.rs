//! Seeded random instances. Every generator draws from a ChaCha8 stream
//! seeded with the given 64-bit seed, so equal seeds give equal instances.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Var, Weight};
use crate::programs::{Abp, Edge, RelaxedSbp, Sbp, StackOp, SymbolTable};

pub use crate::circuits::random_md_circuit;
pub use crate::hardness::random_graph;

/// Parameters for [`random_sbp`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SbpShape {
    /// The vertex count is drawn from `2..=max_vertices`.
    pub max_vertices: usize,
    /// The symbol count is drawn from `1..=max_symbols`.
    pub max_symbols: usize,
    /// Variables are drawn from `X_1..X_n_vars`.
    pub n_vars: u32,
    /// Percentage of nop edges.
    pub nop_percent: u32,
}

impl Default for SbpShape {
    fn default() -> Self {
        SbpShape {
            max_vertices: 12,
            max_symbols: 3,
            n_vars: 6,
            nop_percent: 20,
        }
    }
}

fn symbol_table(k: usize) -> SymbolTable {
    SymbolTable::from_names((0..k).map(|i| ((b'a' + i as u8) as char).to_string())).expect("distinct letters")
}

/// A variable (most of the time) or a small nonzero constant.
fn weight(rng: &mut impl Rng, n_vars: u32) -> Weight {
    if rng.random_range(0..5) == 0 {
        Weight::Const([-1, 2, 3][rng.random_range(0..3)])
    } else {
        Weight::Var(Var(rng.random_range(1..=n_vars.max(1))))
    }
}

fn op(rng: &mut impl Rng, k: usize, nop_percent: u32) -> StackOp {
    if rng.random_range(0..100) < nop_percent {
        return StackOp::Nop;
    }
    let s = rng.random_range(0..k) as u32;
    if rng.random_bool(0.5) {
        StackOp::Push(s)
    } else {
        StackOp::Pop(s)
    }
}

/// A random realizable sequence of exactly `len` operations, or `None`
/// when no such sequence exists (odd `len` without nops).
fn realizable_ops(rng: &mut impl Rng, len: usize, k: usize, nops: bool) -> Option<Vec<StackOp>> {
    if !nops && len % 2 == 1 {
        return None;
    }
    let mut stack: Vec<u32> = Vec::new();
    let mut out = Vec::with_capacity(len);
    for step in 0..len {
        let left = len - step - 1;
        let mut choices = Vec::new();
        if stack.len() < left {
            choices.push(0);
        }
        if !stack.is_empty() {
            choices.push(1);
        }
        if nops && stack.len() <= left {
            choices.push(2);
        }
        // The height never exceeds the steps left, so some choice exists.
        let pick = choices[rng.random_range(0..choices.len())];
        out.push(match pick {
            0 => {
                let s = rng.random_range(0..k) as u32;
                stack.push(s);
                StackOp::Push(s)
            }
            1 => StackOp::Pop(stack.pop().expect("pop needs a nonempty stack")),
            _ => StackOp::Nop,
        });
    }
    debug_assert!(stack.is_empty());
    Some(out)
}

/// Random acyclic SBP: a realizable source-sink backbone through a random
/// increasing vertex sequence plus random forward edges. Edges go from
/// lower to higher ids; the source is 0 and the sink the last vertex.
pub fn random_sbp(shape: &SbpShape, seed: u64) -> Sbp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=shape.max_vertices.max(2));
    let k = rng.random_range(1..=shape.max_symbols.max(1));
    let nops = shape.nop_percent > 0;
    let mut edges = Vec::new();
    let len = rng.random_range(1..n);
    if let Some(ops) = realizable_ops(&mut rng, len, k, nops) {
        let mut inner: Vec<usize> = (1..n - 1).collect();
        // Keep a random (len - 1)-subset of the inner vertices, in order.
        for i in (1..inner.len()).rev() {
            let j = rng.random_range(0..=i);
            inner.swap(i, j);
        }
        inner.truncate(len - 1);
        inner.sort_unstable();
        let mut path = vec![0];
        path.extend(inner);
        path.push(n - 1);
        for (w, o) in path.windows(2).zip(ops) {
            edges.push(Edge::new(w[0], w[1], weight(&mut rng, shape.n_vars), o));
        }
    }
    let extra = rng.random_range(0..=n + n / 2);
    for _ in 0..extra {
        let u = rng.random_range(0..n - 1);
        let v = rng.random_range(u + 1..n);
        edges.push(Edge::new(u, v, weight(&mut rng, shape.n_vars), op(&mut rng, k, shape.nop_percent)));
    }
    Sbp::new(n, edges, 0, n - 1, symbol_table(k)).expect("forward edges form a DAG")
}

/// Random SBP over a single stack symbol.
pub fn random_one_symbol_sbp(max_vertices: usize, seed: u64) -> Sbp {
    let shape = SbpShape {
        max_vertices,
        max_symbols: 1,
        n_vars: 5,
        nop_percent: 25,
    };
    random_sbp(&shape, seed)
}

/// Random relaxed SBP on at most `max_vertices` vertices. The edge set is
/// arbitrary (self-loops and cycles allowed) and the source and sink are
/// drawn independently, so they may coincide.
pub fn random_relaxed_sbp(max_vertices: usize, seed: u64) -> RelaxedSbp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_vertices.max(1));
    let k = rng.random_range(1..=2);
    let m = rng.random_range(n..=2 * n + 2);
    let edges = (0..m)
        .map(|_| {
            let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
            Edge::new(u, v, weight(&mut rng, 4), op(&mut rng, k, 25))
        })
        .collect();
    let (s, t) = (rng.random_range(0..n), rng.random_range(0..n));
    RelaxedSbp::new(n, edges, s, t, symbol_table(k)).expect("endpoints are in range")
}

/// Random ABP with forward edges on at most `max_vertices` vertices.
pub fn random_abp(max_vertices: usize, seed: u64) -> Abp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_vertices.max(2));
    let m = rng.random_range(n - 1..=2 * n);
    let mut edges: Vec<Edge<()>> = Vec::new();
    for v in 0..n - 1 {
        if rng.random_bool(0.7) {
            edges.push(Edge::new(v, v + 1, weight(&mut rng, 5), ()));
        }
    }
    for _ in 0..m {
        let u = rng.random_range(0..n - 1);
        let v = rng.random_range(u + 1..n);
        edges.push(Edge::new(u, v, weight(&mut rng, 5), ()));
    }
    Abp::new(n, edges, 0, n - 1, SymbolTable::default()).expect("forward edges form a DAG")
}

/// A nop-free chain: vertices `0..=len`, two parallel edges `i -> i + 1`
/// with variables `X_{2i+1}` and `X_{2i+2}`, both carrying the `i`-th
/// operation of a random realizable sequence over two symbols. `len` must
/// be even.
pub fn chain_sbp(len: usize, seed: u64) -> Sbp {
    assert!(len % 2 == 0, "a nop-free realizable chain has even length");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops = realizable_ops(&mut rng, len, 2, false).expect("even length");
    let mut edges = Vec::with_capacity(2 * len);
    for (i, o) in ops.into_iter().enumerate() {
        for k in 1..=2 {
            edges.push(Edge::new(i, i + 1, Weight::Var(Var(2 * i as u32 + k)), o));
        }
    }
    Sbp::new(len + 1, edges, 0, len, symbol_table(2))
        .expect("a chain is acyclic")
        .with_derived_layers()
        .expect("a chain is layered")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::stack_seq_realizable;

    #[test]
    fn reproducible() {
        let shape = SbpShape::default();
        assert_eq!(format!("{:?}", random_sbp(&shape, 3)), format!("{:?}", random_sbp(&shape, 3)));
        assert_eq!(
            format!("{:?}", random_relaxed_sbp(6, 3)),
            format!("{:?}", random_relaxed_sbp(6, 3))
        );
    }

    #[test]
    fn realizable_backbones() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for len in 0..12 {
            for nops in [false, true] {
                if let Some(ops) = realizable_ops(&mut rng, len, 3, nops) {
                    assert_eq!(ops.len(), len);
                    assert!(stack_seq_realizable(&ops));
                }
            }
        }
    }

    #[test]
    fn shapes_respected() {
        let shape = SbpShape::default();
        for seed in 0..100 {
            let g = random_sbp(&shape, seed);
            assert!(g.n_vertices() <= 12);
            assert!(g.symbols().len() <= 3);
            let r = random_relaxed_sbp(6, seed);
            assert!(r.n_vertices() <= 6);
        }
        let c = chain_sbp(8, 1);
        assert_eq!(c.n_edges(), 16);
        assert!(!c.has_nops());
    }
}
