//! Compilation of multiplicatively disjoint circuits into relaxed SBPs.

use serde::Serialize;

use super::{unwind, SizeReport};
use crate::algebra::Weight;
use crate::circuits::{Circuit, Gate};
use crate::programs::{Edge, RelaxedSbp, Sbp, StackOp, SymbolTable};
use crate::{Error, Result};

/// Where gate `v` lives in the compiled program: its polynomial is the sum
/// over realizable `v_minus`-`v_plus` walks of length `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GateRecord {
    pub v_minus: usize,
    pub v_plus: usize,
    pub m: usize,
    /// `|C_v|`, the size of the subcircuit rooted at the gate.
    pub subcircuit_size: usize,
}

/// Per-gate records of a compilation, indexed by gate id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompileTrace {
    pub gates: Vec<GateRecord>,
    /// For each sum gate, the hop count of every padded detour it added
    /// (`m_u - m_w + 1` for a shorter child `w`).
    pub detours: Vec<(usize, Vec<usize>)>,
}

impl CompileTrace {
    pub fn root(&self, c: &Circuit) -> GateRecord {
        self.gates[c.output()]
    }

    /// Every gate satisfies `m_v <= 4|C_v|`.
    pub fn lengths_within_bound(&self) -> bool {
        self.gates.iter().all(|r| r.m <= 4 * r.subcircuit_size)
    }
}

struct Builder {
    n: usize,
    edges: Vec<Edge<StackOp>>,
    symbols: SymbolTable,
}

impl Builder {
    fn vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    fn edge(&mut self, from: usize, to: usize, weight: Weight, op: StackOp) {
        self.edges.push(Edge::new(from, to, weight, op));
    }
}

/// Builds a relaxed SBP in which every gate `v` of `c` is computed by the
/// walks of length `m_v` between two designated vertices.
///
/// * Input gate: one nop edge `v_- -> v_+` carrying the label, `m_v = 1`.
/// * Product of `u` and `w`: `v_- -push(vu)-> u_- ... u_+ -pop(vu)-> v_i
///   -push(vw)-> w_- ... w_+ -pop(vw)-> v_+`, `m_v = m_u + m_w + 4`.
/// * Sum: a child `u` with the largest `m_u` is wrapped by `push(vu)` and
///   `pop(vu)`. Every other child `w` is reached from `v_-` by a detour of
///   exactly `m_u - m_w + 1` edges (the first pushes `vw`, the rest are nop)
///   and left by `pop(vw)` into `v_+`. So `m_v = m_u + 2` on every branch.
///   Sums with more than two children are handled the same way.
///
/// All added edges other than input edges have weight 1 and every wrapper
/// uses fresh symbols. The relaxed SBP's source and sink are the output
/// gate's `v_-` and `v_+`.
pub fn circuit_to_relaxed(c: &Circuit) -> Result<(RelaxedSbp, CompileTrace, SizeReport)> {
    if let Some(g) = c.first_shared_product() {
        return Err(Error::NotMultiplicativelyDisjoint(g));
    }
    let sizes = c.subcircuit_sizes();
    let mut b = Builder {
        n: 0,
        edges: Vec::new(),
        symbols: SymbolTable::default(),
    };
    let mut rec: Vec<Option<GateRecord>> = vec![None; c.size()];
    let mut detours = Vec::new();
    for &v in c.topological_order() {
        let record = |r: &Vec<Option<GateRecord>>, g: usize| r[g].expect("children compiled first");
        let (v_minus, v_plus, m) = match c.gate(v) {
            Gate::Input(w) => {
                let (lo, hi) = (b.vertex(), b.vertex());
                b.edge(lo, hi, *w, StackOp::Nop);
                (lo, hi, 1)
            }
            Gate::Prod([u, w]) => {
                let (ru, rw) = (record(&rec, *u), record(&rec, *w));
                let (lo, mid, hi) = (b.vertex(), b.vertex(), b.vertex());
                let su = b.symbols.fresh(&format!("g{v}.0"));
                let sw = b.symbols.fresh(&format!("g{v}.1"));
                b.edge(lo, ru.v_minus, Weight::ONE, StackOp::Push(su));
                b.edge(ru.v_plus, mid, Weight::ONE, StackOp::Pop(su));
                b.edge(mid, rw.v_minus, Weight::ONE, StackOp::Push(sw));
                b.edge(rw.v_plus, hi, Weight::ONE, StackOp::Pop(sw));
                (lo, hi, ru.m + rw.m + 4)
            }
            Gate::Sum(children) => {
                let recs: Vec<GateRecord> = children.iter().map(|&u| record(&rec, u)).collect();
                let m_max = recs.iter().map(|r| r.m).max().expect("sum gates have children");
                let longest = recs.iter().position(|r| r.m == m_max).expect("max exists");
                let (lo, hi) = (b.vertex(), b.vertex());
                let mut hops = Vec::new();
                for (k, r) in recs.iter().enumerate() {
                    let s = b.symbols.fresh(&format!("g{v}.{k}"));
                    if k == longest {
                        b.edge(lo, r.v_minus, Weight::ONE, StackOp::Push(s));
                    } else {
                        let len = m_max - r.m + 1;
                        hops.push(len);
                        let mut prev = lo;
                        for step in 0..len {
                            let next = if step + 1 == len { r.v_minus } else { b.vertex() };
                            let op = if step == 0 { StackOp::Push(s) } else { StackOp::Nop };
                            b.edge(prev, next, Weight::ONE, op);
                            prev = next;
                        }
                    }
                    b.edge(r.v_plus, hi, Weight::ONE, StackOp::Pop(s));
                }
                detours.push((v, hops));
                (lo, hi, m_max + 2)
            }
        };
        rec[v] = Some(GateRecord {
            v_minus,
            v_plus,
            m,
            subcircuit_size: sizes[v],
        });
    }
    let gates: Vec<GateRecord> = rec.into_iter().map(|r| r.expect("every gate compiled")).collect();
    let root = gates[c.output()];
    let g = RelaxedSbp::new(b.n, b.edges, root.v_minus, root.v_plus, b.symbols)?;
    let size = c.size();
    let report = SizeReport::new(size, g.size(), "2|C|(|C| + 1) + 3|C|", 2 * size * (size + 1) + 3 * size);
    Ok((g, CompileTrace { gates, detours }, report))
}

/// Compiles `c` into an acyclic SBP: [`circuit_to_relaxed`] followed by
/// [`unwind`] at the output gate's walk length.
pub fn circuit_to_sbp(c: &Circuit) -> Result<(Sbp, CompileTrace, SizeReport)> {
    let (relaxed, trace, _) = circuit_to_relaxed(c)?;
    let m = trace.root(c).m;
    let (sbp, _) = unwind(&relaxed, m);
    let report = SizeReport::new(
        c.size(),
        sbp.size(),
        "(m_root + 1) * |relaxed SBP|",
        (m + 1) * relaxed.size(),
    );
    Ok((sbp, trace, report))
}
