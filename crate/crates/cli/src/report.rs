//! Evaluation, oracle and statistics output for documents of any kind.

use serde_json::{json, Value};

use bpmem::algebra::{poly_expand_small, Assignment, Evaluable, Field, Ring, SparsePoly, Symbolic, Valuation, Weight};
use bpmem::evaluators::RelaxedAt;
use bpmem::hardness::{dsp_oracle, vcp_oracle, SimpleGraph};
use bpmem::interchange::{FieldMode, InterchangeDoc, Object};
use bpmem::programs::{
    definitional_polynomial, enumerate_realizable_paths, enumerate_realizable_walks, width_of, BranchingProgram,
    MemoryOp,
};
use bpmem::Result;

use crate::Failure;

/// The polynomial a document stands for: the computed polynomial of a
/// circuit or program, `f_{G,m}` of a relaxed SBP, the dominating-set
/// polynomial of a graph.
pub enum Poly<'a> {
    Object(&'a Object),
    Relaxed(RelaxedAt<'a>),
    Dsp(&'a SimpleGraph),
}

impl<'a> Poly<'a> {
    pub fn new(object: &'a Object, m: Option<usize>) -> std::result::Result<Self, Failure> {
        Ok(match object {
            Object::RelaxedSbp(g) => {
                let m = m.ok_or_else(|| Failure::Usage("relaxed SBPs need a walk length --m".into()))?;
                Poly::Relaxed(RelaxedAt { g, m })
            }
            Object::Graph(g) => Poly::Dsp(g),
            other => Poly::Object(other),
        })
    }
}

impl Evaluable for Poly<'_> {
    fn num_vars(&self) -> usize {
        match self {
            Poly::Object(o) => o.n_vars(),
            Poly::Relaxed(r) => r.num_vars(),
            Poly::Dsp(g) => g.n(),
        }
    }

    fn degree_bound(&self) -> u64 {
        match self {
            Poly::Object(Object::Circuit(c)) => c.degree_bound(),
            Poly::Object(Object::Abp(g)) => g.degree_bound(),
            Poly::Object(Object::Sbp(g)) => g.degree_bound(),
            Poly::Object(Object::Rabp(g)) => g.degree_bound(),
            Poly::Object(_) => unreachable!("relaxed programs and graphs have their own variants"),
            Poly::Relaxed(r) => r.degree_bound(),
            Poly::Dsp(g) => g.n() as u64,
        }
    }

    fn evaluate<R: Ring, V: Valuation<R>>(&self, val: &V) -> Result<R> {
        match self {
            Poly::Object(Object::Circuit(c)) => c.evaluate(val),
            Poly::Object(Object::Abp(g)) => g.evaluate(val),
            Poly::Object(Object::Sbp(g)) => g.evaluate(val),
            Poly::Object(Object::Rabp(g)) => g.evaluate(val),
            Poly::Object(_) => unreachable!("relaxed programs and graphs have their own variants"),
            Poly::Relaxed(r) => r.evaluate(val),
            Poly::Dsp(g) => dsp_oracle(g, val),
        }
    }
}

/// Named values of the document at `point`: `value` for circuits and
/// programs, `dsp` and `vcp` for graphs.
pub fn evaluate_object<F: Field>(
    object: &Object,
    point: &Assignment<F>,
    m: Option<usize>,
) -> std::result::Result<Vec<(&'static str, F)>, Failure> {
    if let Object::Graph(g) = object {
        return Ok(vec![("dsp", dsp_oracle(g, point)?), ("vcp", vcp_oracle(g, point)?)]);
    }
    let p = Poly::new(object, m)?;
    Ok(vec![("value", p.evaluate(point)?)])
}

pub fn weight_json(w: Weight) -> Value {
    match w {
        Weight::Const(c) => json!({ "const": c.to_string() }),
        Weight::Var(v) => json!({ "var": v.0 }),
    }
}

fn enumerated<O: MemoryOp>(g: &BranchingProgram<O>, max_count: usize) -> Result<Value> {
    let terms = enumerate_realizable_paths(g, max_count)?;
    Ok(json!({ "paths": terms.len(), "polynomial": definitional_polynomial(&terms).to_string() }))
}

fn symbolic(p: Result<SparsePoly>, max_count: usize) -> Result<String> {
    let p = p?;
    p.check_budget(max_count)?;
    Ok(p.to_string())
}

/// The defining sum of the document, computed by literal enumeration.
pub fn oracle(object: &Object, m: Option<usize>, max_count: usize) -> std::result::Result<Value, Failure> {
    let mut v = match object {
        Object::Circuit(c) => json!({ "polynomial": poly_expand_small(c, max_count)?.to_string() }),
        Object::Abp(g) => enumerated(g, max_count)?,
        Object::Sbp(g) => enumerated(g, max_count)?,
        Object::Rabp(g) => enumerated(g, max_count)?,
        Object::RelaxedSbp(g) => {
            let m = m.ok_or_else(|| Failure::Usage("relaxed SBPs need a walk length --m".into()))?;
            let walks = enumerate_realizable_walks(g, m, max_count)?;
            json!({ "m": m, "walks": walks.len(), "polynomial": definitional_polynomial(&walks).to_string() })
        }
        Object::Graph(g) => json!({
            "dsp": symbolic(dsp_oracle(g, &Symbolic), max_count)?,
            "vcp": symbolic(vcp_oracle(g, &Symbolic), max_count)?,
        }),
    };
    v["kind"] = json!(object.kind().name());
    Ok(v)
}

fn program_stats<O: MemoryOp>(g: &BranchingProgram<O>) -> Value {
    json!({
        "vertices": g.n_vertices(),
        "edges": g.n_edges(),
        "symbols": g.symbols().names(),
        "layered": g.layers().is_some(),
        "width": width_of(g).ok(),
        "nop_edges": g.edges().iter().filter(|e| e.op.is_nop()).count(),
        "longest_path": g.longest_path(),
        "degree_bound": g.degree_bound(),
    })
}

/// Structural statistics; `size` is the gate count of a circuit and the
/// vertex count of a program or graph.
pub fn stat(doc: &InterchangeDoc) -> Value {
    let mut v = match &doc.object {
        Object::Circuit(c) => {
            let s = c.stats();
            let (prod, sum) = c.max_fanins();
            json!({
                "size": s.size,
                "depth": s.depth,
                "formal_degree": s.formal_degree,
                "multiplicatively_disjoint": c.is_multiplicatively_disjoint(),
                "skew": c.is_skew(),
                "semi_unbounded": c.is_semi_unbounded(),
                "max_prod_fanin": prod,
                "max_sum_fanin": sum,
            })
        }
        Object::Abp(g) => program_stats(g),
        Object::Sbp(g) => program_stats(g),
        Object::Rabp(g) => program_stats(g),
        Object::RelaxedSbp(g) => json!({
            "vertices": g.n_vertices(),
            "edges": g.edges().len(),
            "symbols": g.symbols().names(),
            "acyclic": g.is_acyclic(),
        }),
        Object::Graph(g) => json!({ "vertices": g.n(), "edges": g.n_edges() }),
    };
    v["kind"] = json!(doc.object.kind().name());
    v["n_vars"] = json!(doc.object.n_vars());
    v["field"] = json!(match doc.field {
        FieldMode::Prime => "prime",
        FieldMode::Rational => "rational",
    });
    if v.get("size").is_none() {
        v["size"] = v["vertices"].clone();
    }
    v
}

/// Size, width and depth of one side of an equivalence check.
pub fn side_report(object: &Object) -> Value {
    let s = stat(&InterchangeDoc::new(object.clone()));
    json!({
        "kind": s["kind"],
        "size": s["size"],
        "width": s.get("width").cloned().unwrap_or(Value::Null),
        "depth": s.get("depth").cloned().unwrap_or(Value::Null),
    })
}
