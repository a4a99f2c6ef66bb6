//! JSON interchange documents for every object the toolkit handles.
//!
//! A document is `{"header": {...}, "body": {...}}`. The header names the
//! kind, the format version, the field and the number of variables; the body
//! layout depends on the kind. Constants are decimal strings so that values
//! outside the `f64` range survive any JSON tooling. Graphs can also be read
//! from plain edge-list text: the vertex count, then one `u v` pair per line.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{Var, Weight, MODULUS};
use crate::circuits::{Circuit, Gate};
use crate::hardness::SimpleGraph;
use crate::programs::{Abp, BranchingProgram, Edge, MemoryOp, Rabp, RelaxedSbp, Sbp, StackOp, SymbolTable};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Circuit,
    Abp,
    Sbp,
    RelaxedSbp,
    Rabp,
    Graph,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Circuit => "circuit",
            Kind::Abp => "abp",
            Kind::Sbp => "sbp",
            Kind::RelaxedSbp => "relaxed-sbp",
            Kind::Rabp => "rabp",
            Kind::Graph => "graph",
        }
    }
}

/// Arithmetic the document's polynomial is meant over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FieldMode {
    /// The prime field of order `2^61 - 1`.
    #[default]
    Prime,
    Rational,
}

/// Any object that can be stored in a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    Circuit(Circuit),
    Abp(Abp),
    Sbp(Sbp),
    RelaxedSbp(RelaxedSbp),
    Rabp(Rabp),
    Graph(SimpleGraph),
}

impl Object {
    pub fn kind(&self) -> Kind {
        match self {
            Object::Circuit(_) => Kind::Circuit,
            Object::Abp(_) => Kind::Abp,
            Object::Sbp(_) => Kind::Sbp,
            Object::RelaxedSbp(_) => Kind::RelaxedSbp,
            Object::Rabp(_) => Kind::Rabp,
            Object::Graph(_) => Kind::Graph,
        }
    }

    /// Number of variables: the largest index used (vertex count for graphs).
    pub fn n_vars(&self) -> usize {
        match self {
            Object::Circuit(c) => c.max_var() as usize,
            Object::Abp(g) => g.max_var() as usize,
            Object::Sbp(g) => g.max_var() as usize,
            Object::RelaxedSbp(g) => g.max_var() as usize,
            Object::Rabp(g) => g.max_var() as usize,
            Object::Graph(g) => g.n(),
        }
    }
}

macro_rules! object_from {
    ($($variant:ident($ty:ty)),*) => {
        $(impl From<$ty> for Object {
            fn from(x: $ty) -> Self {
                Object::$variant(x)
            }
        })*
    };
}

object_from!(Circuit(Circuit), Abp(Abp), Sbp(Sbp), RelaxedSbp(RelaxedSbp), Rabp(Rabp), Graph(SimpleGraph));

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterchangeDoc {
    pub field: FieldMode,
    pub object: Object,
}

impl InterchangeDoc {
    pub fn new(object: impl Into<Object>) -> Self {
        InterchangeDoc {
            field: FieldMode::Prime,
            object: object.into(),
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let raw = RawDoc {
            header: RawHeader {
                kind: self.object.kind(),
                version: FORMAT_VERSION,
                field: match self.field {
                    FieldMode::Prime => RawField::Prime(MODULUS.to_string()),
                    FieldMode::Rational => RawField::Rational,
                },
                n_vars: self.object.n_vars(),
            },
            body: body_value(&self.object),
        };
        let mut text = serde_json::to_string_pretty(&raw).expect("documents serialize");
        text.push('\n');
        text
    }

    /// Parses a JSON document, or a graph in edge-list text form.
    pub fn parse(text: &str) -> Result<Self> {
        if !text.trim_start().starts_with('{') {
            return parse_edge_list(text).map(InterchangeDoc::new);
        }
        let raw: RawDoc = serde_json::from_str::<Value>(text)
            .map_err(|e| Error::format(format!("line {} column {}", e.line(), e.column()), e.to_string()))
            .and_then(|v| from_value(v, ""))?;
        let h = raw.header;
        if h.version != FORMAT_VERSION {
            return Err(Error::format(
                "header.version",
                format!("unsupported version {} (expected {FORMAT_VERSION})", h.version),
            ));
        }
        let field = match h.field {
            RawField::Rational => FieldMode::Rational,
            RawField::Prime(p) if p == MODULUS.to_string() => FieldMode::Prime,
            RawField::Prime(p) => {
                return Err(Error::format("header.field.prime", format!("unsupported prime {p} (only {MODULUS})")))
            }
        };
        let object = match h.kind {
            Kind::Circuit => Object::Circuit(read_circuit(from_value(raw.body, "body")?)?),
            Kind::Abp => Object::Abp(read_program(from_value(raw.body, "body")?)?),
            Kind::Sbp => Object::Sbp(read_program(from_value(raw.body, "body")?)?),
            Kind::Rabp => Object::Rabp(read_program(from_value(raw.body, "body")?)?),
            Kind::RelaxedSbp => Object::RelaxedSbp(read_relaxed(from_value(raw.body, "body")?)?),
            Kind::Graph => Object::Graph(read_graph(from_value(raw.body, "body")?)?),
        };
        let used = object.n_vars();
        if used > h.n_vars {
            return Err(Error::format(
                "header.n_vars",
                format!("declares {} variables but X{used} is referenced", h.n_vars),
            ));
        }
        Ok(InterchangeDoc { field, object })
    }
}

/// Deserializes `v`, reporting the failing field as a path below `prefix`.
fn from_value<T: for<'de> Deserialize<'de>>(v: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix, inner.as_str()) {
            ("", p) => p.to_string(),
            (pre, ".") => pre.to_string(),
            (pre, p) => format!("{pre}.{p}"),
        };
        Error::format(path, e.into_inner().to_string())
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    header: RawHeader,
    body: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHeader {
    kind: Kind,
    version: u32,
    field: RawField,
    n_vars: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawField {
    Prime(String),
    Rational,
}

#[derive(Serialize, Deserialize)]
enum RawWeight {
    #[serde(rename = "const")]
    Const(String),
    #[serde(rename = "var")]
    Var(u32),
}

impl From<Weight> for RawWeight {
    fn from(w: Weight) -> Self {
        match w {
            Weight::Const(c) => RawWeight::Const(c.to_string()),
            Weight::Var(v) => RawWeight::Var(v.0),
        }
    }
}

fn read_weight(w: RawWeight, path: &str) -> Result<Weight> {
    match w {
        RawWeight::Const(text) => text
            .trim()
            .parse::<i64>()
            .map(Weight::Const)
            .map_err(|_| Error::format(format!("{path}.const"), format!("{text:?} is not a 64-bit integer"))),
        RawWeight::Var(0) => Err(Error::format(format!("{path}.var"), "variables are numbered from 1")),
        RawWeight::Var(v) => Ok(Weight::Var(Var(v))),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawGateKind {
    Input(RawWeight),
    Sum(Vec<usize>),
    Prod([usize; 2]),
}

#[derive(Serialize, Deserialize)]
struct RawGate {
    id: usize,
    #[serde(flatten)]
    gate: RawGateKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    gates: Vec<RawGate>,
    output: usize,
    #[serde(default)]
    semi_unbounded: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    id: usize,
    from: usize,
    to: usize,
    weight: RawWeight,
    op: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProgram {
    vertices: usize,
    #[serde(default)]
    symbols: Vec<String>,
    source: usize,
    sink: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layers: Option<Vec<usize>>,
    edges: Vec<RawEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("bodies serialize")
}

fn raw_edges<O: MemoryOp>(edges: &[Edge<O>], symbols: &SymbolTable) -> Vec<RawEdge> {
    edges
        .iter()
        .enumerate()
        .map(|(id, e)| RawEdge {
            id,
            from: e.from,
            to: e.to,
            weight: e.weight.into(),
            op: e.op.label(symbols),
        })
        .collect()
}

fn program_body<O: MemoryOp>(g: &BranchingProgram<O>) -> Value {
    to_value(&RawProgram {
        vertices: g.n_vertices(),
        symbols: g.symbols().names().to_vec(),
        source: g.source(),
        sink: g.sink(),
        layers: g.layers().map(<[usize]>::to_vec),
        edges: raw_edges(g.edges(), g.symbols()),
    })
}

fn body_value(object: &Object) -> Value {
    match object {
        Object::Circuit(c) => to_value(&RawCircuit {
            gates: c
                .gates()
                .iter()
                .enumerate()
                .map(|(id, g)| RawGate {
                    id,
                    gate: match g {
                        Gate::Input(w) => RawGateKind::Input((*w).into()),
                        Gate::Sum(ch) => RawGateKind::Sum(ch.clone()),
                        Gate::Prod(ch) => RawGateKind::Prod(*ch),
                    },
                })
                .collect(),
            output: c.output(),
            semi_unbounded: c.is_semi_unbounded(),
        }),
        Object::Abp(g) => program_body(g),
        Object::Sbp(g) => program_body(g),
        Object::Rabp(g) => program_body(g),
        Object::RelaxedSbp(g) => to_value(&RawProgram {
            vertices: g.n_vertices(),
            symbols: g.symbols().names().to_vec(),
            source: g.source(),
            sink: g.sink(),
            layers: None,
            edges: raw_edges(g.edges(), g.symbols()),
        }),
        Object::Graph(g) => to_value(&RawGraph {
            vertices: g.n(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }),
    }
}

/// Wraps structural errors of a validated constructor as format errors.
fn structural(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Structure(m) => Error::format(path, m),
        other => other,
    }
}

fn read_circuit(raw: RawCircuit) -> Result<Circuit> {
    let mut gates = Vec::with_capacity(raw.gates.len());
    for (k, g) in raw.gates.into_iter().enumerate() {
        let path = format!("body.gates[{k}]");
        if g.id != k {
            return Err(Error::format(format!("{path}.id"), format!("expected id {k}, found {}", g.id)));
        }
        gates.push(match g.gate {
            RawGateKind::Input(w) => Gate::Input(read_weight(w, &format!("{path}.input"))?),
            RawGateKind::Sum(ch) => Gate::Sum(ch),
            RawGateKind::Prod(ch) => Gate::Prod(ch),
        });
    }
    Circuit::new(gates, raw.output, raw.semi_unbounded).map_err(structural("body.gates"))
}

fn read_edges<O: MemoryOp>(raw: Vec<RawEdge>, symbols: &SymbolTable) -> Result<Vec<Edge<O>>> {
    raw.into_iter()
        .enumerate()
        .map(|(k, e)| {
            let path = format!("body.edges[{k}]");
            if e.id != k {
                return Err(Error::format(format!("{path}.id"), format!("expected id {k}, found {}", e.id)));
            }
            let w = read_weight(e.weight, &format!("{path}.weight"))?;
            let op = O::parse_label(&e.op, symbols).map_err(|err| Error::format(format!("{path}.op"), err.to_string()))?;
            Ok(Edge::new(e.from, e.to, w, op))
        })
        .collect()
}

fn read_program<O: MemoryOp>(raw: RawProgram) -> Result<BranchingProgram<O>> {
    let symbols = SymbolTable::from_names(raw.symbols).map_err(structural("body.symbols"))?;
    let edges = read_edges::<O>(raw.edges, &symbols)?;
    let g = BranchingProgram::new(raw.vertices, edges, raw.source, raw.sink, symbols).map_err(structural("body"))?;
    match raw.layers {
        Some(layers) => g.with_layers(layers).map_err(structural("body.layers")),
        None => Ok(g),
    }
}

fn read_relaxed(raw: RawProgram) -> Result<RelaxedSbp> {
    if raw.layers.is_some() {
        return Err(Error::format("body.layers", "relaxed programs carry no layering"));
    }
    let symbols = SymbolTable::from_names(raw.symbols).map_err(structural("body.symbols"))?;
    let edges = read_edges::<StackOp>(raw.edges, &symbols)?;
    RelaxedSbp::new(raw.vertices, edges, raw.source, raw.sink, symbols).map_err(structural("body"))
}

fn read_graph(raw: RawGraph) -> Result<SimpleGraph> {
    SimpleGraph::new(raw.vertices, raw.edges.into_iter().map(|[u, v]| (u, v))).map_err(structural("body.edges"))
}

fn parse_edge_list(text: &str) -> Result<SimpleGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, head) = lines.next().ok_or_else(|| Error::format("line 1", "empty edge list"))?;
    let n: usize = head
        .parse()
        .map_err(|_| Error::format(format!("line {first}"), format!("expected a vertex count, found {head:?}")))?;
    let mut edges = Vec::new();
    for (k, line) in lines {
        let ids: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::format(format!("line {k}"), format!("expected two vertex ids, found {line:?}")))?;
        let [u, v] = ids[..] else {
            return Err(Error::format(format!("line {k}"), format!("expected two vertex ids, found {line:?}")));
        };
        edges.push((u, v));
    }
    SimpleGraph::new(n, edges).map_err(structural("edges"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::random_md_circuit;
    use crate::generate::{random_abp, random_relaxed_sbp, random_sbp, SbpShape};
    use crate::hardness::{build_dsp_rabp, random_graph};

    fn round_trip(doc: InterchangeDoc) {
        let text = doc.to_json();
        let back = InterchangeDoc::parse(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn every_kind_round_trips() {
        for seed in 0..20 {
            round_trip(InterchangeDoc::new(random_md_circuit(3, 12, seed)));
            round_trip(InterchangeDoc::new(random_abp(8, seed)));
            round_trip(InterchangeDoc::new(random_sbp(&SbpShape::default(), seed)));
            round_trip(InterchangeDoc::new(random_relaxed_sbp(6, seed)));
            let g = random_graph(4, seed);
            round_trip(InterchangeDoc::new(build_dsp_rabp(&g)));
            round_trip(InterchangeDoc::new(g));
        }
        let mut doc = InterchangeDoc::new(random_abp(5, 1));
        doc.field = FieldMode::Rational;
        round_trip(doc);
    }

    #[test]
    fn header_shape() {
        let text = InterchangeDoc::new(random_sbp(&SbpShape::default(), 4)).to_json();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["header"]["kind"], "sbp");
        assert_eq!(v["header"]["field"]["prime"], "2305843009213693951");
        assert!(v["body"]["edges"][0]["weight"].is_object());
    }

    fn bad(text: &str) -> (String, String) {
        match InterchangeDoc::parse(text) {
            Err(Error::Format { path, message }) => (path, message),
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    const HEADER: &str = r#""header": {"kind": "sbp", "version": 1, "field": "rational", "n_vars": 2}"#;

    fn sbp_doc(edges: &str) -> String {
        format!(r#"{{{HEADER}, "body": {{"vertices": 2, "symbols": ["a"], "source": 0, "sink": 1, "edges": [{edges}]}}}}"#)
    }

    #[test]
    fn diagnostics_name_the_field() {
        let (path, _) = bad(&sbp_doc(r#"{"id": 0, "from": 0, "to": 1, "weight": {"var": 1}, "op": "write:a"}"#));
        assert_eq!(path, "body.edges[0].op");
        let (path, _) = bad(&sbp_doc(r#"{"id": 0, "from": 0, "to": 1, "weight": {"const": "x"}, "op": "nop"}"#));
        assert_eq!(path, "body.edges[0].weight.const");
        let (path, _) = bad(&sbp_doc(r#"{"id": 0, "from": 0, "to": 1, "weight": {"var": 3}, "op": "nop"}"#));
        assert_eq!(path, "header.n_vars");
        let (path, _) = bad(&sbp_doc(r#"{"id": 0, "from": 0, "to": 7, "weight": {"var": 1}, "op": "nop"}"#));
        assert_eq!(path, "body");
        let (path, _) = bad(&sbp_doc(r#"{"id": 0, "from": 0, "to": 1, "weight": 5, "op": "nop"}"#));
        assert!(path.starts_with("body.edges[0].weight"), "{path}");
        let (path, _) = bad("{\n  \"header\": [\n");
        assert!(path.starts_with("line "), "{path}");
    }

    #[test]
    fn only_the_default_prime_is_accepted() {
        let text = sbp_doc("").replace(r#""rational""#, r#"{"prime": "7"}"#);
        assert_eq!(bad(&text).0, "header.field.prime");
    }

    #[test]
    fn edge_list_text() {
        let g = match InterchangeDoc::parse("# triangle\n3\n0 1\n1 2\n0 2\n").unwrap().object {
            Object::Graph(g) => g,
            other => panic!("{other:?}"),
        };
        assert_eq!(g.n_edges(), 3);
        assert_eq!(bad("3\n0 1 2\n").0, "line 2");
        assert_eq!(bad("2\n0 0\n").0, "edges");
    }
}
