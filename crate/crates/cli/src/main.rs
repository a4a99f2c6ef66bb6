//! `bpmem`: generate, evaluate, transform and compare branching programs
//! and circuits stored as JSON interchange documents.
//!
//! Exit codes: 0 success (or equal), 1 unequal, 2 usage or format error,
//! 3 budget exceeded.

mod report;

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bpmem::algebra::{pit_equal, random_points, Assignment, Field, Fp, Rational, Verdict};
use bpmem::circuits::random_md_circuit;
use bpmem::depth::depth_reduce;
use bpmem::generate::{chain_sbp, random_abp, random_graph, random_relaxed_sbp, random_sbp, SbpShape};
use bpmem::hardness::{build_dsp_rabp, vcp_via_dsp};
use bpmem::interchange::{FieldMode, InterchangeDoc, Object};
use bpmem::transforms::{
    abp_to_one_symbol_sbp, circuit_to_sbp, one_symbol_to_abp, remove_nops, sbp_to_circuit, unwind, width2_reduce,
};
use bpmem::Error;

use report::{evaluate_object, oracle, side_report, stat, weight_json, Poly};

#[derive(Parser)]
#[command(name = "bpmem", version, about = "Arithmetic branching programs with stack and random-access memory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a seeded random instance.
    Gen(GenArgs),
    /// Evaluate a document at a point (given, or drawn from --seed).
    Eval(EvalArgs),
    /// Apply a structural transformation.
    Transform {
        #[command(subcommand)]
        which: TransformCmd,
    },
    /// Compile a multiplicatively disjoint circuit into an SBP.
    Compile(IoArgs),
    /// Extract an arithmetic circuit from an SBP.
    Extract(IoArgs),
    /// Build a semi-unbounded circuit of logarithmic depth from an SBP.
    DepthReduce(IoArgs),
    /// Dominating-set and vertex-cover constructions on graphs.
    Hardness {
        #[command(subcommand)]
        which: HardnessCmd,
    },
    /// Randomized identity test of two documents.
    CheckEquiv(EquivArgs),
    /// Brute-force enumeration of the defining sum.
    Oracle(OracleArgs),
    /// Structural statistics of a document.
    Stat(IoArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Input document, `-` for standard input.
    #[arg(default_value = "-")]
    input: String,
    /// Output path, `-` for standard output.
    #[arg(short, long, default_value = "-")]
    output: String,
    /// Where to write the size or depth report (default: standard error).
    #[arg(long)]
    report: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Circuit,
    Abp,
    Sbp,
    RelaxedSbp,
    Chain,
    Graph,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Vertex bound (programs) or exact vertex count (graphs).
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long, default_value_t = 3)]
    symbols: usize,
    #[arg(long)]
    vars: Option<usize>,
    #[arg(long, default_value_t = 12)]
    gates: usize,
    #[arg(long, default_value_t = 20)]
    nop_percent: u32,
    /// Chain length (even).
    #[arg(long, default_value_t = 8)]
    len: usize,
    #[arg(long)]
    rational: bool,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(default_value = "-")]
    input: String,
    /// Comma-separated values of X_1, X_2, ...; integers or fractions.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Walk length for relaxed SBPs.
    #[arg(long)]
    m: Option<usize>,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Subcommand)]
enum TransformCmd {
    /// Remove nop edges.
    RemoveNops(IoArgs),
    /// Unwind a relaxed SBP into an acyclic SBP for walks of length m.
    Unwind {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        m: usize,
    },
    /// Collapse a one-symbol SBP into an ABP.
    OneSymbolToAbp(IoArgs),
    /// View an ABP as a one-symbol SBP.
    AbpToSbp(IoArgs),
    /// Width-2 SBP over two symbols.
    Width2(IoArgs),
}

#[derive(Subcommand)]
enum HardnessCmd {
    /// Width-2 RABP computing the dominating-set polynomial.
    DspBuild(IoArgs),
    /// Graph whose projected dominating-set polynomial is the vertex-cover
    /// polynomial; the projection goes to the report.
    VcpReduce(IoArgs),
}

#[derive(Args)]
struct EquivArgs {
    left: String,
    right: String,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Walk length for relaxed SBP operands.
    #[arg(long)]
    m: Option<usize>,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(default_value = "-")]
    input: String,
    /// Walk length for relaxed SBPs.
    #[arg(long)]
    m: Option<usize>,
    /// Budget on enumerated paths or polynomial terms.
    #[arg(long, default_value_t = 1_000_000)]
    max_count: usize,
    #[arg(short, long, default_value = "-")]
    output: String,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    Io(String, io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::BudgetExceeded { .. } | Error::DegreeTooLarge { .. }) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(path, e) => write!(f, "{path}: {e}"),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read_input(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    if path == "-" {
        io::stdin().read_to_string(&mut text).map_err(|e| Failure::Io("<stdin>".into(), e))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| Failure::Io(path.into(), e))?;
    }
    Ok(text)
}

fn load(path: &str) -> Result<InterchangeDoc, Failure> {
    let text = read_input(path)?;
    InterchangeDoc::parse(&text).map_err(|e| match e {
        Error::Format { path: at, message } => {
            let name = if path == "-" { "<stdin>" } else { path };
            Failure::Usage(format!("{name}: format error at {at}: {message}"))
        }
        other => Failure::Core(other),
    })
}

fn write_output(path: &str, text: &str) -> Result<(), Failure> {
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes()).map_err(|e| Failure::Io("<stdout>".into(), e))
    } else {
        fs::write(path, text).map_err(|e| Failure::Io(path.into(), e))
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn write_report(io: &IoArgs, report: Value) -> Result<(), Failure> {
    match &io.report {
        Some(path) => write_output(path, &pretty(&report)),
        None => {
            eprintln!("{}", serde_json::to_string(&report).expect("json values serialize"));
            Ok(())
        }
    }
}

fn wrong_kind(doc: &InterchangeDoc, wanted: &str) -> Failure {
    Failure::Usage(format!("expected a {wanted} document, got {}", doc.object.kind().name()))
}

/// Loads the input, transforms it and writes the result document and report.
fn transform(io: &IoArgs, f: impl FnOnce(&InterchangeDoc) -> Result<(Object, Value), Failure>) -> CmdResult {
    let doc = load(&io.input)?;
    let (object, report) = f(&doc)?;
    let out = InterchangeDoc {
        field: doc.field,
        object,
    };
    write_output(&io.output, &out.to_json())?;
    write_report(io, report)?;
    Ok(0)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn run_transform(which: &TransformCmd) -> CmdResult {
    match which {
        TransformCmd::RemoveNops(io) => transform(io, |doc| match &doc.object {
            Object::Sbp(g) => {
                let (h, r) = remove_nops(g);
                Ok((h.into(), to_value(&r)))
            }
            _ => Err(wrong_kind(doc, "sbp")),
        }),
        TransformCmd::Unwind { io, m } => transform(io, |doc| match &doc.object {
            Object::RelaxedSbp(g) => {
                let (h, r) = unwind(g, *m);
                Ok((h.into(), to_value(&r)))
            }
            _ => Err(wrong_kind(doc, "relaxed-sbp")),
        }),
        TransformCmd::OneSymbolToAbp(io) => transform(io, |doc| match &doc.object {
            Object::Sbp(g) => {
                let (h, r) = one_symbol_to_abp(g)?;
                Ok((h.into(), to_value(&r)))
            }
            _ => Err(wrong_kind(doc, "sbp")),
        }),
        TransformCmd::AbpToSbp(io) => transform(io, |doc| match &doc.object {
            Object::Abp(g) => {
                let h = abp_to_one_symbol_sbp(g);
                let r = json!({ "input_size": g.size(), "output_size": h.size() });
                Ok((h.into(), r))
            }
            _ => Err(wrong_kind(doc, "abp")),
        }),
        TransformCmd::Width2(io) => transform(io, |doc| match &doc.object {
            Object::Sbp(g) => {
                let (h, r) = width2_reduce(g);
                Ok((h.into(), to_value(&r)))
            }
            _ => Err(wrong_kind(doc, "sbp")),
        }),
    }
}

fn run_gen(a: &GenArgs) -> CmdResult {
    let object: Object = match a.kind {
        GenKind::Circuit => {
            let vars = a.vars.unwrap_or(3).max(1);
            if a.gates < vars {
                return Err(Failure::Usage(format!("--gates {} is below --vars {vars}", a.gates)));
            }
            random_md_circuit(vars, a.gates, a.seed).into()
        }
        GenKind::Abp => random_abp(a.vertices.unwrap_or(8), a.seed).into(),
        GenKind::Sbp => {
            let shape = SbpShape {
                max_vertices: a.vertices.unwrap_or(12),
                max_symbols: a.symbols.max(1),
                n_vars: a.vars.unwrap_or(6).max(1) as u32,
                nop_percent: a.nop_percent.min(100),
            };
            random_sbp(&shape, a.seed).into()
        }
        GenKind::RelaxedSbp => random_relaxed_sbp(a.vertices.unwrap_or(6), a.seed).into(),
        GenKind::Chain => {
            if a.len % 2 == 1 {
                return Err(Failure::Usage("--len must be even".into()));
            }
            chain_sbp(a.len, a.seed).into()
        }
        GenKind::Graph => random_graph(a.vertices.unwrap_or(5), a.seed).into(),
    };
    let doc = InterchangeDoc {
        field: if a.rational { FieldMode::Rational } else { FieldMode::Prime },
        object,
    };
    write_output(&a.output, &doc.to_json())?;
    Ok(0)
}

fn parse_point<F: Field + std::str::FromStr<Err = Error>>(text: &str) -> Result<Assignment<F>, Failure> {
    let values = text
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.parse::<F>())
        .collect::<Result<Vec<F>, Error>>()
        .map_err(|e| Failure::Usage(format!("--point: {e}")))?;
    Ok(Assignment::new(values))
}

fn eval_in<F: Field + std::str::FromStr<Err = Error>>(doc: &InterchangeDoc, a: &EvalArgs) -> Result<Value, Failure> {
    let n = doc.object.n_vars();
    let point: Assignment<F> = match &a.point {
        Some(text) => parse_point(text)?,
        None => random_points::<F>(n, 1, a.seed).remove(0),
    };
    point.check_covers(n)?;
    let values = evaluate_object(&doc.object, &point, a.m)?;
    let mut out = serde_json::Map::new();
    out.insert("kind".into(), json!(doc.object.kind().name()));
    out.insert("point".into(), json!(point.values().iter().map(F::to_string).collect::<Vec<_>>()));
    for (name, v) in values {
        out.insert(name.into(), json!(v.to_string()));
    }
    Ok(Value::Object(out))
}

fn run_eval(a: &EvalArgs) -> CmdResult {
    let doc = load(&a.input)?;
    let v = match doc.field {
        FieldMode::Prime => eval_in::<Fp>(&doc, a)?,
        FieldMode::Rational => eval_in::<Rational>(&doc, a)?,
    };
    write_output(&a.output, &pretty(&v))?;
    Ok(0)
}

fn run_compile(io: &IoArgs) -> CmdResult {
    transform(io, |doc| match &doc.object {
        Object::Circuit(c) => {
            let (g, trace, r) = circuit_to_sbp(c)?;
            let root = trace.root(c);
            let mut report = to_value(&r);
            report["m_root"] = json!(root.m);
            report["lengths_within_bound"] = json!(trace.lengths_within_bound());
            Ok((g.into(), report))
        }
        _ => Err(wrong_kind(doc, "circuit")),
    })
}

fn run_extract(io: &IoArgs) -> CmdResult {
    transform(io, |doc| match &doc.object {
        Object::Sbp(g) => {
            let (c, r) = sbp_to_circuit(g);
            Ok((c.into(), to_value(&r)))
        }
        _ => Err(wrong_kind(doc, "sbp")),
    })
}

fn run_depth(io: &IoArgs) -> CmdResult {
    transform(io, |doc| match &doc.object {
        Object::Sbp(g) => {
            let (c, r) = depth_reduce(g);
            Ok((c.into(), to_value(&r)))
        }
        _ => Err(wrong_kind(doc, "sbp")),
    })
}

fn run_hardness(which: &HardnessCmd) -> CmdResult {
    match which {
        HardnessCmd::DspBuild(io) => transform(io, |doc| match &doc.object {
            Object::Graph(g) => {
                let h = build_dsp_rabp(g);
                let width = bpmem::programs::width_of(&h).ok();
                let r = json!({ "graph_vertices": g.n(), "output_size": h.size(), "width": width });
                Ok((h.into(), r))
            }
            _ => Err(wrong_kind(doc, "graph")),
        }),
        HardnessCmd::VcpReduce(io) => transform(io, |doc| match &doc.object {
            Object::Graph(g) => {
                let (big, proj) = vcp_via_dsp(g);
                let images: Vec<Value> = proj.images.iter().map(|w| weight_json(*w)).collect();
                let r = json!({ "graph_vertices": g.n(), "output_vertices": big.n(), "projection": images });
                Ok((big.into(), r))
            }
            _ => Err(wrong_kind(doc, "graph")),
        }),
    }
}

fn run_equiv(a: &EquivArgs) -> CmdResult {
    let left = load(&a.left)?;
    let right = load(&a.right)?;
    let lp = Poly::new(&left.object, a.m)?;
    let rp = Poly::new(&right.object, a.m)?;
    let verdict: Verdict<Fp> = pit_equal(&lp, &rp, a.trials, a.seed)?;
    let (name, witness, code) = match &verdict {
        Verdict::EqualWhp { .. } => ("equal", Value::Null, 0),
        Verdict::Unequal { witness, left, right } => (
            "unequal",
            json!({
                "point": witness.values().iter().map(Fp::to_string).collect::<Vec<_>>(),
                "left": left.to_string(),
                "right": right.to_string(),
            }),
            1,
        ),
    };
    let report = json!({
        "verdict": name,
        "trials": a.trials,
        "seed": a.seed,
        "field": { "prime": bpmem::algebra::MODULUS.to_string() },
        "witness": witness,
        "left": side_report(&left.object),
        "right": side_report(&right.object),
    });
    write_output(&a.output, &pretty(&report))?;
    Ok(code)
}

fn run_oracle(a: &OracleArgs) -> CmdResult {
    let doc = load(&a.input)?;
    let v = oracle(&doc.object, a.m, a.max_count)?;
    write_output(&a.output, &pretty(&v))?;
    Ok(0)
}

fn run_stat(io: &IoArgs) -> CmdResult {
    let doc = load(&io.input)?;
    write_output(&io.output, &pretty(&stat(&doc)))?;
    Ok(0)
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Eval(a) => run_eval(a),
        Command::Transform { which } => run_transform(which),
        Command::Compile(io) => run_compile(io),
        Command::Extract(io) => run_extract(io),
        Command::DepthReduce(io) => run_depth(io),
        Command::Hardness { which } => run_hardness(which),
        Command::CheckEquiv(a) => run_equiv(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Stat(io) => run_stat(io),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("bpmem: {f}");
            ExitCode::from(f.code())
        }
    }
}
