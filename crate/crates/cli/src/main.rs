use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use twzec::channel::{parse_input, Channel, ConfusionFamily, Format};
use twzec::code::{exhaustive_best_pair, is_uniquely_decodable, lemma8_search, theorem8_construct, DEFAULT_NODE_BUDGET};
use twzec::graph::{independence_number, Graph};
use twzec::inner::{best_sub_alphabet, hull, max_random_coding, SUB_ALPHABET_LIMIT};
use twzec::oneshot::{independence_product, rho_lower_certificate, rho_upper_estimate};
use twzec::outer::{Method, OuterOptions};
use twzec::report::{build_report, BoundReport, ReportOptions};
use twzec::spectral::{capacity_sandwich, fractional_clique_cover, fractional_clique_cover_exact, lovasz_theta, ratio_string};
use twzec::Error;

#[derive(Parser)]
#[command(name = "twzec", version, about = "Zero-error capacity bounds for two-way channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outer bounds over a λ grid.
    Bounds(BoundsArgs),
    /// Random-coding and linear-code inner points.
    Inner(InnerArgs),
    /// Independence product and the ρ certificate.
    Oneshot(OneshotArgs),
    /// Spectral values of a single graph.
    Theta(ThetaArgs),
    /// Exhaustive search for the best uniquely decodable pair of block length n.
    Search(SearchArgs),
    /// Linear coset constructions.
    Construct(ConstructArgs),
    /// Outer and inner bounds plus the one-shot block in one report.
    Report(BoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Auto,
    Table,
    Family,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct ChannelArgs {
    /// Channel (probability table) or graph-family JSON document.
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: InputFormat,
}

#[derive(Args)]
struct OutArgs {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    input: ChannelArgs,
    /// Number of equally spaced λ values in [0, 1].
    #[arg(long, default_value_t = 11)]
    lambda_grid: usize,
    /// Explicit λ values; overrides --lambda-grid.
    #[arg(long, value_delimiter = ',')]
    lambdas: Vec<f64>,
    #[arg(long, value_enum, default_value = "off")]
    minimize_q: Switch,
    /// Comma-separated subset of shannon-eps, lp-l, minmax-t, maxmin-theta.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// Plot data: lambda,method,value,residual.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Low-discrepancy starts of the simplex optimiser.
    #[arg(long)]
    starts: Option<usize>,
    /// Branch limit of the ρ upper estimate (report only; 0 skips it).
    #[arg(long, default_value_t = 256)]
    rho_branches: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct InnerArgs {
    #[command(flatten)]
    input: ChannelArgs,
    #[arg(long, default_value_t = 11)]
    lambda_grid: usize,
    #[arg(long, value_delimiter = ',')]
    lambdas: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OneshotArgs {
    #[command(flatten)]
    input: ChannelArgs,
    /// Also run the branching upper estimate of ρ with this many branches.
    #[arg(long)]
    rho_upper: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ThetaArgs {
    /// Graph JSON: an adjacency matrix or {"n":..,"edges":[[u,v],..]}.
    #[arg(long, conflicts_with = "cycle")]
    graph: Option<PathBuf>,
    /// Use the n-cycle.
    #[arg(long)]
    cycle: Option<usize>,
    /// Largest strong power tried for the capacity lower bound.
    #[arg(long, default_value_t = 2)]
    max_power: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    input: ChannelArgs,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    q: usize,
    /// Subfield order for the trace construction.
    #[arg(long, required_unless_present = "lemma8")]
    s: Option<usize>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Search a generator with many detectors instead.
    #[arg(long, requires_all = ["qprime", "detecting"])]
    lemma8: bool,
    #[arg(long)]
    qprime: Option<usize>,
    /// Comma-separated detecting symbols in the other alphabet.
    #[arg(long, value_delimiter = ',')]
    detecting: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

enum Failure {
    Validation(String),
    Consistency(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Consistency(msg)) => {
            eprintln!("CONSISTENCY-FAIL: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Bounds(a) => bounds(a, false),
        Command::Report(a) => bounds(a, true),
        Command::Inner(a) => inner(a),
        Command::Oneshot(a) => oneshot(a),
        Command::Theta(a) => theta(a),
        Command::Search(a) => search(a),
        Command::Construct(a) => construct(a),
    }
}

struct Loaded {
    channel: Channel,
    family: ConfusionFamily,
    digest: String,
}

fn read(path: &Path) -> std::result::Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn load(a: &ChannelArgs) -> std::result::Result<Loaded, Failure> {
    let bytes = read(&a.channel)?;
    let format = match a.format {
        InputFormat::Auto => None,
        InputFormat::Table => Some(Format::ProbabilityTable),
        InputFormat::Family => Some(Format::GraphFamily),
    };
    let input = parse_input(&bytes, format)?;
    Ok(Loaded { channel: input.channel(), family: input.family(), digest: hex::encode(Sha256::digest(&bytes)) })
}

fn emit(value: &Value, out: &OutArgs) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Validation(e.to_string()))?;
    text.push('\n');
    match &out.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Validation(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn lambdas(explicit: &[f64], grid: usize) -> std::result::Result<Vec<f64>, Failure> {
    let l = if explicit.is_empty() { ReportOptions::grid(grid) } else { explicit.to_vec() };
    if l.is_empty() {
        return Err(Failure::Validation("no λ values".into()));
    }
    if let Some(bad) = l.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Failure::Validation(format!("λ = {bad} outside [0, 1]")));
    }
    Ok(l)
}

fn seed(flag: u64) -> std::result::Result<u64, Failure> {
    match std::env::var("TWZEC_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Failure::Validation(format!("TWZEC_SEED={s} is not an integer"))),
        Err(_) => Ok(flag),
    }
}

fn csv(report: &BoundReport) -> String {
    let mut s = String::from("lambda,method,value,residual\n");
    for row in &report.rows {
        for o in &row.outer {
            let _ = writeln!(s, "{},{},{},{}", row.lambda, o.method.name(), o.value, o.residual);
        }
        for i in &row.inner {
            let _ = writeln!(s, "{},{},{},0", row.lambda, i.method.name(), i.value);
        }
    }
    s
}

fn bounds(a: BoundsArgs, full: bool) -> Outcome {
    let loaded = load(&a.input)?;
    let methods = if a.methods.is_empty() {
        Method::ALL.to_vec()
    } else {
        a.methods
            .iter()
            .map(|m| Method::parse(m.trim()).ok_or_else(|| Failure::Validation(format!("unknown method {m}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?
    };
    let mut outer = OuterOptions::default();
    if let Some(s) = a.starts {
        outer.starts = s;
    }
    let opts = ReportOptions {
        lambdas: lambdas(&a.lambdas, a.lambda_grid)?,
        methods,
        minimize_q: a.minimize_q == Switch::On,
        seed: seed(a.seed)?,
        with_inner: full,
        with_oneshot: full,
        rho_branch_limit: (a.rho_branches > 0).then_some(a.rho_branches),
        outer,
    };
    let report = build_report(&loaded.channel, &loaded.family, &loaded.digest, &opts)?;
    if let Some(p) = &a.csv {
        std::fs::write(p, csv(&report)).map_err(|e| Failure::Validation(format!("{}: {e}", p.display())))?;
    }
    emit(&serde_json::to_value(&report).expect("plain data"), &a.out)?;
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Failure::Consistency(format!(
            "{} violation(s); first at λ = {}: {} ({} < {})",
            report.violations.len(),
            v.lambda,
            v.rule,
            v.upper,
            v.lower
        ))),
    }
}

fn inner(a: InnerArgs) -> Outcome {
    let loaded = load(&a.input)?;
    let fam = &loaded.family;
    let rc = max_random_coding(fam, &OuterOptions::default())?;
    let mut points = vec![(rc.r1, rc.r2)];
    let sub = if fam.x1_size() <= SUB_ALPHABET_LIMIT && fam.x2_size() <= SUB_ALPHABET_LIMIT {
        let choices = best_sub_alphabet(fam, &lambdas(&a.lambdas, a.lambda_grid)?)?;
        points.extend(choices.iter().map(|c| (c.point.r1, c.point.r2)));
        Some(choices)
    } else {
        None
    };
    let out = json!({
        "channel_digest": loaded.digest,
        "random_coding": rc,
        "random_coding_sum_rate": rc.sum_rate(),
        "sub_alphabet": sub,
        "hull": hull(&points),
    });
    emit(&out, &a.out)
}

fn oneshot(a: OneshotArgs) -> Outcome {
    let loaded = load(&a.input)?;
    let fam = &loaded.family;
    let (pi, witness) = independence_product(fam)?;
    let cert = rho_lower_certificate(fam, &witness)?;
    let mut out = json!({
        "pi": pi,
        "witness": witness,
        "log_pi": (pi as f64).log2(),
        "rho_lower": cert.value,
    });
    if let Some(limit) = a.rho_upper {
        out["rho_upper"] = serde_json::to_value(rho_upper_estimate(fam, limit)?).expect("plain data");
    }
    emit(&out, &a.out)
}

fn read_graph(path: &Path) -> std::result::Result<Graph, Failure> {
    let v: Value = serde_json::from_slice(&read(path)?).map_err(|e| Failure::Validation(e.to_string()))?;
    if let (Some(n), Some(edges)) = (v.get("n").and_then(Value::as_u64), v.get("edges")) {
        let edges: Vec<(usize, usize)> = serde_json::from_value(edges.clone()).map_err(|e| Failure::Validation(e.to_string()))?;
        let n = n as usize;
        if let Some(&(u, w)) = edges.iter().find(|&&(u, w)| u >= n || w >= n || u == w) {
            return Err(Failure::Validation(format!("bad edge ({u}, {w})")));
        }
        return Ok(Graph::from_edges(n, &edges));
    }
    serde_json::from_value(v).map_err(|e| Failure::Validation(e.to_string()))
}

fn theta(a: ThetaArgs) -> Outcome {
    let g = match (&a.graph, a.cycle) {
        (Some(p), _) => read_graph(p)?,
        (None, Some(n)) if n >= 3 => Graph::cycle(n),
        (None, Some(n)) => return Err(Failure::Validation(format!("cycle length {n} < 3"))),
        (None, None) => return Err(Failure::Validation("give --graph or --cycle".into())),
    };
    let (alpha, _) = independence_number(&g)?;
    let fcc_exact = fractional_clique_cover_exact(&g).ok().map(|r| ratio_string(&r));
    let out = json!({
        "n": g.n(),
        "alpha": alpha,
        "theta": lovasz_theta(&g)?,
        "fcc": fractional_clique_cover(&g)?,
        "fcc_exact": fcc_exact,
        "sandwich": capacity_sandwich(&g, a.max_power)?,
    });
    emit(&out, &a.out)
}

fn search(a: SearchArgs) -> Outcome {
    let loaded = load(&a.input)?;
    let r = exhaustive_best_pair(&loaded.family, a.n, a.node_budget)?;
    let (r1, r2) = r.pair.rates();
    let out = json!({
        "n": a.n,
        "size_a": r.pair.a.len(),
        "size_b": r.pair.b.len(),
        "r1": r1,
        "r2": r2,
        "sum_rate": r1 + r2,
        "complete": r.complete,
        "nodes": r.nodes,
        "pair": r.pair,
    });
    emit(&out, &a.out)
}

fn construct(a: ConstructArgs) -> Outcome {
    if a.lemma8 {
        let qprime = a.qprime.expect("required by clap");
        let pair = lemma8_search(a.q, qprime, a.n, a.k, &a.detecting, a.seed)?;
        pair.validate()?;
        let out = json!({
            "q": a.q,
            "qprime": qprime,
            "n": a.n,
            "k": a.k,
            "generator": pair.generator,
            "detectors": pair.detector_count(),
            "guarantee": pair.guarantee(),
            "verifier": "OK",
        });
        return emit(&out, &a.out);
    }
    let s = a.s.expect("required by clap");
    let t = theorem8_construct(a.q, s, a.n, a.k, a.seed)?;
    let check = is_uniquely_decodable(&t.pair, &t.family)?;
    let mut out = serde_json::to_value(&t).expect("plain data");
    out["size_a"] = json!(t.pair.a.len());
    out["size_b"] = json!(t.pair.b.len());
    out["verifier"] = json!(if check.ok { "OK" } else { "FAIL" });
    if !check.ok {
        out["witness"] = serde_json::to_value(&check.witness).expect("plain data");
        emit(&out, &a.out)?;
        return Err(Failure::Validation("constructed pair is not uniquely decodable".into()));
    }
    emit(&out, &a.out)
}
