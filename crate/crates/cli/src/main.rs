use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use boxslash::graph::{boxslash_product, to_dot, Graph, GraphFile, LoadedGraph, TreeSpec};
use boxslash::hex::{
    decompose_boundaries, find_good_points, maximal_boundaries, monochromatic_spanning_path, threshold, top_or_long,
    verify_boundary, verify_monochromatic_path, verify_top_or_long, BoundaryForest, BoundaryLine, GoodPoints,
    HexColoring, SpanningPath, TopOrLong,
};
use boxslash::layout::{three_queue_layout, validate_queue_layout, validate_stack_layout, LayoutFile, LayoutReport};
use boxslash::passes::{run_pipeline, ColorTable, IdentityReport, LexLevel, MainRelatedReport, ZTable, ZViolation};
use boxslash::selftest::{run_selftest, Fixtures};
use boxslash::solver::{solve, Objective, SolveOptions};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "boxslash",
    version,
    about = "Strong-product graphs, linear layouts and the passes around them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a product graph and print it as JSON or DOT.
    Gen(GenArgs),
    /// Print a layout for a product graph.
    Layout(LayoutArgs),
    /// Check a layout (read from --layout or stdin).
    Validate(ValidateArgs),
    /// Exact stack or queue number of a small graph.
    Solve(SolveArgs),
    /// Ramsey passes over a product and a layout.
    Passes {
        #[command(subcommand)]
        command: PassesCommand,
    },
    /// Hex-grid boundary analysis.
    Hex {
        #[command(subcommand)]
        command: HexCommand,
    },
    /// Run the built-in exhaustive suites.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct ProductArgs {
    /// Tree degree sequence, root first.
    #[arg(long, value_delimiter = ',', required = true)]
    degrees: Vec<u32>,
    /// Path length m.
    #[arg(long)]
    path: u32,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    product: ProductArgs,
    /// Print Graphviz DOT instead of JSON.
    #[arg(long, conflicts_with = "explicit")]
    dot: bool,
    /// Include vertex and edge lists in the JSON.
    #[arg(long)]
    explicit: bool,
}

#[derive(Args)]
struct LayoutArgs {
    /// Layered order with one queue per edge kind.
    #[arg(long, required = true)]
    three_queue: bool,
    #[command(flatten)]
    product: ProductArgs,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "kind")]
struct KindArgs {
    /// Crossing-free pages.
    #[arg(long)]
    stack: bool,
    /// Nesting-free pages.
    #[arg(long)]
    queue: bool,
}

impl KindArgs {
    fn objective(&self) -> Objective {
        if self.stack {
            Objective::Stack
        } else {
            Objective::Queue
        }
    }
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    kind: KindArgs,
    /// Layout JSON file.
    #[arg(long)]
    layout: Option<PathBuf>,
    /// Graph to resolve against; otherwise the layout's own vertices and edges.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    kind: KindArgs,
    /// Graph JSON file.
    #[arg(long)]
    graph: PathBuf,
    /// Fail when more than this many pages are needed.
    #[arg(long)]
    limit: Option<usize>,
    /// Wall-clock budget; the best layout found so far is reported.
    #[arg(long)]
    budget_ms: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "BOXSLASH_JOBS")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum PassesCommand {
    /// Run the colour, order and lex passes and report what survives.
    Run(PassesArgs),
}

#[derive(Args)]
struct PassesArgs {
    /// Product descriptor.
    #[arg(long)]
    graph: PathBuf,
    /// Layout on that product.
    #[arg(long)]
    layout: PathBuf,
    /// Degrees to keep at each level.
    #[arg(long, value_delimiter = ',', required = true)]
    target_degrees: Vec<u32>,
    /// Seed for the randomised order pass.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum HexCommand {
    /// Boundaries, spanning path and top-or-long witnesses of a colouring.
    Analyze(HexArgs),
}

#[derive(Args)]
struct HexArgs {
    /// Colouring JSON file.
    #[arg(long)]
    coloring: PathBuf,
    /// Number of good points wanted is s+1.
    #[arg(long)]
    s: usize,
    /// Threshold S for the top-or-long search; skipped when absent.
    #[arg(long = "big-s")]
    big_s: Option<usize>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Seed for the random families.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random instances per sequence family.
    #[arg(long)]
    cases: Option<usize>,
    /// Print the full report as JSON instead of one line per suite.
    #[arg(long)]
    json: bool,
}

/// Outcome of a subcommand that ran to completion.
enum Outcome {
    Ok,
    Violation,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Layout(a) => layout(a),
        Command::Validate(a) => validate(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Passes {
            command: PassesCommand::Run(a),
        } => passes(a),
        Command::Hex {
            command: HexCommand::Analyze(a),
        } => hex(a),
        Command::Selftest(a) => selftest(a),
    }
}

/// Write to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn product(a: &ProductArgs) -> Result<boxslash::graph::ProductGraph> {
    Ok(boxslash_product(&TreeSpec::new(a.degrees.clone())?, a.path)?)
}

fn gen(a: GenArgs) -> Result<Outcome> {
    let g = product(&a.product)?;
    if a.dot {
        emit(&to_dot(&g))?;
    } else if a.explicit {
        print_json(&GraphFile::explicit(&g))?;
    } else {
        print_json(&g.descriptor())?;
    }
    Ok(Outcome::Ok)
}

fn layout(a: LayoutArgs) -> Result<Outcome> {
    let g = product(&a.product)?;
    let (order, coloring) = three_queue_layout(&g);
    print_json(&LayoutFile::new(g.graph(), &order, &coloring))?;
    Ok(Outcome::Ok)
}

fn load_graph(path: &Path) -> Result<LoadedGraph> {
    let file: GraphFile = read_json(path)?;
    Ok(file.load()?)
}

fn validate(a: ValidateArgs) -> Result<Outcome> {
    let file: LayoutFile = match &a.layout {
        Some(p) => read_json(p)?,
        None => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .context("reading layout from stdin")?;
            serde_json::from_str(&text).context("parsing layout from stdin")?
        }
    };
    let graph = match &a.graph {
        Some(p) => load_graph(p)?.graph().clone(),
        None => file.implied_graph()?,
    };
    let (order, coloring) = file.resolve(&graph)?;
    let report: LayoutReport = match a.kind.objective() {
        Objective::Stack => validate_stack_layout(&graph, &order, &coloring)?,
        Objective::Queue => validate_queue_layout(&graph, &order, &coloring)?,
    };
    print_json(&report)?;
    Ok(if report.valid { Outcome::Ok } else { Outcome::Violation })
}

#[derive(Serialize)]
struct SolveOutput {
    value: usize,
    exact: bool,
    nodes_explored: u64,
    layout: LayoutFile,
}

fn solve_cmd(a: SolveArgs) -> Result<Outcome> {
    let graph: Graph = load_graph(&a.graph)?.graph().clone();
    let opts = SolveOptions {
        upper_limit: a.limit,
        budget: a.budget_ms.map(Duration::from_millis),
        jobs: a.jobs.unwrap_or(1).max(1),
        ..SolveOptions::default()
    };
    let r = solve(&graph, a.kind.objective(), &opts)?;
    print_json(&SolveOutput {
        value: r.value,
        exact: r.exact,
        nodes_explored: r.nodes_explored,
        layout: LayoutFile::new(&graph, &r.order, &r.coloring),
    })?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct PassesOutput<'a> {
    degrees: Vec<u32>,
    /// Surviving node -> node it came from.
    subtree: BTreeMap<String, String>,
    colors: &'a ColorTable,
    lex: &'a [LexLevel],
    z: &'a ZTable,
    z_violations: &'a [ZViolation],
    identity: &'a IdentityReport,
    related: &'a MainRelatedReport,
}

fn passes(a: PassesArgs) -> Result<Outcome> {
    let g = match load_graph(&a.graph)? {
        LoadedGraph::Product(p) => p,
        LoadedGraph::Plain(_) => bail!("passes need a product descriptor (tree_degrees and path_len)"),
    };
    let file: LayoutFile = read_json(&a.layout)?;
    let (order, coloring) = file.resolve(g.graph())?;
    let r = run_pipeline(&g, &order, &coloring, &a.target_degrees, a.seed)?;
    print_json(&PassesOutput {
        degrees: r.subtree.spec().degrees().to_vec(),
        subtree: r.subtree.mapping(),
        colors: &r.colors,
        lex: &r.lex,
        z: &r.z,
        z_violations: &r.z_violations,
        identity: &r.identity,
        related: &r.related,
    })?;
    let clean = r.z_violations.is_empty() && r.identity.violations.is_empty() && r.related.failures.is_empty();
    Ok(if clean { Outcome::Ok } else { Outcome::Violation })
}

#[derive(Serialize)]
struct BoundaryReport {
    line: BoundaryLine,
    good_points: Option<GoodPoints>,
    note: Option<String>,
}

#[derive(Serialize)]
struct HexOutput {
    rows: usize,
    cols: usize,
    s: usize,
    threshold: Option<String>,
    spanning_path: SpanningPath,
    boundaries: Vec<BoundaryReport>,
    forest: BoundaryForest,
    top_or_long: Option<TopOrLong>,
    top_or_long_error: Option<String>,
    failures: Vec<String>,
}

fn hex(a: HexArgs) -> Result<Outcome> {
    let c: HexColoring = read_json(&a.coloring)?;
    let mut failures = Vec::new();
    let path = monochromatic_spanning_path(&c);
    if let Err(e) = verify_monochromatic_path(&c, &path.cells) {
        failures.push(format!("spanning path: {e}"));
    }
    let boundaries = decompose_boundaries(&c)
        .into_iter()
        .map(|line| {
            if let Err(e) = verify_boundary(&line, |cell| c.get(cell)) {
                failures.push(format!("boundary {}: {e}", line.start()));
            }
            let (good_points, note) = match find_good_points(&line, &c, a.s) {
                Ok(g) => (Some(g), None),
                Err(e) => (None, Some(e.to_string())),
            };
            BoundaryReport {
                line,
                good_points,
                note,
            }
        })
        .collect();
    let forest = maximal_boundaries(&c);
    if !forest.crossings.is_empty() {
        failures.push(format!("{} crossing top boundaries", forest.crossings.len()));
    }
    let (top, top_err) = match a.big_s {
        None => (None, None),
        Some(big_s) => match top_or_long(&c, a.s, big_s) {
            Ok(w) => {
                if let Err(e) = verify_top_or_long(&c, a.s, big_s, &w) {
                    failures.push(format!("top-or-long: {e}"));
                }
                (Some(w), None)
            }
            Err(e) => (None, Some(e.to_string())),
        },
    };
    let out = HexOutput {
        rows: c.rows(),
        cols: c.cols(),
        s: a.s,
        threshold: u32::try_from(a.s).ok().and_then(threshold).map(|t| t.to_string()),
        spanning_path: path,
        boundaries,
        forest,
        top_or_long: top,
        top_or_long_error: top_err,
        failures,
    };
    print_json(&out)?;
    Ok(if out.failures.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

fn selftest(a: SelftestArgs) -> Result<Outcome> {
    let mut fixtures = Fixtures::default();
    if let Some(n) = a.cases {
        fixtures.random_cases = n;
    }
    let report = run_selftest(a.seed, &fixtures);
    if a.json {
        print_json(&report)?;
    } else {
        let mut text = String::new();
        for s in &report.suites {
            let status = if s.passed() { "PASS" } else { "FAIL" };
            writeln!(text, "{status} {} ({} checked)", s.name, s.checked)?;
            for f in s.failures.iter().take(5) {
                writeln!(text, "    {f}")?;
            }
        }
        emit(&text)?;
    }
    Ok(if report.passed() {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}
