//! Command-line front end: `solve`, `tune`, `bench`, `landscape` and `examples`.
//!
//! Exit codes: 0 on success, 1 on a solver or tuner failure or a failed bench
//! comparison, 2 on a usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::report::{
    bench_csv, bench_table, landscape_csv, num, report_points, solve_csv, solve_report, solve_table, to_json,
};
use crate::bench::{builtin, catalog, run_targets, BenchOptions, ProblemFile, BENCH_TARGETS};
use crate::funcspace::DEFAULT_DEGREE;
use crate::ham::{equispaced, HamSolver, Problem, DEFAULT_RESIDUAL_NODES};
use crate::tuner::{
    convergence_report, landscape, optimize_c, BoundReport, Criterion, Landscape, Residual, SearchBox,
    Stationarity, TuneOptions, TuneReport, DEFAULT_TUNE_NODES,
};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "LANEFOWLER_THREADS";

const DEFAULT_ORDER: usize = 4;
const DEFAULT_BUDGET: usize = 2000;
const DEFAULT_RESOLUTION: usize = 41;

#[derive(Debug, Parser)]
#[command(
    name = "lanefowler",
    version,
    about = "Homotopy-analysis solver for coupled singular Lane-Emden-Fowler boundary-value problems"
)]
pub struct Cli {
    /// Print progress to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve at fixed (c10, c20) and report residuals and errors.
    Solve(SolveArgs),
    /// Choose (c10, c20) by residual minimization and report convergence bounds.
    Tune(TuneArgs),
    /// Reproduce the reference tables of the built-in examples.
    Bench(BenchArgs),
    /// Residual objective over a (c10, c20) grid.
    Landscape(LandscapeArgs),
    /// List the built-in examples.
    Examples(ExamplesArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Built-in example, `N` or `N:variant` (see `examples`).
    #[arg(long, value_name = "N[:VARIANT]")]
    pub example: Option<String>,
    /// Problem file (TOML).
    #[arg(long, value_name = "FILE")]
    pub problem: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Output format; defaults to `table` on stdout and to the file extension
    /// (`json`, otherwise `csv`) with --output.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResidualArg {
    Integral,
    Differential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StationarityArg {
    Partial,
    Joint,
}

#[derive(Debug, Clone, Args)]
pub struct CriterionArgs {
    /// Defect whose mean square the tuner works with.
    #[arg(long, value_enum, default_value = "differential")]
    pub residual: ResidualArg,
    /// `partial` solves dE1/dc10 = dE2/dc20 = 0; `joint` minimizes E1 + E2.
    #[arg(long, value_enum, default_value = "partial")]
    pub stationarity: StationarityArg,
}

impl CriterionArgs {
    fn criterion(&self, nodes: usize) -> Criterion {
        Criterion {
            residual: match self.residual {
                ResidualArg::Integral => Residual::Integral,
                ResidualArg::Differential => Residual::Differential,
            },
            stationarity: match self.stationarity {
                StationarityArg::Partial => Stationarity::Partial,
                StationarityArg::Joint => Stationarity::Joint,
            },
            nodes,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Index n of the last series term [default: 4, or the file's solver.order].
    #[arg(long)]
    pub order: Option<usize>,
    /// Chebyshev degree of the grid [default: 64, or the file's solver.degree].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Convergence-control parameter c10; -1 gives the Adomian series.
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    pub c1: f64,
    /// Convergence-control parameter c20.
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    pub c2: f64,
    /// Equispaced nodes for the integral residual E [default: 101, or the file's solver.residual_nodes].
    #[arg(long)]
    pub nodes: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Index n of the last series term [default: 4, or the file's solver.order].
    #[arg(long)]
    pub order: Option<usize>,
    /// Chebyshev degree of the grid [default: 64, or the file's solver.degree].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Search box `a:b,c:d` for (c10, c20) [default: -1.5:-0.25,-1.5:-0.25, or the file's tuner ranges].
    #[arg(long, allow_hyphen_values = true, value_parser = parse_search)]
    pub search: Option<SearchBox>,
    /// Objective evaluations [default: 2000, or the file's tuner.budget].
    #[arg(long)]
    pub budget: Option<usize>,
    /// Equispaced nodes, endpoints included, for the tuner's objective.
    #[arg(long, default_value_t = DEFAULT_TUNE_NODES)]
    pub nodes: usize,
    #[command(flatten)]
    pub criterion: CriterionArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Every reference table plus the exactly solvable example.
    #[arg(long, conflicts_with = "example")]
    pub all: bool,
    /// Built-in example `N` or `N:variant`; repeatable.
    #[arg(long, value_name = "N[:VARIANT]", required_unless_present = "all")]
    pub example: Vec<String>,
    /// Chebyshev degree of the grid.
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    pub degree: usize,
    /// Search box `a:b,c:d` for the tuner.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_search, default_value = "-1.5:-0.25,-1.5:-0.25")]
    pub search: SearchBox,
    /// Objective evaluations of the tuner.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Equispaced nodes of the solver's integral residual.
    #[arg(long, default_value_t = DEFAULT_RESIDUAL_NODES)]
    pub nodes: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LandscapeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Index n of the last series term [default: 4, or the file's solver.order].
    #[arg(long)]
    pub order: Option<usize>,
    /// Chebyshev degree of the grid [default: 64, or the file's solver.degree].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Grid extent `a:b,c:d` [default: -1.5:-0.25,-1.5:-0.25, or the file's tuner ranges].
    #[arg(long, allow_hyphen_values = true, value_parser = parse_search)]
    pub search: Option<SearchBox>,
    /// Grid points per axis, at most 201.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// Equispaced nodes, endpoints included, for the objective.
    #[arg(long, default_value_t = DEFAULT_TUNE_NODES)]
    pub nodes: usize,
    /// Defect whose mean square is tabulated.
    #[arg(long, value_enum, default_value = "differential")]
    pub residual: ResidualArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExamplesArgs {
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `a:b,c:d` into a search box.
pub fn parse_search(s: &str) -> Result<SearchBox, String> {
    let range = |part: &str| -> Result<(f64, f64), String> {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got {part:?}"))?;
        let lo: f64 = a.trim().parse().map_err(|_| format!("bad number {a:?}"))?;
        let hi: f64 = b.trim().parse().map_err(|_| format!("bad number {b:?}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("range {part:?} must satisfy lo < hi"));
        }
        Ok((lo, hi))
    };
    let (first, second) = s
        .split_once(',')
        .ok_or_else(|| "expected a:b,c:d".to_string())?;
    Ok(SearchBox {
        c1: range(first)?,
        c2: range(second)?,
    })
}

/// Parses `N` or `N:variant`.
pub fn parse_example(s: &str) -> Result<(u32, Option<String>), String> {
    let (id, variant) = match s.split_once(':') {
        Some((a, b)) => (a, Some(b.to_string())),
        None => (s, None),
    };
    let id = id
        .trim()
        .parse()
        .map_err(|_| format!("example must be N or N:variant, got {s:?}"))?;
    Ok((id, variant))
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
    /// Output was written but a comparison failed.
    Failed,
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Run(e.to_string())
    }
}

/// A resolved problem source.
struct Source {
    label: String,
    problem: Problem,
    file: Option<ProblemFile>,
}

fn load_source(args: &SourceArgs) -> Result<Source, Failure> {
    match (&args.example, &args.problem) {
        (Some(e), None) => {
            let (id, variant) = parse_example(e).map_err(Failure::Usage)?;
            let b = builtin(id, variant.as_deref()).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(Source {
                label: format!("example {}:{}", b.id, b.variant),
                problem: b.problem,
                file: None,
            })
        }
        (None, Some(path)) => {
            let f = ProblemFile::load(path)?;
            Ok(Source {
                label: if f.name.is_empty() {
                    path.display().to_string()
                } else {
                    f.name.clone()
                },
                problem: f.problem.clone(),
                file: Some(f),
            })
        }
        _ => Err(Failure::Usage("give exactly one of --example and --problem".into())),
    }
}

impl Source {
    fn order(&self, flag: Option<usize>) -> usize {
        flag.or(self.file.as_ref().and_then(|f| f.solver.order))
            .unwrap_or(DEFAULT_ORDER)
    }

    fn degree(&self, flag: Option<usize>) -> usize {
        flag.or(self.file.as_ref().and_then(|f| f.solver.degree))
            .unwrap_or(DEFAULT_DEGREE)
    }

    fn residual_nodes(&self, flag: Option<usize>) -> usize {
        flag.or(self.file.as_ref().and_then(|f| f.solver.residual_nodes))
            .unwrap_or(DEFAULT_RESIDUAL_NODES)
    }

    fn search(&self, flag: Option<SearchBox>) -> SearchBox {
        flag.unwrap_or_else(|| match &self.file {
            Some(f) => f.tuner.search(SearchBox::default()),
            None => SearchBox::default(),
        })
    }

    fn budget(&self, flag: Option<usize>) -> usize {
        flag.or(self.file.as_ref().and_then(|f| f.tuner.budget))
            .unwrap_or(DEFAULT_BUDGET)
    }
}

fn resolve_format(out: &OutputArgs) -> Format {
    match (out.format, &out.output) {
        (Some(f), _) => f,
        (None, None) => Format::Table,
        (None, Some(path)) => match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        },
    }
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Run(format!("writing stdout: {e}")))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

fn progress(verbose: u8, msg: impl FnOnce() -> String) {
    if verbose > 0 {
        eprintln!("{}", msg());
    }
}

fn solve(args: &SolveArgs, verbose: u8) -> Result<(), Failure> {
    let src = load_source(&args.source)?;
    let order = src.order(args.order);
    let nodes = src.residual_nodes(args.nodes);
    if nodes < 1 {
        return Err(Failure::Usage("--nodes must be at least 1".into()));
    }
    let solver = HamSolver::new(&src.problem, src.degree(args.degree), &equispaced(nodes))?;
    progress(verbose, || format!("solving {} to order {order}", src.label));
    let sol = solver.solve(order, [args.c1, args.c2])?;
    let report = solve_report(&src.label, &solver, &sol, &report_points())?;
    let text = match resolve_format(&args.output) {
        Format::Csv => solve_csv(&report),
        Format::Json => to_json(&report),
        Format::Table => solve_table(&report),
    };
    emit(&args.output, &text)
}

#[derive(Serialize)]
struct TuneOutput<'a> {
    source: &'a str,
    tune: &'a TuneReport,
    bounds: &'a BoundReport,
}

fn tune_table(source: &str, r: &TuneReport, b: &BoundReport) -> String {
    let mut out = String::new();
    let c = &r.criterion;
    let _ = writeln!(
        out,
        "{source}  order {}  {:?} residual, {:?} stationarity, {} nodes",
        r.order, c.residual, c.stationarity, c.nodes
    );
    let _ = writeln!(out, "c10 = {:.6}  c20 = {:.6}", r.c_opt[0], r.c_opt[1]);
    let _ = writeln!(out, "joint minimizer: ({:.6}, {:.6})", r.c_joint[0], r.c_joint[1]);
    let _ = writeln!(
        out,
        "E1 = {}  E2 = {}  E = {}",
        num(r.residuals[0]),
        num(r.residuals[1]),
        num(r.objective)
    );
    let _ = writeln!(
        out,
        "dE/dc = ({}, {})  (dE1/dc10, dE2/dc20) = ({}, {})",
        num(r.gradient[0]),
        num(r.gradient[1]),
        num(r.partial_stationarity[0]),
        num(r.partial_stationarity[1])
    );
    let _ = writeln!(
        out,
        "converged: {}  re-centered: {}  evaluations: {}",
        r.converged, r.centered, r.evaluations
    );
    let _ = writeln!(
        out,
        "M = {}  L = {}  delta = {}  ({} {})",
        num(b.m),
        num(b.l),
        num(b.delta),
        num(b.delta_per_component[0]),
        num(b.delta_per_component[1])
    );
    if b.admissible {
        for (m, bound) in b.bound_per_order.iter().enumerate() {
            let _ = writeln!(out, "  bound on |y - phi_{}|: {}", m + 1, num(*bound));
        }
    } else {
        let _ = writeln!(out, "delta >= 1: no a-priori bound");
    }
    out
}

fn tune_csv(r: &TuneReport, b: &BoundReport) -> String {
    let mut out = String::from("c10,c20,E1,E2,E,converged,delta,admissible\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        num(r.c_opt[0]),
        num(r.c_opt[1]),
        num(r.residuals[0]),
        num(r.residuals[1]),
        num(r.objective),
        r.converged,
        num(b.delta),
        b.admissible
    );
    out
}

fn tune(args: &TuneArgs, verbose: u8) -> Result<(), Failure> {
    let src = load_source(&args.source)?;
    let order = src.order(args.order);
    let solver = HamSolver::new(&src.problem, src.degree(args.degree), &equispaced(DEFAULT_RESIDUAL_NODES))?;
    let mut opts = TuneOptions::new(order);
    opts.search = src.search(args.search);
    opts.budget = src.budget(args.budget);
    opts.criterion = args.criterion.criterion(args.nodes);
    progress(verbose, || format!("tuning {} at order {order}", src.label));
    let report = optimize_c(&solver, &opts)?;
    let bounds = convergence_report(&solver, report.c_opt, order, None)?;
    let text = match resolve_format(&args.output) {
        Format::Csv => tune_csv(&report, &bounds),
        Format::Json => to_json(&TuneOutput {
            source: &src.label,
            tune: &report,
            bounds: &bounds,
        }),
        Format::Table => tune_table(&src.label, &report, &bounds),
    };
    emit(&args.output, &text)
}

fn bench(args: &BenchArgs, verbose: u8) -> Result<(), Failure> {
    let mut targets: Vec<(u32, String)> = Vec::new();
    if args.all {
        targets.extend(BENCH_TARGETS.iter().map(|(id, v)| (*id, v.to_string())));
    } else {
        for e in &args.example {
            let (id, variant) = parse_example(e).map_err(Failure::Usage)?;
            let b = builtin(id, variant.as_deref()).map_err(|e| Failure::Usage(e.to_string()))?;
            targets.push((b.id, b.variant.to_string()));
        }
    }
    let opts = BenchOptions {
        degree: args.degree,
        residual_nodes: args.nodes,
        budget: args.budget,
        search: args.search,
    };
    let refs: Vec<(u32, &str)> = targets.iter().map(|(id, v)| (*id, v.as_str())).collect();
    progress(verbose, || format!("reproducing {} tables", refs.len()));
    let mut reports = Vec::new();
    for (r, (id, v)) in run_targets(&refs, &opts).into_iter().zip(&refs) {
        let r = r.map_err(|e| Failure::Run(format!("example {id}:{v}: {e}")))?;
        progress(verbose, || {
            format!("example {id}:{v}: {}", if r.passed { "PASS" } else { "FAIL" })
        });
        reports.push(r);
    }
    let text = match resolve_format(&args.output) {
        Format::Csv => bench_csv(&reports),
        Format::Json => to_json(&reports),
        Format::Table => {
            let mut out = String::new();
            for r in &reports {
                out.push_str(&bench_table(r));
                out.push('\n');
            }
            let passed = reports.iter().filter(|r| r.passed).count();
            let _ = writeln!(out, "{passed} of {} tables pass", reports.len());
            out
        }
    };
    emit(&args.output, &text)?;
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Failed)
    }
}

fn landscape_table(l: &Landscape) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:>10}", "c10\\c20");
    for v in &l.c2 {
        let _ = write!(out, " {v:>10.4}");
    }
    out.push('\n');
    for (i, u) in l.c1.iter().enumerate() {
        let _ = write!(out, "{u:>10.4}");
        for j in 0..l.c2.len() {
            match l.at(i, j) {
                Some(v) => {
                    let _ = write!(out, " {v:>10.3e}");
                }
                None => {
                    let _ = write!(out, " {:>10}", "nan");
                }
            }
        }
        out.push('\n');
    }
    if let Some((i, j, v)) = l.argmin() {
        let _ = writeln!(out, "smallest E = {} at ({}, {})", num(v), num(l.c1[i]), num(l.c2[j]));
    }
    out
}

fn landscape_cmd(args: &LandscapeArgs, verbose: u8) -> Result<(), Failure> {
    let src = load_source(&args.source)?;
    let order = src.order(args.order);
    let solver = HamSolver::new(&src.problem, src.degree(args.degree), &equispaced(DEFAULT_RESIDUAL_NODES))?;
    let criterion = Criterion {
        residual: match args.residual {
            ResidualArg::Integral => Residual::Integral,
            ResidualArg::Differential => Residual::Differential,
        },
        stationarity: Stationarity::Joint,
        nodes: args.nodes,
    };
    progress(verbose, || {
        format!("landscape of {} at {}x{}", src.label, args.resolution, args.resolution)
    });
    let l = landscape(
        &solver,
        order,
        src.search(args.search),
        (args.resolution, args.resolution),
        &criterion,
    )?;
    let text = match resolve_format(&args.output) {
        Format::Csv => landscape_csv(&l),
        Format::Json => to_json(&l),
        Format::Table => landscape_table(&l),
    };
    emit(&args.output, &text)
}

#[derive(Serialize)]
struct ExampleEntry {
    id: u32,
    variant: &'static str,
    order: usize,
    reference_table: bool,
    exact_solution: bool,
    description: &'static str,
}

fn examples(args: &ExamplesArgs) -> Result<(), Failure> {
    let entries: Vec<ExampleEntry> = catalog::all()
        .into_iter()
        .map(|(id, v)| {
            let b = builtin(id, Some(v)).expect("catalog variants exist");
            ExampleEntry {
                id,
                variant: b.variant,
                order: b.order,
                reference_table: b.reference.is_some(),
                exact_solution: b.problem.exact.iter().all(Option::is_some),
                description: b.description,
            }
        })
        .collect();
    let text = match resolve_format(&args.output) {
        Format::Json => to_json(&entries),
        Format::Csv => {
            let mut out = String::from("example,order,reference_table,exact_solution,description\n");
            for e in &entries {
                let _ = writeln!(
                    out,
                    "{}:{},{},{},{},\"{}\"",
                    e.id, e.variant, e.order, e.reference_table, e.exact_solution, e.description
                );
            }
            out
        }
        Format::Table => {
            let mut out = format!("{:<10} {:>5} {:>5} {:>5}  {}\n", "example", "order", "table", "exact", "description");
            let yes = |b: bool| if b { "yes" } else { "-" };
            for e in &entries {
                let _ = writeln!(
                    out,
                    "{:<10} {:>5} {:>5} {:>5}  {}",
                    format!("{}:{}", e.id, e.variant),
                    e.order,
                    yes(e.reference_table),
                    yes(e.exact_solution),
                    e.description
                );
            }
            out
        }
    };
    emit(&args.output, &text)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `argv` (program name first) and runs the subcommand; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Solve(a) => solve(a, cli.verbose),
        Command::Tune(a) => tune(a, cli.verbose),
        Command::Bench(a) => bench(a, cli.verbose),
        Command::Landscape(a) => landscape_cmd(a, cli.verbose),
        Command::Examples(a) => examples(a),
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Failed) => 1,
    }
}
