use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zfire_core::analytics::{
    continuation_product, m1_infinite_mass, m1_marginal_pmf, m1_pmf, p_kappa1_bounds, p_kappa1_quadrature,
};
use zfire_core::engine::{simulate, EngineError};
use zfire_core::experiments::{coupling_test, run_ensemble, EnsembleSpec, ExperimentError, ExperimentKind, Runner, StatResult};
use zfire_core::io::{render_svg, summary_csv, write_csv_records, write_jsonl, IoError, ResultRecord, RunConfigFile, SvgWindow};
use zfire_core::DeltaSpec;

#[derive(Parser)]
#[command(name = "zfire", version, about = "Forest-fire process with spread delays and burn times")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one replication and write its record.
    Simulate(Common),
    /// Run the ensemble described in the configuration file.
    Ensemble {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        replications: Option<u64>,
        /// Exit with status 3 when the ensemble statistic fails its test.
        #[arg(long)]
        check: bool,
    },
    /// Evaluate closed-form quantities and print them.
    Analytic(AnalyticArgs),
    /// Compare the sheared process after the infinite fire with the zero-delay process.
    Couple(CoupleArgs),
    /// Draw one run as an SVG figure.
    Render {
        #[command(flatten)]
        common: Common,
        /// Number of sites shown, starting at the origin.
        #[arg(long, default_value_t = 30)]
        sites: u64,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; the ZFIRE_OUT environment variable takes precedence.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Run seed for `simulate` and `render`, master seed for `ensemble`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnalyticKind {
    Bounds,
    Quadrature,
    Approx,
    M1,
    Continuation,
}

#[derive(Args)]
struct AnalyticArgs {
    #[arg(long)]
    kind: AnalyticKind,
    /// Constant spread delay.
    #[arg(long)]
    a: Option<f64>,
    /// Start time of the first fire for `m1`; omitted means averaged over Exp(1).
    #[arg(long)]
    nu: Option<f64>,
    /// Largest `k` tabulated by `m1`.
    #[arg(long, default_value_t = 10)]
    k: u64,
    /// Delay scale of the `c / x` family for `continuation`.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    x: u64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct CoupleArgs {
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 600)]
    replications: u64,
    #[arg(long, default_value_t = 20.0)]
    observe_for: f64,
    #[arg(long, default_value_t = 30)]
    window_sites: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    check: bool,
}

enum Failure {
    Config(String),
    Runtime(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
            Failure::Check(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) | Failure::Check(m) => m,
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Config(_) => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Engine(inner) => inner.into(),
            ExperimentError::Config(_) | ExperimentError::EmptyEnsemble => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Parse(_) | IoError::Schema { .. } | IoError::EmptyWindow(_) | IoError::MissingTimelines => {
                Failure::Config(e.to_string())
            }
            IoError::Csv(_) | IoError::Io(_) => Failure::Runtime(e.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<RunConfigFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let file = RunConfigFile::parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    file.model.validate()?;
    Ok(file)
}

fn out_dir(flag: &Path) -> Result<PathBuf, Failure> {
    let dir = std::env::var_os("ZFIRE_OUT").map(PathBuf::from).unwrap_or_else(|| flag.to_path_buf());
    fs::create_dir_all(&dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, Failure> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn write_records(dir: &Path, stem: &str, format: Format, records: &[ResultRecord]) -> Result<(), Failure> {
    match format {
        Format::Jsonl => write_jsonl(create(&dir.join(format!("{stem}.jsonl")))?, records)?,
        Format::Csv => write_csv_records(create(&dir.join(format!("{stem}.csv")))?, records)?,
    }
    Ok(())
}

fn pretty(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("results serialise");
    s.push('\n');
    s
}

fn cmd_simulate(c: &Common) -> Result<(), Failure> {
    let mut file = load(&c.config)?;
    if let Some(seed) = c.seed {
        file.model.seed = seed;
    }
    let run = simulate(&file.model)?;
    let dir = out_dir(&c.out)?;
    write_records(&dir, "run", c.format, &[ResultRecord::new(0, &run)])
}

/// `Some(passed)` for experiment kinds with a pass/fail criterion.
fn acceptance(spec: &EnsembleSpec, r: &StatResult) -> Result<Option<bool>, Failure> {
    const ALPHA: f64 = 0.01;
    let passed = match spec.kind {
        ExperimentKind::KappaEstimate => {
            let a = spec.base.exact_delay().ok_or_else(|| Failure::Config("kappa check needs a constant delay".into()))?;
            let q = p_kappa1_quadrature(a, 1e-8).map_err(|e| Failure::Config(e.to_string()))?;
            Some(r.covers(q))
        }
        ExperimentKind::StopRate => Some(r.covers(spec.base.theta.laplace_at_one())),
        ExperimentKind::JumpLaw | ExperimentKind::CouplingTest { .. } => Some(r.p_value.is_some_and(|p| p > ALPHA)),
        ExperimentKind::BurnRatio { .. } => Some(r.estimate.is_some_and(|f| f >= 0.95)),
        ExperimentKind::InfiniteFireExistence { .. } => Some(r.estimate.is_some_and(|f| f > 0.9)),
        ExperimentKind::DichotomyCompare => None,
    };
    Ok(passed)
}

fn cmd_ensemble(c: &Common, replications: Option<u64>, check: bool) -> Result<(), Failure> {
    let file = load(&c.config)?;
    let mut spec = file
        .ensemble_spec()
        .ok_or_else(|| Failure::Config(format!("{}: no `ensemble` section", c.config.display())))?;
    if let Some(n) = replications {
        spec.replications = n;
    }
    if let Some(seed) = c.seed {
        spec.master_seed = seed;
    }
    if c.parallelism.is_some() {
        spec.parallelism = c.parallelism;
    }
    let outcome = run_ensemble(&spec)?;
    let dir = out_dir(&c.out)?;
    let records: Vec<ResultRecord> = outcome.runs.iter().map(|(i, run)| ResultRecord::new(*i, run)).collect();
    write_records(&dir, "records", c.format, &records)?;
    write_text(&dir.join("stat.json"), &pretty(serde_json::json!(outcome.result)))?;
    write_text(&dir.join("summary.csv"), &summary_csv(&outcome.result)?)?;
    if !outcome.failures.is_empty() {
        let lines: String = outcome.failures.iter().map(|f| serde_json::to_string(f).expect("serialise") + "\n").collect();
        write_text(&dir.join("failures.jsonl"), &lines)?;
        eprintln!("{} replications failed; see failures.jsonl", outcome.failures.len());
    }
    if check {
        match acceptance(&spec, &outcome.result)? {
            Some(true) => {}
            Some(false) => return Err(Failure::Check(format!("{} failed its acceptance test", outcome.result.name))),
            None => return Err(Failure::Config("this experiment kind has no acceptance test".into())),
        }
    }
    Ok(())
}

fn analytic_table(args: &AnalyticArgs) -> Result<Vec<(String, f64)>, Failure> {
    let need_a = || args.a.ok_or_else(|| Failure::Config("--a is required for this kind".into()));
    let domain = |e: zfire_core::analytics::AnalyticsError| Failure::Config(e.to_string());
    let mut rows = Vec::new();
    match args.kind {
        AnalyticKind::Bounds | AnalyticKind::Approx => {
            let b = p_kappa1_bounds(need_a()?).map_err(domain)?;
            rows.push(("a".into(), b.a));
            rows.push(("mu".into(), b.mu));
            if args.kind == AnalyticKind::Bounds {
                rows.push(("lower".into(), b.lower));
                rows.push(("upper".into(), b.upper));
            } else {
                rows.push(("approx".into(), b.approx));
            }
        }
        AnalyticKind::Quadrature => {
            let a = need_a()?;
            rows.push(("a".into(), a));
            rows.push(("p_kappa1".into(), p_kappa1_quadrature(a, args.tol.min(1e-3)).map_err(domain)?));
        }
        AnalyticKind::M1 => {
            let a = need_a()?;
            for k in 0..=args.k {
                let p = match args.nu {
                    Some(nu) => m1_pmf(nu, a, k),
                    None => m1_marginal_pmf(a, k, args.tol).map_err(domain)?,
                };
                rows.push((format!("p_m1_{k}"), p));
            }
            let inf = match args.nu {
                Some(nu) => m1_infinite_mass(nu, a, args.tol),
                None => p_kappa1_quadrature(a, args.tol.min(1e-3)).map_err(domain)?,
            };
            rows.push(("p_m1_inf".into(), inf));
        }
        AnalyticKind::Continuation => {
            let spec = match (args.c, args.a) {
                (Some(c), None) => DeltaSpec::c_over_x(c),
                (None, Some(a)) => DeltaSpec::constant(a),
                _ => return Err(Failure::Config("give exactly one of --c and --a".into())),
            };
            let b = continuation_product(args.t, args.x, &spec, args.tol).map_err(domain)?;
            rows.push(("lower".into(), b.lower));
            rows.push(("upper".into(), b.upper));
            rows.push(("value".into(), b.value()));
        }
    }
    Ok(rows)
}

fn cmd_analytic(args: &AnalyticArgs) -> Result<(), Failure> {
    let rows = analytic_table(args)?;
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<width$}  {v:.10}");
    }
    Ok(())
}

fn cmd_couple(args: &CoupleArgs) -> Result<(), Failure> {
    let runner = Runner { master_seed: args.seed, parallelism: args.parallelism };
    let report = coupling_test(args.a, args.replications, args.observe_for, args.window_sites, &runner)?;
    let dir = out_dir(&args.out)?;
    let results = [&report.inter_burn, &report.clusters, &report.baseline_exponential];
    write_text(&dir.join("coupling.json"), &pretty(serde_json::json!(results)))?;
    if args.check {
        for r in results {
            if !r.p_value.is_some_and(|p| p > 0.01) {
                return Err(Failure::Check(format!("{} rejected at level 0.01", r.name)));
            }
        }
    }
    Ok(())
}

fn cmd_render(c: &Common, sites: u64, t0: Option<f64>, t1: Option<f64>) -> Result<(), Failure> {
    let mut file = load(&c.config)?;
    if let Some(seed) = c.seed {
        file.model.seed = seed;
    }
    file.model.record_timelines = true;
    let run = simulate(&file.model)?;
    let mut window = SvgWindow::whole(&run, sites);
    window.t0 = t0.unwrap_or(window.t0);
    window.t1 = t1.unwrap_or(window.t1);
    let svg = render_svg(&run, window)?;
    let dir = out_dir(&c.out)?;
    write_text(&dir.join("run.svg"), &svg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(c) => cmd_simulate(c),
        Command::Ensemble { common, replications, check } => cmd_ensemble(common, *replications, *check),
        Command::Analytic(args) => cmd_analytic(args),
        Command::Couple(args) => cmd_couple(args),
        Command::Render { common, sites, t0, t1 } => cmd_render(common, *sites, *t0, *t1),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("zfire: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
