use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use siou::output::{plan_record, write_json, write_sample_csv, write_sheet_csv};
use siou::sheet::{equivalent_kernel, simulate_sheet};
use siou::simulate::simulate;
use siou::verify::{all_passed, run_deterministic_suite, run_mc_suite, CheckReport, McConfig, Moments};
use siou::{Corner, Increment, Matrix, Plan, RngSeed};

mod config;

use config::{parse_coords, parse_corner_list, KernelConfig, RunConfig};

#[derive(Parser)]
#[command(name = "siou", version, about = "Set-indexed Ornstein-Uhlenbeck processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Default)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corners as `x1,x2;y1,y2;...`.
    #[arg(long)]
    corners: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    stream: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    /// CSV output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON output path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Covariance matrices and transition parameters on a corner family.
    Kernel(RunArgs),
    /// Signed C-frontier of `[0,a]` minus the union of `[0,b_i]`.
    Frontier {
        #[arg(long)]
        a: String,
        /// Corners as `x1,x2;y1,y2;...`.
        #[arg(long, default_value = "")]
        b: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sequential C-Markov sampling over a corner family.
    Sample(RunArgs),
    /// Brownian-sheet integral on a grid.
    Sheet(RunArgs),
    /// Deterministic and Monte Carlo checks.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Replicates of the Monte Carlo sampler checks.
        #[arg(long)]
        replicates: Option<usize>,
        /// Replicates of the Monte Carlo sheet checks.
        #[arg(long)]
        sheet_replicates: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Suite {
    Deterministic,
    Mc,
    All,
}

enum Failure {
    /// Unreadable or invalid configuration.
    Config(String),
    /// Error raised while computing.
    Numerical(String),
    ChecksFailed,
}

impl Failure {
    fn numerical(e: impl std::fmt::Display) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::ChecksFailed) => ExitCode::from(1),
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SIOU_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SIOU_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Kernel(args) => kernel(args),
        Command::Frontier { a, b, json } => frontier(&a, &b, json.as_deref()),
        Command::Sample(args) => sample(args),
        Command::Sheet(args) => sheet(args),
        Command::Verify {
            suite,
            seed,
            stream,
            json,
            replicates,
            sheet_replicates,
        } => {
            let mut mc = McConfig::default();
            if let Some(n) = replicates {
                mc.replicates = n;
            }
            if let Some(n) = sheet_replicates {
                mc.sheet_replicates = n;
            }
            verify(suite, RngSeed::new(seed, stream), mc, json.as_deref())
        }
    }
}

fn resolve(args: &RunArgs) -> Result<RunConfig, String> {
    let mut cfg = config::load(args.config.as_deref())?;
    if let Some(s) = &args.corners {
        cfg.corners = parse_corner_list(s)?;
    }
    match (args.lambda, args.sigma, cfg.kernel.as_mut()) {
        (None, None, _) => {}
        (l, s, Some(k)) => {
            k.lambda = l.unwrap_or(k.lambda);
            k.sigma = s.unwrap_or(k.sigma);
        }
        (Some(lambda), Some(sigma), None) => cfg.kernel = Some(KernelConfig { lambda, sigma }),
        _ => return Err("--lambda and --sigma must be given together when the config has no kernel".into()),
    }
    if args.seed.is_some() || args.stream.is_some() {
        let base = cfg.seed.unwrap_or_default();
        cfg.seed = Some(RngSeed::new(
            args.seed.unwrap_or(base.seed),
            args.stream.unwrap_or(base.stream),
        ));
    }
    if args.replicates.is_some() {
        cfg.replicates = args.replicates;
    }
    if args.out.is_some() {
        cfg.output.csv = args.out.clone();
    }
    if args.json.is_some() {
        cfg.output.json = args.json.clone();
    }
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Numerical(format!("cannot create {}: {e}", path.display())))
}

fn emit_json<C: Serialize, R: Serialize>(path: Option<&Path>, config: &C, results: &[R]) -> Result<(), Failure> {
    match path {
        Some(p) => write_json(create(p)?, config, results),
        None => write_json(io::stdout().lock(), config, results),
    }
    .map_err(Failure::numerical)
}

#[derive(Serialize)]
struct KernelResult {
    corners: Vec<Corner>,
    cov_stationary: Matrix,
    cov_dirac: Matrix,
    plan: siou::output::PlanRecord<f64>,
}

fn kernel(args: RunArgs) -> Result<(), Failure> {
    let mut cfg = resolve(&args).map_err(Failure::Config)?;
    cfg.resolve_dimension().map_err(Failure::Config)?;
    let corners = cfg.corner_list().map_err(Failure::Config)?;
    let params = cfg.kernel_params().map_err(Failure::Config)?;
    let n = corners.len();
    let result = KernelResult {
        cov_stationary: Matrix::symmetric_from_fn(n, |i, j| params.cov_stationary(&corners[i], &corners[j])),
        cov_dirac: Matrix::symmetric_from_fn(n, |i, j| params.cov_dirac(&corners[i], &corners[j])),
        plan: Plan::new(&corners)
            .and_then(|p| plan_record(&p, &params))
            .map_err(Failure::numerical)?,
        corners,
    };
    emit_json(cfg.output.json.as_deref(), &cfg, &[result])
}

#[derive(Serialize)]
struct FrontierConfig {
    a: Vec<f64>,
    b: Vec<Vec<f64>>,
}

fn frontier(a: &str, b: &str, json: Option<&Path>) -> Result<(), Failure> {
    let cfg = FrontierConfig {
        a: parse_coords(a).map_err(Failure::Config)?,
        b: parse_corner_list(b).map_err(Failure::Config)?,
    };
    let a = Corner::from_f64(&cfg.a).map_err(|e| Failure::Config(e.to_string()))?;
    let b = cfg
        .b
        .iter()
        .map(|c| Corner::from_f64(c))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let inc = Increment::new(a, &b).map_err(|e| Failure::Config(e.to_string()))?;
    let f = inc.frontier().map_err(Failure::numerical)?;
    emit_json(json, &cfg, f.entries())
}

fn sample(args: RunArgs) -> Result<(), Failure> {
    let mut cfg = resolve(&args).map_err(Failure::Config)?;
    cfg.resolve_dimension().map_err(Failure::Config)?;
    let corners = cfg.corner_list().map_err(Failure::Config)?;
    let params = cfg.kernel_params().map_err(Failure::Config)?;
    let initial = cfg.initial_law().map_err(Failure::Config)?;
    let replicates = cfg.replicate_count().map_err(Failure::Config)?;
    let seed = cfg.rng_seed().map_err(Failure::Config)?;

    let plan = Plan::new(&corners).map_err(Failure::numerical)?;
    let path = simulate(&plan, &params, &initial, replicates, seed).map_err(Failure::numerical)?;
    match &cfg.output.csv {
        Some(p) => write_sample_csv(&path, create(p)?),
        None => write_sample_csv(&path, io::stdout().lock()),
    }
    .map_err(Failure::numerical)?;
    if let Some(p) = &cfg.output.json {
        let record = plan_record(&plan, &params).map_err(Failure::numerical)?;
        write_json(create(p)?, &cfg, &[record]).map_err(Failure::numerical)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CovarianceRow {
    s: Corner,
    t: Corner,
    empirical: f64,
    theory: f64,
    standard_error: f64,
}

fn sheet(args: RunArgs) -> Result<(), Failure> {
    let cfg = resolve(&args).map_err(Failure::Config)?;
    let grid = cfg.grid.clone().ok_or_else(|| Failure::Config("grid is not set".into()))?;
    grid.validate().map_err(|e| Failure::Config(e.to_string()))?;
    let sc = cfg.sheet.clone().ok_or_else(|| Failure::Config("sheet section is not set".into()))?;
    let replicates = cfg.replicate_count().map_err(Failure::Config)?;
    let seed = cfg.rng_seed().map_err(Failure::Config)?;
    let points = sc
        .points
        .iter()
        .map(|p| Corner::from_f64(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Config(e.to_string()))?;
    if points.is_empty() {
        return Err(Failure::Config("sheet.points is empty".into()));
    }
    let k = equivalent_kernel(&sc.alpha, sc.sigma).map_err(|e| Failure::Config(e.to_string()))?;

    let values = simulate_sheet(&grid, &sc.alpha, sc.sigma, sc.mode, &points, replicates, seed)
        .map_err(Failure::numerical)?;
    match &cfg.output.csv {
        Some(p) => write_sheet_csv(&points, &values, create(p)?),
        None => write_sheet_csv(&points, &values, io::stdout().lock()),
    }
    .map_err(Failure::numerical)?;
    if let Some(p) = &cfg.output.json {
        let emp = Moments::compute(&values).map_err(Failure::numerical)?;
        let mut rows = Vec::new();
        for i in 0..points.len() {
            for j in i..points.len() {
                let theory = match sc.mode {
                    siou::sheet::SheetMode::Mpou { .. } => k.cov_dirac(&points[i], &points[j]),
                    siou::sheet::SheetMode::Stationary => k.cov_stationary(&points[i], &points[j]),
                };
                rows.push(CovarianceRow {
                    s: points[i].clone(),
                    t: points[j].clone(),
                    empirical: emp.cov[i][j],
                    theory,
                    standard_error: emp.cov_se(i, j),
                });
            }
        }
        write_json(create(p)?, &cfg, &rows).map_err(Failure::numerical)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyConfig {
    suite: Suite,
    seed: RngSeed,
    mc: Option<McConfig>,
}

fn verify(suite: Suite, seed: RngSeed, mc: McConfig, json: Option<&Path>) -> Result<(), Failure> {
    let mut reports: Vec<CheckReport> = Vec::new();
    if suite != Suite::Mc {
        reports.extend(run_deterministic_suite(seed).map_err(Failure::numerical)?);
    }
    if suite != Suite::Deterministic {
        reports.extend(run_mc_suite(seed, mc).map_err(Failure::numerical)?);
    }
    let mut out = io::stdout().lock();
    for r in &reports {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{tag} {} statistic={:e} tolerance={:e}", r.name, r.statistic, r.tolerance);
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    let _ = writeln!(out, "{passed}/{} checks passed", reports.len());
    if let Some(p) = json {
        let cfg = VerifyConfig {
            suite,
            seed,
            mc: (suite != Suite::Deterministic).then_some(mc),
        };
        write_json(create(p)?, &cfg, &reports).map_err(Failure::numerical)?;
    }
    if all_passed(&reports) {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}
