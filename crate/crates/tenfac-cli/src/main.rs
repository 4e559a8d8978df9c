//! `tenfac` — reproducible tensor-factor-model experiments from the shell.
//!
//! Subcommands: `simulate` (seeded dataset generation), `estimate` (fit
//! loadings and factors), `rank` (factor-number selection), `benchmark`
//! (Monte Carlo study) and `rolling` (rolling validation).
//!
//! Exit codes: 0 on success, 2 for usage or validation problems, 1 for
//! runtime failures (I/O, resource limits).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tenfac::error::Error;
use tenfac::estimate::{self, FitOptions, Method};
use tenfac::eval::{self, BenchmarkConfig};
use tenfac::io;
use tenfac::rank::{ie_er, pe_er_opts, RankEstimate};
use tenfac::sim::{self, DgpConfig};
use tenfac::tensor::TensorSeries;

#[derive(Parser)]
#[command(
    name = "tenfac",
    about = "Tensor factor models: simulation, estimation, rank selection and benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic dataset and write it to disk.
    Simulate(SimulateArgs),
    /// Fit loadings and factors to a tensor series.
    Estimate(EstimateArgs),
    /// Select the per-mode factor numbers.
    Rank(RankArgs),
    /// Run a Monte Carlo benchmark over seeded replications.
    Benchmark(BenchmarkArgs),
    /// Rolling validation on a tensor series.
    Rolling(RollingArgs),
}

#[derive(Args)]
struct DgpArgs {
    /// Named preset (setting-a .. setting-f).
    #[arg(long)]
    preset: Option<String>,
    /// Mode sizes, e.g. 10,10,10 (overrides the preset).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Per-mode ranks, e.g. 3,3,3.
    #[arg(long, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,
    /// Factor AR(1) coefficient, |phi| < 1.
    #[arg(long)]
    phi: Option<f64>,
    /// Noise AR(1) coefficient, |psi| < 1.
    #[arg(long)]
    psi: Option<f64>,
}

impl DgpArgs {
    fn resolve(&self, t_len: usize, seed: u64, replication: u64) -> Result<DgpConfig, Error> {
        let preset = match &self.preset {
            Some(name) => Some(sim::preset(name).ok_or_else(|| {
                Error::Domain(format!(
                    "unknown preset '{name}' (expected one of {})",
                    sim::preset_names().join(", ")
                ))
            })?),
            None => None,
        };
        let dims = self
            .dims
            .clone()
            .or_else(|| preset.as_ref().map(|p| p.dims.clone()))
            .ok_or_else(|| Error::Domain("either --preset or --dims is required".into()))?;
        let ranks = self
            .ranks
            .clone()
            .or_else(|| preset.as_ref().map(|p| p.ranks.clone()))
            .ok_or_else(|| Error::Domain("either --preset or --ranks is required".into()))?;
        let phi = self.phi.or(preset.as_ref().map(|p| p.phi)).unwrap_or(0.1);
        let psi = self.psi.or(preset.as_ref().map(|p| p.psi)).unwrap_or(0.1);
        Ok(DgpConfig {
            dims,
            ranks,
            t_len,
            phi,
            psi,
            seed,
            replication_id: replication,
        })
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    dgp: DgpArgs,
    /// Number of time slices.
    #[arg(long = "T")]
    t_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replication id within the seed stream.
    #[arg(long, default_value_t = 0)]
    rep: u64,
    /// Output path for the observations.
    #[arg(short, long)]
    output: PathBuf,
    /// Output format for the observations.
    #[arg(long, default_value = "tsr", value_parser = ["tsr", "csv"])]
    format: String,
    /// Also write ground truth: <prefix>.loading_<k>.csv, <prefix>.factors.tsr,
    /// <prefix>.common.tsr.
    #[arg(long)]
    truth_prefix: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Input series (TSR1, or CSV with --shape).
    #[arg(long)]
    input: PathBuf,
    /// Slice shape when reading CSV input.
    #[arg(long, value_delimiter = ',')]
    shape: Option<Vec<usize>>,
    /// Per-mode ranks.
    #[arg(long, value_delimiter = ',', conflicts_with = "auto_rank")]
    ranks: Option<Vec<usize>>,
    /// Select ranks automatically before fitting.
    #[arg(long, requires = "r_max")]
    auto_rank: bool,
    /// Candidate bound for automatic rank selection.
    #[arg(long)]
    r_max: Option<usize>,
    /// Selector used by --auto-rank.
    #[arg(long, default_value = "pe-er", value_parser = ["pe-er", "ie-er"])]
    rank_method: String,
    /// Estimator: ie, pe, pe-star or iterate:S.
    #[arg(long, default_value = "pe")]
    estimator: String,
    /// Subtract per-entry time means before fitting.
    #[arg(long)]
    center: bool,
    /// Divide by per-entry standard deviations before fitting.
    #[arg(long)]
    scale: bool,
    /// Refresh loadings from the projected covariance in rank sweeps.
    #[arg(long)]
    update_from_projected: bool,
    /// Prefix for output files (<prefix>.loading_<k>.csv, <prefix>.factors.tsr,
    /// <prefix>.report.json).
    #[arg(short, long)]
    output_prefix: PathBuf,
    /// Ground-truth prefix written by simulate --truth-prefix.
    #[arg(long)]
    truth_prefix: Option<PathBuf>,
    /// Report loading-space distances against the truth sidecar.
    #[arg(long, requires = "truth_prefix")]
    report_distance: bool,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',')]
    shape: Option<Vec<usize>>,
    #[arg(long, default_value = "pe-er", value_parser = ["pe-er", "ie-er"])]
    method: String,
    #[arg(long)]
    r_max: usize,
    /// Sweep limit for the projected selector.
    #[arg(long, default_value_t = 10)]
    max_sweeps: usize,
    /// Override the automatic penalty constant.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    update_from_projected: bool,
    /// Output JSON path (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    dgp: DgpArgs,
    /// Sample sizes, e.g. 20 or 16,64,256 (defaults to the preset's first).
    #[arg(long = "T", value_delimiter = ',')]
    t_len: Option<Vec<usize>>,
    /// Estimators to compare.
    #[arg(long, value_delimiter = ',', default_value = "ie,pe")]
    estimators: Vec<String>,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores); TENFAC_THREADS overrides.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Also run rank selection with this bound and report recovery rates.
    #[arg(long)]
    r_max: Option<usize>,
    /// Replace observations by the pure common component.
    #[arg(long)]
    noiseless: bool,
    /// Output CSV path (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also print the aligned text table.
    #[arg(long)]
    table: bool,
    /// Write log-log rate data for the first listed estimator, mode 1.
    #[arg(long)]
    rate_csv: Option<PathBuf>,
}

#[derive(Args)]
struct RollingArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',')]
    shape: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    ranks: Vec<usize>,
    /// Training window length in periods.
    #[arg(long)]
    window: usize,
    /// Slices per period (fold size).
    #[arg(long)]
    period: usize,
    #[arg(long, default_value = "pe")]
    estimator: String,
    /// Output CSV path (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct SimulateEcho<'a> {
    shape: &'a [usize],
    ranks: &'a [usize],
    t_len: usize,
    phi: f64,
    psi: f64,
    seed: u64,
    replication: u64,
    output: String,
}

#[derive(Serialize)]
struct FitReport {
    method: String,
    shape: Vec<usize>,
    t_len: usize,
    ranks: Vec<usize>,
    auto_rank: Option<RankEstimate>,
    iterations_used: usize,
    eigenvalues: Vec<Vec<f64>>,
    center: bool,
    scale: bool,
    distances: Option<Vec<f64>>,
    elapsed_ms: f64,
    outputs: Vec<String>,
}

#[derive(Serialize)]
struct RankReport {
    method: String,
    r_max: usize,
    ranks: Vec<usize>,
    iterations: usize,
    converged: bool,
    ratio_traces: Vec<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) | Error::Parse(_) => ExitCode::from(2),
                Error::Resource(_) | Error::Io(_) => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::Rolling(args) => cmd_rolling(args),
    }
}

fn read_series(path: &Path, shape: Option<&[usize]>) -> Result<TensorSeries, Error> {
    let is_csv = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false);
    if is_csv {
        let shape = shape
            .ok_or_else(|| Error::Domain("--shape is required when reading a CSV series".into()))?;
        io::read_series_csv(path, shape)
    } else {
        io::read_series_tsr1(path)
    }
}

fn parse_estimators(tags: &[String]) -> Result<Vec<Method>, Error> {
    tags.iter().map(|t| t.parse()).collect()
}

fn thread_count(flag: usize) -> usize {
    match std::env::var("TENFAC_THREADS") {
        Ok(v) => v.parse().unwrap_or(flag),
        Err(_) => flag,
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Error> {
    let cfg = args.dgp.resolve(args.t_len, args.seed, args.rep)?;
    let ds = sim::generate(&cfg)?;
    match args.format.as_str() {
        "csv" => io::write_series_csv(&args.output, &ds.x)?,
        _ => io::write_series_tsr1(&args.output, &ds.x)?,
    }
    if let Some(prefix) = &args.truth_prefix {
        write_truth(prefix, &ds)?;
    }
    let echo = SimulateEcho {
        shape: &cfg.dims,
        ranks: &cfg.ranks,
        t_len: cfg.t_len,
        phi: cfg.phi,
        psi: cfg.psi,
        seed: cfg.seed,
        replication: cfg.replication_id,
        output: args.output.display().to_string(),
    };
    println!("{}", serde_json::to_string(&echo).expect("serializable"));
    Ok(())
}

fn write_truth(prefix: &Path, ds: &tenfac::SimulatedDataset) -> Result<(), Error> {
    for (k, a) in ds.loadings.mats().iter().enumerate() {
        io::write_matrix_csv(sidecar(prefix, &format!("loading_{}.csv", k + 1)), a)?;
    }
    io::write_series_tsr1(sidecar(prefix, "factors.tsr"), &ds.factors)?;
    io::write_series_tsr1(sidecar(prefix, "common.tsr"), &ds.common)?;
    Ok(())
}

fn sidecar(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), Error> {
    let started = Instant::now();
    let x = read_series(&args.input, args.shape.as_deref())?;
    let method: Method = args.estimator.parse()?;

    let mut auto = None;
    let ranks: Vec<usize> = if args.auto_rank {
        let r_max = args.r_max.expect("clap enforces --r-max");
        let est = match args.rank_method.as_str() {
            "ie-er" => ie_er(&x, r_max, None)?,
            _ => pe_er_opts(&x, r_max, 10, None, args.update_from_projected)?,
        };
        let ranks = est.ranks.clone();
        auto = Some(est);
        ranks
    } else {
        args.ranks
            .clone()
            .ok_or_else(|| Error::Domain("either --ranks or --auto-rank is required".into()))?
    };

    let opts = FitOptions {
        center: args.center,
        scale: args.scale,
        ..FitOptions::default()
    };
    let fit = estimate::fit(&x, &ranks, method, &opts)?;

    let mut outputs = Vec::new();
    for (k, a) in fit.loadings.mats().iter().enumerate() {
        let path = sidecar(&args.output_prefix, &format!("loading_{}.csv", k + 1));
        io::write_matrix_csv(&path, a)?;
        outputs.push(path.display().to_string());
    }
    let factors_path = sidecar(&args.output_prefix, "factors.tsr");
    io::write_series_tsr1(&factors_path, &fit.factors)?;
    outputs.push(factors_path.display().to_string());

    let distances = if args.report_distance {
        let prefix = args.truth_prefix.as_ref().expect("clap enforces prefix");
        let mut ds = Vec::new();
        for k in 0..fit.loadings.order() {
            let truth = io::read_matrix_csv(sidecar(prefix, &format!("loading_{}.csv", k + 1)))?;
            ds.push(eval::loading_distance(fit.loadings.mat(k), &truth)?);
        }
        Some(ds)
    } else {
        None
    };

    let report = FitReport {
        method: method.tag(),
        shape: x.shape().to_vec(),
        t_len: x.len(),
        ranks,
        auto_rank: auto,
        iterations_used: fit.iterations_used,
        eigenvalues: fit.eigenvalues.clone(),
        center: args.center,
        scale: args.scale,
        distances,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        outputs,
    };
    let report_path = sidecar(&args.output_prefix, "report.json");
    std::fs::write(
        &report_path,
        serde_json::to_string_pretty(&report).expect("serializable"),
    )?;
    println!("{}", report_path.display());
    Ok(())
}

fn cmd_rank(args: RankArgs) -> Result<(), Error> {
    let x = read_series(&args.input, args.shape.as_deref())?;
    let est = match args.method.as_str() {
        "ie-er" => ie_er(&x, args.r_max, args.c)?,
        _ => pe_er_opts(
            &x,
            args.r_max,
            args.max_sweeps,
            args.c,
            args.update_from_projected,
        )?,
    };
    let report = RankReport {
        method: args.method.clone(),
        r_max: args.r_max,
        ranks: est.ranks.clone(),
        iterations: est.iterations,
        converged: est.converged,
        ratio_traces: est.ratio_traces.clone(),
    };
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    match &args.output {
        Some(path) => std::fs::write(path, json)?,
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<(), Error> {
    let estimators = parse_estimators(&args.estimators)?;
    let preset_t = args
        .dgp
        .preset
        .as_deref()
        .and_then(sim::preset)
        .map(|p| vec![p.t_values[0]]);
    let t_values = args
        .t_len
        .clone()
        .or(preset_t)
        .ok_or_else(|| Error::Domain("--T is required without a preset".into()))?;
    let label = args.dgp.preset.clone().unwrap_or_else(|| "custom".into());

    let mut all_rows = Vec::new();
    let mut first_cfg: Option<BenchmarkConfig> = None;
    for &t in &t_values {
        let dgp = args.dgp.resolve(t, args.seed, 0)?;
        dgp.validate()?;
        let mut cfg = BenchmarkConfig::new(
            label.clone(),
            dgp.dims,
            dgp.ranks,
            t,
            dgp.phi,
            dgp.psi,
            estimators.clone(),
            args.reps,
            args.seed,
        );
        cfg.threads = thread_count(args.threads);
        cfg.rank_r_max = args.r_max;
        cfg.noiseless = args.noiseless;
        if first_cfg.is_none() {
            first_cfg = Some(cfg.clone());
        }
        let report = eval::run_benchmark(&cfg)?;
        if args.table {
            eprint!("{}", report.to_table());
        }
        all_rows.extend(report.rows);
    }

    let report = tenfac::BenchmarkReport {
        rows: all_rows,
        replications: args.reps,
        failures: 0,
        wall_clock_secs: 0.0,
    };
    let csv = report.to_csv();
    match &args.output {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }

    if let Some(rate_path) = &args.rate_csv {
        let base = first_cfg.expect("at least one T");
        let points = eval::rate_study(&base, &t_values, estimators[0], 0)?;
        std::fs::write(rate_path, eval::rate_csv(&points))?;
    }
    Ok(())
}

fn cmd_rolling(args: RollingArgs) -> Result<(), Error> {
    let x = read_series(&args.input, args.shape.as_deref())?;
    let method: Method = args.estimator.parse()?;
    let folds = eval::rolling_validate(&x, &args.ranks, args.window, args.period, method)?;
    let csv = eval::rolling_csv(&folds);
    match &args.output {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
