//! The `meanlab` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use meanlab_core::asymptotics::{
    lie_trotter_limit_study, qp_le_convergence_study, renyi_zero_limit_study, LimitStudyReport,
    MultiMean, RenyiHypothesis, StudyOptions,
};
use meanlab_core::multi::{MatrixTuple, SolverConfig, WeightVector};
use meanlab_core::order::{profile_relations, ToleranceProfile};
use meanlab_core::pair::{
    fidelity, inverse_geometric_mean, metric_geometric, spectral_geometric, wasserstein_mean,
};
use meanlab_core::sampling::{random_curves, random_tuple, random_weights, SamplerSpec};
use meanlab_core::HpdMatrix;
use serde::Serialize;
use serde_json::json;

use crate::conjecture::{conjecture_search_le_omega, replay, ConjectureConfig};
use crate::error::{ExitStatus, LabError, LabResult};
use crate::matfile::{read_hpd, MatrixFile};
use crate::suites::{run_verification_suite, SuiteConfig, SUITES};

#[derive(Debug, Parser)]
#[command(name = "meanlab", version, about = "Near-order laboratory for matrix means")]
pub struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a mean of matrix files.
    Mean(MeanArgs),
    /// Profile the order relations between two matrices.
    Order(OrderArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
    /// Run a limit study and write its grid as CSV.
    Limits(LimitsArgs),
    /// Search for counterexamples to LE ⪯ Ω.
    Conjecture(ConjectureArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MeanKind {
    Arithmetic,
    Harmonic,
    Quasi,
    LogEuclidean,
    Karcher,
    Renyi,
    Barycenter,
    Geometric,
    InverseGeometric,
    SpectralGeometric,
    Wasserstein,
    Fidelity,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Relative residual at which iterative solvers stop.
    #[arg(long, default_value_t = 1e-12)]
    solver_tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
}

impl SolverArgs {
    fn config(&self) -> LabResult<SolverConfig> {
        Ok(SolverConfig::new(self.solver_tol, self.max_iter)?)
    }
}

#[derive(Debug, Args)]
struct MeanArgs {
    #[arg(long, value_enum)]
    kind: MeanKind,
    /// Parameter of pair means and of the Rényi mean.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
    /// Exponent of the quasi-arithmetic mean.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Comma-separated weights; uniform when omitted.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Output matrix file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OrderArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "list")]
    suite: Option<String>,
    /// List the registered suites and exit.
    #[arg(long)]
    list: bool,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Dimension range `lo..hi` (inclusive).
    #[arg(long, default_value = "2..6", value_parser = parse_usize_range)]
    dims: (usize, usize),
    /// Spectrum range `lo..hi` of sampled matrices.
    #[arg(long, default_value = "0.1..10", value_parser = parse_f64_range)]
    spectrum: (f64, f64),
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Where failing instances are written; defaults to the report's directory.
    #[arg(long)]
    dump_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Study {
    LieTrotter,
    RenyiZero,
    QpLe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StudyMean {
    Arithmetic,
    Harmonic,
    Quasi,
    LogEuclidean,
    Karcher,
    Renyi,
    Barycenter,
}

#[derive(Debug, Args)]
struct LimitsArgs {
    #[arg(long, value_enum)]
    study: Study,
    /// Mean for the Lie-Trotter study.
    #[arg(long, value_enum, default_value = "arithmetic")]
    mean: StudyMean,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
    /// Positive grid, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Number of matrices or curves.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Spectrum range of sampled tuples; `0.05..1` satisfies the
    /// below-identity hypothesis of the Rényi study.
    #[arg(long, value_parser = parse_f64_range)]
    spectrum: Option<(f64, f64)>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Also evaluate the Lie-Trotter error at negative parameters.
    #[arg(long)]
    negative: bool,
    /// Use these matrix files as the tuple instead of sampling.
    files: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConjectureArgs {
    #[arg(long, default_value_t = 2000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "2..6", value_parser = parse_usize_range)]
    dims: (usize, usize),
    /// Tuple size range.
    #[arg(long, default_value = "2..8", value_parser = parse_usize_range)]
    n: (usize, usize),
    #[arg(long, default_value = "0.1..10", value_parser = parse_f64_range)]
    spectrum: (f64, f64),
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    dump_dir: Option<PathBuf>,
    /// Recompute the margin of a dumped instance and exit.
    #[arg(long, conflicts_with_all = ["trials", "seed"])]
    replay: Option<PathBuf>,
}

fn parse_range<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected `lo..hi`, got `{s}`"))?;
    let parse = |x: &str| x.trim().parse::<T>().map_err(|_| format!("invalid bound `{x}` in `{s}`"));
    Ok((parse(lo)?, parse(hi)?))
}

fn parse_usize_range(s: &str) -> Result<(usize, usize), String> {
    parse_range(s)
}

fn parse_f64_range(s: &str) -> Result<(f64, f64), String> {
    parse_range(s)
}

fn tolerance(psd_margin: f64) -> LabResult<ToleranceProfile> {
    Ok(ToleranceProfile::new(psd_margin, true)?)
}

fn emit(output: Option<&Path>, text: &str) -> LabResult<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| LabError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| LabError::io("<stdout>", e))
        }
    }
}

fn weights_for(weights: Option<Vec<f64>>, n: usize) -> LabResult<WeightVector> {
    match weights {
        None => Ok(WeightVector::uniform(n)?),
        Some(w) if w.len() == n => Ok(WeightVector::new(w)?),
        Some(w) => Err(LabError::Usage(format!("{} weights given for {n} matrices", w.len()))),
    }
}

fn required(value: Option<f64>, flag: &str, kind: &str) -> LabResult<f64> {
    value.ok_or_else(|| LabError::Usage(format!("--{flag} is required for {kind}")))
}

fn read_tuple(files: &[PathBuf]) -> LabResult<MatrixTuple> {
    let items = files.iter().map(|f| read_hpd(f)).collect::<LabResult<Vec<_>>>()?;
    MatrixTuple::new(items).map_err(|e| LabError::Usage(e.to_string()))
}

fn cmd_mean(args: MeanArgs) -> LabResult<ExitStatus> {
    let a = read_tuple(&args.files)?;
    let cfg = args.solver.config()?;
    let pair = |kind: &str| -> LabResult<(&HpdMatrix, &HpdMatrix)> {
        match a.items() {
            [x, y] => Ok((x, y)),
            _ => Err(LabError::Usage(format!("{kind} takes exactly two matrices"))),
        }
    };
    let t = args.t.unwrap_or(0.5);
    let result = match args.kind {
        MeanKind::Geometric => {
            let (x, y) = pair("geometric")?;
            metric_geometric(x, y, t)?
        }
        MeanKind::InverseGeometric => {
            let (x, y) = pair("inverse-geometric")?;
            inverse_geometric_mean(x, y)?
        }
        MeanKind::SpectralGeometric => {
            let (x, y) = pair("spectral-geometric")?;
            spectral_geometric(x, y, t)?
        }
        MeanKind::Wasserstein => {
            let (x, y) = pair("wasserstein")?;
            wasserstein_mean(x, y, t)?
        }
        MeanKind::Fidelity => {
            let (x, y) = pair("fidelity")?;
            fidelity(x, y)?
        }
        kind => {
            let w = weights_for(args.weights, a.len())?;
            let mean = match kind {
                MeanKind::Arithmetic => MultiMean::Arithmetic,
                MeanKind::Harmonic => MultiMean::Harmonic,
                MeanKind::Quasi => MultiMean::Quasi {
                    p: required(args.p, "p", "quasi")?,
                },
                MeanKind::LogEuclidean => MultiMean::LogEuclidean,
                MeanKind::Karcher => MultiMean::Karcher,
                MeanKind::Renyi => MultiMean::Renyi {
                    t: required(args.t, "t", "renyi")?,
                    z: required(args.z, "z", "renyi")?,
                },
                _ => MultiMean::Barycenter,
            };
            mean.evaluate(&w, &a, &cfg)?
        }
    };
    let label = format!("{:?}", args.kind).to_lowercase();
    let file = MatrixFile::from_hpd(&result, Some(&label));
    emit(args.output.as_deref(), &(file.to_json()? + "\n"))?;
    Ok(ExitStatus::Pass)
}

fn cmd_order(args: OrderArgs) -> LabResult<ExitStatus> {
    let a = read_hpd(&args.a)?;
    let b = read_hpd(&args.b)?;
    if a.dim() != b.dim() {
        return Err(LabError::Usage(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    let profile = profile_relations(&a, &b, &tolerance(args.tol)?)?;
    let violations = profile.chain_violations();
    let report = json!({ "profile": profile, "chain_violations": violations });
    emit(args.output.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    if violations.is_empty() {
        Ok(ExitStatus::Pass)
    } else {
        log::error!("relation chain violated: {violations:?}");
        Ok(ExitStatus::Numerical)
    }
}

fn dump_dir(explicit: Option<PathBuf>, output: Option<&Path>) -> PathBuf {
    explicit.unwrap_or_else(|| {
        output
            .and_then(Path::parent)
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    })
}

fn cmd_verify(args: VerifyArgs) -> LabResult<ExitStatus> {
    if args.list {
        let mut text = String::new();
        for s in &SUITES {
            text += &format!("{:<20} {}\n", s.name, s.theorem);
        }
        emit(None, &text)?;
        return Ok(ExitStatus::Pass);
    }
    let suite = args.suite.expect("clap requires --suite");
    let cfg = SuiteConfig::new(args.seed, args.trials, args.dims)?
        .with_spectrum_range(args.spectrum.0, args.spectrum.1)?
        .with_tolerance(args.tol)?;
    let cfg = SuiteConfig {
        solver: args.solver.config()?,
        ..cfg
    };
    let outcome = run_verification_suite(&suite, &cfg)?;
    if !outcome.instances.is_empty() {
        let dir = dump_dir(args.dump_dir, args.output.as_deref());
        for inst in &outcome.instances {
            let path = inst.dump(&dir)?;
            log::warn!("failing trial {} written to {}", inst.trial, path.display());
        }
    }
    emit(args.output.as_deref(), &(outcome.report.to_json()? + "\n"))?;
    for p in &outcome.report.body.properties {
        log::info!("{}: {} failures in {} trials", p.name, p.failures, p.trials);
    }
    Ok(outcome.report.exit_status())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    study: &'a str,
    parameter_name: &'a str,
    parameter: f64,
    distance: f64,
    negative_distance: Option<f64>,
    worst_margin: Option<f64>,
    all_hold: bool,
}

fn write_csv(report: &LimitStudyReport, output: Option<&Path>) -> LabResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        w.serialize(CsvRow {
            study: &report.study,
            parameter_name: &report.parameter_name,
            parameter: row.parameter,
            distance: row.distance,
            negative_distance: row.negative_distance,
            worst_margin: row
                .verdicts
                .iter()
                .map(|v| v.verdict.margin)
                .min_by(f64::total_cmp),
            all_hold: row.verdicts.iter().all(|v| v.verdict.holds),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Usage(e.to_string()))?;
    emit(output, &String::from_utf8_lossy(&bytes))
}

fn cmd_limits(args: LimitsArgs) -> LabResult<ExitStatus> {
    let opts = StudyOptions {
        solver: args.solver.config()?,
        tolerance: tolerance(args.tol)?,
        include_negative: args.negative,
    };
    let default_range = match args.study {
        Study::LieTrotter | Study::QpLe => (0.1, 10.0),
        Study::RenyiZero => (0.05, 1.0),
    };
    let (lo, hi) = args.spectrum.unwrap_or(default_range);
    let spec = SamplerSpec::new(args.seed, args.dim, (lo, hi), args.n)?;
    let tuple = || -> LabResult<(WeightVector, MatrixTuple)> {
        if args.files.is_empty() {
            Ok((random_weights(&spec, args.n)?, random_tuple(&spec, args.n)?))
        } else {
            let a = read_tuple(&args.files)?;
            Ok((weights_for(args.weights.clone(), a.len())?, a))
        }
    };
    let report = match args.study {
        Study::LieTrotter => {
            let grid = args.grid.clone().unwrap_or(vec![0.02, 0.01, 0.005, 0.0025]);
            let mean = match args.mean {
                StudyMean::Arithmetic => MultiMean::Arithmetic,
                StudyMean::Harmonic => MultiMean::Harmonic,
                StudyMean::Quasi => MultiMean::Quasi {
                    p: required(args.p, "p", "quasi")?,
                },
                StudyMean::LogEuclidean => MultiMean::LogEuclidean,
                StudyMean::Karcher => MultiMean::Karcher,
                StudyMean::Renyi => MultiMean::Renyi {
                    t: required(args.t, "t", "renyi")?,
                    z: required(args.z, "z", "renyi")?,
                },
                StudyMean::Barycenter => MultiMean::Barycenter,
            };
            let curves = random_curves(&spec, args.n, 0.5, 2.0)?;
            let w = weights_for(args.weights.clone(), args.n)?;
            lie_trotter_limit_study(&mean, &w, &curves, &grid, &opts)?
        }
        Study::RenyiZero => {
            let grid = args.grid.clone().unwrap_or(vec![0.2, 0.1, 0.05]);
            let (w, a) = tuple()?;
            let t = required(args.t, "t", "renyi-zero")?;
            let z = required(args.z, "z", "renyi-zero")?;
            renyi_zero_limit_study(t, z, &w, &a, &grid, RenyiHypothesis::detect(&a), &opts)?
        }
        Study::QpLe => {
            let grid = args.grid.clone().unwrap_or(vec![0.5, 0.25, 0.125, 0.0625]);
            let (w, a) = tuple()?;
            qp_le_convergence_study(&w, &a, &grid, &opts)?
        }
    };
    write_csv(&report, args.output.as_deref())?;
    match report.estimated_order {
        Some(order) => log::info!("{}: estimated order {order:.4}", report.study),
        None => log::info!("{}: errors at rounding floor", report.study),
    }
    Ok(if report.all_hold() {
        ExitStatus::Pass
    } else {
        ExitStatus::PropertyFailed
    })
}

fn cmd_conjecture(args: ConjectureArgs) -> LabResult<ExitStatus> {
    let tol = tolerance(args.tol)?;
    if let Some(path) = args.replay {
        let (inst, margin) = replay(&path, &tol)?;
        let recorded = inst.param("margin").ok();
        let text = serde_json::to_string_pretty(&json!({
            "stem": inst.stem,
            "margin": margin,
            "recorded_margin": recorded,
        }))?;
        emit(args.output.as_deref(), &(text + "\n"))?;
        return Ok(ExitStatus::Pass);
    }
    let cfg = ConjectureConfig {
        dims: args.dims,
        tuple_sizes: args.n,
        spectrum_range: args.spectrum,
        tolerance: tol,
        solver: args.solver.config()?,
        ..ConjectureConfig::new(args.seed, args.trials)?
    };
    let outcome = conjecture_search_le_omega(&cfg)?;
    let dir = dump_dir(args.dump_dir, args.output.as_deref());
    for inst in outcome.minimum.iter().chain(&outcome.negatives) {
        let path = inst.dump(&dir)?;
        log::info!("trial {} written to {}", inst.trial, path.display());
    }
    emit(args.output.as_deref(), &(outcome.report.to_json()? + "\n"))?;
    Ok(ExitStatus::Pass)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::Usage } else { ExitStatus::Pass };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    let result = match cli.command {
        Command::Mean(a) => cmd_mean(a),
        Command::Order(a) => cmd_order(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Limits(a) => cmd_limits(a),
        Command::Conjecture(a) => cmd_conjecture(a),
    };
    match result {
        Ok(status) => status,
        Err(e) => {
            eprintln!("meanlab: {e}");
            e.exit_status()
        }
    }
}
