use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use swvar::dependence::{dependence_factor, dependence_report, LinearProcessSpec, DEFAULT_GRID};
use swvar::experiments::{run_and_emit, ExperimentConfig, ExperimentKind, OutputFormat};
use swvar::io::{read_trajectory_csv, write_matrix_csv, write_trajectory_csv};
use swvar::linalg::{from_rows, to_rows};
use swvar::penalties::PenaltySpec;
use swvar::pipeline::{fit_var, LambdaRule};
use swvar::simulate::{simulate_var, NoiseSpec, SimOptions, DEFAULT_BURN_IN};
use swvar::solvers::SolverConfig;
use swvar::{Error, Matrix, VarModel};

#[derive(Parser)]
#[command(name = "swvar", version, about = "Heavy-tailed VAR simulation, estimation and experiments")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a VAR(d) path with Subweibull noise.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Fit a regularized VAR(d) to a trajectory CSV.
    Fit {
        #[arg(long)]
        config: PathBuf,
        /// Trajectory CSV (header t,z1..zp).
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Dependence factor and stability bounds of a VAR(d).
    Dependence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run one of the simulation studies.
    Experiment {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `base_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `output_path` from the config; stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Figsw,
    LsTables,
    Concentration,
}

/// Lag matrices given as lists of rows, `B_1` first.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    coeffs: Vec<Vec<Vec<f64>>>,
    gamma2: f64,
    #[serde(default = "one")]
    scale: f64,
    horizon: usize,
    #[serde(default = "default_burn_in")]
    burn_in: usize,
    #[serde(default)]
    allow_unstable: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FitConfig {
    #[serde(default = "one_usize")]
    d: usize,
    #[serde(default = "l1")]
    penalty: PenaltySpec,
    lambda: LambdaRule,
    #[serde(default)]
    solver: SolverConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DependenceConfig {
    coeffs: Vec<Vec<Vec<f64>>>,
    /// Noise covariance rows; identity when absent.
    #[serde(default)]
    sigma: Option<Vec<Vec<f64>>>,
    /// Frequency grid for the spectral bounds; 0 skips them.
    #[serde(default = "default_grid")]
    grid: usize,
}

#[derive(Serialize)]
struct TrajectoryJson {
    rows: Vec<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn l1() -> PenaltySpec {
    PenaltySpec::L1
}
fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}
fn default_grid() -> usize {
    DEFAULT_GRID
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> swvar::Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn model_from(coeffs: &[Vec<Vec<f64>>]) -> swvar::Result<VarModel> {
    VarModel::new(coeffs.iter().map(|m| from_rows(m)).collect::<swvar::Result<Vec<Matrix>>>()?)
}

fn sink(path: Option<&Path>) -> swvar::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, mut out: Box<dyn Write>) -> swvar::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> swvar::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate {
            config,
            seed,
            out,
            format,
        } => {
            let cfg: SimulateConfig = read_json(&config)?;
            let model = model_from(&cfg.coeffs)?;
            let noise = NoiseSpec::new(cfg.gamma2, cfg.scale, model.p())?;
            let opts = SimOptions {
                burn_in: cfg.burn_in,
                allow_unstable: cfg.allow_unstable,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let traj = simulate_var(&model, &noise, cfg.horizon, &opts, &mut rng)?;
            let w = sink(out.as_deref())?;
            match format {
                Format::Csv => write_trajectory_csv(&traj, w),
                Format::Json => write_json(&TrajectoryJson { rows: to_rows(traj.data()) }, w),
            }
        }
        Command::Fit {
            config,
            data,
            out,
            format,
        } => {
            let cfg: FitConfig = read_json(&config)?;
            let traj = read_trajectory_csv(File::open(&data)?)?;
            let fit = fit_var(&traj, cfg.d, &cfg.penalty, &cfg.lambda, &cfg.solver)?;
            let w = sink(out.as_deref())?;
            match format {
                Format::Csv => write_matrix_csv(&fit.coeffs, w),
                Format::Json => write_json(&fit.without_trace(), w),
            }
        }
        Command::Dependence {
            config,
            out,
            format,
        } => {
            let cfg: DependenceConfig = read_json(&config)?;
            let model = model_from(&cfg.coeffs)?;
            let sigma = match &cfg.sigma {
                Some(rows) => from_rows(rows)?,
                None => Matrix::identity(model.p(), model.p()),
            };
            let spec = LinearProcessSpec::from_var(&model, &sigma)?;
            let report = if cfg.grid == 0 {
                dependence_factor(&spec)?
            } else {
                dependence_report(&spec, cfg.grid)?
            };
            let mut w = sink(out.as_deref())?;
            match format {
                Format::Json => write_json(&report, w),
                Format::Csv => {
                    let mut csv = csv::Writer::from_writer(&mut w);
                    csv.serialize(&report)?;
                    csv.flush()?;
                    drop(csv);
                    w.flush()?;
                    Ok(())
                }
            }
        }
        Command::Experiment {
            kind,
            config,
            seed,
            out,
            format,
        } => {
            let expected = match kind {
                Kind::Figsw => ExperimentKind::Figsw,
                Kind::LsTables => ExperimentKind::LsTables,
                Kind::Concentration => ExperimentKind::Concentration,
            };
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
                None => ExperimentConfig::new(expected),
            };
            if cfg.experiment != expected {
                return Err(Error::Config(format!(
                    "config describes {:?}, but the {:?} subcommand was given",
                    cfg.experiment, expected
                )));
            }
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if out.is_some() {
                cfg.output_path = out;
            }
            let mut w = sink(cfg.output_path.as_deref())?;
            run_and_emit(&cfg, format.into(), &mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Csv(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("swvar: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
