//! Command-line front end: oracle, encode, solve, experiment, sweep, and
//! export-circuit subcommands over the library pipeline.
//!
//! Instances come from `--instance <path>` or are generated with
//! `--cities N` plus range/seed flags; exactly one source must be given.
//! All outputs are deterministic for identical argv and seeds, except the
//! runtime columns of experiment and sweep tables. Exit codes: 0 success,
//! 1 validation or I/O failure, 2 resource-cap violation.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::encodings::{DiagonalProblem, EncodingKind, PenaltyVariant};
use crate::error::{Error, Result};
use crate::experiments::{
    build_problem, run_experiment, sweep_layers, write_reports_csv, write_sweep_csv,
    write_trials_jsonl, ExperimentConfig,
};
use crate::instances::{
    brute_force_optimum, load_instance, random_instance, tour_cost, CostMatrix, PenaltyConfig,
    Tour, BRUTE_FORCE_MAX_CITIES,
};
use crate::optimize::{minimize, InitStrategy, OptimizerConfig};
use crate::qaoa::{run_ansatz, QaoaParams};

/// Relative `--out` paths are joined under this directory when it is set.
const OUT_DIR_ENV: &str = "TSP_QAOA_OUT_DIR";

/// Diagonals up to this length are inlined in `encode` output without
/// `--full`.
const INLINE_DIAGONAL_CAP: usize = 4096;

#[derive(Parser)]
#[command(
    name = "tsp-qaoa",
    version,
    about = "Encode traveling-salesman instances as diagonal cost operators and solve them with a simulated phase/mixer ansatz"
)]
struct Cli {
    /// Cap the worker thread count (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Brute-force the optimal tour of an instance.
    Oracle {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Build an encoding and report its register and diagonal.
    Encode {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        encoding: EncodingArgs,
        /// Inline the full diagonal regardless of size (memory-capped).
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Optimize angles, sample the final state, classify the candidate.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        encoding: EncodingArgs,
        #[command(flatten)]
        opt: OptArgs,
        /// Samples drawn from the final state.
        #[arg(long, default_value_t = 10_000)]
        shots: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run repeated trials and aggregate success/feasibility metrics.
    Experiment {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        encoding: EncodingArgs,
        #[command(flatten)]
        opt: OptArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 10_000)]
        shots: usize,
        /// Report format for --out/stdout.
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
        /// Also write the per-trial JSONL log here.
        #[arg(long)]
        trials_out: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Optimize once per ansatz depth and tabulate cost and wall time.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        encoding: EncodingArgs,
        /// First depth of the sweep (inclusive).
        #[arg(long, default_value_t = 1)]
        layers_from: usize,
        /// Last depth of the sweep (inclusive).
        #[arg(long, default_value_t = 4)]
        layers_to: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Emit a JSON circuit description for an external transpiler.
    ExportCircuit {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        encoding: EncodingArgs,
        #[command(flatten)]
        opt: OptArgs,
        /// Phase angles, comma-separated; optimized when omitted.
        #[arg(long, value_delimiter = ',')]
        gammas: Vec<f64>,
        /// Mixer angles, comma-separated; optimized when omitted.
        #[arg(long, value_delimiter = ',')]
        betas: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct SourceArgs {
    /// Instance JSON file ({"n": .., "costs": [[..]]}).
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Generate a random instance with this many cities instead.
    #[arg(long)]
    cities: Option<usize>,
    /// Lower leg-cost bound for generated instances.
    #[arg(long, default_value_t = 1.0, requires = "cities")]
    cost_lo: f64,
    /// Upper leg-cost bound for generated instances.
    #[arg(long, default_value_t = 10.0, requires = "cities")]
    cost_hi: f64,
    /// Generate directed legs (cost(i,j) independent of cost(j,i)).
    #[arg(long, requires = "cities")]
    asymmetric: bool,
    /// Seed for instance generation.
    #[arg(long, default_value_t = 0, requires = "cities")]
    instance_seed: u64,
}

/// Where an instance came from, echoed into circuit exports so the
/// diagonal can be reconstructed without serializing it.
#[derive(Serialize)]
#[serde(untagged)]
enum InstanceRef {
    Path {
        path: String,
    },
    Generated {
        cities: usize,
        cost_lo: f64,
        cost_hi: f64,
        symmetric: bool,
        instance_seed: u64,
    },
}

impl SourceArgs {
    fn load(&self) -> Result<(CostMatrix, InstanceRef)> {
        match (&self.instance, self.cities) {
            (Some(path), None) => Ok((
                load_instance(path)?,
                InstanceRef::Path {
                    path: path.display().to_string(),
                },
            )),
            (None, Some(n)) => Ok((
                random_instance(n, self.cost_lo, self.cost_hi, !self.asymmetric, self.instance_seed)?,
                InstanceRef::Generated {
                    cities: n,
                    cost_lo: self.cost_lo,
                    cost_hi: self.cost_hi,
                    symmetric: !self.asymmetric,
                    instance_seed: self.instance_seed,
                },
            )),
            (Some(_), Some(_)) => Err(Error::InvalidConfig(
                "--instance and --cities are mutually exclusive".into(),
            )),
            (None, None) => Err(Error::InvalidConfig(
                "one of --instance or --cities is required".into(),
            )),
        }
    }
}

#[derive(Args)]
struct EncodingArgs {
    /// Encoding scheme.
    #[arg(long, value_enum)]
    encoding: EncodingKind,
    /// Penalty variant for the slot-register encoding.
    #[arg(long, value_enum, default_value_t = PenaltyVariant::Legal)]
    p_variant: PenaltyVariant,
    /// Override the placeholder/edge penalty d.
    #[arg(long)]
    penalty_d: Option<f64>,
    /// Override the constraint penalty gamma.
    #[arg(long)]
    penalty_gamma: Option<f64>,
}

impl EncodingArgs {
    fn penalties(&self, matrix: &CostMatrix) -> Option<PenaltyConfig> {
        if self.penalty_d.is_none() && self.penalty_gamma.is_none() {
            return None;
        }
        let base = crate::instances::default_penalties(matrix);
        Some(PenaltyConfig {
            d: self.penalty_d.unwrap_or(base.d),
            gamma_pen: self.penalty_gamma.unwrap_or(base.gamma_pen),
        })
    }

    fn build(&self, matrix: &CostMatrix) -> Result<DiagonalProblem> {
        build_problem(matrix, self.encoding, self.p_variant, self.penalties(matrix))
    }
}

#[derive(Args)]
struct OptArgs {
    /// Ansatz depth p.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Master seed for optimization and sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BudgetArgs {
    /// Local-search evaluation budget per restart (default 500 per layer).
    #[arg(long)]
    max_evaluations: Option<usize>,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 0.3)]
    initial_step: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = InitStrategy::Random)]
    init_strategy: InitStrategy,
}

impl BudgetArgs {
    fn resolve(&self, depth: usize, seed: u64) -> OptimizerConfig {
        let mut cfg = OptimizerConfig::for_depth(depth);
        if let Some(evals) = self.max_evaluations {
            cfg.max_evaluations = evals;
        }
        cfg.restarts = self.restarts;
        cfg.initial_step = self.initial_step;
        cfg.convergence_tol = self.tol;
        cfg.init_strategy = self.init_strategy;
        cfg.seed = seed;
        cfg
    }
}

#[derive(Args)]
struct OutArgs {
    /// Write here instead of stdout; relative paths land under
    /// $TSP_QAOA_OUT_DIR when it is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn emit(&self, content: &str) -> Result<()> {
        match &self.out {
            None => {
                print!("{content}");
                Ok(())
            }
            Some(path) => {
                let path = resolve_out_path(path);
                if let Some(parent) = path.parent() {
                    if !parent.as_os_str().is_empty() {
                        std::fs::create_dir_all(parent)?;
                    }
                }
                std::fs::write(path, content)?;
                Ok(())
            }
        }
    }
}

fn resolve_out_path(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => Path::new(&dir).join(path),
        None => path.to_path_buf(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

fn pretty_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

#[derive(Serialize)]
struct OracleOutput {
    n: usize,
    optimal_tour: Tour,
    optimal_cost: f64,
}

#[derive(Serialize)]
struct EncodeOutput {
    encoding: EncodingKind,
    n: usize,
    num_qubits: usize,
    dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<PenaltyVariant>,
    penalty: PenaltyConfig,
    feasible_count: usize,
    argmin_index: usize,
    argmin_cost: f64,
    /// Present when the dimension is small or --full is passed.
    diagonal: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct SolveOutput {
    encoding: EncodingKind,
    n: usize,
    num_qubits: usize,
    layers: usize,
    shots: usize,
    seed: u64,
    best_params: QaoaParams,
    best_value: f64,
    evaluations_used: usize,
    candidate_index: usize,
    candidate_tour: Option<Tour>,
    candidate_cost: Option<f64>,
    is_feasible: bool,
    /// Oracle comparison; absent past the brute-force size cap.
    optimal_cost: Option<f64>,
    is_optimal: Option<bool>,
}

#[derive(Serialize)]
struct LayerAngles {
    gamma: f64,
    beta: f64,
}

#[derive(Serialize)]
struct CircuitEncodingMeta {
    kind: EncodingKind,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<PenaltyVariant>,
    penalty: PenaltyConfig,
}

#[derive(Serialize)]
struct CircuitExport {
    num_qubits: usize,
    layers: Vec<LayerAngles>,
    encoding: CircuitEncodingMeta,
    instance: InstanceRef,
}

/// Parses argv and runs one subcommand; returns the process exit code.
pub fn main() -> i32 {
    init_logger();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Oracle { source, out } => {
            let (matrix, _) = source.load()?;
            let (optimal_tour, optimal_cost) = brute_force_optimum(&matrix)?;
            out.emit(&pretty_json(&OracleOutput {
                n: matrix.n(),
                optimal_tour,
                optimal_cost,
            })?)
        }
        Command::Encode {
            source,
            encoding,
            full,
            out,
        } => {
            let (matrix, _) = source.load()?;
            let problem = encoding.build(&matrix)?;
            let diagonal = if full || problem.dimension() <= INLINE_DIAGONAL_CAP {
                Some(problem.materialize()?)
            } else {
                None
            };
            let (argmin_index, argmin_cost) = problem.argmin()?;
            out.emit(&pretty_json(&EncodeOutput {
                encoding: problem.kind(),
                n: matrix.n(),
                num_qubits: problem.num_qubits(),
                dimension: problem.dimension(),
                variant: problem.edge_variant(),
                penalty: problem.penalties(),
                feasible_count: problem.count_feasible()?,
                argmin_index,
                argmin_cost,
                diagonal,
            })?)
        }
        Command::Solve {
            source,
            encoding,
            opt,
            shots,
            out,
        } => {
            let (matrix, _) = source.load()?;
            let problem = encoding.build(&matrix)?;
            let mut seeds = ChaCha8Rng::seed_from_u64(opt.seed);
            let opt_seed: u64 = seeds.gen();
            let sample_seed: u64 = seeds.gen();

            let (best_params, best_value, evaluations_used) = if opt.layers == 0 {
                let uniform = run_ansatz(&problem, &QaoaParams::zeros(0))?;
                (QaoaParams::zeros(0), uniform.expectation(&problem)?, 0)
            } else {
                let r = minimize(&problem, opt.layers, &opt.budget.resolve(opt.layers, opt_seed))?;
                (r.best_params, r.best_value, r.evaluations_used)
            };
            let state = run_ansatz(&problem, &best_params)?;
            let samples = state.sample(shots, sample_seed)?;
            let candidate_index = samples.most_probable()?;
            let candidate_tour = problem.decode(candidate_index);
            let candidate_cost = match &candidate_tour {
                Some(tour) => Some(tour_cost(&matrix, tour)?),
                None => None,
            };
            let optimal_cost = if matrix.n() <= BRUTE_FORCE_MAX_CITIES {
                Some(brute_force_optimum(&matrix)?.1)
            } else {
                None
            };
            out.emit(&pretty_json(&SolveOutput {
                encoding: problem.kind(),
                n: matrix.n(),
                num_qubits: problem.num_qubits(),
                layers: opt.layers,
                shots,
                seed: opt.seed,
                best_params,
                best_value,
                evaluations_used,
                candidate_index,
                is_feasible: candidate_tour.is_some(),
                candidate_tour,
                candidate_cost,
                optimal_cost,
                is_optimal: optimal_cost.map(|oc| candidate_cost == Some(oc)),
            })?)
        }
        Command::Experiment {
            source,
            encoding,
            opt,
            trials,
            shots,
            format,
            trials_out,
            out,
        } => {
            let (matrix, _) = source.load()?;
            let config = ExperimentConfig {
                encoding: encoding.encoding,
                variant: encoding.p_variant,
                depth: opt.layers,
                trials,
                shots,
                opt: opt.budget.resolve(opt.layers, 0),
                master_seed: opt.seed,
                penalties: encoding.penalties(&matrix),
            };
            let (report, outcomes) = run_experiment(&matrix, &config)?;
            if let Some(path) = trials_out {
                let mut buf = Vec::new();
                write_trials_jsonl(&mut buf, &outcomes)?;
                OutArgs { out: Some(path) }.emit(&String::from_utf8(buf).expect("JSONL is UTF-8"))?;
            }
            let content = match format {
                ReportFormat::Csv => {
                    let mut buf = Vec::new();
                    write_reports_csv(&mut buf, &[report])?;
                    String::from_utf8(buf).expect("CSV is UTF-8")
                }
                ReportFormat::Json => pretty_json(&report)?,
            };
            out.emit(&content)
        }
        Command::Sweep {
            source,
            encoding,
            layers_from,
            layers_to,
            budget,
            seed,
            format,
            out,
        } => {
            if layers_from == 0 || layers_to < layers_from {
                return Err(Error::InvalidConfig(format!(
                    "sweep range {layers_from}..={layers_to} is empty or starts at zero"
                )));
            }
            let (matrix, _) = source.load()?;
            let schedule: Vec<(usize, OptimizerConfig)> = (layers_from..=layers_to)
                .map(|p| (p, budget.resolve(p, seed)))
                .collect();
            let rows = sweep_layers(
                &matrix,
                encoding.encoding,
                encoding.p_variant,
                encoding.penalties(&matrix),
                &schedule,
            )?;
            let content = match format {
                ReportFormat::Csv => {
                    let mut buf = Vec::new();
                    write_sweep_csv(&mut buf, &rows)?;
                    String::from_utf8(buf).expect("CSV is UTF-8")
                }
                ReportFormat::Json => pretty_json(&rows)?,
            };
            out.emit(&content)
        }
        Command::ExportCircuit {
            source,
            encoding,
            opt,
            gammas,
            betas,
            out,
        } => {
            let (matrix, instance_ref) = source.load()?;
            let problem = encoding.build(&matrix)?;
            let params = match (gammas.is_empty(), betas.is_empty()) {
                (true, true) => {
                    if opt.layers == 0 {
                        QaoaParams::zeros(0)
                    } else {
                        let cfg = opt.budget.resolve(opt.layers, opt.seed);
                        minimize(&problem, opt.layers, &cfg)?.best_params
                    }
                }
                (false, false) => {
                    if gammas.len() != opt.layers || betas.len() != opt.layers {
                        return Err(Error::InvalidConfig(format!(
                            "expected {} angles per list, got {} gammas and {} betas",
                            opt.layers,
                            gammas.len(),
                            betas.len()
                        )));
                    }
                    QaoaParams::new(gammas, betas)?
                }
                _ => {
                    return Err(Error::InvalidConfig(
                        "--gammas and --betas must be given together".into(),
                    ))
                }
            };
            let layers = params
                .layers()
                .map(|(gamma, beta)| LayerAngles { gamma, beta })
                .collect();
            out.emit(&pretty_json(&CircuitExport {
                num_qubits: problem.num_qubits(),
                layers,
                encoding: CircuitEncodingMeta {
                    kind: problem.kind(),
                    n: matrix.n(),
                    variant: problem.edge_variant(),
                    penalty: problem.penalties(),
                },
                instance: instance_ref,
            })?)
        }
    }
}

/// Stderr logger so simulator warnings (large registers) surface.
struct StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, metadata: &log::Metadata) -> bool {
        metadata.level() <= log::Level::Warn
    }

    fn log(&self, record: &log::Record) {
        if self.enabled(record.metadata()) {
            eprintln!("{}: {}", record.level().to_string().to_lowercase(), record.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn init_logger() {
    if log::set_logger(&LOGGER).is_ok() {
        log::set_max_level(log::LevelFilter::Warn);
    }
}
