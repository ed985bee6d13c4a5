//! Trial orchestration and metric reporting.
//!
//! A trial is one full pipeline run: optimize the angles, prepare the final
//! state, sample it, take the most probable index as the candidate, and
//! classify the candidate against the brute-force optimum. Experiments run
//! many trials with seeds derived from one master seed and aggregate them
//! into success-rate and feasibility percentages; sweeps run one
//! optimization per ansatz depth and record cost and wall time.
//!
//! Wall time covers encoding construction through classification. Instance
//! generation and the brute-force oracle stay outside every timed span.

use std::io::{BufRead, Write};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encodings::{
    build_edge, build_node, build_sre, DiagonalProblem, EncodingKind, PenaltyVariant,
};
use crate::error::{Error, Result};
use crate::instances::{brute_force_optimum, default_penalties, CostMatrix, PenaltyConfig, Tour};
use crate::optimize::{minimize, OptimizerConfig};
use crate::qaoa::{run_ansatz, QaoaParams};

/// One pipeline run classified against the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    /// Basis index of the most probable sampled state.
    pub candidate_index: usize,
    /// Decoded tour, present exactly when the candidate is feasible.
    pub candidate_tour: Option<Tour>,
    pub candidate_cost: Option<f64>,
    pub is_feasible: bool,
    /// Exact cost equality with the brute-force optimum.
    pub is_optimal: bool,
    /// Final optimized expectation (the uniform-state expectation at
    /// depth 0, where no optimization runs).
    pub opt_value_reached: f64,
    pub wall_time_s: f64,
    pub seed: u64,
}

/// Aggregate of one experiment's trials. Field order matches the CSV
/// column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub encoding: EncodingKind,
    pub n: usize,
    pub qubits: usize,
    pub layers: usize,
    pub trials: usize,
    pub shots: usize,
    pub sr_pct: f64,
    pub feas_pct: f64,
    /// Mean and best candidate cost over feasible trials; absent when no
    /// trial was feasible.
    pub mean_cost: Option<f64>,
    pub best_cost: Option<f64>,
    pub optimal_cost: f64,
    pub mean_runtime_s: f64,
    pub master_seed: u64,
}

/// Everything an experiment needs besides the instance itself.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub encoding: EncodingKind,
    pub variant: PenaltyVariant,
    pub depth: usize,
    pub trials: usize,
    pub shots: usize,
    pub opt: OptimizerConfig,
    pub master_seed: u64,
    /// Penalty override; instance defaults when absent.
    pub penalties: Option<PenaltyConfig>,
}

impl ExperimentConfig {
    pub fn new(encoding: EncodingKind, depth: usize, trials: usize, shots: usize) -> Self {
        ExperimentConfig {
            encoding,
            variant: PenaltyVariant::Legal,
            depth,
            trials,
            shots,
            opt: OptimizerConfig::for_depth(depth),
            master_seed: 0,
            penalties: None,
        }
    }
}

/// Builds the chosen encoding for an instance. The variant only matters
/// for the slot register.
pub fn build_problem(
    matrix: &CostMatrix,
    kind: EncodingKind,
    variant: PenaltyVariant,
    penalties: Option<PenaltyConfig>,
) -> Result<DiagonalProblem> {
    let pen = penalties.unwrap_or_else(|| default_penalties(matrix));
    match kind {
        EncodingKind::Node => build_node(matrix, pen),
        EncodingKind::Edge => build_edge(matrix, pen, variant),
        EncodingKind::Sre => build_sre(matrix, pen),
    }
}

/// Optimize, prepare, sample, classify. The caller owns the clock.
fn trial_pipeline(
    problem: &DiagonalProblem,
    depth: usize,
    opt: &OptimizerConfig,
    shots: usize,
    optimal_cost: f64,
    seed: u64,
) -> Result<(TrialOutcome, Instant)> {
    let started = Instant::now();
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let opt_seed: u64 = seeds.gen();
    let sample_seed: u64 = seeds.gen();

    let (params, opt_value) = if depth == 0 {
        let uniform = run_ansatz(problem, &QaoaParams::zeros(0))?;
        (QaoaParams::zeros(0), uniform.expectation(problem)?)
    } else {
        let opt = OptimizerConfig {
            seed: opt_seed,
            ..*opt
        };
        let r = minimize(problem, depth, &opt)?;
        (r.best_params, r.best_value)
    };

    let state = run_ansatz(problem, &params)?;
    let samples = state.sample(shots, sample_seed)?;
    let candidate_index = samples.most_probable()?;
    let candidate_tour = problem.decode(candidate_index);
    let candidate_cost = match &candidate_tour {
        Some(tour) => Some(crate::instances::tour_cost(problem.matrix(), tour)?),
        None => None,
    };
    let is_feasible = candidate_tour.is_some();
    let is_optimal = candidate_cost == Some(optimal_cost);

    Ok((
        TrialOutcome {
            candidate_index,
            candidate_tour,
            candidate_cost,
            is_feasible,
            is_optimal,
            opt_value_reached: opt_value,
            wall_time_s: 0.0,
            seed,
        },
        started,
    ))
}

/// Runs one trial on a prebuilt problem. The brute-force oracle is
/// computed first, outside the timed span; timing covers optimization
/// through classification.
pub fn run_trial(
    problem: &DiagonalProblem,
    depth: usize,
    opt: &OptimizerConfig,
    shots: usize,
    seed: u64,
) -> Result<TrialOutcome> {
    let (_, optimal_cost) = brute_force_optimum(problem.matrix())?;
    let (mut outcome, started) = trial_pipeline(problem, depth, opt, shots, optimal_cost, seed)?;
    outcome.wall_time_s = started.elapsed().as_secs_f64();
    Ok(outcome)
}

/// Runs `config.trials` independent trials and aggregates them. Trial
/// seeds derive from the master seed, trials run in parallel, and the
/// aggregation is an ordered fold over the outcomes, so the report is
/// reproducible from the persisted trials. Each trial's timed span starts
/// before its own encoding build: construction is part of the method.
pub fn run_experiment(
    matrix: &CostMatrix,
    config: &ExperimentConfig,
) -> Result<(ExperimentReport, Vec<TrialOutcome>)> {
    if config.trials == 0 {
        return Err(Error::InvalidConfig("an experiment needs at least one trial".into()));
    }
    let (_, optimal_cost) = brute_force_optimum(matrix)?;

    let mut master = ChaCha8Rng::seed_from_u64(config.master_seed);
    let trial_seeds: Vec<u64> = (0..config.trials).map(|_| master.gen()).collect();

    let outcomes: Vec<TrialOutcome> = trial_seeds
        .par_iter()
        .map(|&seed| {
            let started = Instant::now();
            let problem =
                build_problem(matrix, config.encoding, config.variant, config.penalties)?;
            let (mut outcome, _) = trial_pipeline(
                &problem,
                config.depth,
                &config.opt,
                config.shots,
                optimal_cost,
                seed,
            )?;
            outcome.wall_time_s = started.elapsed().as_secs_f64();
            Ok(outcome)
        })
        .collect::<Result<_>>()?;

    let problem = build_problem(matrix, config.encoding, config.variant, config.penalties)?;
    let report = aggregate(
        &outcomes,
        config.encoding,
        matrix.n(),
        problem.num_qubits(),
        config.depth,
        config.shots,
        optimal_cost,
        config.master_seed,
    );
    Ok((report, outcomes))
}

/// Pure left-to-right fold of trial outcomes into a report. Re-running it
/// over outcomes read back from disk reproduces the report bit for bit.
#[allow(clippy::too_many_arguments)]
pub fn aggregate(
    outcomes: &[TrialOutcome],
    encoding: EncodingKind,
    n: usize,
    qubits: usize,
    layers: usize,
    shots: usize,
    optimal_cost: f64,
    master_seed: u64,
) -> ExperimentReport {
    let trials = outcomes.len();
    let mut optimal = 0usize;
    let mut feasible = 0usize;
    let mut cost_sum = 0.0;
    let mut best_cost: Option<f64> = None;
    let mut runtime_sum = 0.0;
    for o in outcomes {
        optimal += o.is_optimal as usize;
        feasible += o.is_feasible as usize;
        if let Some(c) = o.candidate_cost {
            cost_sum += c;
            best_cost = Some(best_cost.map_or(c, |b: f64| b.min(c)));
        }
        runtime_sum += o.wall_time_s;
    }
    ExperimentReport {
        encoding,
        n,
        qubits,
        layers,
        trials,
        shots,
        sr_pct: 100.0 * optimal as f64 / trials as f64,
        feas_pct: 100.0 * feasible as f64 / trials as f64,
        mean_cost: (feasible > 0).then(|| cost_sum / feasible as f64),
        best_cost,
        optimal_cost,
        mean_runtime_s: runtime_sum / trials as f64,
        master_seed,
    }
}

/// One sweep row: a full optimization at a fixed depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub layers: usize,
    /// Best expectation the optimizer reached at this depth.
    pub expectation: f64,
    pub wall_time_s: f64,
}

/// Optimizes once per depth and records the reached expectation and the
/// wall time of build plus optimization.
pub fn sweep_layers(
    matrix: &CostMatrix,
    kind: EncodingKind,
    variant: PenaltyVariant,
    penalties: Option<PenaltyConfig>,
    schedule: &[(usize, OptimizerConfig)],
) -> Result<Vec<SweepRow>> {
    if schedule.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one depth".into()));
    }
    let mut rows = Vec::with_capacity(schedule.len());
    for &(depth, ref opt) in schedule {
        let started = Instant::now();
        let problem = build_problem(matrix, kind, variant, penalties)?;
        let r = minimize(&problem, depth, opt)?;
        rows.push(SweepRow {
            layers: depth,
            expectation: r.best_value,
            wall_time_s: started.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

/// Writes reports as CSV with a header row; columns in declaration order.
pub fn write_reports_csv<W: Write>(writer: W, reports: &[ExperimentReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for report in reports {
        w.serialize(report)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes sweep rows as CSV with a header row.
pub fn write_sweep_csv<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one JSON object per line, in trial order.
pub fn write_trials_jsonl<W: Write>(mut writer: W, outcomes: &[TrialOutcome]) -> Result<()> {
    for o in outcomes {
        serde_json::to_writer(&mut writer, o)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads back a JSONL trial log written by [`write_trials_jsonl`].
pub fn read_trials_jsonl<R: BufRead>(reader: R) -> Result<Vec<TrialOutcome>> {
    let mut outcomes = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        outcomes.push(serde_json::from_str(&line)?);
    }
    Ok(outcomes)
}
