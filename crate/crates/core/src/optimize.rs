//! Derivative-free angle optimization for the ansatz.
//!
//! A small Nelder-Mead simplex search runs from several independently
//! seeded starting points; the best restart wins. Every objective value is
//! an exact statevector expectation, so the whole loop is deterministic for
//! a fixed seed: same config in, same angles out, bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encodings::{DiagonalCost, ExplicitDiagonal};
use crate::error::{Error, Result};
use crate::qaoa::{QaoaParams, StateVector, MAX_QUBITS};

/// Diagonals up to this dimension are materialized once per `minimize` or
/// `grid_init` call and reused across every objective evaluation.
const CACHE_CAP: usize = 1 << 20;

/// Grid resolution used for the warm start when `InitStrategy::Grid` is
/// selected (256 extra evaluations, reported but not charged against the
/// per-restart budget).
const WARM_START_RESOLUTION: usize = 16;

/// How the restarts pick their initial angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InitStrategy {
    /// Uniform draws: phase angles from [0, 2*pi), mixer angles from [0, pi).
    Random,
    /// Depth-1 only: restart 0 starts from a coarse grid argmin, the rest
    /// are random.
    Grid,
}

/// Search budget and seeding knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Local-search evaluation budget per restart.
    pub max_evaluations: usize,
    pub restarts: usize,
    /// Edge length of the initial simplex around each starting point.
    pub initial_step: f64,
    /// Stop a restart once the simplex value spread drops below this.
    pub convergence_tol: f64,
    pub seed: u64,
    pub init_strategy: InitStrategy,
}

impl OptimizerConfig {
    /// Default budget for a depth-`p` ansatz: 500 evaluations per layer,
    /// five restarts, step 0.3, tolerance 1e-6.
    pub fn for_depth(depth: usize) -> Self {
        OptimizerConfig {
            max_evaluations: 500 * depth.max(1),
            restarts: 5,
            initial_step: 0.3,
            convergence_tol: 1e-6,
            seed: 0,
            init_strategy: InitStrategy::Random,
        }
    }

    pub fn validate(&self, depth: usize) -> Result<()> {
        if depth == 0 {
            return Err(Error::InvalidConfig(
                "optimization needs at least one ansatz layer".into(),
            ));
        }
        if self.max_evaluations == 0 || self.restarts == 0 {
            return Err(Error::InvalidConfig(
                "max_evaluations and restarts must be at least 1".into(),
            ));
        }
        if !(self.initial_step.is_finite() && self.initial_step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "initial_step must be positive, got {}",
                self.initial_step
            )));
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "convergence_tol must be non-negative, got {}",
                self.convergence_tol
            )));
        }
        if self.init_strategy == InitStrategy::Grid && depth != 1 {
            return Err(Error::InvalidConfig(format!(
                "grid initialization covers two angles only; depth {depth} > 1"
            )));
        }
        Ok(())
    }
}

/// Outcome of [`minimize`].
#[derive(Debug, Clone)]
pub struct OptResult {
    pub best_params: QaoaParams,
    pub best_value: f64,
    pub evaluations_used: usize,
    /// `(evaluation index, objective value)` for every evaluation, across
    /// all restarts in order.
    pub trace: Vec<(usize, f64)>,
}

/// Either the problem itself or its materialized diagonal; both present the
/// same `DiagonalCost` surface to the layer loop.
enum CostView<'a, P: DiagonalCost + ?Sized> {
    Direct(&'a P),
    Cached(ExplicitDiagonal),
}

impl<P: DiagonalCost + ?Sized> CostView<'_, P> {
    fn build(problem: &P) -> CostView<'_, P> {
        let dim = problem.dimension();
        if dim <= CACHE_CAP {
            let values: Vec<f64> = (0..dim).map(|z| problem.cost_of(z)).collect();
            if let Ok(diag) = ExplicitDiagonal::new(values) {
                return CostView::Cached(diag);
            }
        }
        CostView::Direct(problem)
    }

    fn num_qubits(&self) -> usize {
        match self {
            CostView::Direct(p) => p.num_qubits(),
            CostView::Cached(d) => d.num_qubits(),
        }
    }

    /// Exact ansatz expectation at the given angles. Identical arithmetic
    /// to `run_ansatz` + `expectation`, so re-evaluating `best_params`
    /// downstream reproduces `best_value`.
    fn objective(&self, params: &QaoaParams) -> f64 {
        let mut state =
            StateVector::uniform(self.num_qubits()).expect("register size validated upfront");
        for (gamma, beta) in params.layers() {
            match self {
                CostView::Direct(p) => state.apply_phase(*p, gamma),
                CostView::Cached(d) => state.apply_phase_diag(d.values(), gamma),
            }
            .expect("dimensions fixed at construction");
            state.apply_mixer(beta);
        }
        match self {
            CostView::Direct(p) => state.expectation(*p),
            CostView::Cached(d) => state.expectation(d),
        }
        .expect("dimensions fixed at construction")
    }
}

/// Evaluates the depth-1 expectation on a `resolution x resolution` grid
/// over phase angles in `[0, 2*pi)` and mixer angles in `[0, pi)`, and
/// returns the argmin point and its value. Ties resolve to the earliest
/// grid point in row-major (phase-major) order.
pub fn grid_init<P: DiagonalCost + ?Sized>(
    problem: &P,
    resolution: usize,
) -> Result<(QaoaParams, f64)> {
    if resolution == 0 {
        return Err(Error::InvalidConfig("grid resolution must be at least 1".into()));
    }
    check_register(problem)?;
    let view = CostView::build(problem);
    let mut best: Option<(QaoaParams, f64)> = None;
    for i in 0..resolution {
        let gamma = std::f64::consts::TAU * i as f64 / resolution as f64;
        for j in 0..resolution {
            let beta = std::f64::consts::PI * j as f64 / resolution as f64;
            let params = QaoaParams::new(vec![gamma], vec![beta]).expect("finite angles");
            let value = view.objective(&params);
            if best.as_ref().is_none_or(|(_, b)| value < *b) {
                best = Some((params, value));
            }
        }
    }
    Ok(best.expect("resolution >= 1 evaluates at least one point"))
}

fn check_register<P: DiagonalCost + ?Sized>(problem: &P) -> Result<()> {
    if problem.num_qubits() > MAX_QUBITS {
        return Err(Error::CapExceeded(format!(
            "{} qubits exceed the simulator cap of {MAX_QUBITS}",
            problem.num_qubits()
        )));
    }
    Ok(())
}

/// Minimizes the depth-`depth` ansatz expectation over its `2 * depth`
/// angles. Each restart runs an independent Nelder-Mead search from its own
/// seeded starting point within `config.max_evaluations` evaluations; the
/// best value across restarts wins, earlier restarts winning ties. Budget
/// exhaustion is not an error: the best point found so far is returned.
pub fn minimize<P: DiagonalCost + ?Sized>(
    problem: &P,
    depth: usize,
    config: &OptimizerConfig,
) -> Result<OptResult> {
    config.validate(depth)?;
    check_register(problem)?;
    let view = CostView::build(problem);

    let mut evaluations = 0usize;
    let mut trace: Vec<(usize, f64)> = Vec::new();
    let mut eval = |flat: &[f64]| -> f64 {
        let params = QaoaParams::from_flat(flat).expect("flat layout is 2 * depth");
        let value = view.objective(&params);
        evaluations += 1;
        trace.push((evaluations, value));
        value
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let restart_seeds: Vec<u64> = (0..config.restarts).map(|_| rng.gen()).collect();

    let mut best: Option<(Vec<f64>, f64)> = None;
    for (r, &rseed) in restart_seeds.iter().enumerate() {
        let x0 = if config.init_strategy == InitStrategy::Grid && r == 0 {
            // Coarse warm start; goes through `eval` so it lands in the
            // trace and the evaluation count.
            let mut warm: Option<(Vec<f64>, f64)> = None;
            for i in 0..WARM_START_RESOLUTION {
                let gamma = std::f64::consts::TAU * i as f64 / WARM_START_RESOLUTION as f64;
                for j in 0..WARM_START_RESOLUTION {
                    let beta = std::f64::consts::PI * j as f64 / WARM_START_RESOLUTION as f64;
                    let x = vec![gamma, beta];
                    let v = eval(&x);
                    if warm.as_ref().is_none_or(|(_, b)| v < *b) {
                        warm = Some((x, v));
                    }
                }
            }
            warm.expect("warm grid is non-empty").0
        } else {
            let mut rrng = ChaCha8Rng::seed_from_u64(rseed);
            let mut x0 = Vec::with_capacity(2 * depth);
            for _ in 0..depth {
                x0.push(rrng.gen_range(0.0..std::f64::consts::TAU));
            }
            for _ in 0..depth {
                x0.push(rrng.gen_range(0.0..std::f64::consts::PI));
            }
            x0
        };
        let (xr, fr) = local_search(
            &mut eval,
            x0,
            config.initial_step,
            config.convergence_tol,
            config.max_evaluations,
        );
        if best.as_ref().is_none_or(|(_, b)| fr < *b) {
            best = Some((xr, fr));
        }
    }

    let (flat, best_value) = best.expect("restarts >= 1");
    Ok(OptResult {
        best_params: QaoaParams::from_flat(&flat).expect("flat layout is 2 * depth"),
        best_value,
        evaluations_used: evaluations,
        trace,
    })
}

/// One restart's local search. A simplex that converges by value spread
/// may have collapsed onto a line rather than a minimum, so the search
/// re-seeds a fresh simplex at the best point (halving its edge each
/// round) and keeps going until a round stops paying or the budget runs
/// out.
fn local_search(
    eval: &mut impl FnMut(&[f64]) -> f64,
    x0: Vec<f64>,
    step: f64,
    tol: f64,
    budget: usize,
) -> (Vec<f64>, f64) {
    let (mut x, mut f, mut used) = nelder_mead(eval, x0, step, tol, budget);
    let mut round_step = step;
    while used < budget && round_step > 1e-4 {
        round_step *= 0.5;
        let (x2, f2, u2) = nelder_mead(eval, x.clone(), round_step, tol, budget - used);
        used += u2;
        let improved = f2 < f - tol;
        if f2 < f {
            x = x2;
            f = f2;
        }
        if !improved {
            break;
        }
    }
    (x, f)
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2) with an axis-aligned initial simplex. Returns the best
/// vertex and the evaluation count once the value spread falls below `tol`
/// or `budget` evaluations are spent (a final step may overshoot the
/// budget by a few evaluations).
fn nelder_mead(
    eval: &mut impl FnMut(&[f64]) -> f64,
    x0: Vec<f64>,
    step: f64,
    tol: f64,
    budget: usize,
) -> (Vec<f64>, f64, usize) {
    let dim = x0.len();
    let mut used = 0usize;
    let spent = |n: usize, used: &mut usize| {
        *used += n;
        *used >= budget
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(&x0);
    simplex.push((x0.clone(), f0));
    let mut exhausted = spent(1, &mut used);
    for i in 0..dim {
        if exhausted {
            break;
        }
        let mut xi = x0.clone();
        xi[i] += step;
        let fi = eval(&xi);
        simplex.push((xi, fi));
        exhausted = spent(1, &mut used);
    }

    while !exhausted && simplex.len() == dim + 1 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        if spread <= tol {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let at = |coef: f64| -> Vec<f64> {
            (0..dim)
                .map(|k| centroid[k] + coef * (centroid[k] - worst.0[k]))
                .collect()
        };

        let xr = at(1.0);
        let fr = eval(&xr);
        exhausted = spent(1, &mut used);
        if fr < simplex[0].1 {
            let xe = at(2.0);
            let fe = eval(&xe);
            exhausted = spent(1, &mut used) || exhausted;
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        let xc = if fr < worst.1 { at(0.5) } else { at(-0.5) };
        let fc = eval(&xc);
        exhausted = spent(1, &mut used) || exhausted;
        if fc < fr.min(worst.1) {
            simplex[dim] = (xc, fc);
            continue;
        }
        // Shrink toward the best vertex.
        for idx in 1..=dim {
            if exhausted {
                break;
            }
            let shrunk: Vec<f64> = (0..dim)
                .map(|k| simplex[0].0[k] + 0.5 * (simplex[idx].0[k] - simplex[0].0[k]))
                .collect();
            let fs = eval(&shrunk);
            simplex[idx] = (shrunk, fs);
            exhausted = spent(1, &mut used);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    (x, f, used)
}
