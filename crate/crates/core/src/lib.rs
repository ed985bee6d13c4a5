//! Traveling-salesman instances encoded as diagonal cost operators over
//! qubit registers, simulated and optimized with an alternating
//! phase/mixer ansatz.
//!
//! Three encodings turn a cost matrix into a diagonal over basis states:
//!
//! * `node`: one indicator qubit per (city, step) pair, constraint
//!   violations priced by a quadratic penalty,
//! * `edge`: one binary slot per tour step naming the city it visits,
//!   illegal strings priced at a flat penalty,
//! * `sre`: a compact register whose index ranks the permutation directly,
//!   so only the padding tail needs a penalty.
//!
//! The simulator is an exact statevector: phase layers multiply each
//! amplitude by `exp(-i * gamma * cost)`, mixer layers rotate every qubit
//! by `exp(-i * beta * X)`. Expectations are exact; sampling, angle
//! optimization, and the experiment harness are deterministic for a fixed
//! seed.
//!
//! The `examples/` directory walks through each capability end to end; the
//! `tsp-qaoa` binary wraps the same calls for the command line.
//!
//! ```
//! use tsp_qaoa::{build_sre, default_penalties, demo_four_city, run_ansatz, QaoaParams};
//!
//! let instance = demo_four_city();
//! let problem = build_sre(&instance, default_penalties(&instance)).unwrap();
//! let params = QaoaParams::new(vec![0.1], vec![0.2]).unwrap();
//! let state = run_ansatz(&problem, &params).unwrap();
//! let samples = state.sample(100, 7).unwrap();
//! let candidate = samples.most_probable().unwrap();
//! println!("feasible: {}", problem.is_feasible(candidate));
//! assert!(state.expectation(&problem).unwrap() > 0.0);
//! ```

pub mod cli;
pub mod encodings;
pub mod error;
pub mod experiments;
pub mod instances;
pub mod optimize;
pub mod qaoa;

pub use encodings::{
    build_edge, build_node, build_sre, DiagonalCost, DiagonalProblem, EdgeLayout, EncodingKind,
    ExplicitDiagonal, PenaltyVariant, ARGMIN_CAP, MATERIALIZE_CAP,
};
pub use error::{Error, Result};
pub use experiments::{
    aggregate, build_problem, read_trials_jsonl, run_experiment, run_trial, sweep_layers,
    write_reports_csv, write_sweep_csv, write_trials_jsonl, ExperimentConfig, ExperimentReport,
    SweepRow, TrialOutcome,
};
pub use instances::{
    brute_force_optimum, default_penalties, demo_four_city, load_instance, random_instance,
    save_instance, tour_cost, CostMatrix, PenaltyConfig, Tour, BRUTE_FORCE_MAX_CITIES,
};
pub use optimize::{grid_init, minimize, InitStrategy, OptResult, OptimizerConfig};
pub use qaoa::{run_ansatz, QaoaParams, SampleSet, StateVector, MAX_QUBITS};
