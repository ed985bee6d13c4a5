//! Experiments: repeated trials, success/feasibility rates, report files.

use tsp_qaoa::{
    aggregate, demo_four_city, read_trials_jsonl, run_experiment, write_reports_csv,
    write_trials_jsonl, EncodingKind, ExperimentConfig,
};

fn main() {
    let m = demo_four_city();

    // Twenty trials of the rank encoding at one layer. Each trial draws
    // its own optimizer and sampler seeds from the master seed, optimizes,
    // samples 10000 shots, and takes the most probable state as the
    // candidate.
    let mut reports = Vec::new();
    for kind in [EncodingKind::Sre, EncodingKind::Edge, EncodingKind::Node] {
        let mut cfg = ExperimentConfig::new(kind, 1, 20, 10_000);
        cfg.master_seed = 42;
        cfg.opt.max_evaluations = 200;
        cfg.opt.restarts = 3;
        let (report, outcomes) = run_experiment(&m, &cfg).unwrap();
        println!(
            "{}: SR {:>5.1}%  feasible {:>5.1}%  mean candidate cost {:?}",
            report.encoding, report.sr_pct, report.feas_pct, report.mean_cost
        );

        // The report is a pure fold of the trial log: re-aggregating the
        // persisted JSONL reproduces it bit for bit.
        let mut jsonl = Vec::new();
        write_trials_jsonl(&mut jsonl, &outcomes).unwrap();
        let back = read_trials_jsonl(std::io::BufReader::new(jsonl.as_slice())).unwrap();
        let recomputed = aggregate(
            &back,
            report.encoding,
            report.n,
            report.qubits,
            report.layers,
            report.shots,
            report.optimal_cost,
            report.master_seed,
        );
        assert_eq!(recomputed, report);
        reports.push(report);
    }

    // All three reports price candidates against the same oracle.
    assert!(reports.windows(2).all(|w| w[0].optimal_cost == w[1].optimal_cost));

    let mut csv = Vec::new();
    write_reports_csv(&mut csv, &reports).unwrap();
    println!("\n{}", String::from_utf8(csv).unwrap());
}
