//! Angle optimization: seeded restarts, the trace, and the grid scan.

use tsp_qaoa::{
    build_sre, default_penalties, demo_four_city, grid_init, minimize, run_ansatz,
    OptimizerConfig,
};

fn main() {
    let m = demo_four_city();
    let p = build_sre(&m, default_penalties(&m)).unwrap();
    let uniform_mean = (0..p.dimension()).map(|z| p.cost_of(z)).sum::<f64>() / 8.0;
    println!("uniform expectation: {uniform_mean}");

    // A coarse grid scan of the two depth-1 angles is a cheap baseline.
    let (grid_params, grid_value) = grid_init(&p, 16).unwrap();
    println!(
        "16x16 grid argmin: {grid_value:.6} at gamma {:.3}, beta {:.3}",
        grid_params.phase()[0],
        grid_params.mixer()[0]
    );

    // The simplex search runs five seeded restarts by default and keeps
    // the best. The trace records every objective evaluation in order.
    let cfg = OptimizerConfig {
        seed: 7,
        ..OptimizerConfig::for_depth(1)
    };
    let r = minimize(&p, 1, &cfg).unwrap();
    println!(
        "depth 1: best {:.6} after {} evaluations",
        r.best_value, r.evaluations_used
    );
    println!(
        "first evaluations: {:?}",
        r.trace.iter().take(4).collect::<Vec<_>>()
    );
    assert!(r.best_value < uniform_mean);
    assert!(r.best_value <= grid_value);

    // Re-evaluating the returned angles reproduces the returned value.
    let again = run_ansatz(&p, &r.best_params)
        .unwrap()
        .expectation(&p)
        .unwrap();
    assert!((again - r.best_value).abs() < 1e-9);

    // Deeper circuits only help: the search space of depth p embeds in
    // depth p + 1 (append a zero layer).
    for depth in 2..=3 {
        let cfg = OptimizerConfig {
            seed: 7,
            ..OptimizerConfig::for_depth(depth)
        };
        let deeper = minimize(&p, depth, &cfg).unwrap();
        println!(
            "depth {depth}: best {:.6} after {} evaluations",
            deeper.best_value, deeper.evaluations_used
        );
    }
}
