//! The statevector simulator, layer by layer.

use tsp_qaoa::{
    build_sre, default_penalties, demo_four_city, run_ansatz, QaoaParams, StateVector,
};

fn main() {
    let m = demo_four_city();
    let p = build_sre(&m, default_penalties(&m)).unwrap();

    // The register starts in the uniform superposition: every basis state
    // carries probability 1/8, and the expectation is the diagonal mean.
    let mut state = StateVector::uniform(p.num_qubits()).unwrap();
    println!("uniform expectation: {}", state.expectation(&p).unwrap());

    // A phase layer multiplies each amplitude by exp(-i * gamma * cost).
    // Probabilities are untouched, so the expectation cannot move yet.
    state.apply_phase(&p, 0.4).unwrap();
    println!(
        "after phase layer:   {} (probabilities unchanged)",
        state.expectation(&p).unwrap()
    );

    // The mixer rotates every qubit by exp(-i * beta * X), turning the
    // phase differences into probability differences.
    state.apply_mixer(0.7);
    println!("after mixer layer:   {}", state.expectation(&p).unwrap());

    // run_ansatz plays all layers from the uniform start in one call.
    let params = QaoaParams::new(vec![0.4], vec![0.7]).unwrap();
    let replayed = run_ansatz(&p, &params).unwrap();
    assert_eq!(replayed, state);

    // Sampling is seeded and reproducible; counts always total the shots.
    let samples = state.sample(10_000, 123).unwrap();
    println!("counts over 10000 shots, by basis index:");
    for (index, count) in samples.counts() {
        let tour = p.decode(*index);
        println!(
            "  {index}: {count:>5}  cost {:>4}  {}",
            p.cost_of(*index),
            tour.map_or("padding".into(), |t| format!("{:?}", t.order())),
        );
    }
    println!("most probable index: {}", samples.most_probable().unwrap());
}
