//! The three encodings side by side on the same instance.

use tsp_qaoa::{
    build_edge, build_node, build_sre, brute_force_optimum, default_penalties, demo_four_city,
    PenaltyVariant,
};

fn main() {
    let m = demo_four_city();
    let pen = default_penalties(&m);
    let (_, optimal_cost) = brute_force_optimum(&m).unwrap();
    println!("penalties: d = {}, gamma = {}", pen.d, pen.gamma_pen);

    let problems = [
        build_node(&m, pen).unwrap(),
        build_edge(&m, pen, PenaltyVariant::Legal).unwrap(),
        build_sre(&m, pen).unwrap(),
    ];

    println!("encoding  qubits  dimension  feasible  argmin cost");
    for p in &problems {
        let (argmin, cost) = p.argmin().unwrap();
        println!(
            "{:<9} {:>6} {:>10} {:>9}  {cost} (index {argmin})",
            p.kind().to_string(),
            p.num_qubits(),
            p.dimension(),
            p.count_feasible().unwrap(),
        );
        // The cheapest register state always decodes to an optimal tour:
        // penalties price every violation above any real tour.
        assert_eq!(cost, optimal_cost);
        assert!(p.is_feasible(argmin));
    }

    // Decoding maps basis indices back to tours. The rank register packs
    // the 6 permutations of cities {1,2,3} into indices 0..6; the two
    // indices past them are padding.
    let sre = &problems[2];
    for z in 0..sre.dimension() {
        match sre.decode(z) {
            Some(tour) => println!("rank {z} -> {:?}, cost {}", tour.order(), sre.cost_of(z)),
            None => println!("rank {z} -> padding, priced at {}", sre.cost_of(z)),
        }
    }

    // The slot register has two penalty variants that differ only on
    // strings with repeated real cities versus placeholder values.
    let legal = &problems[1];
    let repeat = build_edge(&m, pen, PenaltyVariant::Repeat).unwrap();
    let differing = (0..legal.dimension())
        .filter(|&z| legal.cost_of(z) != repeat.cost_of(z))
        .count();
    println!(
        "slot-register variants disagree on {differing} of {} strings",
        legal.dimension()
    );
}
