//! Cost matrices, tours, and the brute-force oracle.

use tsp_qaoa::{brute_force_optimum, demo_four_city, random_instance, tour_cost, Tour};

fn main() {
    // The bundled 4-city instance. Leg costs are symmetric and the optimal
    // closed tour 0-1-2-3-0 costs 2 + 3 + 7 + 4 = 16.
    let demo = demo_four_city();
    println!("demo instance, n = {}", demo.n());
    for (i, row) in demo.rows().iter().enumerate() {
        println!("  from {i}: {row:?}");
    }

    let (best_tour, best_cost) = brute_force_optimum(&demo).unwrap();
    println!("oracle: tour {:?} costs {best_cost}", best_tour.order());

    // Any tour can be priced directly. The reverse orientation visits the
    // same legs, so it ties the optimum on a symmetric instance.
    let reverse = Tour::new(vec![0, 3, 2, 1]).unwrap();
    println!(
        "reverse orientation {:?} costs {}",
        reverse.order(),
        tour_cost(&demo, &reverse).unwrap()
    );

    // Seeded random instances are reproducible: same seed, same matrix.
    let a = random_instance(5, 1.0, 10.0, true, 99).unwrap();
    let b = random_instance(5, 1.0, 10.0, true, 99).unwrap();
    assert_eq!(a, b);
    let (tour, cost) = brute_force_optimum(&a).unwrap();
    println!(
        "random 5-city instance (seed 99): optimum {:?} costs {cost:.4}",
        tour.order()
    );

    // Directed instances drop the symmetry; both orientations get priced.
    let directed = random_instance(5, 1.0, 10.0, false, 99).unwrap();
    let (tour, cost) = brute_force_optimum(&directed).unwrap();
    let mut rev = tour.order().to_vec();
    rev[1..].reverse();
    let rev_cost = tour_cost(&directed, &Tour::new(rev).unwrap()).unwrap();
    println!("directed optimum costs {cost:.4}; its reverse costs {rev_cost:.4}");
}
