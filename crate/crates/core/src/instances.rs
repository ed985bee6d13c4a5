//! Problem instances: directed cost matrices, tours anchored at city 0, and
//! the exhaustive classical oracle the quantum pipeline is judged against.
//!
//! A tour always starts at city 0. Fixing the start city removes the cyclic
//! degeneracy of the tour space, so the oracle (and every encoding built on
//! top of these types) enumerates permutations of the remaining `n - 1`
//! cities only.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard ceiling for exhaustive tour enumeration: 11! tours is the most the
/// oracle will grind through before refusing.
pub const BRUTE_FORCE_MAX_CITIES: usize = 12;

/// Square matrix of directed travel costs.
///
/// `cost(i, j)` is the cost of the leg `i -> j`. The diagonal is zero,
/// entries are finite and non-negative, and asymmetry is allowed. The JSON
/// form is `{"n": <int>, "costs": [[row 0], [row 1], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct CostMatrix {
    n: usize,
    // row-major n*n
    costs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    costs: Vec<Vec<f64>>,
}

impl TryFrom<InstanceFile> for CostMatrix {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if file.costs.len() != file.n {
            return Err(Error::InvalidInstance(format!(
                "declared n = {} but found {} rows",
                file.n,
                file.costs.len()
            )));
        }
        CostMatrix::new(file.costs)
    }
}

impl From<CostMatrix> for InstanceFile {
    fn from(m: CostMatrix) -> Self {
        InstanceFile {
            n: m.n,
            costs: m.rows(),
        }
    }
}

impl CostMatrix {
    /// Validates and wraps a nested row representation.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 3 {
            return Err(Error::InvalidInstance(format!(
                "need at least 3 cities, got {n}"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "row {i} has {} entries, expected {n} (matrix must be square)",
                    row.len()
                )));
            }
            for (j, &c) in row.iter().enumerate() {
                if !c.is_finite() {
                    return Err(Error::InvalidInstance(format!(
                        "cost[{i}][{j}] is not finite"
                    )));
                }
                if c < 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "cost[{i}][{j}] = {c} is negative"
                    )));
                }
                if i == j && c != 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "diagonal entry cost[{i}][{i}] = {c} must be zero"
                    )));
                }
            }
        }
        let mut costs = Vec::with_capacity(n * n);
        for row in &rows {
            costs.extend_from_slice(row);
        }
        Ok(CostMatrix { n, costs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn cost(&self, from: usize, to: usize) -> f64 {
        self.costs[from * self.n + to]
    }

    /// Largest entry in the matrix (the diagonal is zero, so this is the
    /// largest leg cost).
    pub fn max_cost(&self) -> f64 {
        self.costs.iter().cloned().fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.costs[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }
}

/// A visiting order over all cities, anchored at city 0. The closing leg
/// back to city 0 is implicit and included by [`tour_cost`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    /// Validates that `order` is a permutation of `0..order.len()` starting
    /// at city 0.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        if order.is_empty() || order[0] != 0 {
            return Err(Error::InvalidTour(
                "tour must be non-empty and start at city 0".into(),
            ));
        }
        let n = order.len();
        let mut seen = vec![false; n];
        for &c in &order {
            if c >= n || seen[c] {
                return Err(Error::InvalidTour(format!(
                    "order {order:?} is not a permutation of 0..{n}"
                )));
            }
            seen[c] = true;
        }
        Ok(Tour { order })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Closed-loop cost of a tour: legs between consecutive cities plus the
/// return to city 0, summed left to right. The summation order is fixed so
/// that encodings evaluating the same tour reproduce the value bit-for-bit.
pub fn tour_cost(matrix: &CostMatrix, tour: &Tour) -> Result<f64> {
    if tour.len() != matrix.n() {
        return Err(Error::DimensionMismatch(format!(
            "tour visits {} cities but the matrix has {}",
            tour.len(),
            matrix.n()
        )));
    }
    let order = tour.order();
    let mut total = 0.0;
    for k in 0..order.len() {
        let from = order[k];
        let to = order[(k + 1) % order.len()];
        total += matrix.cost(from, to);
    }
    Ok(total)
}

/// Exhaustive oracle: the cheapest tour over all `(n-1)!` visiting orders.
///
/// Permutations are enumerated in lexicographic order with a strict `<`
/// update, so cost ties resolve to the lexicographically smallest order.
/// Refuses instances with more than [`BRUTE_FORCE_MAX_CITIES`] cities.
pub fn brute_force_optimum(matrix: &CostMatrix) -> Result<(Tour, f64)> {
    let n = matrix.n();
    if n > BRUTE_FORCE_MAX_CITIES {
        return Err(Error::CapExceeded(format!(
            "brute force enumerates (n-1)! tours; n = {n} exceeds the cap of {BRUTE_FORCE_MAX_CITIES}"
        )));
    }
    let mut perm: Vec<usize> = (1..n).collect();
    let mut best_perm = perm.clone();
    let mut best_cost = f64::INFINITY;
    loop {
        // Same leg order as tour_cost: 0 -> perm[0] -> ... -> perm[last] -> 0.
        let mut cost = matrix.cost(0, perm[0]);
        for w in perm.windows(2) {
            cost += matrix.cost(w[0], w[1]);
        }
        cost += matrix.cost(perm[n - 2], 0);
        if cost < best_cost {
            best_cost = cost;
            best_perm.copy_from_slice(&perm);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let mut order = Vec::with_capacity(n);
    order.push(0);
    order.extend_from_slice(&best_perm);
    Ok((Tour::new(order)?, best_cost))
}

/// Advances `a` to its lexicographic successor in place; returns false once
/// `a` is the final (descending) permutation.
fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Reproducible random instance with entries drawn uniformly from
/// `[lo, hi)`. Symmetric instances mirror the upper triangle; asymmetric
/// ones draw every off-diagonal entry independently.
pub fn random_instance(
    n: usize,
    lo: f64,
    hi: f64,
    symmetric: bool,
    seed: u64,
) -> Result<CostMatrix> {
    if n < 3 {
        return Err(Error::InvalidConfig(format!(
            "need at least 3 cities, got {n}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo >= hi {
        return Err(Error::InvalidConfig(format!(
            "cost range [{lo}, {hi}) must satisfy 0 <= lo < hi"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0.0; n]; n];
    if symmetric {
        for i in 0..n {
            for j in (i + 1)..n {
                let c = rng.gen_range(lo..hi);
                rows[i][j] = c;
                rows[j][i] = c;
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rows[i][j] = rng.gen_range(lo..hi);
                }
            }
        }
    }
    CostMatrix::new(rows)
}

/// Penalty magnitudes shared by the encodings: `d` prices forbidden moves
/// (self-loops, placeholder cities) and `gamma_pen` prices constraint
/// violations outright.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    pub d: f64,
    pub gamma_pen: f64,
}

impl PenaltyConfig {
    pub fn new(d: f64, gamma_pen: f64) -> Result<Self> {
        if !d.is_finite() || d <= 0.0 || !gamma_pen.is_finite() || gamma_pen <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "penalties must be finite and positive, got d = {d}, gamma_pen = {gamma_pen}"
            )));
        }
        Ok(PenaltyConfig { d, gamma_pen })
    }

    /// Checks that the magnitudes dominate `matrix`: `d` must exceed every
    /// leg cost and `gamma_pen` must exceed `n` times the largest leg, so
    /// that no infeasible assignment can undercut a real tour.
    pub fn validate_for(&self, matrix: &CostMatrix) -> Result<()> {
        let max = matrix.max_cost();
        if self.d <= max {
            return Err(Error::InvalidConfig(format!(
                "d = {} must exceed the largest leg cost {max}",
                self.d
            )));
        }
        if self.gamma_pen < matrix.n() as f64 * max {
            return Err(Error::InvalidConfig(format!(
                "gamma_pen = {} must be at least n * max cost = {}",
                self.gamma_pen,
                matrix.n() as f64 * max
            )));
        }
        Ok(())
    }
}

/// Default penalties for `matrix`: `d` is twice the largest leg cost (1 for
/// the all-zero matrix) and `gamma_pen` is `n * d`.
pub fn default_penalties(matrix: &CostMatrix) -> PenaltyConfig {
    let max = matrix.max_cost();
    let d = if max > 0.0 { 2.0 * max } else { 1.0 };
    PenaltyConfig {
        d,
        gamma_pen: matrix.n() as f64 * d,
    }
}

/// Four-city symmetric demo instance used across the examples and tests.
/// Its optimal cost (16, via 0-1-2-3 or the reverse orientation) is unique
/// among the three undirected tour classes, so optimality checks compare
/// costs rather than specific orders.
pub fn demo_four_city() -> CostMatrix {
    CostMatrix::new(vec![
        vec![0.0, 2.0, 5.0, 4.0],
        vec![2.0, 0.0, 3.0, 6.0],
        vec![5.0, 3.0, 0.0, 7.0],
        vec![4.0, 6.0, 7.0, 0.0],
    ])
    .expect("demo instance is valid")
}

/// Reads and validates an instance from a JSON file.
pub fn load_instance(path: &Path) -> Result<CostMatrix> {
    let text = std::fs::read_to_string(path)?;
    let matrix: CostMatrix = serde_json::from_str(&text)?;
    Ok(matrix)
}

/// Writes an instance as pretty-printed JSON. Values round-trip exactly:
/// `load_instance(save_instance(m)) == m`.
pub fn save_instance(matrix: &CostMatrix, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(matrix)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform_matrix(n: usize, c: f64) -> CostMatrix {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { c }).collect())
            .collect();
        CostMatrix::new(rows).unwrap()
    }

    #[test]
    fn tour_cost_sums_the_closed_loop() {
        let m = uniform_matrix(4, 1.0);
        let t = Tour::new(vec![0, 1, 2, 3]).unwrap();
        assert_eq!(tour_cost(&m, &t).unwrap(), 4.0);

        let m = CostMatrix::new(vec![
            vec![0.0, 2.0, 9.0],
            vec![9.0, 0.0, 3.0],
            vec![4.0, 9.0, 0.0],
        ])
        .unwrap();
        let t = Tour::new(vec![0, 1, 2]).unwrap();
        assert_eq!(tour_cost(&m, &t).unwrap(), 2.0 + 3.0 + 4.0);
    }

    #[test]
    fn tour_cost_matches_manual_sum_on_an_asymmetric_instance() {
        let m = random_instance(4, 0.0, 10.0, false, 99).unwrap();
        let t = Tour::new(vec![0, 2, 1, 3]).unwrap();
        let expected = m.cost(0, 2) + m.cost(2, 1) + m.cost(1, 3) + m.cost(3, 0);
        assert_eq!(tour_cost(&m, &t).unwrap(), expected);
    }

    #[test]
    fn tour_cost_rejects_wrong_length() {
        let m = uniform_matrix(4, 1.0);
        let t = Tour::new(vec![0, 1, 2]).unwrap();
        assert!(matches!(
            tour_cost(&m, &t),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn tour_validation_rejects_bad_orders() {
        assert!(Tour::new(vec![1, 0, 2]).is_err(), "must start at 0");
        assert!(Tour::new(vec![0, 1, 1]).is_err(), "repeat city");
        assert!(Tour::new(vec![0, 1, 4]).is_err(), "city out of range");
        assert!(Tour::new(vec![]).is_err(), "empty");
    }

    #[test]
    fn brute_force_picks_the_cheaper_direction() {
        // Clockwise 0-1-2 costs 1 + 2 + 2 = 5, the reverse costs 3 + 2 + 2 = 7.
        let m = CostMatrix::new(vec![
            vec![0.0, 1.0, 3.0],
            vec![2.0, 0.0, 2.0],
            vec![2.0, 2.0, 0.0],
        ])
        .unwrap();
        let (tour, cost) = brute_force_optimum(&m).unwrap();
        assert_eq!(cost, 5.0);
        assert_eq!(tour.order(), &[0, 1, 2]);
    }

    #[test]
    fn brute_force_ties_resolve_lexicographically() {
        let m = uniform_matrix(5, 2.0);
        let (tour, cost) = brute_force_optimum(&m).unwrap();
        assert_eq!(cost, 10.0);
        assert_eq!(tour.order(), &[0, 1, 2, 3, 4], "all tours tie; lex wins");
    }

    #[test]
    fn brute_force_refuses_oversized_instances() {
        let m = uniform_matrix(13, 1.0);
        assert!(matches!(
            brute_force_optimum(&m),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn demo_instance_has_unique_optimal_cost_16() {
        let m = demo_four_city();
        let (tour, cost) = brute_force_optimum(&m).unwrap();
        assert_eq!(cost, 16.0);
        assert_eq!(tour.order(), &[0, 1, 2, 3]);
        // The reverse orientation ties; the other undirected tours do not.
        let rev = Tour::new(vec![0, 3, 2, 1]).unwrap();
        assert_eq!(tour_cost(&m, &rev).unwrap(), 16.0);
        let other = Tour::new(vec![0, 2, 1, 3]).unwrap();
        assert_eq!(tour_cost(&m, &other).unwrap(), 18.0);
    }

    #[test]
    fn random_instances_are_reproducible_and_in_range() {
        let a = random_instance(5, 0.0, 1.0, true, 1).unwrap();
        let b = random_instance(5, 0.0, 1.0, true, 1).unwrap();
        assert_eq!(a, b, "same seed, same instance");
        let c = random_instance(5, 0.0, 1.0, true, 2).unwrap();
        assert_ne!(a, c, "different seed should change some entry");
        for i in 0..5 {
            for j in 0..5 {
                let v = a.cost(i, j);
                assert!((0.0..1.0).contains(&v) || i == j, "entry out of range: {v}");
                assert_eq!(a.cost(i, j), a.cost(j, i), "symmetric flag");
            }
            assert_eq!(a.cost(i, i), 0.0);
        }
    }

    #[test]
    fn random_instances_can_be_asymmetric() {
        let m = random_instance(6, 0.0, 10.0, false, 7).unwrap();
        let asym = (0..6)
            .flat_map(|i| (0..6).map(move |j| (i, j)))
            .any(|(i, j)| i < j && m.cost(i, j) != m.cost(j, i));
        assert!(asym, "independent draws should break symmetry");
    }

    #[test]
    fn random_instance_rejects_bad_ranges() {
        assert!(random_instance(2, 0.0, 1.0, true, 0).is_err());
        assert!(random_instance(4, -1.0, 1.0, true, 0).is_err());
        assert!(random_instance(4, 1.0, 1.0, true, 0).is_err());
        assert!(random_instance(4, 2.0, 1.0, true, 0).is_err());
    }

    #[test]
    fn default_penalties_follow_the_matrix_scale() {
        let m = uniform_matrix(4, 5.0);
        let p = default_penalties(&m);
        assert_eq!(p.d, 10.0);
        assert_eq!(p.gamma_pen, 40.0);
        p.validate_for(&m).unwrap();

        let z = uniform_matrix(5, 0.0);
        let p = default_penalties(&z);
        assert_eq!(p.d, 1.0);
        assert_eq!(p.gamma_pen, 5.0);
        p.validate_for(&z).unwrap();

        let m = uniform_matrix(6, 1.0);
        let p = default_penalties(&m);
        assert_eq!((p.d, p.gamma_pen), (2.0, 12.0));
    }

    #[test]
    fn penalty_validation_rejects_underscaled_values() {
        let m = uniform_matrix(4, 5.0);
        assert!(PenaltyConfig::new(5.0, 40.0)
            .unwrap()
            .validate_for(&m)
            .is_err());
        assert!(PenaltyConfig::new(6.0, 19.0)
            .unwrap()
            .validate_for(&m)
            .is_err());
        assert!(PenaltyConfig::new(0.0, 1.0).is_err());
        assert!(PenaltyConfig::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn save_load_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("instance.json");
        let m = random_instance(5, 0.0, 13.7, false, 42).unwrap();
        save_instance(&m, &path).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(m, back, "JSON round-trip must be exact");
    }

    #[test]
    fn load_rejects_malformed_files() {
        let dir = tempfile::tempdir().unwrap();

        let bad_shape = dir.path().join("shape.json");
        std::fs::write(&bad_shape, r#"{"n":3,"costs":[[0,1,2],[1,0,3]]}"#).unwrap();
        assert!(load_instance(&bad_shape).is_err(), "3x2 is not square");

        let bad_diag = dir.path().join("diag.json");
        std::fs::write(
            &bad_diag,
            r#"{"n":3,"costs":[[0,1,2],[1,5,3],[2,3,0]]}"#,
        )
        .unwrap();
        assert!(load_instance(&bad_diag).is_err(), "nonzero diagonal");

        let negative = dir.path().join("neg.json");
        std::fs::write(
            &negative,
            r#"{"n":3,"costs":[[0,1,2],[-1,0,3],[2,3,0]]}"#,
        )
        .unwrap();
        assert!(load_instance(&negative).is_err(), "negative cost");

        let garbage = dir.path().join("garbage.json");
        std::fs::write(&garbage, "{not json").unwrap();
        assert!(load_instance(&garbage).is_err());
    }

    fn arb_matrix(max_n: usize) -> impl Strategy<Value = CostMatrix> {
        (3..=max_n, any::<u64>(), any::<bool>())
            .prop_map(|(n, seed, sym)| random_instance(n, 0.0, 50.0, sym, seed).unwrap())
    }

    fn shuffled_tour(n: usize, seed: u64) -> Tour {
        use rand::Rng as _;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rest: Vec<usize> = (1..n).collect();
        for i in (1..rest.len()).rev() {
            let j = rng.gen_range(0..=i);
            rest.swap(i, j);
        }
        let mut order = vec![0];
        order.extend(rest);
        Tour::new(order).unwrap()
    }

    proptest! {
        #[test]
        fn no_tour_beats_the_oracle(m in arb_matrix(6), seed in any::<u64>()) {
            let (_, best) = brute_force_optimum(&m).unwrap();
            let tour = shuffled_tour(m.n(), seed);
            prop_assert!(tour_cost(&m, &tour).unwrap() >= best);
        }

        #[test]
        fn reversal_preserves_cost_on_symmetric_instances(
            n in 4usize..7,
            seed in any::<u64>(),
        ) {
            let m = random_instance(n, 0.0, 20.0, true, seed).unwrap();
            let (tour, cost) = brute_force_optimum(&m).unwrap();
            let mut rev = tour.order().to_vec();
            rev[1..].reverse();
            let rev = Tour::new(rev).unwrap();
            // Same legs, different summation order, so compare up to
            // addition rounding.
            let rev_cost = tour_cost(&m, &rev).unwrap();
            prop_assert!((rev_cost - cost).abs() <= 1e-9 * cost.max(1.0));
        }

        #[test]
        fn oracle_cost_matches_its_tour(m in arb_matrix(6)) {
            let (tour, cost) = brute_force_optimum(&m).unwrap();
            prop_assert_eq!(tour_cost(&m, &tour).unwrap(), cost);
        }
    }
}
