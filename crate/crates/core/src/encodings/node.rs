//! Node encoding: one indicator qubit per (city, step) pair.
//!
//! City 0 is pinned to step 0, leaving an `m x m` assignment matrix over
//! the remaining `m = n - 1` cities and steps, stored row-major by city:
//! qubit `(i-1)*m + (a-1)` is the indicator "city `i` sits at step `a`"
//! (bit set = assigned). Tour legs contribute `l(i, j)` whenever city `i`
//! at step `a` is followed by city `j` at step `a+1`, with boundary legs to
//! and from city 0; every step and every city must be used exactly once,
//! priced by `gamma_pen * (sum - 1)^2` per constraint.
//!
//! Evaluation is table-driven so full-diagonal scans stay cheap: per-city
//! row bits are transposed into per-step city sets via a precomputed spread
//! table, and leg sums come from subset-sum tables indexed by those sets.
//! For one-hot sets the table entries are single matrix reads, so feasible
//! costs reproduce `tour_cost` bit-for-bit.

use crate::error::{Error, Result};
use crate::instances::{CostMatrix, PenaltyConfig, Tour};
use crate::qaoa::MAX_QUBITS;

use super::{DiagonalProblem, EncodingKind, Repr};

/// Largest per-axis slot count the cap admits: m^2 <= MAX_QUBITS gives
/// m <= 5, which keeps the packed column transpose inside a u32.
const MAX_M: usize = 5;

pub(crate) struct NodeTables {
    m: usize,
    nq: usize,
    /// spread[row] relocates city-row bits into the packed per-step layout;
    /// packed bit (a-1)*m + (i-1) means "city i at step a".
    spread: Vec<u32>,
    /// start[set] = sum of l(0, i) over cities i in set.
    start: Vec<f64>,
    /// end[set] = sum of l(i, 0) over cities i in set.
    end: Vec<f64>,
    /// trans[(u << m) | v] = sum of l(i, j) over i in u, j in v.
    trans: Vec<f64>,
}

/// Builds the `(n-1)^2`-qubit indicator encoding of `matrix`.
pub fn build_node(matrix: &CostMatrix, pen: PenaltyConfig) -> Result<DiagonalProblem> {
    let n = matrix.n();
    let m = n - 1;
    let nq = m * m;
    if nq > MAX_QUBITS {
        return Err(Error::CapExceeded(format!(
            "node encoding of n = {n} needs {nq} qubits, above the simulator cap of {MAX_QUBITS}"
        )));
    }
    debug_assert!(m <= MAX_M);
    pen.validate_for(matrix)?;

    let sets = 1usize << m;
    let mut spread = vec![0u32; sets];
    for row in 0..sets {
        let mut packed = 0u32;
        for b in 0..m {
            if row >> b & 1 == 1 {
                // Row bit b holds step a = m - b.
                packed |= 1 << ((m - b - 1) * m);
            }
        }
        spread[row] = packed;
    }

    let mut start = vec![0.0; sets];
    let mut end = vec![0.0; sets];
    for set in 0..sets {
        for i in 1..=m {
            if set >> (i - 1) & 1 == 1 {
                start[set] += matrix.cost(0, i);
                end[set] += matrix.cost(i, 0);
            }
        }
    }
    let mut trans = vec![0.0; sets * sets];
    for u in 0..sets {
        for v in 0..sets {
            let mut sum = 0.0;
            for i in 1..=m {
                if u >> (i - 1) & 1 == 0 {
                    continue;
                }
                for j in 1..=m {
                    if v >> (j - 1) & 1 == 1 {
                        sum += matrix.cost(i, j);
                    }
                }
            }
            trans[(u << m) | v] = sum;
        }
    }

    let tables = NodeTables {
        m,
        nq,
        spread,
        start,
        end,
        trans,
    };
    Ok(DiagonalProblem::new(
        EncodingKind::Node,
        nq,
        matrix.clone(),
        pen,
        Repr::Node(tables),
    ))
}

impl NodeTables {
    /// Per-step city sets of `z` (packed m-bit fields) plus the integer
    /// penalty units from all row and column constraints.
    #[inline]
    fn unpack(&self, z: usize) -> (u32, i64) {
        let m = self.m;
        let mask = (1usize << m) - 1;
        let mut packed = 0u32;
        let mut pen = 0i64;
        for i in 1..=m {
            let row = (z >> (self.nq - i * m)) & mask;
            packed |= self.spread[row] << (i - 1);
            let r = row.count_ones() as i64 - 1;
            pen += r * r;
        }
        for a in 0..m {
            let col = (packed >> (a * m)) as usize & mask;
            let c = col.count_ones() as i64 - 1;
            pen += c * c;
        }
        (packed, pen)
    }

    #[inline]
    pub(crate) fn cost_of(&self, z: usize, gamma: f64) -> f64 {
        let m = self.m;
        let mask = (1usize << m) - 1;
        let (packed, pen) = self.unpack(z);
        let first = packed as usize & mask;
        let mut cost = self.start[first];
        let mut prev = first;
        for a in 1..m {
            let col = (packed >> (a * m)) as usize & mask;
            cost += self.trans[(prev << m) | col];
            prev = col;
        }
        cost += self.end[prev];
        if pen != 0 {
            cost += gamma * pen as f64;
        }
        cost
    }

    #[inline]
    pub(crate) fn is_feasible(&self, z: usize) -> bool {
        let (_, pen) = self.unpack(z);
        pen == 0
    }

    pub(crate) fn decode(&self, z: usize) -> Option<Tour> {
        let m = self.m;
        let mask = (1u32 << m) - 1;
        let (packed, pen) = self.unpack(z);
        if pen != 0 {
            return None;
        }
        let mut order = Vec::with_capacity(m + 1);
        order.push(0);
        for a in 0..m {
            let col = (packed >> (a * m)) & mask;
            order.push(col.trailing_zeros() as usize + 1);
        }
        Some(Tour::new(order).expect("penalty-free assignment is a permutation"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{default_penalties, demo_four_city, random_instance, tour_cost};

    /// Basis index with the given (city, step) indicators set, both 1-based.
    fn node_index(m: usize, assignments: &[(usize, usize)]) -> usize {
        let nq = m * m;
        let mut z = 0usize;
        for &(city, step) in assignments {
            let q = (city - 1) * m + (step - 1);
            z |= 1 << (nq - 1 - q);
        }
        z
    }

    #[test]
    fn qubit_count_is_m_squared() {
        let pen = PenaltyConfig::new(20.0, 200.0).unwrap();
        for (n, expected) in [(4, 9), (5, 16), (6, 25)] {
            let m = random_instance(n, 0.0, 9.0, true, 0).unwrap();
            let p = build_node(&m, pen).unwrap();
            assert_eq!(p.num_qubits(), expected, "n = {n}");
        }
    }

    #[test]
    fn seven_cities_exceed_the_qubit_cap() {
        let m = random_instance(7, 0.0, 9.0, true, 0).unwrap();
        let pen = default_penalties(&m);
        assert!(matches!(build_node(&m, pen), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn underscaled_penalties_are_rejected() {
        let m = demo_four_city();
        let pen = PenaltyConfig::new(7.0, 100.0).unwrap();
        assert!(build_node(&m, pen).is_err(), "d must exceed max cost 7");
    }

    #[test]
    fn all_zeros_pays_every_constraint() {
        let m = demo_four_city();
        let pen = default_penalties(&m);
        let p = build_node(&m, pen).unwrap();
        // Three empty steps and three unused cities: 6 units of gamma_pen.
        assert_eq!(p.cost_of(0), 6.0 * pen.gamma_pen);
        assert!(!p.is_feasible(0));
        assert!(p.decode(0).is_none());
    }

    #[test]
    fn feasible_index_costs_its_tour_exactly() {
        let m = random_instance(4, 0.0, 10.0, false, 11).unwrap();
        let pen = default_penalties(&m);
        let p = build_node(&m, pen).unwrap();
        // City order 0, 2, 1, 3 across steps.
        let z = node_index(3, &[(2, 1), (1, 2), (3, 3)]);
        let tour = Tour::new(vec![0, 2, 1, 3]).unwrap();
        assert_eq!(p.cost_of(z), tour_cost(&m, &tour).unwrap());
        assert_eq!(p.decode(z).unwrap(), tour);
    }

    #[test]
    fn decode_round_trips_every_permutation() {
        let m = demo_four_city();
        let p = build_node(&m, default_penalties(&m)).unwrap();
        let perms: [[usize; 3]; 6] = [
            [1, 2, 3],
            [1, 3, 2],
            [2, 1, 3],
            [2, 3, 1],
            [3, 1, 2],
            [3, 2, 1],
        ];
        for perm in perms {
            let assignments: Vec<(usize, usize)> = perm
                .iter()
                .enumerate()
                .map(|(step0, &city)| (city, step0 + 1))
                .collect();
            let z = node_index(3, &assignments);
            let tour = p.decode(z).expect("permutation state is feasible");
            let expected: Vec<usize> = std::iter::once(0).chain(perm).collect();
            assert_eq!(tour.order(), &expected[..]);
            assert_eq!(p.cost_of(z), tour_cost(&m, &tour).unwrap());
        }
    }

    #[test]
    fn one_violation_pays_one_gamma_unit() {
        let m = demo_four_city();
        let pen = default_penalties(&m);
        let p = build_node(&m, pen).unwrap();
        // City 1 sits at steps 1 and 2, city 2 is missing. Row sums: city 1
        // pays (2-1)^2 = 1, city 2 pays (0-1)^2 = 1, city 3 is fine. Every
        // step holds exactly one city, so columns add nothing: 2 units total.
        let z = node_index(3, &[(1, 1), (1, 2), (3, 3)]);
        let legs = m.cost(0, 1) + m.cost(1, 1) + m.cost(1, 3);
        let expected = legs + m.cost(3, 0) + 2.0 * pen.gamma_pen;
        assert_eq!(p.cost_of(z), expected);
        assert!(!p.is_feasible(z));
    }
}
