//! Diagonal cost Hamiltonians over computational basis states.
//!
//! Each encoding maps basis index `z` of an `num_qubits`-qubit register to a
//! real cost: feasible indices decode to a tour and cost exactly that tour's
//! closed-loop length, infeasible indices are priced above every tour by the
//! penalty scheme. Three encodings are provided:
//!
//! * [`build_node`]: one indicator qubit per (city, step) pair,
//!   `(n-1)^2` qubits, quadratic step/city constraints priced by
//!   `gamma_pen`.
//! * [`build_edge`]: one binary register of `ceil(log2(n-1))` bits per tour
//!   slot, `(n-1) * ceil(log2(n-1))` qubits; transition costs come from
//!   lookup tables padded with `d` for self-loops and placeholder cities.
//! * [`build_sre`]: basis index is the lexicographic rank of the visiting
//!   order, `ceil(log2((n-1)!))` qubits; every constraint disappears into
//!   the index map and only the padding tail is penalized.
//!
//! Bit convention everywhere: qubit 0 is the most significant bit of the
//! basis index.

mod edge;
mod node;
mod sre;

pub use edge::{build_edge, EdgeLayout, PenaltyVariant};
pub use node::build_node;
pub use sre::build_sre;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{CostMatrix, PenaltyConfig, Tour};

/// Largest dimension [`DiagonalProblem::materialize`] will expand into a
/// vector; anything bigger must go through on-the-fly evaluation.
pub const MATERIALIZE_CAP: usize = 1 << 20;

/// Largest dimension the full-diagonal scans ([`DiagonalProblem::argmin`],
/// [`DiagonalProblem::count_feasible`]) will walk.
pub const ARGMIN_CAP: usize = 1 << 26;

/// Anything that assigns a real cost to every basis index of a register.
///
/// The simulator layers are written against this trait so that tests can
/// drive them with explicit toy diagonals and the cached fast path can wrap
/// a materialized vector.
pub trait DiagonalCost: Sync {
    fn num_qubits(&self) -> usize;
    fn cost_of(&self, index: usize) -> f64;

    fn dimension(&self) -> usize {
        1usize << self.num_qubits()
    }
}

/// Which encoding produced a [`DiagonalProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    /// Indicator qubit per (city, step) pair.
    Node,
    /// Binary slot register per tour position.
    Edge,
    /// Rank of the visiting order (subspace reduction).
    Sre,
}

impl std::fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EncodingKind::Node => "node",
            EncodingKind::Edge => "edge",
            EncodingKind::Sre => "sre",
        })
    }
}

pub(crate) enum Repr {
    Node(node::NodeTables),
    Edge(edge::EdgeTables),
    Sre(sre::SreMap),
}

/// A cost diagonal together with the decode map back to tours.
///
/// Construction fixes the instance and penalty magnitudes; evaluation is
/// pure. For a feasible index, `cost_of` reproduces `tour_cost` of the
/// decoded tour bit-for-bit (identical summation order, penalty exactly
/// zero), which is what allows exact-equality optimality checks downstream.
pub struct DiagonalProblem {
    kind: EncodingKind,
    num_qubits: usize,
    matrix: CostMatrix,
    pen: PenaltyConfig,
    repr: Repr,
}

impl DiagonalProblem {
    pub(crate) fn new(
        kind: EncodingKind,
        num_qubits: usize,
        matrix: CostMatrix,
        pen: PenaltyConfig,
        repr: Repr,
    ) -> Self {
        DiagonalProblem {
            kind,
            num_qubits,
            matrix,
            pen,
            repr,
        }
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dimension(&self) -> usize {
        1usize << self.num_qubits
    }

    /// Number of cities in the underlying instance.
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &CostMatrix {
        &self.matrix
    }

    pub fn penalties(&self) -> PenaltyConfig {
        self.pen
    }

    /// Slot layout, present only for the edge encoding.
    pub fn edge_layout(&self) -> Option<&EdgeLayout> {
        match &self.repr {
            Repr::Edge(t) => Some(t.layout()),
            _ => None,
        }
    }

    /// Penalty flavor, present only for the edge encoding.
    pub fn edge_variant(&self) -> Option<PenaltyVariant> {
        match &self.repr {
            Repr::Edge(t) => Some(t.variant()),
            _ => None,
        }
    }

    /// Cost of basis index `z`.
    #[inline]
    pub fn cost_of(&self, z: usize) -> f64 {
        debug_assert!(z < self.dimension());
        match &self.repr {
            Repr::Node(t) => t.cost_of(z, self.pen.gamma_pen),
            Repr::Edge(t) => t.cost_of(z, self.pen.gamma_pen),
            Repr::Sre(t) => t.cost_of(&self.matrix, z, self.pen.gamma_pen),
        }
    }

    /// The tour encoded by `z`, if `z` satisfies every constraint.
    pub fn decode(&self, z: usize) -> Option<Tour> {
        match &self.repr {
            Repr::Node(t) => t.decode(z),
            Repr::Edge(t) => t.decode(z),
            Repr::Sre(t) => t.decode(z),
        }
    }

    #[inline]
    pub fn is_feasible(&self, z: usize) -> bool {
        match &self.repr {
            Repr::Node(t) => t.is_feasible(z),
            Repr::Edge(t) => t.is_feasible(z),
            Repr::Sre(t) => t.is_feasible(z),
        }
    }

    /// Expands the full diagonal into a vector. Errors above
    /// [`MATERIALIZE_CAP`]; large problems must be scanned on the fly.
    pub fn materialize(&self) -> Result<Vec<f64>> {
        let dim = self.dimension();
        if dim > MATERIALIZE_CAP {
            return Err(Error::CapExceeded(format!(
                "dimension {dim} exceeds the materialization cap {MATERIALIZE_CAP}"
            )));
        }
        let mut diag = vec![0.0; dim];
        let gamma = self.pen.gamma_pen;
        match &self.repr {
            Repr::Node(t) => fill(&mut diag, |z| t.cost_of(z, gamma)),
            Repr::Edge(t) => fill(&mut diag, |z| t.cost_of(z, gamma)),
            Repr::Sre(t) => fill(&mut diag, |z| t.cost_of(&self.matrix, z, gamma)),
        }
        Ok(diag)
    }

    /// Index and value of the diagonal minimum, scanning every basis state
    /// on the fly. Ties resolve to the lowest index. Errors above
    /// [`ARGMIN_CAP`].
    pub fn argmin(&self) -> Result<(usize, f64)> {
        let dim = self.dimension();
        if dim > ARGMIN_CAP {
            return Err(Error::CapExceeded(format!(
                "dimension {dim} exceeds the argmin scan cap {ARGMIN_CAP}"
            )));
        }
        let gamma = self.pen.gamma_pen;
        Ok(match &self.repr {
            Repr::Node(t) => scan_argmin(dim, |z| t.cost_of(z, gamma)),
            Repr::Edge(t) => scan_argmin(dim, |z| t.cost_of(z, gamma)),
            Repr::Sre(t) => scan_argmin(dim, |z| t.cost_of(&self.matrix, z, gamma)),
        })
    }

    /// Number of feasible basis states. Every encoding here admits exactly
    /// `(n-1)!` of them, which tests assert against this scan.
    pub fn count_feasible(&self) -> Result<usize> {
        let dim = self.dimension();
        if dim > ARGMIN_CAP {
            return Err(Error::CapExceeded(format!(
                "dimension {dim} exceeds the feasibility scan cap {ARGMIN_CAP}"
            )));
        }
        Ok(match &self.repr {
            Repr::Node(t) => scan_count(dim, |z| t.is_feasible(z)),
            Repr::Edge(t) => scan_count(dim, |z| t.is_feasible(z)),
            Repr::Sre(t) => scan_count(dim, |z| t.is_feasible(z)),
        })
    }
}

impl DiagonalCost for DiagonalProblem {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn cost_of(&self, index: usize) -> f64 {
        DiagonalProblem::cost_of(self, index)
    }
}

/// Chunk size for the parallel scans; small enough to balance, large enough
/// to amortize the fork overhead.
const SCAN_CHUNK: usize = 1 << 16;

fn fill(diag: &mut [f64], cost: impl Fn(usize) -> f64 + Sync) {
    if diag.len() < SCAN_CHUNK {
        for (z, slot) in diag.iter_mut().enumerate() {
            *slot = cost(z);
        }
        return;
    }
    diag.par_chunks_mut(SCAN_CHUNK).enumerate().for_each(|(c, chunk)| {
        let base = c * SCAN_CHUNK;
        for (off, slot) in chunk.iter_mut().enumerate() {
            *slot = cost(base + off);
        }
    });
}

fn scan_argmin(dim: usize, cost: impl Fn(usize) -> f64 + Sync) -> (usize, f64) {
    let scan_range = |lo: usize, hi: usize| {
        let mut best = (lo, cost(lo));
        for z in lo + 1..hi {
            let c = cost(z);
            if c < best.1 {
                best = (z, c);
            }
        }
        best
    };
    if dim <= SCAN_CHUNK {
        let (z, c) = scan_range(0, dim);
        return (z, c);
    }
    let chunks = dim.div_ceil(SCAN_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| scan_range(c * SCAN_CHUNK, ((c + 1) * SCAN_CHUNK).min(dim)))
        // Lexicographic merge on (value, index) keeps the lowest-index
        // tie-break deterministic regardless of how chunks interleave.
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| {
                if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        )
}

fn scan_count(dim: usize, pred: impl Fn(usize) -> bool + Sync) -> usize {
    if dim <= SCAN_CHUNK {
        return (0..dim).filter(|&z| pred(z)).count();
    }
    let chunks = dim.div_ceil(SCAN_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            (c * SCAN_CHUNK..((c + 1) * SCAN_CHUNK).min(dim))
                .filter(|&z| pred(z))
                .count()
        })
        .sum()
}

/// A plain stored diagonal. Used by tests for toy spectra and internally to
/// cache small problem diagonals across ansatz layers.
pub struct ExplicitDiagonal {
    num_qubits: usize,
    values: Vec<f64>,
}

impl ExplicitDiagonal {
    /// `values` must have power-of-two length `>= 2` and be finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let dim = values.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "diagonal length {dim} is not a power of two >= 2"
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "diagonal contains a non-finite value {bad}"
            )));
        }
        Ok(ExplicitDiagonal {
            num_qubits: dim.trailing_zeros() as usize,
            values,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl DiagonalCost for ExplicitDiagonal {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    fn cost_of(&self, index: usize) -> f64 {
        self.values[index]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{
        brute_force_optimum, default_penalties, demo_four_city, random_instance, tour_cost,
    };
    use proptest::prelude::*;

    fn all_three(m: &CostMatrix) -> Vec<DiagonalProblem> {
        let pen = default_penalties(m);
        vec![
            build_node(m, pen).unwrap(),
            build_edge(m, pen, PenaltyVariant::Legal).unwrap(),
            build_sre(m, pen).unwrap(),
        ]
    }

    #[test]
    fn every_encoding_recovers_the_demo_optimum() {
        let m = demo_four_city();
        let (_, best) = brute_force_optimum(&m).unwrap();
        for p in all_three(&m) {
            let (zmin, cmin) = p.argmin().unwrap();
            assert_eq!(cmin, best, "{} argmin value", p.kind());
            let tour = p
                .decode(zmin)
                .unwrap_or_else(|| panic!("{} argmin must be feasible", p.kind()));
            assert_eq!(tour_cost(&m, &tour).unwrap(), best);
        }
    }

    #[test]
    fn feasible_state_counts_are_factorial() {
        for n in [4, 5] {
            let m = random_instance(n, 0.0, 9.0, false, n as u64).unwrap();
            let expected: usize = (1..n).product();
            for p in all_three(&m) {
                assert_eq!(
                    p.count_feasible().unwrap(),
                    expected,
                    "{} n={n} should have (n-1)! feasible states",
                    p.kind()
                );
            }
        }
    }

    #[test]
    fn materialize_respects_the_cap() {
        let m = random_instance(6, 0.0, 5.0, true, 3).unwrap();
        let pen = default_penalties(&m);
        let node = build_node(&m, pen).unwrap();
        assert_eq!(node.dimension(), 1 << 25);
        assert!(
            matches!(node.materialize(), Err(Error::CapExceeded(_))),
            "2^25 exceeds the materialization cap"
        );
        // The scans still work on the fly.
        let (_, cmin) = node.argmin().unwrap();
        let (_, best) = brute_force_optimum(&m).unwrap();
        assert_eq!(cmin, best);
    }

    #[test]
    fn argmin_ties_resolve_to_the_lowest_index() {
        let m = {
            // Uniform costs: all six tours tie, so the first feasible rank wins.
            let rows = (0..4)
                .map(|i| (0..4).map(|j| if i == j { 0.0 } else { 3.0 }).collect())
                .collect();
            CostMatrix::new(rows).unwrap()
        };
        let p = build_sre(&m, default_penalties(&m)).unwrap();
        let (z, c) = p.argmin().unwrap();
        assert_eq!(z, 0);
        assert_eq!(c, 12.0);
    }

    #[test]
    fn explicit_diagonal_validates_shape() {
        assert!(ExplicitDiagonal::new(vec![1.0, 2.0]).is_ok());
        assert!(ExplicitDiagonal::new(vec![1.0, 2.0, 3.0]).is_err());
        assert!(ExplicitDiagonal::new(vec![1.0]).is_err());
        assert!(ExplicitDiagonal::new(vec![0.0, f64::NAN]).is_err());
        let d = ExplicitDiagonal::new(vec![5.0, 7.0, 0.0, 1.0]).unwrap();
        assert_eq!(d.num_qubits(), 2);
        assert_eq!(d.cost_of(3), 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn feasible_costs_match_tours_and_infeasible_costs_dominate(
            n in 4usize..6,
            seed in any::<u64>(),
            sym in any::<bool>(),
        ) {
            let m = random_instance(n, 0.0, 10.0, sym, seed).unwrap();
            let worst = {
                // Most expensive tour, by scanning the SRE diagonal's legal head.
                let pen = default_penalties(&m);
                let sre = build_sre(&m, pen).unwrap();
                (0..sre.dimension())
                    .filter(|&z| sre.is_feasible(z))
                    .map(|z| sre.cost_of(z))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            for p in all_three(&m) {
                for z in 0..p.dimension() {
                    let c = p.cost_of(z);
                    match p.decode(z) {
                        Some(tour) => {
                            prop_assert!(p.is_feasible(z));
                            prop_assert_eq!(
                                c,
                                tour_cost(&m, &tour).unwrap(),
                                "{} feasible index {} must cost its tour exactly",
                                p.kind(),
                                z
                            );
                        }
                        None => {
                            prop_assert!(!p.is_feasible(z));
                            prop_assert!(
                                c > worst,
                                "{} infeasible index {} cost {} fails to dominate worst tour {}",
                                p.kind(),
                                z,
                                c,
                                worst
                            );
                        }
                    }
                }
            }
        }

        #[test]
        fn argmin_agrees_with_brute_force_on_small_instances(
            n in 4usize..6,
            seed in any::<u64>(),
        ) {
            let m = random_instance(n, 0.0, 25.0, false, seed).unwrap();
            let (_, best) = brute_force_optimum(&m).unwrap();
            let pen = default_penalties(&m);
            for p in [
                build_edge(&m, pen, PenaltyVariant::Legal).unwrap(),
                build_edge(&m, pen, PenaltyVariant::Repeat).unwrap(),
                build_sre(&m, pen).unwrap(),
            ] {
                let (z, c) = p.argmin().unwrap();
                prop_assert_eq!(c, best);
                prop_assert!(p.decode(z).is_some());
            }
        }
    }
}
