//! Edge encoding: one binary register per tour slot.
//!
//! The basis index splits, most significant slot first, into `n - 1` groups
//! of `k = ceil(log2(n - 1))` bits. Group value `g` names city `g + 1` when
//! `g <= n - 2`; the remaining values (forced by rounding the alphabet up
//! to `K = 2^k`) are placeholder cities. Cost is a chain of table lookups:
//! a departure table for slot 1, a `K x K` transition table between
//! consecutive slots, and a return table for the last slot. Self-loops and
//! placeholder entries hold the deterrent `d` instead of a leg cost.
//!
//! Two flavors of the hard constraint are available: `legal` zeroes the
//! penalty exactly on slot assignments that permute the real cities
//! (default), `repeat` charges it whenever two slots agree, leaving
//! placeholder-only violations to the `d` entries.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{CostMatrix, PenaltyConfig, Tour};
use crate::qaoa::MAX_QUBITS;

use super::{DiagonalProblem, EncodingKind, Repr};

/// How the hard constraint term prices a slot assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyVariant {
    /// Zero exactly on permutations of the real cities.
    Legal,
    /// One whenever any two slots hold the same value.
    Repeat,
}

impl std::fmt::Display for PenaltyVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PenaltyVariant::Legal => "legal",
            PenaltyVariant::Repeat => "repeat",
        })
    }
}

/// Shape of the slot registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLayout {
    /// Bits per slot, `k`.
    pub bits_per_slot: usize,
    /// Alphabet size per slot, `K = 2^k`.
    pub alphabet: usize,
    /// Number of slots, `n - 1`.
    pub slots: usize,
    /// Placeholder city count, `K - (n - 1)`.
    pub fake_count: usize,
}

pub(crate) struct EdgeTables {
    layout: EdgeLayout,
    variant: PenaltyVariant,
    /// Real city labels are 0..real; everything above is a placeholder.
    real: usize,
    /// depart[g]: leg 0 -> city g+1, or d for placeholders.
    depart: Vec<f64>,
    /// ret[g]: leg city g+1 -> 0, or d for placeholders.
    ret: Vec<f64>,
    /// trans[(g << k) | h]: leg city g+1 -> city h+1, with d on the
    /// diagonal and on every placeholder row/column.
    trans: Vec<f64>,
}

/// Builds the `(n-1) * ceil(log2(n-1))`-qubit slot-register encoding.
pub fn build_edge(
    matrix: &CostMatrix,
    pen: PenaltyConfig,
    variant: PenaltyVariant,
) -> Result<DiagonalProblem> {
    let n = matrix.n();
    let real = n - 1;
    let alphabet = real.next_power_of_two();
    let k = alphabet.trailing_zeros() as usize;
    let nq = real * k;
    if nq > MAX_QUBITS {
        return Err(Error::CapExceeded(format!(
            "edge encoding of n = {n} needs {nq} qubits, above the simulator cap of {MAX_QUBITS}"
        )));
    }
    pen.validate_for(matrix)?;

    let d = pen.d;
    let mut depart = vec![d; alphabet];
    let mut ret = vec![d; alphabet];
    for g in 0..real {
        depart[g] = matrix.cost(0, g + 1);
        ret[g] = matrix.cost(g + 1, 0);
    }
    let mut trans = vec![d; alphabet * alphabet];
    for g in 0..real {
        for h in 0..real {
            if g != h {
                trans[(g << k) | h] = matrix.cost(g + 1, h + 1);
            }
        }
    }

    let tables = EdgeTables {
        layout: EdgeLayout {
            bits_per_slot: k,
            alphabet,
            slots: real,
            fake_count: alphabet - real,
        },
        variant,
        real,
        depart,
        ret,
        trans,
    };
    Ok(DiagonalProblem::new(
        EncodingKind::Edge,
        nq,
        matrix.clone(),
        pen,
        Repr::Edge(tables),
    ))
}

impl EdgeTables {
    pub(crate) fn layout(&self) -> &EdgeLayout {
        &self.layout
    }

    pub(crate) fn variant(&self) -> PenaltyVariant {
        self.variant
    }

    #[inline]
    fn slot(&self, z: usize, t: usize) -> usize {
        let k = self.layout.bits_per_slot;
        (z >> ((self.layout.slots - 1 - t) * k)) & (self.layout.alphabet - 1)
    }

    #[inline]
    pub(crate) fn cost_of(&self, z: usize, gamma: f64) -> f64 {
        let k = self.layout.bits_per_slot;
        let slots = self.layout.slots;
        let mut g = self.slot(z, 0);
        let mut cost = self.depart[g];
        let mut seen: u32 = 1 << g;
        let mut repeat = false;
        for t in 1..slots {
            let h = self.slot(z, t);
            cost += self.trans[(g << k) | h];
            if seen >> h & 1 == 1 {
                repeat = true;
            }
            seen |= 1 << h;
            g = h;
        }
        cost += self.ret[g];
        let violated = match self.variant {
            // With n-1 slots, a full real-city mask forces distinctness, so
            // the permutation check is a single mask comparison.
            PenaltyVariant::Legal => seen != (1 << self.real) - 1,
            PenaltyVariant::Repeat => repeat,
        };
        if violated {
            cost += gamma;
        }
        cost
    }

    #[inline]
    pub(crate) fn is_feasible(&self, z: usize) -> bool {
        let mut seen: u32 = 0;
        for t in 0..self.layout.slots {
            seen |= 1 << self.slot(z, t);
        }
        seen == (1 << self.real) - 1
    }

    pub(crate) fn decode(&self, z: usize) -> Option<Tour> {
        if !self.is_feasible(z) {
            return None;
        }
        let mut order = Vec::with_capacity(self.layout.slots + 1);
        order.push(0);
        for t in 0..self.layout.slots {
            order.push(self.slot(z, t) + 1);
        }
        Some(Tour::new(order).expect("full real mask is a permutation"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{
        brute_force_optimum, default_penalties, demo_four_city, random_instance, tour_cost,
    };

    fn demo_problem(variant: PenaltyVariant) -> DiagonalProblem {
        let m = demo_four_city();
        let pen = default_penalties(&m);
        build_edge(&m, pen, variant).unwrap()
    }

    /// Basis index from slot values, slot 0 most significant.
    fn edge_index(k: usize, groups: &[usize]) -> usize {
        groups.iter().fold(0, |z, &g| (z << k) | g)
    }

    #[test]
    fn qubit_counts_round_the_alphabet_up() {
        let pen = PenaltyConfig::new(20.0, 200.0).unwrap();
        for (n, expected) in [(4, 6), (5, 8), (6, 15), (7, 18), (8, 21), (9, 24)] {
            let m = random_instance(n, 0.0, 9.0, true, 0).unwrap();
            let p = build_edge(&m, pen, PenaltyVariant::Legal).unwrap();
            assert_eq!(p.num_qubits(), expected, "n = {n}");
            let layout = p.edge_layout().unwrap();
            let real = n - 1;
            assert!(real <= layout.alphabet && layout.alphabet < 2 * real);
            assert_eq!(layout.slots * layout.bits_per_slot, p.num_qubits());
            assert_eq!(layout.fake_count, layout.alphabet - real);
        }
    }

    #[test]
    fn ten_cities_exceed_the_qubit_cap() {
        let m = random_instance(10, 0.0, 9.0, true, 0).unwrap();
        let pen = default_penalties(&m);
        assert!(matches!(
            build_edge(&m, pen, PenaltyVariant::Legal),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn four_city_legal_states_are_the_six_slot_permutations() {
        let p = demo_problem(PenaltyVariant::Legal);
        let legal: Vec<usize> = (0..p.dimension()).filter(|&z| p.is_feasible(z)).collect();
        assert_eq!(legal, vec![6, 9, 18, 24, 33, 36]);
        // Slot values read most significant first: 6 = 00 01 10 = (0,1,2).
        assert_eq!(edge_index(2, &[0, 1, 2]), 6);
        assert_eq!(edge_index(2, &[2, 1, 0]), 36);
    }

    #[test]
    fn transition_table_holds_legs_and_deterrents() {
        let m = demo_four_city();
        let p = demo_problem(PenaltyVariant::Legal);
        let d = p.penalties().d;
        let tables = match &p.repr {
            Repr::Edge(t) => t,
            _ => unreachable!(),
        };
        // Row-major over (from, to) slot values 0..4: diagonal and the
        // placeholder row/column hold d, everything else the city legs.
        let expected = [
            d,
            m.cost(1, 2),
            m.cost(1, 3),
            d,
            m.cost(2, 1),
            d,
            m.cost(2, 3),
            d,
            m.cost(3, 1),
            m.cost(3, 2),
            d,
            d,
            d,
            d,
            d,
            d,
        ];
        assert_eq!(tables.trans, expected);
        assert_eq!(
            tables.depart,
            [m.cost(0, 1), m.cost(0, 2), m.cost(0, 3), d]
        );
        assert_eq!(tables.ret, [m.cost(1, 0), m.cost(2, 0), m.cost(3, 0), d]);
    }

    #[test]
    fn feasible_index_costs_its_tour_exactly() {
        let m = random_instance(5, 0.0, 12.0, false, 21).unwrap();
        let pen = default_penalties(&m);
        let p = build_edge(&m, pen, PenaltyVariant::Legal).unwrap();
        let z = edge_index(2, &[2, 0, 3, 1]);
        let tour = Tour::new(vec![0, 3, 1, 4, 2]).unwrap();
        assert_eq!(p.decode(z).unwrap(), tour);
        assert_eq!(p.cost_of(z), tour_cost(&m, &tour).unwrap());
    }

    #[test]
    fn repeated_slot_pays_gamma_and_the_self_loop() {
        let m = demo_four_city();
        let pen = default_penalties(&m);
        for variant in [PenaltyVariant::Legal, PenaltyVariant::Repeat] {
            let p = build_edge(&m, pen, variant).unwrap();
            // Slots (0, 0, 1): city 1 twice, then city 2.
            let z = edge_index(2, &[0, 0, 1]);
            let expected = m.cost(0, 1) + pen.d + m.cost(1, 2) + m.cost(2, 0) + pen.gamma_pen;
            assert_eq!(p.cost_of(z), expected, "{variant}");
            assert!(!p.is_feasible(z));
            assert!(p.decode(z).is_none());
        }
    }

    #[test]
    fn variants_differ_only_on_distinct_placeholder_states() {
        let m = demo_four_city();
        let pen = default_penalties(&m);
        let legal = build_edge(&m, pen, PenaltyVariant::Legal).unwrap();
        let repeat = build_edge(&m, pen, PenaltyVariant::Repeat).unwrap();
        let mut differing = Vec::new();
        for z in 0..legal.dimension() {
            let a = legal.cost_of(z);
            let b = repeat.cost_of(z);
            if a != b {
                assert_eq!(a, b + pen.gamma_pen, "legal only ever adds gamma");
                differing.push(z);
            }
        }
        // Exactly the states whose slots are distinct but include the
        // placeholder value 3: 3 slot positions x 3x2 arrangements.
        assert_eq!(differing.len(), 18);
        for z in differing {
            let slots = [(z >> 4) & 3, (z >> 2) & 3, z & 3];
            assert!(slots.contains(&3));
            assert!(!legal.is_feasible(z));
        }
    }

    #[test]
    fn both_variants_share_the_brute_force_argmin() {
        for seed in 0..5 {
            let m = random_instance(5, 0.0, 30.0, seed % 2 == 0, seed).unwrap();
            let (_, best) = brute_force_optimum(&m).unwrap();
            let pen = default_penalties(&m);
            for variant in [PenaltyVariant::Legal, PenaltyVariant::Repeat] {
                let p = build_edge(&m, pen, variant).unwrap();
                let (z, c) = p.argmin().unwrap();
                assert_eq!(c, best, "seed {seed} {variant}");
                assert!(p.decode(z).is_some());
            }
        }
    }

    #[test]
    fn three_city_edge_uses_one_bit_per_slot() {
        let m = random_instance(3, 1.0, 5.0, false, 8).unwrap();
        let pen = default_penalties(&m);
        let p = build_edge(&m, pen, PenaltyVariant::Legal).unwrap();
        assert_eq!(p.num_qubits(), 2);
        assert_eq!(p.edge_layout().unwrap().fake_count, 0);
        // Legal states: slots (0,1) -> index 1, slots (1,0) -> index 2.
        let t1 = Tour::new(vec![0, 1, 2]).unwrap();
        let t2 = Tour::new(vec![0, 2, 1]).unwrap();
        assert_eq!(p.decode(1).unwrap(), t1);
        assert_eq!(p.decode(2).unwrap(), t2);
        assert_eq!(p.cost_of(1), tour_cost(&m, &t1).unwrap());
        assert_eq!(p.cost_of(2), tour_cost(&m, &t2).unwrap());
        assert!(!p.is_feasible(0));
        assert!(!p.is_feasible(3));
    }
}
