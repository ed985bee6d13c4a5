//! Subspace-reduced encoding: the basis index *is* the tour's rank.
//!
//! Index `r < (n-1)!` names the `r`-th lexicographic permutation of cities
//! `1..n` (city 0 stays the anchor), so every tour constraint vanishes into
//! the index map and the register shrinks to `ceil(log2((n-1)!))` qubits.
//! Indices in the power-of-two padding tail encode nothing and are priced
//! at `gamma_pen`. Ranks are decoded on the fly through the factorial
//! number system, never by tabulating permutations.

use crate::error::{Error, Result};
use crate::instances::{CostMatrix, PenaltyConfig, Tour};

use super::{DiagonalProblem, EncodingKind, Repr};

/// Enumeration guard: (n-1)! must stay comfortably scannable.
const MAX_CITIES: usize = 10;

/// 0! through 11!.
const FACTORIALS: [usize; 12] = [
    1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880, 3628800, 39916800,
];

pub(crate) struct SreMap {
    /// Cities besides the anchor.
    m: usize,
    /// Feasible prefix length, `(n-1)!`.
    legal: usize,
}

/// Builds the rank encoding of `matrix` on `ceil(log2((n-1)!))` qubits.
pub fn build_sre(matrix: &CostMatrix, pen: PenaltyConfig) -> Result<DiagonalProblem> {
    let n = matrix.n();
    if n > MAX_CITIES {
        return Err(Error::CapExceeded(format!(
            "rank encoding enumerates (n-1)! tours; n = {n} exceeds the cap of {MAX_CITIES}"
        )));
    }
    pen.validate_for(matrix)?;
    let m = n - 1;
    let legal = FACTORIALS[m];
    let num_qubits = ceil_log2(legal);
    Ok(DiagonalProblem::new(
        EncodingKind::Sre,
        num_qubits,
        matrix.clone(),
        pen,
        Repr::Sre(SreMap { m, legal }),
    ))
}

fn ceil_log2(x: usize) -> usize {
    debug_assert!(x >= 2);
    usize::BITS as usize - (x - 1).leading_zeros() as usize
}

/// Writes the `rank`-th lexicographic permutation of `1..=m` into
/// `out[..m]`: repeatedly divide by a shrinking factorial to pick the next
/// unused city.
fn unrank_permutation(m: usize, mut rank: usize, out: &mut [usize; MAX_CITIES]) {
    let mut pool = [0usize; MAX_CITIES];
    for (i, slot) in pool.iter_mut().take(m).enumerate() {
        *slot = i + 1;
    }
    for step in 0..m {
        let remaining = m - step;
        let f = FACTORIALS[remaining - 1];
        let pick = rank / f;
        rank %= f;
        out[step] = pool[pick];
        pool.copy_within(pick + 1..remaining, pick);
    }
}

impl SreMap {
    #[inline]
    pub(crate) fn cost_of(&self, matrix: &CostMatrix, z: usize, gamma: f64) -> f64 {
        if z >= self.legal {
            return gamma;
        }
        let mut perm = [0usize; MAX_CITIES];
        unrank_permutation(self.m, z, &mut perm);
        let mut cost = matrix.cost(0, perm[0]);
        for w in perm[..self.m].windows(2) {
            cost += matrix.cost(w[0], w[1]);
        }
        cost + matrix.cost(perm[self.m - 1], 0)
    }

    #[inline]
    pub(crate) fn is_feasible(&self, z: usize) -> bool {
        z < self.legal
    }

    pub(crate) fn decode(&self, z: usize) -> Option<Tour> {
        if z >= self.legal {
            return None;
        }
        let mut perm = [0usize; MAX_CITIES];
        unrank_permutation(self.m, z, &mut perm);
        let mut order = Vec::with_capacity(self.m + 1);
        order.push(0);
        order.extend_from_slice(&perm[..self.m]);
        Some(Tour::new(order).expect("unranked permutation is a valid order"))
    }
}
