//! Statevector simulation of the alternating-operator ansatz for diagonal
//! cost Hamiltonians.
//!
//! The cost layer is a pure phase: `amp[z] *= exp(-i * gamma * cost(z))`.
//! The mixer is a uniform transverse-field rotation `exp(-i * beta * X)` on
//! every qubit, applied as in-place amplitude pair rotations. Expectations
//! are exact sums over the state, not shot estimates; sampling is a
//! separate, explicitly seeded step so runs reproduce bit-for-bit.
//!
//! Qubit 0 is the most significant bit of the basis index throughout.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encodings::DiagonalCost;
use crate::error::{Error, Result};

/// Hard register ceiling for the simulator and the encoding builders.
pub const MAX_QUBITS: usize = 26;

/// Above this the allocation is large enough to deserve a log warning.
pub const QUBIT_WARN_THRESHOLD: usize = 20;

/// Diagonals up to this dimension are cached across layers inside
/// [`run_ansatz`] instead of re-evaluated per layer.
const CACHE_CAP: usize = 1 << 20;

/// Per-layer angles: `phase[j]` multiplies the cost Hamiltonian in layer
/// `j`, `mixer[j]` the transverse field. Angles are stored as given;
/// reporting paths canonicalize into `[0, 2*pi)` via [`Self::canonicalized`].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QaoaParams {
    phase: Vec<f64>,
    mixer: Vec<f64>,
}

impl QaoaParams {
    pub fn new(phase: Vec<f64>, mixer: Vec<f64>) -> Result<Self> {
        if phase.len() != mixer.len() {
            return Err(Error::InvalidConfig(format!(
                "phase and mixer angle counts differ: {} vs {}",
                phase.len(),
                mixer.len()
            )));
        }
        if phase.iter().chain(&mixer).any(|a| !a.is_finite()) {
            return Err(Error::InvalidConfig("angles must be finite".into()));
        }
        Ok(QaoaParams { phase, mixer })
    }

    /// All-zero angles at the given depth (the ansatz is then the identity
    /// on the uniform state).
    pub fn zeros(depth: usize) -> Self {
        QaoaParams {
            phase: vec![0.0; depth],
            mixer: vec![0.0; depth],
        }
    }

    /// Splits a flat `[phase..., mixer...]` vector as used by the optimizer.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "flat angle vector length {} is odd",
                flat.len()
            )));
        }
        let p = flat.len() / 2;
        QaoaParams::new(flat[..p].to_vec(), flat[p..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = self.phase.clone();
        flat.extend_from_slice(&self.mixer);
        flat
    }

    pub fn depth(&self) -> usize {
        self.phase.len()
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn mixer(&self) -> &[f64] {
        &self.mixer
    }

    pub fn layers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.phase.iter().copied().zip(self.mixer.iter().copied())
    }

    /// Same angles folded into `[0, 2*pi)`, for reporting.
    pub fn canonicalized(&self) -> QaoaParams {
        let tau = std::f64::consts::TAU;
        let fold = |v: &Vec<f64>| v.iter().map(|a| a.rem_euclid(tau)).collect();
        QaoaParams {
            phase: fold(&self.phase),
            mixer: fold(&self.mixer),
        }
    }
}

/// Dense complex amplitudes over all `2^num_qubits` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The uniform superposition `|+>^n`. Errors above [`MAX_QUBITS`];
    /// warns (via `log`) above [`QUBIT_WARN_THRESHOLD`].
    pub fn uniform(num_qubits: usize) -> Result<Self> {
        Self::check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(StateVector {
            num_qubits,
            amps: vec![amp; dim],
        })
    }

    /// A single computational basis state.
    pub fn from_basis(num_qubits: usize, index: usize) -> Result<Self> {
        Self::check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidConfig(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    fn check_size(num_qubits: usize) -> Result<()> {
        if num_qubits > MAX_QUBITS {
            return Err(Error::CapExceeded(format!(
                "{num_qubits} qubits exceed the simulator cap of {MAX_QUBITS}"
            )));
        }
        if num_qubits > QUBIT_WARN_THRESHOLD {
            let mib = (1u64 << num_qubits) * 16 / (1 << 20);
            log::warn!("allocating a {num_qubits}-qubit statevector (~{mib} MiB)");
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_dims<P: DiagonalCost + ?Sized>(&self, problem: &P) -> Result<()> {
        if problem.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "state has {} qubits, problem has {}",
                self.num_qubits,
                problem.num_qubits()
            )));
        }
        Ok(())
    }

    /// Cost phase layer, evaluating the diagonal on the fly.
    pub fn apply_phase<P: DiagonalCost + ?Sized>(&mut self, problem: &P, gamma: f64) -> Result<()> {
        self.check_dims(problem)?;
        for (z, amp) in self.amps.iter_mut().enumerate() {
            *amp *= Complex64::from_polar(1.0, -gamma * problem.cost_of(z));
        }
        Ok(())
    }

    /// Cost phase layer against a pre-materialized diagonal.
    pub fn apply_phase_diag(&mut self, diag: &[f64], gamma: f64) -> Result<()> {
        if diag.len() != self.amps.len() {
            return Err(Error::DimensionMismatch(format!(
                "diagonal has {} entries, state has {}",
                diag.len(),
                self.amps.len()
            )));
        }
        for (amp, &c) in self.amps.iter_mut().zip(diag) {
            *amp *= Complex64::from_polar(1.0, -gamma * c);
        }
        Ok(())
    }

    /// Transverse-field layer `exp(-i * beta * X)` on every qubit.
    pub fn apply_mixer(&mut self, beta: f64) {
        let c = beta.cos();
        let mis = Complex64::new(0.0, -beta.sin());
        let dim = self.amps.len();
        for q in 0..self.num_qubits {
            let step = 1usize << (self.num_qubits - 1 - q);
            let mut base = 0;
            while base < dim {
                for i in base..base + step {
                    let j = i + step;
                    let a = self.amps[i];
                    let b = self.amps[j];
                    self.amps[i] = c * a + mis * b;
                    self.amps[j] = c * b + mis * a;
                }
                base += 2 * step;
            }
        }
    }

    /// Exact expectation of the cost over this state.
    pub fn expectation<P: DiagonalCost + ?Sized>(&self, problem: &P) -> Result<f64> {
        self.check_dims(problem)?;
        let mut total = 0.0;
        for (z, amp) in self.amps.iter().enumerate() {
            total += amp.norm_sqr() * problem.cost_of(z);
        }
        Ok(total)
    }

    /// Draws `shots` basis states from the Born distribution, seeded and
    /// reproducible. Uses sorted uniforms against the cumulative
    /// distribution in one sweep, so memory stays O(shots).
    pub fn sample(&self, shots: usize, seed: u64) -> Result<SampleSet> {
        if shots == 0 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<f64> = (0..shots).map(|_| rng.gen::<f64>()).collect();
        points.sort_unstable_by(f64::total_cmp);

        let mut counts = BTreeMap::new();
        let mut cum = 0.0;
        let mut next = 0usize;
        let mut last_occupied = 0usize;
        for (z, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            last_occupied = z;
            cum += p;
            let lo = next;
            while next < shots && points[next] < cum {
                next += 1;
            }
            if next > lo {
                counts.insert(z, next - lo);
            }
            if next == shots {
                break;
            }
        }
        // Floating cumulative sums can land a hair below 1; park stragglers
        // on the last state with support.
        if next < shots {
            *counts.entry(last_occupied).or_insert(0) += shots - next;
        }
        Ok(SampleSet { shots, counts })
    }
}

/// Measurement outcomes: basis index -> count.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    shots: usize,
    counts: BTreeMap<usize, usize>,
}

impl SampleSet {
    pub fn from_counts(counts: BTreeMap<usize, usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        let shots = counts.values().sum();
        Ok(SampleSet { shots, counts })
    }

    pub fn shots(&self) -> usize {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.counts
    }

    /// Most frequent outcome; count ties resolve to the lowest index.
    pub fn most_probable(&self) -> Result<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (&z, &c) in &self.counts {
            match best {
                Some((_, bc)) if c <= bc => {}
                _ => best = Some((z, c)),
            }
        }
        best.map(|(z, _)| z).ok_or(Error::EmptySampleSet)
    }
}

/// Runs the full depth-`p` ansatz from the uniform state. Small diagonals
/// are materialized once and shared across layers; large ones are evaluated
/// on the fly per layer.
pub fn run_ansatz<P: DiagonalCost + ?Sized>(problem: &P, params: &QaoaParams) -> Result<StateVector> {
    let mut state = StateVector::uniform(problem.num_qubits())?;
    let dim = state.dimension();
    let cached: Option<Vec<f64>> = if params.depth() >= 2 && dim <= CACHE_CAP {
        Some((0..dim).map(|z| problem.cost_of(z)).collect())
    } else {
        None
    };
    for (gamma, beta) in params.layers() {
        match &cached {
            Some(diag) => state.apply_phase_diag(diag, gamma)?,
            None => state.apply_phase(problem, gamma)?,
        }
        state.apply_mixer(beta);
    }
    Ok(state)
}
