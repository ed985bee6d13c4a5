//! Dense-matrix reference evolution, independent of the simulator's
//! in-place per-qubit updates. Everything here is straightforward O(dim^2)
//! or O(dim^3) linear algebra, usable up to 6 qubits.

use num_complex::Complex64;
use tsp_qaoa::QaoaParams;

pub type Mat = Vec<Vec<Complex64>>;

pub fn identity(dim: usize) -> Mat {
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let dim = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(m: &Mat, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn one_norm(m: &Mat) -> f64 {
    let dim = m.len();
    (0..dim)
        .map(|j| m.iter().map(|row| row[j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a Taylor series.
pub fn expm(m: &Mat) -> Mat {
    let dim = m.len();
    let norm = one_norm(m);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scale = 2.0f64.powi(-(squarings as i32));
    let scaled: Mat = m
        .iter()
        .map(|row| row.iter().map(|c| c * scale).collect())
        .collect();

    let mut result = identity(dim);
    let mut term = identity(dim);
    for k in 1..=40 {
        term = matmul(&term, &scaled);
        let factor = 1.0 / k as f64;
        for row in term.iter_mut() {
            for c in row.iter_mut() {
                *c *= factor;
            }
        }
        for (r, t) in result.iter_mut().zip(&term) {
            for (a, b) in r.iter_mut().zip(t) {
                *a += b;
            }
        }
        if one_norm(&term) < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

/// `sum_q X_q`: ones exactly where two indices differ in a single bit.
pub fn mixer_hamiltonian(num_qubits: usize) -> Mat {
    let dim = 1usize << num_qubits;
    let mut h = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (i, row) in h.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            if (i ^ j).count_ones() == 1 {
                *c = Complex64::new(1.0, 0.0);
            }
        }
    }
    h
}

/// Diagonal unitary `exp(-i * gamma * cost)` as a dense matrix.
pub fn phase_unitary(diag: &[f64], gamma: f64) -> Mat {
    let dim = diag.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::from_polar(1.0, -gamma * diag[i]);
    }
    m
}

/// Full ansatz evolution from the uniform state via dense matrix-vector
/// products, with `exp(-i * beta * sum_q X_q)` built by matrix
/// exponentiation rather than per-qubit rotations.
pub fn dense_qaoa(diag: &[f64], params: &QaoaParams) -> Vec<Complex64> {
    let dim = diag.len();
    let amp = 1.0 / (dim as f64).sqrt();
    let mut v = vec![Complex64::new(amp, 0.0); dim];
    let h_mix = mixer_hamiltonian(dim.trailing_zeros() as usize);
    for (gamma, beta) in params.layers() {
        v = matvec(&phase_unitary(diag, gamma), &v);
        let generator: Mat = h_mix
            .iter()
            .map(|row| row.iter().map(|c| c * Complex64::new(0.0, -beta)).collect())
            .collect();
        v = matvec(&expm(&generator), &v);
    }
    v
}
