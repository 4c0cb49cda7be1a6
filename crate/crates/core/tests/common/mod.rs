#![allow(dead_code)]

use convex_order::{DiscreteMeasure, Matrix, SpdMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Haar-like orthogonal matrix from the QR factor of a random matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let q = random_matrix(rng, d, d).qr().q();
    q
}

/// `Q diag(λ) Qᵀ` with log-uniform eigenvalues in `[lo, hi]`.
pub fn random_spd_with(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> SpdMatrix {
    let q = random_orthogonal(rng, d);
    let vals: Vec<f64> = (0..d).map(|_| (rng.random_range(lo.ln()..hi.ln())).exp()).collect();
    let m = &q * Matrix::from_diagonal(&nalgebra::DVector::from_vec(vals)) * q.transpose();
    SpdMatrix::new(symmetric(m)).unwrap()
}

pub fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> SpdMatrix {
    random_spd_with(rng, d, 0.1, 10.0)
}

/// Rank-`r` PSD matrix.
pub fn random_psd_rank(rng: &mut ChaCha8Rng, d: usize, r: usize) -> SpdMatrix {
    let a = random_matrix(rng, d, r);
    SpdMatrix::new(symmetric(&a * a.transpose())).unwrap()
}

pub fn symmetric(m: Matrix) -> Matrix {
    (&m + m.transpose()) * 0.5
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    symmetric(random_matrix(rng, d, d))
}

/// 1-d measure with `1..=max_atoms` atoms in `[-3, 3]`.
pub fn random_measure_1d(rng: &mut ChaCha8Rng, max_atoms: usize) -> DiscreteMeasure {
    let n = rng.random_range(1..=max_atoms);
    let pts: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let w = random_weights(rng, n);
    DiscreteMeasure::from_1d(&pts, &w).unwrap()
}

pub fn random_measure(rng: &mut ChaCha8Rng, max_atoms: usize, d: usize) -> DiscreteMeasure {
    let n = rng.random_range(1..=max_atoms);
    let pts = Matrix::from_fn(n, d, |_, _| rng.random_range(-3.0..3.0));
    DiscreteMeasure::new(pts, random_weights(rng, n)).unwrap()
}

pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.amax()
}
