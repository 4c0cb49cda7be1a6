//! Seeded inputs for the benchmarks.

use convex_order::{DiscreteMeasure, Matrix, SpdMatrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn symmetric(m: Matrix) -> Matrix {
    (&m + m.transpose()) * 0.5
}

pub fn orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)).qr().q()
}

/// `Q diag(λ) Qᵀ` with eigenvalues log-uniform in `[0.1, 10]`.
pub fn spd(rng: &mut ChaCha8Rng, d: usize) -> SpdMatrix {
    let q = orthogonal(rng, d);
    let vals = Vector::from_fn(d, |_, _| rng.random_range(0.1f64.ln()..10f64.ln()).exp());
    SpdMatrix::new(symmetric(&q * Matrix::from_diagonal(&vals) * q.transpose())).unwrap()
}

/// Diagonal pair in a random common basis.
pub fn commuting_pair(rng: &mut ChaCha8Rng, d: usize) -> (SpdMatrix, SpdMatrix) {
    let q = orthogonal(rng, d);
    let mut side = || {
        let vals = Vector::from_fn(d, |_, _| rng.random_range(0.1..10.0));
        SpdMatrix::new(symmetric(&q * Matrix::from_diagonal(&vals) * q.transpose())).unwrap()
    };
    (side(), side())
}

pub fn generic_pair(rng: &mut ChaCha8Rng, d: usize) -> (SpdMatrix, SpdMatrix) {
    (spd(rng, d), spd(rng, d))
}

pub fn measure_1d(rng: &mut ChaCha8Rng, n: usize) -> DiscreteMeasure {
    let pts: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    let w: Vec<f64> = w.iter().map(|x| x / s).collect();
    DiscreteMeasure::from_1d(&pts, &w).unwrap()
}

pub fn measure(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DiscreteMeasure {
    let pts = Matrix::from_fn(n, d, |_, _| rng.random_range(-3.0..3.0));
    DiscreteMeasure::new(pts, vec![1.0 / n as f64; n]).unwrap()
}
