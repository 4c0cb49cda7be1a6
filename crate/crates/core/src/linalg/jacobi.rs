//! Cyclic Jacobi eigensolver for small dense symmetric matrices.
//!
//! Each rotation annihilates one off-diagonal pair; sweeps repeat over all
//! pairs until no rotation is needed. The rotation skip test is relative to the
//! geometric mean of the two diagonal entries, which keeps small eigenvalues
//! accurate to high relative precision.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Spectral decomposition `M = U diag(values) Uᵀ`.
///
/// Eigenvalues are sorted in descending order; each eigenvector column has its
/// first significant entry positive so results are reproducible.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vector,
    pub vectors: Matrix,
}

impl SymEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `U diag(f(λ)) Uᵀ`, symmetrized.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            scaled.column_mut(j).scale_mut(fj);
        }
        let mut out = &scaled * self.vectors.transpose();
        symmetrize_in_place(&mut out);
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.map_values(|x| x)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Spectral norm `max |λ|`.
    pub fn norm2(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

pub(crate) fn symmetrize_in_place(m: &mut Matrix) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a symmetric matrix (the lower triangle is mirrored first).
pub fn jacobi_eigen(m: &Matrix, max_sweeps: usize) -> Result<SymEigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }

    let mut a = m.clone();
    symmetrize_in_place(&mut a);
    let mut v = Matrix::identity(n, n);
    let scale = a.norm();
    // absolute floor for off-diagonal entries that sit next to (near-)zero
    // diagonal entries, where the relative test can never fire
    let floor = f64::EPSILON * f64::EPSILON * scale;

    let mut converged = n <= 1 || scale == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                if apq.abs() <= floor || apq.abs() <= f64::EPSILON * (app.abs() * aqq.abs()).sqrt() {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let g = a[(r, p)];
                        let h = a[(r, q)];
                        let rp = g - s * (h + g * tau);
                        let rq = h + s * (g - h * tau);
                        a[(r, p)] = rp;
                        a[(p, r)] = rp;
                        a[(r, q)] = rq;
                        a[(q, r)] = rq;
                    }
                }
                for r in 0..n {
                    let g = v[(r, p)];
                    let h = v[(r, q)];
                    v[(r, p)] = g - s * (h + g * tau);
                    v[(r, q)] = h + s * (g - h * tau);
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::EigenNonConvergence {
            sweeps,
            residual: off_diagonal_norm(&a),
        });
    }

    // descending order; stable sort keeps tied eigenvalues in sweep order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut vectors = Matrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = v.column(i).into_owned();
        let lead = col.iter().copied().find(|x| x.abs() > 1e-10).unwrap_or(1.0);
        if lead < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(k, &col);
    }
    Ok(SymEigen { values, vectors })
}
