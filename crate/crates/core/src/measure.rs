//! Finitely supported probability measures.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Accepted deviation of the total mass from 1 before renormalization.
pub const WEIGHT_TOL: f64 = 1e-9;
/// Atoms closer than this (max-norm) are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// `Σ wᵢ δ_{xᵢ}` with `wᵢ > 0`, `Σ wᵢ = 1` and distinct atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    /// One atom per row.
    points: Matrix,
    weights: Vector,
}

impl DiscreteMeasure {
    /// Validates weights, renormalizes and merges coincident atoms (weights summed,
    /// position of the first occurrence kept).
    pub fn new(points: Matrix, weights: Vec<f64>) -> Result<Self> {
        let n = points.nrows();
        if n == 0 {
            return Err(Error::EmptyMeasure);
        }
        if weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: weights.len(),
            });
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }

        let d = points.ncols();
        let mut kept: Vec<usize> = Vec::with_capacity(n);
        let mut merged: Vec<f64> = Vec::with_capacity(n);
        for i in 0..n {
            let hit = kept.iter().position(|&k| {
                (0..d).all(|c| (points[(k, c)] - points[(i, c)]).abs() <= MERGE_TOL)
            });
            match hit {
                Some(pos) => merged[pos] += weights[i],
                None => {
                    kept.push(i);
                    merged.push(weights[i]);
                }
            }
        }
        let points = Matrix::from_fn(kept.len(), d, |r, c| points[(kept[r], c)]);
        let weights = Vector::from_vec(merged) / total;
        Ok(Self { points, weights })
    }

    /// Builds from row-major point coordinates.
    pub fn from_rows(rows: &[Vec<f64>], weights: Vec<f64>) -> Result<Self> {
        let points = crate::linalg::matrix_from_rows(rows)?;
        Self::new(points, weights)
    }

    pub fn from_1d(points: &[f64], weights: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_column_slice(points.len(), 1, points), weights.to_vec())
    }

    pub fn uniform_1d(points: &[f64]) -> Result<Self> {
        let w = vec![1.0 / points.len() as f64; points.len()];
        Self::from_1d(points, &w)
    }

    pub fn dirac(point: &[f64]) -> Self {
        Self {
            points: Matrix::from_row_slice(1, point.len(), point),
            weights: Vector::from_element(1, 1.0),
        }
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn weights(&self) -> &Vector {
        &self.weights
    }

    pub fn point(&self, i: usize) -> Vector {
        self.points.row(i).transpose()
    }

    /// `m(η) = Σ wᵢ xᵢ`.
    pub fn barycenter(&self) -> Vector {
        self.points.transpose() * &self.weights
    }

    /// `Σ wᵢ |xᵢ|²`.
    pub fn second_moment(&self) -> f64 {
        (0..self.len())
            .map(|i| self.weights[i] * self.points.row(i).norm_squared())
            .sum()
    }

    /// `Σ wᵢ (xᵢ − m)(xᵢ − m)ᵀ`.
    pub fn covariance(&self) -> Matrix {
        let m = self.barycenter();
        let d = self.dim();
        let mut c = Matrix::zeros(d, d);
        for i in 0..self.len() {
            let x = self.point(i) - &m;
            c += self.weights[i] * &x * x.transpose();
        }
        c
    }

    /// Coordinates of a 1-d measure.
    pub fn values_1d(&self) -> Result<Vec<f64>> {
        if self.dim() != 1 {
            return Err(Error::WrongMeasureDim {
                expected: 1,
                got: self.dim(),
            });
        }
        Ok(self.points.column(0).iter().copied().collect())
    }

    /// Row-major coordinates.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        crate::linalg::matrix_to_rows(&self.points)
    }
}
