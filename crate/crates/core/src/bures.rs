//! Bures–Wasserstein distance between Gaussian measures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_same_dim, spd_inv_sqrt, spd_sqrt, Matrix, SpdMatrix, Vector};

/// `N(mean, cov)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMeasure {
    pub mean: Vector,
    pub cov: SpdMatrix,
}

impl GaussianMeasure {
    pub fn new(mean: Vector, cov: SpdMatrix) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(Error::DimensionMismatch {
                expected: cov.dim(),
                got: mean.len(),
            });
        }
        Ok(Self { mean, cov })
    }

    pub fn centered(cov: SpdMatrix) -> Self {
        Self {
            mean: Vector::zeros(cov.dim()),
            cov,
        }
    }

    pub fn dim(&self) -> usize {
        self.cov.dim()
    }
}

/// Row-major plain form used for (de)serialization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

impl TryFrom<GaussianSpec> for GaussianMeasure {
    type Error = Error;
    fn try_from(spec: GaussianSpec) -> Result<Self> {
        let cov = crate::linalg::matrix_from_rows(&spec.cov)?;
        GaussianMeasure::new(Vector::from_vec(spec.mean), SpdMatrix::new(cov)?)
    }
}

/// Squared Bures–Wasserstein distance `tr Σ₁ + tr Σ₂ − 2 tr (Σ₁^{1/2} Σ₂ Σ₁^{1/2})^{1/2}`.
pub fn bw2(s1: &SpdMatrix, s2: &SpdMatrix) -> Result<f64> {
    check_same_dim(s1, s2)?;
    let r = spd_sqrt(s1)?;
    let inner = SpdMatrix::assume_psd(&*r * &**s2 * &*r);
    let fidelity: f64 = inner.eigen()?.values.iter().map(|v| v.sqrt()).sum();
    Ok((s1.trace() + s2.trace() - 2.0 * fidelity).max(0.0))
}

/// W₂ between Gaussians.
pub fn gaussian_w2(mu: &GaussianMeasure, nu: &GaussianMeasure) -> Result<f64> {
    check_same_dim(&mu.cov, &nu.cov)?;
    let shift = (&mu.mean - &nu.mean).norm_squared();
    Ok((shift + bw2(&mu.cov, &nu.cov)?).sqrt())
}

/// W₂ after aligning the means.
pub fn centered_w2(mu: &GaussianMeasure, nu: &GaussianMeasure) -> Result<f64> {
    Ok(bw2(&mu.cov, &nu.cov)?.sqrt())
}

/// Gradient of `Σ ↦ bw²(fixed, Σ)`:
/// `I − fixed^{1/2} (fixed^{1/2} Σ fixed^{1/2})^{-1/2} fixed^{1/2}`.
///
/// Both arguments must be positive definite.
pub fn bw2_gradient(fixed: &SpdMatrix, sigma: &SpdMatrix) -> Result<Matrix> {
    check_same_dim(fixed, sigma)?;
    for m in [fixed, sigma] {
        if !m.is_positive_definite()? {
            return Err(Error::SingularInput {
                min_eigenvalue: m.min_eigenvalue()?,
            });
        }
    }
    let r = spd_sqrt(fixed)?;
    let inner = SpdMatrix::assume_psd(&*r * &**sigma * &*r);
    if !inner.is_positive_definite()? {
        return Err(Error::SingularInput {
            min_eigenvalue: inner.min_eigenvalue()?,
        });
    }
    let d = fixed.dim();
    let mut g = Matrix::identity(d, d) - &*r * &*spd_inv_sqrt(&inner)? * &*r;
    crate::linalg::symmetrize_in_place(&mut g);
    Ok(g)
}
