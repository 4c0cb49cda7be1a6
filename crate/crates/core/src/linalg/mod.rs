//! Symmetric linear algebra on small dense matrices.

mod correlation;
mod jacobi;

use std::ops::Deref;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use correlation::{shared_correlation_transform, shared_correlation_transform_with, SharedCorrelation};
pub use jacobi::{jacobi_eigen, SymEigen};
pub(crate) use jacobi::symmetrize_in_place;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Numerical tolerances shared by the linear-algebra routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Absolute slack (on unit-scaled input) for negative eigenvalues of PSD inputs.
    pub eig_tol: f64,
    /// Relative factor in `rank_tol = d · ‖M‖₂ · rank_rel`.
    pub rank_rel: f64,
    /// Residual allowed in the shared-correlation reconstructions (relative).
    pub corr_tol: f64,
    pub ortho_tol: f64,
    /// Relative asymmetry accepted before a matrix is rejected as non-symmetric.
    pub sym_tol: f64,
    pub max_sweeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig_tol: 1e-12,
            rank_rel: 2f64.powi(-50),
            corr_tol: 1e-10,
            ortho_tol: 1e-10,
            sym_tol: 1e-8,
            max_sweeps: 100,
        }
    }
}

impl Tolerances {
    /// Eigenvalues at or below this are treated as zero.
    pub fn rank_tol(&self, dim: usize, norm2: f64) -> f64 {
        dim as f64 * norm2 * self.rank_rel
    }
}

fn check_square(m: &Matrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub(crate) fn check_same_dim(a: &Matrix, b: &Matrix) -> Result<()> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    Ok(())
}

pub(crate) fn symmetrized(m: &Matrix) -> Matrix {
    let mut s = m.clone();
    symmetrize_in_place(&mut s);
    s
}

/// A real symmetric matrix, stored exactly symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Symmetrizes `m`, rejecting inputs whose asymmetry is not round-off.
    pub fn new(m: Matrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(m: Matrix, tol: &Tolerances) -> Result<Self> {
        check_square(&m)?;
        let asym = (&m - m.transpose()).amax();
        if asym > tol.sym_tol * (1.0 + m.amax()) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let mut m = m;
        symmetrize_in_place(&mut m);
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }
}

impl Deref for SymMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// A symmetric positive semi-definite matrix with a cached spectral decomposition.
///
/// Eigenvalues that are slightly negative from round-off are clamped to zero in
/// the cached spectrum; the stored entries are left untouched.
#[derive(Debug)]
pub struct SpdMatrix {
    mat: Matrix,
    tol: Tolerances,
    eigen: OnceLock<SymEigen>,
}

impl Clone for SpdMatrix {
    fn clone(&self) -> Self {
        let eigen = OnceLock::new();
        if let Some(e) = self.eigen.get() {
            let _ = eigen.set(e.clone());
        }
        Self {
            mat: self.mat.clone(),
            tol: self.tol,
            eigen,
        }
    }
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

fn clamp_spectrum(mut e: SymEigen) -> SymEigen {
    for v in e.values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    e
}

impl SpdMatrix {
    /// Validates symmetry and positive semi-definiteness.
    pub fn new(m: Matrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(m: Matrix, tol: &Tolerances) -> Result<Self> {
        let m = SymMatrix::new_with(m, tol)?.into_inner();
        let e = jacobi_eigen(&m, tol.max_sweeps)?;
        let floor = -tol.eig_tol * e.norm2().max(1.0);
        let min = e.min_value();
        if e.dim() > 0 && min < floor {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        let eigen = OnceLock::new();
        let _ = eigen.set(clamp_spectrum(e));
        Ok(Self {
            mat: m,
            tol: *tol,
            eigen,
        })
    }

    /// Wraps a matrix known to be PSD up to round-off (e.g. a product `B Σ B`).
    /// The matrix is symmetrized; the spectrum is computed lazily and clamped.
    pub fn assume_psd(m: Matrix) -> Self {
        Self {
            mat: symmetrized(&m),
            tol: Tolerances::default(),
            eigen: OnceLock::new(),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diagonal(&Vector::from_column_slice(diag)))
    }

    pub fn identity(d: usize) -> Self {
        Self::assume_psd(Matrix::identity(d, d))
    }

    pub fn zeros(d: usize) -> Self {
        Self::assume_psd(Matrix::zeros(d, d))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_inner(self) -> Matrix {
        self.mat
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Spectral decomposition with eigenvalues clamped at zero.
    pub fn eigen(&self) -> Result<&SymEigen> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let e = clamp_spectrum(jacobi_eigen(&self.mat, self.tol.max_sweeps)?);
        let _ = self.eigen.set(e);
        Ok(self.eigen.get().expect("spectral cache populated above"))
    }

    pub fn norm2(&self) -> Result<f64> {
        Ok(self.eigen()?.norm2())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigen()?.min_value())
    }

    pub fn rank_tol(&self) -> Result<f64> {
        Ok(self.tol.rank_tol(self.dim(), self.norm2()?))
    }

    /// Number of eigenvalues strictly above `rank_tol`.
    pub fn rank(&self) -> Result<usize> {
        let t = self.rank_tol()?;
        Ok(self.eigen()?.values.iter().filter(|&&v| v > t).count())
    }

    pub fn is_positive_definite(&self) -> Result<bool> {
        Ok(self.rank()? == self.dim())
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    /// `Oᵀ M O`.
    pub fn conjugate(&self, o: &Matrix) -> Matrix {
        symmetrized(&(o.transpose() * &self.mat * o))
    }
}

impl Deref for SpdMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.mat
    }
}

/// Square matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix(Matrix);

impl OrthogonalMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(m: Matrix, tol: &Tolerances) -> Result<Self> {
        check_square(&m)?;
        let n = m.nrows();
        let err = (m.transpose() * &m - Matrix::identity(n, n)).norm();
        if err > tol.ortho_tol {
            return Err(Error::CorrResidualExceeded {
                residual: err,
                tolerance: tol.ortho_tol,
            });
        }
        Ok(Self(m))
    }

    pub fn identity(d: usize) -> Self {
        Self(Matrix::identity(d, d))
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }
}

impl Deref for OrthogonalMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// A PSD matrix with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix(SpdMatrix);

impl CorrelationMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        let tol = Tolerances::default();
        let d = m.nrows();
        // entries are bounded by 1, so the absolute eigenvalue slack scales with d
        let spd = SpdMatrix::new_with(
            m,
            &Tolerances {
                eig_tol: tol.eig_tol * d.max(1) as f64 * 100.0,
                ..tol
            },
        )?;
        for i in 0..d {
            let c = spd[(i, i)];
            if (c - 1.0).abs() > tol.eig_tol * 100.0 {
                return Err(Error::NotPsd { min_eigenvalue: c });
            }
        }
        Ok(Self(spd))
    }

    pub fn identity(d: usize) -> Self {
        Self(SpdMatrix::identity(d))
    }

    pub fn as_spd(&self) -> &SpdMatrix {
        &self.0
    }
}

impl Deref for CorrelationMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// Builds a matrix from row-major nested vectors.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: bad.len(),
        });
    }
    Ok(Matrix::from_fn(n, m, |i, j| rows[i][j]))
}

/// Row-major nested vectors.
pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Eigendecomposition with descending eigenvalues.
pub fn sym_eigen(m: &SymMatrix) -> Result<SymEigen> {
    jacobi_eigen(m, Tolerances::default().max_sweeps)
}

/// Principal square root; eigenvalues at or below `rank_tol` map to 0, since their
/// square roots would turn round-off of order `ε‖M‖` into errors of order `√(ε‖M‖)`.
pub fn spd_sqrt(m: &SpdMatrix) -> Result<SpdMatrix> {
    let t = m.rank_tol()?;
    let e = m.eigen()?;
    Ok(SpdMatrix::assume_psd(e.map_values(|x| if x > t { x.sqrt() } else { 0.0 })))
}

/// Moore–Penrose inverse square root; eigenvalues at or below `rank_tol` map to 0.
pub fn spd_inv_sqrt(m: &SpdMatrix) -> Result<SpdMatrix> {
    let t = m.rank_tol()?;
    let e = m.eigen()?;
    Ok(SpdMatrix::assume_psd(
        e.map_values(|x| if x > t { 1.0 / x.sqrt() } else { 0.0 }),
    ))
}

/// Projection of a symmetric matrix onto the PSD cone: negative eigenvalues are set to 0.
pub fn positive_part(m: &Matrix) -> Result<SpdMatrix> {
    let e = jacobi_eigen(&symmetrized(m), Tolerances::default().max_sweeps)?;
    Ok(SpdMatrix::assume_psd(e.map_values(|x| x.max(0.0))))
}

/// Smallest eigenvalue of `b − a`; non-negative iff `a ⪯ b`.
pub fn loewner_gap(a: &Matrix, b: &Matrix) -> Result<f64> {
    check_same_dim(a, b)?;
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let e = jacobi_eigen(&symmetrized(&(b - a)), Tolerances::default().max_sweeps)?;
    Ok(e.min_value())
}

/// `a ⪯ b` up to `tol`: the smallest eigenvalue of `b − a` is at least `−tol`.
pub fn loewner_leq(a: &Matrix, b: &Matrix, tol: f64) -> Result<bool> {
    Ok(loewner_gap(a, b)? >= -tol)
}

/// Diagonal part of a square matrix.
pub fn dg(m: &Matrix) -> Matrix {
    Matrix::from_diagonal(&m.diagonal())
}

/// Spectral norm of a symmetric matrix.
pub fn sym_norm2(m: &Matrix) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(jacobi_eigen(&symmetrized(m), Tolerances::default().max_sweeps)?.norm2())
}
