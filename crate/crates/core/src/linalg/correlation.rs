//! Orthogonal change of basis after which two PSD matrices share one correlation matrix.

use crate::error::{Error, Result};
use crate::linalg::{
    check_same_dim, jacobi_eigen, spd_inv_sqrt, spd_sqrt, symmetrized, CorrelationMatrix, Matrix,
    OrthogonalMatrix, SpdMatrix, Tolerances, Vector,
};

/// Basis `O` and correlation `C` with `OᵀΣₖO = dg(OᵀΣₖO)^{1/2} C dg(OᵀΣₖO)^{1/2}` for both inputs.
#[derive(Clone, Debug)]
pub struct SharedCorrelation {
    pub basis: OrthogonalMatrix,
    pub correlation: CorrelationMatrix,
    /// `OᵀΣ₁O`.
    pub first: Matrix,
    /// `OᵀΣ₂O`.
    pub second: Matrix,
}

pub fn shared_correlation_transform(s1: &SpdMatrix, s2: &SpdMatrix) -> Result<SharedCorrelation> {
    shared_correlation_transform_with(s1, s2, &Tolerances::default())
}

pub fn shared_correlation_transform_with(
    s1: &SpdMatrix,
    s2: &SpdMatrix,
    tol: &Tolerances,
) -> Result<SharedCorrelation> {
    check_same_dim(s1, s2)?;
    let d = s1.dim();
    let o = if s1.is_positive_definite()? {
        transport_eigenbasis(s1, s2, tol)?
    } else if s2.is_positive_definite()? {
        transport_eigenbasis(s2, s1, tol)?
    } else {
        // diagonalize Σ₁ and solve on its range, leaving its kernel basis in place
        let e = s1.eigen()?;
        let r = s1.rank()?;
        let u = e.vectors.clone();
        if r == 0 {
            let inner = SpdMatrix::assume_psd(s2.conjugate(&u));
            &u * &inner.eigen()?.vectors
        } else {
            let lam = SpdMatrix::assume_psd(Matrix::from_diagonal(&e.values.rows(0, r).into_owned()));
            let ur = u.columns(0, r).into_owned();
            let top = SpdMatrix::assume_psd(symmetrized(&(ur.transpose() * &**s2 * &ur)));
            let inner = transport_eigenbasis(&lam, &top, tol)?;
            let mut block = Matrix::identity(d, d);
            block.view_mut((0, 0), (r, r)).copy_from(&inner);
            u * block
        }
    };

    let first = s1.conjugate(&o);
    let second = s2.conjugate(&o);
    let z1 = s1.rank_tol()?;
    let z2 = s2.rank_tol()?;
    let c = common_correlation(&first, &second, z1, z2)?;

    for s in [&first, &second] {
        let res = reconstruction_residual(s, &c);
        let bound = tol.corr_tol * (1.0 + s.norm());
        if res > bound {
            return Err(Error::CorrResidualExceeded {
                residual: res,
                tolerance: bound,
            });
        }
    }
    Ok(SharedCorrelation {
        basis: OrthogonalMatrix::new_with(o, tol)?,
        correlation: CorrelationMatrix::new(c)?,
        first,
        second,
    })
}

/// Eigenvectors of the Monge map `A = P^{-1/2}(P^{1/2} Q P^{1/2})^{1/2} P^{-1/2}` from a PD `P` to `Q`.
fn transport_eigenbasis(p: &SpdMatrix, q: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    let r = spd_sqrt(p)?;
    let ri = spd_inv_sqrt(p)?;
    let inner = SpdMatrix::assume_psd(&*r * q * &*r);
    let a = symmetrized(&(&*ri * &*spd_sqrt(&inner)? * &*ri));
    Ok(jacobi_eigen(&a, tol.max_sweeps)?.vectors)
}

fn reconstruction_residual(s: &Matrix, c: &Matrix) -> f64 {
    let n = s.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let sd = (s[(i, i)].max(0.0) * s[(j, j)].max(0.0)).sqrt();
            let r = s[(i, j)] - c[(i, j)] * sd;
            acc += r * r;
        }
    }
    acc.sqrt()
}

/// Correlation matrix compatible with both `a` and `b`.
///
/// Entries come from whichever matrix has both diagonals positive (preferring the
/// better-scaled one); the block linking coordinates seen only by `a` to those seen
/// only by `b` is filled by the PSD completion `C_AK C_KK⁺ C_KB`. Coordinates with
/// both diagonals zero get a unit diagonal and zero off-diagonals.
fn common_correlation(a: &Matrix, b: &Matrix, za: f64, zb: f64) -> Result<Matrix> {
    let n = a.nrows();
    let pa: Vec<bool> = (0..n).map(|i| a[(i, i)] > za).collect();
    let pb: Vec<bool> = (0..n).map(|i| b[(i, i)] > zb).collect();
    let na = a.norm().max(f64::MIN_POSITIVE);
    let nb = b.norm().max(f64::MIN_POSITIVE);
    let corr = |m: &Matrix, i: usize, j: usize| m[(i, j)] / (m[(i, i)] * m[(j, j)]).sqrt();

    let mut c = Matrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let in_a = pa[i] && pa[j];
            let in_b = pb[i] && pb[j];
            let v = match (in_a, in_b) {
                (true, true) => {
                    let wa = a[(i, i)].min(a[(j, j)]) / na;
                    let wb = b[(i, i)].min(b[(j, j)]) / nb;
                    if wa >= wb {
                        corr(a, i, j)
                    } else {
                        corr(b, i, j)
                    }
                }
                (true, false) => corr(a, i, j),
                (false, true) => corr(b, i, j),
                (false, false) => 0.0,
            };
            let v = v.clamp(-1.0, 1.0);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }

    let only_a: Vec<usize> = (0..n).filter(|&i| pa[i] && !pb[i]).collect();
    let only_b: Vec<usize> = (0..n).filter(|&i| pb[i] && !pa[i]).collect();
    let both: Vec<usize> = (0..n).filter(|&i| pa[i] && pb[i]).collect();
    if !only_a.is_empty() && !only_b.is_empty() {
        let k = both.len();
        if k > 0 {
            let ckk = Matrix::from_fn(k, k, |r, s| c[(both[r], both[s])]);
            let pinv = psd_pseudo_inverse(&ckk)?;
            for &x in &only_a {
                let cxk = Vector::from_fn(k, |r, _| c[(x, both[r])]);
                let left = pinv.transpose() * &cxk;
                for &y in &only_b {
                    let cky = Vector::from_fn(k, |r, _| c[(both[r], y)]);
                    let v = left.dot(&cky).clamp(-1.0, 1.0);
                    c[(x, y)] = v;
                    c[(y, x)] = v;
                }
            }
        } else {
            for &x in &only_a {
                for &y in &only_b {
                    c[(x, y)] = 0.0;
                    c[(y, x)] = 0.0;
                }
            }
        }
    }
    Ok(c)
}

fn psd_pseudo_inverse(m: &Matrix) -> Result<Matrix> {
    let s = SpdMatrix::assume_psd(m.clone());
    let t = s.rank_tol()?;
    Ok(s.eigen()?.map_values(|x| if x > t { 1.0 / x } else { 0.0 }))
}
