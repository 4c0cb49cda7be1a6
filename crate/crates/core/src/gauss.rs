//! Projections of centered Gaussians in the convex order.
//!
//! Everything is driven by an [`OrderTransform`]: an orthogonal basis `O` together
//! with the diagonal scaling `D = diag(1 ∧ √(ν̃ᵢᵢ/μ̃ᵢᵢ))`, where `μ̃ = OᵀΣμO` and
//! `ν̃ = OᵀΣνO`. Once `D μ̃ D ⪯ ν̃` holds, both projections are explicit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    check_same_dim, jacobi_eigen, loewner_gap, shared_correlation_transform_with, spd_sqrt, symmetrized,
    CorrelationMatrix, Matrix, OrthogonalMatrix, SpdMatrix, Tolerances, Vector,
};
use crate::pgd::{monge_eigenbasis, pgd_solve_j, PgdConfig, PgdTrace};

/// Route that produced a transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    FastPath,
    Commuting,
    Pgd,
    SingularReduction,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::FastPath => "fast_path",
            Method::Commuting => "commuting",
            Method::Pgd => "pgd",
            Method::SingularReduction => "singular_reduction",
        }
    }
}

/// Which routes [`solve_pair`] may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Solver {
    /// Closed forms first, projected gradient descent as a fallback.
    #[default]
    Auto,
    /// Closed forms only; fails with [`Error::NotApplicable`] otherwise.
    ClosedForm,
    /// Always solve `J` by projected gradient descent (after any singular reduction).
    Pgd,
}

#[derive(Clone, Debug)]
pub struct GaussOptions {
    pub solver: Solver,
    pub pgd: PgdConfig,
    pub tol: Tolerances,
    /// Loewner certificates accept `λmin(ν̃ − Dμ̃D) ≥ −order_rel · (1 + ‖Σν‖₂)`.
    pub order_rel: f64,
    /// Stricter slack for closed-form candidates, which carry no iteration error;
    /// a closed form failing it falls through to the next route.
    pub exact_rel: f64,
}

impl Default for GaussOptions {
    fn default() -> Self {
        Self {
            solver: Solver::Auto,
            pgd: PgdConfig {
                tol: 1e-12,
                ..PgdConfig::default()
            },
            tol: Tolerances::default(),
            order_rel: 1e-7,
            exact_rel: 1e-12,
        }
    }
}

impl GaussOptions {
    pub fn with_solver(solver: Solver) -> Self {
        Self {
            solver,
            ..Self::default()
        }
    }
}

/// Orthogonal basis `O` and scaling `D` with `D OᵀΣμO D ⪯ OᵀΣνO`.
#[derive(Clone, Debug)]
pub struct OrderTransform {
    pub basis: OrthogonalMatrix,
    /// Diagonal of `D`, entries in `[0, 1]`.
    pub scaling: Vector,
    /// Diagonal of `D̂ = diag(1 ∧ √(μ̃ᵢᵢ/ν̃ᵢᵢ))` when produced through a shared correlation.
    pub hat_scaling: Option<Vector>,
    pub correlation: Option<CorrelationMatrix>,
    mu_t: Matrix,
    nu_t: Matrix,
    order_tol: f64,
}

impl OrderTransform {
    /// Builds `D` for the given basis. No certification is performed.
    pub fn from_basis(o: Matrix, mu: &SpdMatrix, nu: &SpdMatrix) -> Result<Self> {
        Self::build(o, mu, nu, None, GaussOptions::default().order_rel)
    }

    /// `nu_rank`: when set, coordinates at and beyond this index span the kernel of
    /// `Σν` and are zeroed exactly in `ν̃`.
    fn build(o: Matrix, mu: &SpdMatrix, nu: &SpdMatrix, nu_rank: Option<usize>, order_rel: f64) -> Result<Self> {
        check_same_dim(mu, nu)?;
        let basis = OrthogonalMatrix::new(o)?;
        let mut mu_t = mu.conjugate(&basis);
        let mut nu_t = nu.conjugate(&basis);
        if let Some(r) = nu_rank {
            for i in r..nu_t.nrows() {
                zero_coordinate(&mut nu_t, i);
            }
        }
        clean_diagonal(&mut nu_t, 16.0 * nu.rank_tol()?);
        clean_diagonal(&mut mu_t, 16.0 * mu.rank_tol()?);
        let d = mu.dim();
        let scaling = Vector::from_fn(d, |i, _| scale_ratio(nu_t[(i, i)], mu_t[(i, i)]));
        Ok(Self {
            basis,
            scaling,
            hat_scaling: None,
            correlation: None,
            mu_t,
            nu_t,
            order_tol: order_rel * (1.0 + nu.norm2()?),
        })
    }

    pub fn dim(&self) -> usize {
        self.scaling.len()
    }

    /// `OᵀΣμO`.
    pub fn mu_tilde(&self) -> &Matrix {
        &self.mu_t
    }

    /// `OᵀΣνO`.
    pub fn nu_tilde(&self) -> &Matrix {
        &self.nu_t
    }

    pub fn order_tol(&self) -> f64 {
        self.order_tol
    }

    pub fn scaling_matrix(&self) -> Matrix {
        Matrix::from_diagonal(&self.scaling)
    }

    /// `λmin(ν̃ − D μ̃ D)`; non-negative for an exact certificate.
    pub fn order_gap(&self) -> Result<f64> {
        let dm = self.scaling_matrix();
        loewner_gap(&(&dm * &self.mu_t * &dm), &self.nu_t)
    }

    /// Returns the Loewner gap, or [`Error::CertificationFailed`] carrying this candidate.
    pub fn certify(&self) -> Result<f64> {
        let gap = self.order_gap()?;
        if gap < -self.order_tol {
            return Err(Error::CertificationFailed {
                residual: -gap,
                tolerance: self.order_tol,
                candidate: Box::new(self.clone()),
            });
        }
        Ok(gap)
    }

    /// `Σᵢ (√μ̃ᵢᵢ − √ν̃ᵢᵢ)₊²`, the squared distance of both projections.
    pub fn distance2(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let gap = self.mu_t[(i, i)].max(0.0).sqrt() - self.nu_t[(i, i)].max(0.0).sqrt();
                gap.max(0.0).powi(2)
            })
            .sum()
    }

    /// `O D μ̃ D Oᵀ`.
    pub fn sigma_i(&self) -> Matrix {
        let dm = self.scaling_matrix();
        let o = &*self.basis;
        symmetrized(&(o * (&dm * &self.mu_t * &dm) * o.transpose()))
    }

    /// `O Σ̃_J Oᵀ` with `(Σ̃_J)ᵢⱼ = ν̃ᵢⱼ/(DᵢDⱼ)` when `ν̃ᵢᵢν̃ⱼⱼ > 0` and `μ̃ᵢⱼ` otherwise.
    pub fn sigma_j(&self) -> Matrix {
        let d = self.dim();
        let tilde = Matrix::from_fn(d, d, |i, j| {
            if self.nu_t[(i, i)] > 0.0 && self.nu_t[(j, j)] > 0.0 {
                self.nu_t[(i, j)] / (self.scaling[i] * self.scaling[j])
            } else {
                self.mu_t[(i, j)]
            }
        });
        let o = &*self.basis;
        symmetrized(&(o * tilde * o.transpose()))
    }

    fn result(&self, covariance: Matrix, method: Method, diagnostics: Diagnostics) -> ProjectionResult {
        ProjectionResult {
            covariance: SpdMatrix::assume_psd(covariance),
            distance2: self.distance2(),
            transform: Some(self.clone()),
            method,
            diagnostics,
        }
    }

    /// The I-projection built from this transform.
    pub fn project_i(&self, method: Method) -> ProjectionResult {
        self.result(self.sigma_i(), method, self.diagnostics())
    }

    /// The J-projection built from this transform.
    pub fn project_j(&self, method: Method) -> ProjectionResult {
        self.result(self.sigma_j(), method, self.diagnostics())
    }

    fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            order_gap: self.order_gap().unwrap_or(f64::NAN),
            order_tol: self.order_tol,
            ..Diagnostics::default()
        }
    }
}

fn zero_coordinate(m: &mut Matrix, i: usize) {
    m.row_mut(i).fill(0.0);
    m.column_mut(i).fill(0.0);
}

fn clean_diagonal(m: &mut Matrix, tol: f64) {
    for i in 0..m.nrows() {
        if m[(i, i)] <= tol {
            zero_coordinate(m, i);
        }
    }
}

/// `1 ∧ √(num/den)`, with the value 1 when `den = 0`.
fn scale_ratio(num: f64, den: f64) -> f64 {
    if den <= 0.0 {
        1.0
    } else {
        (num.max(0.0) / den).sqrt().min(1.0)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub pgd_residual: Option<f64>,
    pub order_gap: f64,
    pub order_tol: f64,
    /// Per-iteration record, when the descent ran with `record_trace`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<PgdTrace>,
}

/// A projected covariance with its certificate.
#[derive(Clone, Debug)]
pub struct ProjectionResult {
    pub covariance: SpdMatrix,
    /// Squared Bures–Wasserstein distance from the projected measure's source.
    pub distance2: f64,
    pub transform: Option<OrderTransform>,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

/// A certified transform and how it was obtained.
#[derive(Clone, Debug)]
pub struct PairSolution {
    pub transform: OrderTransform,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl PairSolution {
    fn new(transform: OrderTransform, method: Method, mut diagnostics: Diagnostics) -> Result<Self> {
        diagnostics.order_gap = transform.certify()?;
        diagnostics.order_tol = transform.order_tol;
        Ok(Self {
            transform,
            method,
            diagnostics,
        })
    }

    pub fn project_i(&self) -> ProjectionResult {
        self.transform
            .result(self.transform.sigma_i(), self.method, self.diagnostics.clone())
    }

    pub fn project_j(&self) -> ProjectionResult {
        self.transform
            .result(self.transform.sigma_j(), self.method, self.diagnostics.clone())
    }
}

/// Finds a certified order transform with default options.
pub fn find_order_transform(mu: &SpdMatrix, nu: &SpdMatrix) -> Result<OrderTransform> {
    Ok(solve_pair(mu, nu, &GaussOptions::default())?.transform)
}

/// Finds a certified order transform for `(Σμ, Σν)`.
///
/// Routes, in order: trivial cases (`Σν = 0`, `Σμ ⪯ Σν`), simultaneous
/// diagonalization of commuting inputs, the shared-correlation fast path, reduction
/// of a singular `Σν`, and finally projected gradient descent on `J` followed by
/// recovery of the basis from the Monge map `Σν → Σ_J`.
pub fn solve_pair(mu: &SpdMatrix, nu: &SpdMatrix, opts: &GaussOptions) -> Result<PairSolution> {
    check_same_dim(mu, nu)?;
    let d = mu.dim();
    let build = |o: Matrix| OrderTransform::build(o, mu, nu, None, opts.order_rel);
    let certified = |t: OrderTransform, m: Method| PairSolution::new(t, m, Diagnostics::default());
    let exact_tol = opts.exact_rel * (1.0 + nu.norm2()?);
    let exact = |t: OrderTransform, m: Method| -> Result<Option<PairSolution>> {
        if t.order_gap()? < -exact_tol {
            return Ok(None);
        }
        certified(t, m).map(Some)
    };

    let nu_rank = nu.rank()?;
    if nu_rank == 0 {
        return certified(OrderTransform::build(Matrix::identity(d, d), mu, nu, Some(0), opts.order_rel)?, Method::ClosedForm);
    }

    if opts.solver != Solver::Pgd {
        let scale = 1.0 + mu.norm2()? + nu.norm2()?;
        if loewner_gap(mu, nu)? >= -1e-14 * scale {
            if let Some(s) = exact(build(Matrix::identity(d, d))?, Method::ClosedForm)? {
                return Ok(s);
            }
        }
        if let Some(o) = simultaneous_basis(mu, nu)? {
            if let Some(s) = exact(build(o)?, Method::Commuting)? {
                return Ok(s);
            }
        }
        if let Some(t) = fast_path_transform(mu, nu, opts)? {
            if let Some(s) = exact(t, Method::FastPath)? {
                return Ok(s);
            }
        }
    }

    if nu_rank < d {
        let red = reduce_singular_j_with(nu, mu, opts)?;
        let diagnostics = red.inner.diagnostics.clone();
        return PairSolution::new(red.transform, Method::SingularReduction, diagnostics);
    }

    if opts.solver == Solver::ClosedForm {
        return Err(Error::NotApplicable("no closed form certifies this pair"));
    }
    pgd_route(mu, nu, opts)
}

fn pgd_route(mu: &SpdMatrix, nu: &SpdMatrix, opts: &GaussOptions) -> Result<PairSolution> {
    let outcome = match pgd_solve_j(nu, mu, &opts.pgd) {
        Ok(out) => out,
        Err(Error::MaxIterExceeded { best, .. }) => *best,
        Err(e) => return Err(e),
    };
    let o = monge_eigenbasis(nu, &outcome.sigma)?;
    let t = OrderTransform::build(o, mu, nu, None, opts.order_rel)?;
    PairSolution::new(
        t,
        Method::Pgd,
        Diagnostics {
            iterations: outcome.iterations,
            pgd_residual: Some(outcome.residual),
            trace: opts.pgd.record_trace.then_some(outcome.trace),
            ..Diagnostics::default()
        },
    )
}

/// Common eigenbasis of commuting inputs, if they commute and one is found.
fn simultaneous_basis(mu: &SpdMatrix, nu: &SpdMatrix) -> Result<Option<Matrix>> {
    let d = mu.dim();
    let is_diag = |m: &Matrix| (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)] == 0.0));
    if is_diag(mu) && is_diag(nu) {
        return Ok(Some(Matrix::identity(d, d)));
    }
    let nm = mu.norm();
    let nn = nu.norm();
    let comm = (&**mu * &**nu - &**nu * &**mu).norm();
    if comm > 1e-12 * (1.0 + nm) * (1.0 + nn) {
        return Ok(None);
    }
    // an irrational mix separates eigenvalues that coincide for one of the inputs
    let mix = &**mu / nm.max(f64::MIN_POSITIVE) + &**nu * (std::f64::consts::FRAC_1_SQRT_2 / nn.max(f64::MIN_POSITIVE));
    let o = jacobi_eigen(&symmetrized(&mix), 100)?.vectors;
    for (m, n) in [(&**mu, nm), (&**nu, nn)] {
        let t = o.transpose() * m * &o;
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| t[(i, j)] * t[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off > 1e-10 * (1.0 + n) {
            return Ok(None);
        }
    }
    Ok(Some(o))
}

fn fast_path_transform(mu: &SpdMatrix, nu: &SpdMatrix, opts: &GaussOptions) -> Result<Option<OrderTransform>> {
    let sc = match shared_correlation_transform_with(nu, mu, &opts.tol) {
        Ok(sc) => sc,
        Err(Error::CorrResidualExceeded { .. }) | Err(Error::NotPsd { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut t = OrderTransform::build(sc.basis.into_inner(), mu, nu, None, opts.order_rel)?;
    let d = t.dim();
    t.hat_scaling = Some(Vector::from_fn(d, |i, _| scale_ratio(t.mu_t[(i, i)], t.nu_t[(i, i)])));
    t.correlation = Some(sc.correlation);
    let exact_tol = opts.exact_rel * (1.0 + nu.norm2()?);
    Ok((t.order_gap()? >= -exact_tol).then_some(t))
}

/// Both projections through the shared-correlation transform, when `D̂ C D̂ ⪯ C`
/// (equivalently `D μ̃ D ⪯ ν̃`) holds in that basis.
pub fn fast_path_shared_correlation(
    mu: &SpdMatrix,
    nu: &SpdMatrix,
) -> Result<Option<(OrderTransform, ProjectionResult, ProjectionResult)>> {
    check_same_dim(mu, nu)?;
    let opts = GaussOptions::default();
    Ok(fast_path_transform(mu, nu, &opts)?.map(|t| {
        let i = t.project_i(Method::FastPath);
        let j = t.project_j(Method::FastPath);
        (t, i, j)
    }))
}

pub fn project_i(mu: &SpdMatrix, nu: &SpdMatrix) -> Result<ProjectionResult> {
    project_i_with(mu, nu, &GaussOptions::default())
}

/// Covariance of `I₂(Σμ, Σν)`, the closest law to `N(0,Σμ)` dominated by `N(0,Σν)`.
pub fn project_i_with(mu: &SpdMatrix, nu: &SpdMatrix, opts: &GaussOptions) -> Result<ProjectionResult> {
    Ok(solve_pair(mu, nu, opts)?.project_i())
}

pub fn project_j(nu: &SpdMatrix, mu: &SpdMatrix) -> Result<ProjectionResult> {
    project_j_with(nu, mu, &GaussOptions::default())
}

/// Covariance of `J₂(Σν, Σμ)`, the closest law to `N(0,Σν)` dominating `N(0,Σμ)`.
pub fn project_j_with(nu: &SpdMatrix, mu: &SpdMatrix, opts: &GaussOptions) -> Result<ProjectionResult> {
    Ok(solve_pair(mu, nu, opts)?.project_j())
}

/// Solution of the J-problem for a singular `Σν` via its range.
#[derive(Clone, Debug)]
pub struct SingularReduction {
    pub rank: usize,
    /// Eigenbasis of `Σν`, range first.
    pub spectral_basis: OrthogonalMatrix,
    pub reduced_nu: SpdMatrix,
    pub reduced_mu: SpdMatrix,
    /// Reduced solution.
    pub gamma: SpdMatrix,
    pub sigma_star: SpdMatrix,
    /// Certificate of the reduced problem.
    pub inner: PairSolution,
    /// Certificate of the full problem.
    pub transform: OrderTransform,
}

pub fn reduce_singular_j(nu: &SpdMatrix, mu: &SpdMatrix) -> Result<SingularReduction> {
    reduce_singular_j_with(nu, mu, &GaussOptions::default())
}

/// Solves `J` on the range of `Σν` and fills the remaining blocks of `UᵀΣ★U` from `UᵀΣμU`.
pub fn reduce_singular_j_with(nu: &SpdMatrix, mu: &SpdMatrix, opts: &GaussOptions) -> Result<SingularReduction> {
    check_same_dim(mu, nu)?;
    let d = nu.dim();
    let r = nu.rank()?;
    if r == 0 || r == d {
        return Err(Error::NotApplicable("reduction needs 0 < rank(Σν) < d"));
    }
    let e = nu.eigen()?;
    let u = e.vectors.clone();
    let mu_u = mu.conjugate(&u);
    let reduced_nu = SpdMatrix::assume_psd(Matrix::from_diagonal(&e.values.rows(0, r).into_owned()));
    let reduced_mu = SpdMatrix::assume_psd(mu_u.view((0, 0), (r, r)).into_owned());
    let inner = solve_pair(&reduced_mu, &reduced_nu, opts)?;
    let gamma = inner.transform.sigma_j();

    let mut star_u = mu_u.clone();
    star_u.view_mut((0, 0), (r, r)).copy_from(&gamma);
    let sigma_star = SpdMatrix::assume_psd(&u * star_u * u.transpose());

    let mut lift = Matrix::identity(d, d);
    lift.view_mut((0, 0), (r, r)).copy_from(&inner.transform.basis);
    let transform = OrderTransform::build(&u * lift, mu, nu, Some(r), opts.order_rel)?;
    transform.certify()?;

    Ok(SingularReduction {
        rank: r,
        spectral_basis: OrthogonalMatrix::new(u)?,
        reduced_nu,
        reduced_mu,
        gamma: SpdMatrix::assume_psd(gamma),
        sigma_star,
        inner,
        transform,
    })
}

/// Which clause decided [`is_j_unique`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessReason {
    NuPositiveDefinite,
    RankMatch,
    NuBelowSqrt,
    Neither,
}

#[derive(Clone, Debug, Serialize)]
pub struct Uniqueness {
    pub unique: bool,
    pub reason: UniquenessReason,
    pub rank_nu: usize,
    pub rank_star: Option<usize>,
    pub rank_clause: bool,
    pub sqrt_clause: bool,
}

impl Uniqueness {
    pub fn explanation(&self) -> String {
        match self.reason {
            UniquenessReason::NuPositiveDefinite => "Σν is positive definite".into(),
            UniquenessReason::RankMatch => format!("rank(Σ★) = rank(Σν) = {}", self.rank_nu),
            UniquenessReason::NuBelowSqrt => "Σν ⪯ (Σν^{1/2} Σμ Σν^{1/2})^{1/2}".into(),
            UniquenessReason::Neither => format!(
                "rank(Σ★) = {} ≠ rank(Σν) = {} and Σν is not below (Σν^{{1/2}} Σμ Σν^{{1/2}})^{{1/2}}",
                self.rank_star.unwrap_or(0),
                self.rank_nu
            ),
        }
    }
}

pub fn is_j_unique(mu: &SpdMatrix, nu: &SpdMatrix) -> Result<Uniqueness> {
    is_j_unique_with(mu, nu, &GaussOptions::default())
}

/// Whether `J₂(Σν, Σμ)` is unique among all (not only Gaussian) laws.
///
/// Refuses with [`Error::RankAmbiguous`] when an eigenvalue of `Σν` or `Σ★` sits
/// just above the rank threshold (within a factor 10).
pub fn is_j_unique_with(mu: &SpdMatrix, nu: &SpdMatrix, opts: &GaussOptions) -> Result<Uniqueness> {
    check_same_dim(mu, nu)?;
    let d = nu.dim();
    let nu_tol = nu.rank_tol()?;
    check_band(&nu.eigen()?.values, nu_tol)?;
    let rank_nu = nu.rank()?;
    if rank_nu == d {
        return Ok(Uniqueness {
            unique: true,
            reason: UniquenessReason::NuPositiveDefinite,
            rank_nu,
            rank_star: None,
            rank_clause: true,
            sqrt_clause: true,
        });
    }

    let sol = solve_pair(mu, nu, opts)?;
    let star = sol.project_j().covariance;
    let star_norm = star.norm2()?;
    let star_tol = match sol.diagnostics.pgd_residual {
        // iterative solves leave residual mass in directions that should vanish
        Some(_) => 1e-6 * (1.0 + star_norm),
        None => star.rank_tol()?.max(1e-10 * (1.0 + star_norm)),
    };
    let star_values = &star.eigen()?.values;
    check_band(star_values, star_tol)?;
    let rank_star = star_values.iter().filter(|&&v| v > star_tol).count();

    let sqrt_clause = nu_below_sqrt(mu, nu, opts)?;
    let rank_clause = rank_star == rank_nu;
    let reason = if rank_clause {
        UniquenessReason::RankMatch
    } else if sqrt_clause {
        UniquenessReason::NuBelowSqrt
    } else {
        UniquenessReason::Neither
    };
    Ok(Uniqueness {
        unique: rank_clause || sqrt_clause,
        reason,
        rank_nu,
        rank_star: Some(rank_star),
        rank_clause,
        sqrt_clause,
    })
}

fn check_band(values: &Vector, tol: f64) -> Result<()> {
    if let Some(&v) = values.iter().find(|&&v| v > tol && v <= 10.0 * tol) {
        return Err(Error::RankAmbiguous {
            eigenvalue: v,
            tolerance: tol,
        });
    }
    Ok(())
}

/// `Σν ⪯ (Σν^{1/2} Σμ Σν^{1/2})^{1/2}` within the order tolerance.
fn nu_below_sqrt(mu: &SpdMatrix, nu: &SpdMatrix, opts: &GaussOptions) -> Result<bool> {
    let r = spd_sqrt(nu)?;
    let inner = SpdMatrix::assume_psd(&*r * &**mu * &*r);
    let root = spd_sqrt(&inner)?;
    let tol = opts.order_rel * (1.0 + nu.norm2()?);
    Ok(loewner_gap(nu, &root)? >= -tol)
}

/// Outcome of [`dominance_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Dominance {
    /// `I₂(Σμ,Σν) = Σν`, equivalently `J₂(Σν,Σμ) = Σμ`.
    #[serde(rename = "I_equals_nu")]
    IEqualsNu,
    #[serde(rename = "neither")]
    Neither,
}

/// Tests `Σν ⪯ (Σν^{1/2} Σμ Σν^{1/2})^{1/2}`, which characterizes `I₂ = Σν` and `J₂ = Σμ`.
pub fn dominance_check(mu: &SpdMatrix, nu: &SpdMatrix) -> Result<Dominance> {
    check_same_dim(mu, nu)?;
    Ok(if nu_below_sqrt(mu, nu, &GaussOptions::default())? {
        Dominance::IEqualsNu
    } else {
        Dominance::Neither
    })
}
