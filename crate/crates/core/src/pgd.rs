//! Projected gradient descent for the J-projection of centered Gaussians, and the
//! two Frobenius projections onto Loewner half-cones.

use serde::Serialize;

use crate::bures::bw2;
use crate::error::{Error, Result};
use crate::gauss::{OrderTransform, ProjectionResult};
use crate::linalg::{
    check_same_dim, jacobi_eigen, positive_part, spd_inv_sqrt, spd_sqrt, symmetrized, Matrix, SpdMatrix,
    SymEigen, Tolerances,
};

/// Step-size schedule. Sequences are non-increasing; the last entry repeats.
#[derive(Clone, Debug, PartialEq)]
pub enum StepRule {
    /// Starts at `‖Σν‖₂`, the inverse curvature of the objective near `Σν`, and relies
    /// on backtracking.
    Auto,
    /// The conservative constant of [`spectral_step`].
    Spectral,
    Constant(f64),
    Sequence(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PgdConfig {
    pub step: StepRule,
    pub max_iter: usize,
    /// Stop once the gradient mapping `‖Σ − Π(Σ − ηG)‖_F / η` is below `tol · (1 + ‖Σν‖_F)`.
    pub tol: f64,
    /// Stop once the relative objective decrease of an accepted step is below this.
    pub obj_tol: f64,
    /// Regularization relative to `tr Σν` applied when an iterate is nearly singular.
    pub eps_reg: f64,
    /// Halve the step (for the rest of the run) whenever the objective would increase.
    pub backtracking: bool,
    pub record_trace: bool,
}

impl Default for PgdConfig {
    fn default() -> Self {
        Self {
            step: StepRule::Auto,
            max_iter: 10_000,
            tol: 1e-8,
            obj_tol: 1e-16,
            eps_reg: 1e-10,
            backtracking: true,
            record_trace: false,
        }
    }
}

impl PgdConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg| Err(Error::InvalidConfig(msg));
        match &self.step {
            StepRule::Constant(eta) if !(*eta > 0.0 && eta.is_finite()) => return bad("step must be positive"),
            StepRule::Sequence(seq) => {
                if seq.is_empty() || seq.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                    return bad("step sequence must be non-empty and positive");
                }
                if seq.windows(2).any(|w| w[1] > w[0]) {
                    return bad("step sequence must be non-increasing");
                }
            }
            _ => {}
        }
        if !(self.tol > 0.0) || !(self.obj_tol > 0.0) || !(self.eps_reg > 0.0) {
            return bad("thresholds must be positive");
        }
        Ok(())
    }
}

/// Per-iteration record of an accepted step.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PgdTrace {
    pub objective: Vec<f64>,
    pub grad_norm: Vec<f64>,
    pub cone_violation: Vec<f64>,
    pub step: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct PgdOutcome {
    pub sigma: SpdMatrix,
    pub objective: f64,
    pub iterations: usize,
    /// Last gradient-mapping norm.
    pub residual: f64,
    pub converged: bool,
    pub trace: PgdTrace,
}

/// `Σ + (Σμ − Σ)⁺`: nearest point of `{X ⪰ Σμ}` in Frobenius norm.
pub fn frobenius_project_above(sigma: &Matrix, lower: &Matrix) -> Result<SpdMatrix> {
    check_same_dim(sigma, lower)?;
    let up = positive_part(&(lower - sigma))?;
    Ok(SpdMatrix::assume_psd(sigma + &*up))
}

/// `Σμ − (Σμ − Σν)⁺`: nearest point of `{X ⪯ Σν}`. The flag is true when the
/// result has a negative eigenvalue, i.e. it left the PSD cone.
pub fn frobenius_project_below(sigma: &Matrix, upper: &Matrix) -> Result<(Matrix, bool)> {
    check_same_dim(sigma, upper)?;
    let down = positive_part(&(sigma - upper))?;
    let out = symmetrized(&(sigma - &*down));
    let scale = 1.0 + sigma.norm() + upper.norm();
    let min = jacobi_eigen(&out, Tolerances::default().max_sweeps)?.min_value();
    Ok((out, min < -1e-12 * scale))
}

/// State shared by objective and gradient evaluations at a fixed `Σν`.
struct Bures<'a> {
    nu: &'a SpdMatrix,
    root: Matrix,
    trace_nu: f64,
}

struct Eval {
    objective: f64,
    inner: SymEigen,
}

impl<'a> Bures<'a> {
    fn new(nu: &'a SpdMatrix) -> Result<Self> {
        Ok(Self {
            nu,
            root: spd_sqrt(nu)?.into_inner(),
            trace_nu: nu.trace(),
        })
    }

    fn eval(&self, sigma: &Matrix) -> Result<Eval> {
        let inner = jacobi_eigen(&symmetrized(&(&self.root * sigma * &self.root)), 100)?;
        let fid: f64 = inner.values.iter().map(|v| v.max(0.0).sqrt()).sum();
        Ok(Eval {
            objective: (self.trace_nu + sigma.trace() - 2.0 * fid).max(0.0),
            inner,
        })
    }

    /// `I − R (R Σ R)^{-1/2} R` with `R = Σν^{1/2}`, evaluated at `Σ + εI` when the
    /// inner matrix is too close to singular.
    fn gradient(&self, sigma: &Matrix, ev: &Eval, eps: f64, iteration: usize) -> Result<Matrix> {
        let d = sigma.nrows();
        let floor = eps * self.nu.min_eigenvalue()?;
        let regularized;
        let inner = if ev.inner.min_value() < floor {
            let shifted = sigma + Matrix::identity(d, d) * eps;
            regularized = jacobi_eigen(&symmetrized(&(&self.root * &shifted * &self.root)), 100)?;
            &regularized
        } else {
            &ev.inner
        };
        let t = inner.norm2() * d as f64 * f64::EPSILON;
        if inner.min_value() <= t {
            return Err(Error::SingularIterate { iteration });
        }
        let inv = inner.map_values(|x| 1.0 / x.sqrt());
        Ok(symmetrized(&(Matrix::identity(d, d) - &self.root * inv * &self.root)))
    }
}

/// Conservative constant `0.5 · λmin(Σν)^{1/2} / (1 + λmax(Σν)^{1/2} λmin(Σμ + εI)^{-1/2})`.
pub fn spectral_step(nu: &SpdMatrix, mu: &SpdMatrix, eps: f64) -> Result<f64> {
    let lo = nu.min_eigenvalue()?.sqrt();
    let hi = nu.eigen()?.max_value().sqrt();
    let mu_lo = (mu.min_eigenvalue()? + eps).sqrt();
    Ok(0.5 * lo / (1.0 + hi / mu_lo))
}

/// Minimizes `bw²(Σν, Σ)` over `{Σ ⪰ Σμ}` starting from `Σν + (Σμ − Σν)⁺`.
///
/// `Σν` must be positive definite. On hitting `max_iter` the best iterate is returned
/// inside [`Error::MaxIterExceeded`].
pub fn pgd_solve_j(nu: &SpdMatrix, mu: &SpdMatrix, cfg: &PgdConfig) -> Result<PgdOutcome> {
    check_same_dim(nu, mu)?;
    cfg.validate()?;
    if !nu.is_positive_definite()? {
        return Err(Error::SingularInput {
            min_eigenvalue: nu.min_eigenvalue()?,
        });
    }
    let eps = cfg.eps_reg * nu.trace().max(f64::MIN_POSITIVE);
    let bures = Bures::new(nu)?;
    let scale = 1.0 + nu.norm();
    let mut eta = match &cfg.step {
        StepRule::Auto => nu.norm2()?,
        StepRule::Spectral => spectral_step(nu, mu, eps)?,
        StepRule::Constant(e) => *e,
        StepRule::Sequence(s) => s[0],
    };

    let mut sigma = frobenius_project_above(nu, mu)?.into_inner();
    let mut ev = bures.eval(&sigma)?;
    let mut trace = PgdTrace::default();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut halvings = 0usize;

    while iterations < cfg.max_iter {
        if let StepRule::Sequence(s) = &cfg.step {
            let scheduled = s[iterations.min(s.len() - 1)];
            eta = eta.min(scheduled);
        }
        let g = bures.gradient(&sigma, &ev, eps, iterations)?;
        let stepped = &sigma - &g * eta;
        let next = frobenius_project_above(&stepped, mu)?.into_inner();
        residual = (&next - &sigma).norm() / eta;
        if residual <= cfg.tol * scale {
            converged = true;
            break;
        }
        let next_ev = bures.eval(&next)?;
        // increases at round-off level are noise: the objective is flat to about √ε
        // around the optimum while the iterate itself keeps converging
        let slack = 1e-12 * (1.0 + ev.objective);
        if cfg.backtracking && next_ev.objective > ev.objective + slack {
            eta *= 0.5;
            halvings += 1;
            if halvings > 60 {
                break;
            }
            continue;
        }
        iterations += 1;
        let decrease = ev.objective - next_ev.objective;
        sigma = next;
        ev = next_ev;
        if cfg.record_trace {
            trace.objective.push(ev.objective);
            trace.grad_norm.push(g.norm());
            trace.cone_violation.push(cone_violation(&sigma, mu)?);
            trace.step.push(eta);
        }
        if decrease.abs() <= cfg.obj_tol * (1.0 + ev.objective) && decrease >= 0.0 && residual <= 1e3 * cfg.tol * scale {
            converged = true;
            break;
        }
    }

    let outcome = PgdOutcome {
        sigma: SpdMatrix::assume_psd(sigma),
        objective: ev.objective,
        iterations,
        residual,
        converged,
        trace,
    };
    if converged {
        Ok(outcome)
    } else {
        Err(Error::MaxIterExceeded {
            iterations,
            residual,
            best: Box::new(outcome),
        })
    }
}

/// `max(0, −λmin(Σ − Σμ))`.
fn cone_violation(sigma: &Matrix, mu: &Matrix) -> Result<f64> {
    let e = jacobi_eigen(&symmetrized(&(sigma - mu)), 100)?;
    Ok((-e.min_value()).max(0.0))
}

/// Rebuilds `I₂(Σμ,Σν)` from a computed `J₂(Σν,Σμ)`: the basis diagonalizes the Monge
/// map from `Σν` to `Σ_J`.
pub fn recover_i_from_j(mu: &SpdMatrix, nu: &SpdMatrix, sigma_j: &SpdMatrix) -> Result<ProjectionResult> {
    let o = monge_eigenbasis(nu, sigma_j)?;
    let t = OrderTransform::from_basis(o, mu, nu)?;
    t.certify()?;
    Ok(t.project_i(crate::gauss::Method::Pgd))
}

/// Eigenvectors of `Σν^{-1/2}(Σν^{1/2} Σ Σν^{1/2})^{1/2} Σν^{-1/2}`.
pub(crate) fn monge_eigenbasis(nu: &SpdMatrix, sigma: &Matrix) -> Result<Matrix> {
    let r = spd_sqrt(nu)?;
    let ri = spd_inv_sqrt(nu)?;
    let inner = SpdMatrix::assume_psd(&*r * sigma * &*r);
    let a = symmetrized(&(&*ri * &*spd_sqrt(&inner)? * &*ri));
    Ok(jacobi_eigen(&a, 100)?.vectors)
}

/// Objective used by the solver, exposed for callers that want to score iterates.
pub fn objective(nu: &SpdMatrix, sigma: &SpdMatrix) -> Result<f64> {
    bw2(nu, sigma)
}
