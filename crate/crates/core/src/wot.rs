//! Barycentric weak optimal transport between finitely supported measures.
//!
//! Minimizes `Σᵢ wᵢ |xᵢ − m(π_{xᵢ})|²` over couplings `π ∈ Π(μ, ν)`, where
//! `m(π_{xᵢ}) = Σⱼ πᵢⱼ yⱼ / wᵢ` is the conditional barycenter. The minimizer's
//! barycentric pushforward of `μ` is the projection of `μ` below `ν` in convex
//! order.
//!
//! The objective is `|φ(π)|²` for the affine map `φ(π) = W^{-1/2}(WX − πY)`, so
//! the problem is a minimum-norm point over the image of the transportation
//! polytope. The default solver is Wolfe's fully corrective method on that image;
//! plain and away-step Frank-Wolfe are available too. All variants share an exact
//! transportation LP as linear oracle and stop on the Frank-Wolfe duality gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::measure::DiscreteMeasure;
use crate::one_dim;
use crate::transport::{solve_transport, TransportSimplex};

/// Conditional-gradient variant used by [`solve_wot`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FwVariant {
    /// Wolfe's minimum-norm-point method: re-optimizes exactly over the affine hull
    /// of the active vertices after every oracle call.
    #[default]
    FullyCorrective,
    /// Frank-Wolfe with away steps and exact line search.
    AwaySteps,
    /// Frank-Wolfe with exact line search.
    Classic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WotConfig {
    /// Stop once the duality gap is below `fw_tol · (1 + f₀)`, where `f₀` is the
    /// objective of the product coupling.
    pub fw_tol: f64,
    /// Oracle calls allowed.
    pub max_iter: usize,
    /// Largest accepted `n · m`.
    pub budget: usize,
    pub variant: FwVariant,
    pub marginal_tol: f64,
}

impl Default for WotConfig {
    fn default() -> Self {
        Self {
            fw_tol: 1e-8,
            max_iter: 100_000,
            budget: 1_000_000,
            variant: FwVariant::FullyCorrective,
            marginal_tol: 1e-9,
        }
    }
}

/// A transport plan between the atoms of two discrete measures.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    plan: Matrix,
}

fn marginal_residual(plan: &Matrix, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let rows = plan.column_sum() - mu.weights();
    let cols = plan.row_sum().transpose() - nu.weights();
    rows.amax().max(cols.amax())
}

impl Coupling {
    /// Validates shape, sign and marginals (within `marginal_tol`).
    pub fn new(plan: Matrix, mu: &DiscreteMeasure, nu: &DiscreteMeasure, marginal_tol: f64) -> Result<Self> {
        if plan.nrows() != mu.len() || plan.ncols() != nu.len() {
            return Err(Error::DimensionMismatch {
                expected: mu.len() * nu.len(),
                got: plan.nrows() * plan.ncols(),
            });
        }
        if plan.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let negative = plan.iter().fold(0.0_f64, |a, &x| a.max(-x));
        let residual = marginal_residual(&plan, mu, nu).max(negative);
        if residual > marginal_tol {
            return Err(Error::InvalidCoupling {
                residual,
                tolerance: marginal_tol,
            });
        }
        Ok(Self { plan })
    }

    /// `π = μ ⊗ ν`.
    pub fn product(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Self {
        Self {
            plan: mu.weights() * nu.weights().transpose(),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.plan
    }

    pub fn into_matrix(self) -> Matrix {
        self.plan
    }

    pub fn marginal_residual(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        marginal_residual(&self.plan, mu, nu)
    }

    /// Row `i` is `m(π_{xᵢ})`.
    pub fn conditional_barycenters(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Matrix {
        let mut b = &self.plan * nu.points();
        for (i, mut row) in b.row_iter_mut().enumerate() {
            row /= mu.weights()[i];
        }
        b
    }

    /// `Θ_π = Σᵢⱼ πᵢⱼ (xᵢ − m_μ)(yⱼ − m_ν)ᵀ`.
    pub fn cross_covariance(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Matrix {
        let mut x = mu.points().clone();
        let mut y = nu.points().clone();
        let (mx, my) = (mu.barycenter().transpose(), nu.barycenter().transpose());
        for mut r in x.row_iter_mut() {
            r -= &mx;
        }
        for mut r in y.row_iter_mut() {
            r -= &my;
        }
        x.transpose() * &self.plan * y
    }
}

/// `Σᵢ wᵢ |xᵢ − m(π_{xᵢ})|²`.
pub fn wot_objective(coupling: &Coupling, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let bary = coupling.conditional_barycenters(mu, nu);
    (0..mu.len())
        .map(|i| mu.weights()[i] * (mu.points().row(i) - bary.row(i)).norm_squared())
        .sum()
}

/// `∂/∂πᵢⱼ = −2 (xᵢ − m(π_{xᵢ})) · yⱼ`.
pub fn wot_gradient(coupling: &Coupling, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Matrix {
    let bary = coupling.conditional_barycenters(mu, nu);
    let disp = mu.points() - bary;
    disp * nu.points().transpose() * -2.0
}

/// Exact optimal vertex of `min ⟨cost, π⟩` over `Π(μ, ν)`.
pub fn lp_oracle(cost: &Matrix, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Coupling> {
    let plan = solve_transport(cost, mu.weights().as_slice(), nu.weights().as_slice())?;
    Ok(Coupling { plan })
}

/// `m(π_·)#μ`: atoms `m(π_{xᵢ})` with weights `wᵢ`.
pub fn barycentric_pushforward(coupling: &Coupling, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    DiscreteMeasure::new(coupling.conditional_barycenters(mu, nu), mu.weights().as_slice().to_vec())
}

/// `η ≤cx ν` for 1-d measures, with the default slack.
pub fn check_convex_order_1d(eta: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<bool> {
    one_dim::convex_order_leq_1d(eta, nu, one_dim::default_cx_tol(eta, nu))
}

/// `W₂²(a, b)` by an exact transport LP with squared-distance cost.
pub fn wasserstein2_discrete(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::WrongMeasureDim {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let cost = Matrix::from_fn(a.len(), b.len(), |i, j| (a.points().row(i) - b.points().row(j)).norm_squared());
    let plan = solve_transport(&cost, a.weights().as_slice(), b.weights().as_slice())?;
    Ok(cost.component_mul(&plan).sum().max(0.0))
}

#[derive(Clone, Debug)]
pub struct WotSolution {
    pub coupling: Coupling,
    pub value: f64,
    /// Frank-Wolfe duality gap at `coupling`; bounds `value − optimum`.
    pub gap: f64,
    pub iterations: usize,
    pub lp_pivots: usize,
}

impl WotSolution {
    pub fn pushforward(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        barycentric_pushforward(&self.coupling, mu, nu)
    }
}

/// A vertex of the transportation polytope in the active set.
#[derive(Clone, Debug)]
struct Vertex {
    cells: Vec<(usize, usize, f64)>,
    weight: f64,
}

impl Vertex {
    fn from_dense(plan: &Matrix) -> Vec<(usize, usize, f64)> {
        let mut cells = Vec::new();
        for j in 0..plan.ncols() {
            for i in 0..plan.nrows() {
                if plan[(i, j)] > 0.0 {
                    cells.push((i, j, plan[(i, j)]));
                }
            }
        }
        cells
    }

    fn same_cells(&self, other: &[(usize, usize, f64)]) -> bool {
        self.cells.len() == other.len()
            && self
                .cells
                .iter()
                .zip(other)
                .all(|(a, b)| a.0 == b.0 && a.1 == b.1 && (a.2 - b.2).abs() <= 1e-15)
    }

    fn dot(&self, g: &Matrix) -> f64 {
        self.cells.iter().map(|&(i, j, x)| g[(i, j)] * x).sum()
    }
}

/// State of the quadratic in the linear statistic `B = πY`.
struct Residuals<'a> {
    mu: &'a DiscreteMeasure,
    nu: &'a DiscreteMeasure,
    /// `R = diag(w) X − πY`.
    resid: Matrix,
}

impl<'a> Residuals<'a> {
    fn new(mu: &'a DiscreteMeasure, nu: &'a DiscreteMeasure, plan: &Matrix) -> Self {
        let mut resid = mu.points().clone();
        for (i, mut row) in resid.row_iter_mut().enumerate() {
            row *= mu.weights()[i];
        }
        resid -= plan * nu.points();
        Self { mu, nu, resid }
    }

    fn weights(&self) -> &Vector {
        self.mu.weights()
    }

    /// `φ(π) = W^{-1/2} R`, whose squared norm is the objective.
    fn image(&self) -> Matrix {
        scale_rows(self.resid.clone(), self.weights())
    }

    fn value(&self) -> f64 {
        (0..self.resid.nrows())
            .map(|i| self.resid.row(i).norm_squared() / self.weights()[i])
            .sum()
    }

    fn gradient(&self) -> Matrix {
        let mut scaled = self.resid.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row /= -0.5 * self.weights()[i];
        }
        scaled * self.nu.points().transpose()
    }

    /// For the change `Δ = DY` of the statistic: `(Σ Rᵢ·Δᵢ/wᵢ, Σ |Δᵢ|²/wᵢ)`.
    /// The first entry is half the directional descent `−⟨∇f, D⟩/2`.
    fn line_terms(&self, delta: &Matrix) -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..delta.nrows() {
            let w = self.weights()[i];
            num += self.resid.row(i).dot(&delta.row(i)) / w;
            den += delta.row(i).norm_squared() / w;
        }
        (num, den)
    }
}

fn assemble(active: &[Vertex], n: usize, m: usize) -> Matrix {
    let mut plan = Matrix::zeros(n, m);
    for v in active {
        for &(i, j, x) in &v.cells {
            plan[(i, j)] += v.weight * x;
        }
    }
    plan
}

fn scale_rows(mut m: Matrix, weights: &Vector) -> Matrix {
    for (i, mut row) in m.row_iter_mut().enumerate() {
        row /= weights[i].sqrt();
    }
    m
}

fn sparse_times(cells: &[(usize, usize, f64)], y: &Matrix, n: usize) -> Matrix {
    let mut out = Matrix::zeros(n, y.ncols());
    for &(i, j, x) in cells {
        let row = y.row(j) * x;
        let mut target = out.row_mut(i);
        target += row;
    }
    out
}

/// Minimizes the barycentric cost over `Π(μ, ν)`. On failure to reach the gap
/// target the error carries the last iterate.
pub fn solve_wot(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cfg: &WotConfig) -> Result<WotSolution> {
    if mu.dim() != nu.dim() {
        return Err(Error::WrongMeasureDim {
            expected: mu.dim(),
            got: nu.dim(),
        });
    }
    if !(cfg.fw_tol.is_finite() && cfg.fw_tol >= 0.0) {
        return Err(Error::InvalidConfig("fw_tol must be finite and non-negative"));
    }
    let size = mu.len().saturating_mul(nu.len());
    if size > cfg.budget {
        return Err(Error::BudgetExceeded {
            size,
            budget: cfg.budget,
        });
    }
    let target = cfg.fw_tol * (1.0 + wot_objective(&Coupling::product(mu, nu), mu, nu));
    match cfg.variant {
        FwVariant::FullyCorrective => fully_corrective(mu, nu, cfg, target),
        FwVariant::AwaySteps => frank_wolfe(mu, nu, cfg, target, true),
        FwVariant::Classic => frank_wolfe(mu, nu, cfg, target, false),
    }
}

fn finish(mu: &DiscreteMeasure, nu: &DiscreteMeasure, plan: Matrix, gap: f64, iterations: usize, pivots: usize) -> WotSolution {
    let state = Residuals::new(mu, nu, &plan);
    WotSolution {
        value: state.value(),
        coupling: Coupling { plan },
        gap,
        iterations,
        lp_pivots: pivots,
    }
}

fn frank_wolfe(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cfg: &WotConfig, target: f64, away_steps: bool) -> Result<WotSolution> {
    let (n, m) = (mu.len(), nu.len());
    let y = nu.points();
    let mut lp = TransportSimplex::new(mu.weights().as_slice(), nu.weights().as_slice())?;
    let mut active = vec![Vertex {
        cells: Vertex::from_dense(&lp.dense()),
        weight: 1.0,
    }];
    let mut plan = assemble(&active, n, m);
    let mut gap = f64::INFINITY;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        let state = Residuals::new(mu, nu, &plan);
        let grad = state.gradient();
        let s_plan = lp.solve(&grad)?;
        let s_cells = Vertex::from_dense(&s_plan);
        let towards = &s_plan * y - &plan * y;
        let (fw_num, fw_den) = state.line_terms(&towards);
        gap = (2.0 * fw_num).max(0.0);
        if gap <= target {
            return Ok(finish(mu, nu, plan, gap, iterations, lp.pivots()));
        }
        iterations += 1;

        let current = grad.component_mul(&plan).sum();
        let away = if away_steps && active.len() > 1 {
            active
                .iter()
                .enumerate()
                .map(|(k, v)| (k, v.dot(&grad) - current))
                .max_by(|a, b| a.1.total_cmp(&b.1))
        } else {
            None
        };

        match away {
            Some((k, away_gap)) if away_gap > gap => {
                let alpha = active[k].weight;
                let gamma_max = alpha / (1.0 - alpha);
                let delta = &plan * y - sparse_times(&active[k].cells, y, n);
                let (num, den) = state.line_terms(&delta);
                let gamma = if den > 0.0 { (num / den).clamp(0.0, gamma_max) } else { gamma_max };
                if gamma <= 0.0 {
                    break;
                }
                for v in active.iter_mut() {
                    v.weight *= 1.0 + gamma;
                }
                active[k].weight -= gamma;
                if gamma >= gamma_max {
                    active.remove(k);
                }
            }
            _ => {
                let gamma = if fw_den > 0.0 { (fw_num / fw_den).clamp(0.0, 1.0) } else { 1.0 };
                if gamma <= 0.0 {
                    break;
                }
                if gamma >= 1.0 {
                    active = vec![Vertex {
                        cells: s_cells,
                        weight: 1.0,
                    }];
                } else {
                    for v in active.iter_mut() {
                        v.weight *= 1.0 - gamma;
                    }
                    match active.iter_mut().find(|v| v.same_cells(&s_cells)) {
                        Some(v) => v.weight += gamma,
                        None => active.push(Vertex {
                            cells: s_cells,
                            weight: gamma,
                        }),
                    }
                }
            }
        }
        active.retain(|v| v.weight > 0.0);
        plan = assemble(&active, n, m);
    }

    Err(Error::GapNotReached {
        iterations,
        gap,
        target,
        best: Box::new(finish(mu, nu, plan, gap, iterations, lp.pivots())),
    })
}

/// Wolfe's minimum-norm-point method on `φ(Π(μ, ν))`.
///
/// Each major cycle adds the oracle vertex to the active set; the minor cycles then
/// move to the minimum-norm point of the active images, dropping vertices until the
/// affine minimizer lies in their convex hull.
fn fully_corrective(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cfg: &WotConfig, target: f64) -> Result<WotSolution> {
    let (n, m) = (mu.len(), nu.len());
    let y = nu.points();
    let mut wx = mu.points().clone();
    for (i, mut row) in wx.row_iter_mut().enumerate() {
        row *= mu.weights()[i];
    }
    let image = |cells: &[(usize, usize, f64)]| scale_rows(&wx - sparse_times(cells, y, n), mu.weights());

    let mut lp = TransportSimplex::new(mu.weights().as_slice(), nu.weights().as_slice())?;
    let first = Vertex::from_dense(&lp.dense());
    let mut active = Active::default();
    active.push(image(&first), first);
    active.vertices[0].weight = 1.0;
    let mut iterations = 0;

    loop {
        let plan = assemble(&active.vertices, n, m);
        let state = Residuals::new(mu, nu, &plan);
        let x = state.image();
        let s_cells = Vertex::from_dense(&lp.solve(&state.gradient())?);
        let p = image(&s_cells);
        let gap = (2.0 * (x.norm_squared() - x.dot(&p))).max(0.0);
        if gap <= target {
            return Ok(finish(mu, nu, plan, gap, iterations, lp.pivots()));
        }
        // a repeated vertex means the gap is at round-off level
        if iterations >= cfg.max_iter || active.vertices.iter().any(|v| v.same_cells(&s_cells)) {
            return Err(Error::GapNotReached {
                iterations,
                gap,
                target,
                best: Box::new(finish(mu, nu, plan, gap, iterations, lp.pivots())),
            });
        }
        iterations += 1;
        active.push(p, s_cells);
        if !active.minor_cycles() {
            // numerically dependent images: fall back to the last convex combination
            active.drop_zero_weights();
        }
    }
}

/// Active vertices with their images `φ(V)` and the Gram matrix of those images.
#[derive(Default)]
struct Active {
    vertices: Vec<Vertex>,
    images: Vec<Matrix>,
    gram: Vec<Vec<f64>>,
}

impl Active {
    fn push(&mut self, image: Matrix, cells: Vec<(usize, usize, f64)>) {
        let mut row: Vec<f64> = self.images.iter().map(|q| q.dot(&image)).collect();
        for (g, &v) in self.gram.iter_mut().zip(&row) {
            g.push(v);
        }
        row.push(image.norm_squared());
        self.gram.push(row);
        self.images.push(image);
        self.vertices.push(Vertex { cells, weight: 0.0 });
    }

    fn drop_zero_weights(&mut self) {
        let keep: Vec<bool> = self.vertices.iter().map(|v| v.weight > 0.0).collect();
        let mut k = 0;
        self.vertices.retain(|_| (keep[k], k += 1).0);
        k = 0;
        self.images.retain(|_| (keep[k], k += 1).0);
        k = 0;
        self.gram.retain(|_| (keep[k], k += 1).0);
        for row in &mut self.gram {
            k = 0;
            row.retain(|_| (keep[k], k += 1).0);
        }
    }

    /// Affine minimizer `α ∝ (c·11ᵀ + PᵀP)⁻¹ 1`; `c > 0` is arbitrary and only
    /// balances the conditioning.
    fn affine_minimizer(&self) -> Option<Vector> {
        let k = self.vertices.len();
        let c = self.gram.iter().enumerate().map(|(a, r)| r[a]).fold(0.0_f64, f64::max).max(f64::MIN_POSITIVE);
        let system = Matrix::from_fn(k, k, |a, b| c + self.gram[a][b]);
        let a = system.cholesky()?.solve(&Vector::from_element(k, 1.0));
        let total = a.sum();
        (total.is_finite() && total > 0.0).then(|| a / total)
    }

    /// Returns false if the affine system became singular.
    fn minor_cycles(&mut self) -> bool {
        loop {
            let Some(alpha) = self.affine_minimizer() else { return false };
            if alpha.iter().all(|&a| a > 0.0) {
                for (v, &a) in self.vertices.iter_mut().zip(alpha.iter()) {
                    v.weight = a;
                }
                return true;
            }
            let mut theta = 1.0;
            let mut blocking = 0;
            for (k, (v, &a)) in self.vertices.iter().zip(alpha.iter()).enumerate() {
                if a <= 0.0 {
                    let t = v.weight / (v.weight - a);
                    if t < theta {
                        theta = t;
                        blocking = k;
                    }
                }
            }
            for (v, &a) in self.vertices.iter_mut().zip(alpha.iter()) {
                v.weight = theta * a + (1.0 - theta) * v.weight;
            }
            self.vertices[blocking].weight = 0.0;
            self.drop_zero_weights();
        }
    }
}
