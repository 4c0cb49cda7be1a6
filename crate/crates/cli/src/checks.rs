//! Invariant checks on computed or user-supplied projections.

use std::path::Path;

use convex_order::gauss::solve_pair;
use convex_order::one_dim::{g_function, project_1d_detailed, w2_squared_1d};
use convex_order::{bw2, DiscreteMeasure, GaussOptions, GaussianMeasure, Matrix, SpdMatrix, WotConfig};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::commands::{discrete_w2_squared, solve_discrete};
use crate::input::{read_json, Measure, MeasureSpec};
use crate::report::matrix;
use crate::CliError;

/// Overrides for the projections under test.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertSpec {
    pub sigma_i: Option<Vec<Vec<f64>>>,
    pub sigma_j: Option<Vec<Vec<f64>>>,
    pub i: Option<MeasureSpec>,
    pub j: Option<MeasureSpec>,
}

impl AssertSpec {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), read_json)
    }
}

pub struct Check {
    name: &'static str,
    /// Size of the violation; `None` when it could not be evaluated.
    residual: Option<f64>,
    tolerance: f64,
}

impl Check {
    fn new(name: &'static str, residual: Option<f64>, tolerance: f64) -> Self {
        Self { name, residual, tolerance }
    }

    pub fn pass(&self) -> bool {
        self.residual.is_some_and(|r| r <= self.tolerance)
    }
}

pub fn report(mode: &str, checks: &[Check], extra: Value) -> Value {
    let list: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "name": c.name, "residual": c.residual, "tolerance": c.tolerance, "pass": c.pass() }))
        .collect();
    json!({
        "command": "check",
        "mode": mode,
        "checks": list,
        "pass": checks.iter().all(Check::pass),
        "projections": extra,
    })
}

fn min_eig(m: &Matrix) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigen().eigenvalues.min()
}

fn override_cov(rows: Option<Vec<Vec<f64>>>, computed: Matrix, d: usize, name: &str) -> Result<Matrix, CliError> {
    let Some(rows) = rows else { return Ok(computed) };
    let m = convex_order::linalg::matrix_from_rows(&rows).map_err(|e| CliError::Parse(format!("{name}: {e}")))?;
    if m.nrows() != d || m.ncols() != d {
        return Err(CliError::Parse(format!("{name}: expected a {d}x{d} matrix")));
    }
    Ok(m)
}

pub fn gaussian(
    mu: &GaussianMeasure,
    nu: &GaussianMeasure,
    opts: &GaussOptions,
    rel_tol: f64,
    asserted: AssertSpec,
) -> Result<(Vec<Check>, Value), CliError> {
    let d = mu.dim();
    let sol = solve_pair(&mu.cov, &nu.cov, opts)?;
    let si = override_cov(asserted.sigma_i, sol.project_i().covariance.into_inner(), d, "sigma_i")?;
    let sj = override_cov(asserted.sigma_j, sol.project_j().covariance.into_inner(), d, "sigma_j")?;
    let tol = rel_tol * (1.0 + mu.cov.norm2()? + nu.cov.norm2()?);

    let psd = |m: &Matrix| (-min_eig(m)).max(0.0);
    let (psd_i, psd_j) = (psd(&si), psd(&sj));
    let trace = (si.trace() + sj.trace() - mu.cov.trace() - nu.cov.trace()).abs();
    let distances = if psd_i <= tol && psd_j <= tol {
        let di = bw2(&mu.cov, &SpdMatrix::assume_psd(si.clone()))?;
        let dj = bw2(&nu.cov, &SpdMatrix::assume_psd(sj.clone()))?;
        Some((di - dj).abs())
    } else {
        None
    };
    let checks = vec![
        Check::new("psd_i", Some(psd_i), tol),
        Check::new("psd_j", Some(psd_j), tol),
        Check::new("order_i", Some((-min_eig(&(&*nu.cov - &si))).max(0.0)), tol),
        Check::new("order_j", Some((-min_eig(&(&sj - &*mu.cov))).max(0.0)), tol),
        Check::new("trace_identity", Some(trace), tol),
        Check::new("distance_equality", distances, tol),
    ];
    Ok((checks, json!({ "sigma_i": matrix(&si), "sigma_j": matrix(&sj) })))
}

fn asserted_measure(spec: Option<MeasureSpec>, computed: DiscreteMeasure, name: &str) -> Result<DiscreteMeasure, CliError> {
    match spec.map(|s| s.build(name)).transpose()? {
        None => Ok(computed),
        Some(Measure::Discrete(m)) if m.dim() == computed.dim() => Ok(m),
        Some(_) => Err(CliError::Parse(format!("{name}: expected a discrete measure of dimension {}", computed.dim()))),
    }
}

/// `η ≤cx ν` violation on the line: `∫₀ᵘ (F_ν⁻¹ − F_η⁻¹)` must be `≤ 0` and vanish at `u = 1`.
fn cx_residual(eta: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64, CliError> {
    let g = g_function(nu, eta)?;
    let above = g.nodes().iter().fold(0.0_f64, |a, &x| a.max(x));
    let end = g.nodes().last().map_or(0.0, |x| x.abs());
    Ok(above.max(end))
}

pub fn one_dim(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    rel_tol: f64,
    asserted: AssertSpec,
) -> Result<(Vec<Check>, Value), CliError> {
    let p = project_1d_detailed(mu, nu)?;
    let i = asserted_measure(asserted.i, p.i, "i")?;
    let j = asserted_measure(asserted.j, p.j, "j")?;
    let tol = rel_tol * (1.0 + mu.second_moment() + nu.second_moment());
    let moments = i.second_moment() + j.second_moment() - mu.second_moment() - nu.second_moment();
    let same = (w2_squared_1d(mu, &i)? - w2_squared_1d(nu, &j)?).abs();
    let cross = (w2_squared_1d(nu, &i)? - w2_squared_1d(mu, &j)?).abs();
    let checks = vec![
        Check::new("order_i", Some(cx_residual(&i, nu)?), tol),
        Check::new("order_j", Some(cx_residual(mu, &j)?), tol),
        Check::new("mean_i", Some((i.barycenter() - nu.barycenter()).amax()), tol),
        Check::new("mean_j", Some((j.barycenter() - mu.barycenter()).amax()), tol),
        Check::new("second_moment_identity", Some(moments.abs()), tol),
        Check::new("distance_equality", Some(same), tol),
        Check::new("cross_distance_equality", Some(cross), tol),
    ];
    let extra = json!({ "i": crate::report::measure(&i), "j": crate::report::measure(&j) });
    Ok((checks, extra))
}

pub fn discrete(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cfg: &WotConfig,
    rel_tol: f64,
    asserted: AssertSpec,
) -> Result<(Vec<Check>, Value), CliError> {
    let (sol, i) = solve_discrete(mu, nu, cfg)?;
    let i = asserted_measure(asserted.i, i, "i")?;
    let tol = rel_tol * (1.0 + mu.second_moment() + nu.second_moment());
    let value_tol = tol + cfg.fw_tol * (1.0 + sol.value);
    let checks = vec![
        Check::new("mean_i", Some((i.barycenter() - nu.barycenter()).amax()), tol),
        Check::new("value_equality", Some((sol.value - discrete_w2_squared(mu, &i)?).abs()), value_tol),
    ];
    Ok((checks, json!({ "i": crate::report::measure(&i), "value": sol.value })))
}
