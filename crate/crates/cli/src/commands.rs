use std::path::Path;

use convex_order::gauss::{is_j_unique_with, solve_pair, ProjectionResult};
use convex_order::one_dim::{project_1d_detailed, w2_squared_1d, Projection1d};
use convex_order::wot::WotSolution;
use convex_order::{
    bw2, gaussian_w2, solve_wot, wasserstein2_discrete, DiscreteMeasure, Error, GaussOptions, GaussianMeasure, Matrix,
    PgdTrace, WotConfig,
};
use serde_json::{json, Value};

use crate::report::{matrix, measure, vector};
use crate::CliError;

/// `W₂²` between discrete measures: quantile formula on the line, transport LP otherwise.
pub fn discrete_w2_squared(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<f64, CliError> {
    Ok(if a.dim() == 1 { w2_squared_1d(a, b)? } else { wasserstein2_discrete(a, b)? })
}

fn projection(p: &ProjectionResult, mean: &convex_order::Vector, shift2: f64) -> Value {
    json!({
        "cov": matrix(&p.covariance),
        "mean": vector(mean),
        "bures_squared": p.distance2,
        "w2_squared": shift2 + p.distance2,
    })
}

pub struct GaussianOutcome {
    pub report: Value,
    pub trace: Option<PgdTrace>,
}

pub fn project_gaussian(mu: &GaussianMeasure, nu: &GaussianMeasure, opts: &GaussOptions) -> Result<GaussianOutcome, CliError> {
    let sol = solve_pair(&mu.cov, &nu.cov, opts)?;
    let (pi, pj) = (sol.project_i(), sol.project_j());
    let shift2 = (&mu.mean - &nu.mean).norm_squared();
    let d = mu.dim();

    let uniqueness = if nu.cov.rank()? < d {
        match is_j_unique_with(&mu.cov, &nu.cov, opts) {
            Ok(u) => json!({
                "unique": u.unique,
                "reason": u.reason,
                "explanation": u.explanation(),
                "rank_nu": u.rank_nu,
                "rank_star": u.rank_star,
            }),
            Err(e @ Error::RankAmbiguous { .. }) => json!({
                "unique": null,
                "reason": "rank_ambiguous",
                "explanation": e.to_string(),
            }),
            Err(e) => return Err(e.into()),
        }
    } else {
        json!({ "unique": true, "reason": "nu_positive_definite" })
    };

    let t = &sol.transform;
    let diag = &sol.diagnostics;
    let report = json!({
        "command": "project-gaussian",
        "dimension": d,
        "method": sol.method.as_str(),
        "i": projection(&pi, &nu.mean, shift2),
        "j": projection(&pj, &mu.mean, shift2),
        "transform": { "basis": matrix(&t.basis), "scaling": vector(&t.scaling) },
        "uniqueness": uniqueness,
        "diagnostics": {
            "iterations": diag.iterations,
            "pgd_residual": diag.pgd_residual,
            "order_gap": diag.order_gap,
            "order_tol": diag.order_tol,
        },
    });
    Ok(GaussianOutcome {
        report,
        trace: diag.trace.clone(),
    })
}

pub fn write_trace(trace: Option<&PgdTrace>, path: &Path) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(path.display().to_string(), e.into());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["iteration", "objective", "grad_norm"]).map_err(io)?;
    if let Some(t) = trace {
        for (k, (obj, g)) in t.objective.iter().zip(&t.grad_norm).enumerate() {
            w.write_record([k.to_string(), obj.to_string(), g.to_string()]).map_err(io)?;
        }
    }
    w.flush().map_err(|e| CliError::Io(path.display().to_string(), e))
}

pub fn projection_1d_report(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: &Projection1d) -> Result<Value, CliError> {
    Ok(json!({
        "command": "project-1d",
        "i": {
            "measure": measure(&p.i),
            "mean": p.i.barycenter()[0],
            "w2_squared": w2_squared_1d(mu, &p.i)?,
        },
        "j": {
            "measure": measure(&p.j),
            "mean": p.j.barycenter()[0],
            "w2_squared": w2_squared_1d(nu, &p.j)?,
        },
        "hull_gap": p.hull_gap,
    }))
}

pub fn project_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Value, CliError> {
    let p = project_1d_detailed(mu, nu)?;
    projection_1d_report(mu, nu, &p)
}

pub struct DiscreteOutcome {
    pub report: Value,
    pub coupling: Matrix,
}

pub fn solve_discrete(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cfg: &WotConfig) -> Result<(WotSolution, DiscreteMeasure), CliError> {
    let sol = solve_wot(mu, nu, cfg)?;
    let i = sol.pushforward(mu, nu)?;
    Ok((sol, i))
}

pub fn project_discrete(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cfg: &WotConfig) -> Result<DiscreteOutcome, CliError> {
    let (sol, i) = solve_discrete(mu, nu, cfg)?;
    let report = json!({
        "command": "project-discrete",
        "value": sol.value,
        "gap": sol.gap,
        "iterations": sol.iterations,
        "lp_pivots": sol.lp_pivots,
        "i": {
            "measure": measure(&i),
            "mean": vector(&i.barycenter()),
        },
    });
    Ok(DiscreteOutcome {
        report,
        coupling: sol.coupling.into_matrix(),
    })
}

pub fn write_coupling(plan: &Matrix, path: &Path) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(path.display().to_string(), e.into());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for row in plan.row_iter() {
        w.write_record(row.iter().map(f64::to_string)).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(path.display().to_string(), e))
}

pub fn gaussian_distance(mu: &GaussianMeasure, nu: &GaussianMeasure) -> Result<Value, CliError> {
    let w2 = gaussian_w2(mu, nu)?;
    Ok(json!({
        "command": "distance",
        "w2": w2,
        "w2_squared": w2 * w2,
        "bures_squared": bw2(&mu.cov, &nu.cov)?,
        "mean_shift_squared": (&mu.mean - &nu.mean).norm_squared(),
    }))
}

pub fn discrete_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Value, CliError> {
    let w2sq = discrete_w2_squared(mu, nu)?;
    Ok(json!({
        "command": "distance",
        "w2": w2sq.max(0.0).sqrt(),
        "w2_squared": w2sq,
    }))
}
