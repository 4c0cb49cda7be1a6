//! JSON problem files.
//!
//! A problem is `{"mu": <measure>, "nu": <measure>}` where a measure is either
//! `{"mean": [..], "cov": [[..]]}` (mean optional, defaults to zero) or
//! `{"points": [[..]] | [..], "weights": [..]}` (weights optional, default uniform).

use std::path::Path;

use convex_order::linalg::matrix_from_rows;
use convex_order::{DiscreteMeasure, GaussianMeasure, Matrix, SpdMatrix, Vector};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Points {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub mean: Option<Vec<f64>>,
    pub cov: Option<Vec<Vec<f64>>>,
    pub points: Option<Points>,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub mu: MeasureSpec,
    pub nu: MeasureSpec,
}

#[derive(Clone, Debug)]
pub enum Measure {
    Gaussian(GaussianMeasure),
    Discrete(DiscreteMeasure),
}

#[derive(Clone, Debug)]
pub enum Problem {
    Gaussian(GaussianMeasure, GaussianMeasure),
    Discrete(DiscreteMeasure, DiscreteMeasure),
}

fn parse_err(what: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("{what}: {e}"))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(&path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| parse_err(&path.display().to_string(), e))
}

pub fn covariance(rows: &[Vec<f64>], what: &str) -> Result<SpdMatrix, CliError> {
    let m = matrix_from_rows(rows).map_err(|e| parse_err(what, e))?;
    SpdMatrix::new(m).map_err(|e| parse_err(what, e))
}

impl MeasureSpec {
    pub fn build(self, name: &str) -> Result<Measure, CliError> {
        match self {
            MeasureSpec {
                cov: Some(cov),
                mean,
                points: None,
                weights: None,
            } => {
                let cov = covariance(&cov, name)?;
                let mean = mean.map_or_else(|| Vector::zeros(cov.dim()), Vector::from_vec);
                let g = GaussianMeasure::new(mean, cov).map_err(|e| parse_err(name, e))?;
                Ok(Measure::Gaussian(g))
            }
            MeasureSpec {
                points: Some(points),
                weights,
                mean: None,
                cov: None,
            } => {
                let points = match points {
                    Points::Flat(xs) => Matrix::from_column_slice(xs.len(), 1, &xs),
                    Points::Rows(rows) => matrix_from_rows(&rows).map_err(|e| parse_err(name, e))?,
                };
                let n = points.nrows();
                let weights = weights.unwrap_or_else(|| vec![1.0 / n as f64; n]);
                let m = DiscreteMeasure::new(points, weights).map_err(|e| parse_err(name, e))?;
                Ok(Measure::Discrete(m))
            }
            _ => Err(CliError::Parse(format!(
                "{name}: expected either {{\"mean\", \"cov\"}} or {{\"points\", \"weights\"}}"
            ))),
        }
    }
}

impl ProblemSpec {
    pub fn build(self) -> Result<Problem, CliError> {
        match (self.mu.build("mu")?, self.nu.build("nu")?) {
            (Measure::Gaussian(a), Measure::Gaussian(b)) => {
                if a.dim() != b.dim() {
                    return Err(CliError::Parse(format!("dimensions differ: {} vs {}", a.dim(), b.dim())));
                }
                Ok(Problem::Gaussian(a, b))
            }
            (Measure::Discrete(a), Measure::Discrete(b)) => {
                if a.dim() != b.dim() {
                    return Err(CliError::Parse(format!("dimensions differ: {} vs {}", a.dim(), b.dim())));
                }
                Ok(Problem::Discrete(a, b))
            }
            _ => Err(CliError::Parse("mu and nu must both be Gaussian or both discrete".into())),
        }
    }
}

pub fn read_problem(path: &Path) -> Result<Problem, CliError> {
    read_json::<ProblemSpec>(path)?.build()
}

pub fn gaussian_pair(path: &Path) -> Result<(GaussianMeasure, GaussianMeasure), CliError> {
    match read_problem(path)? {
        Problem::Gaussian(a, b) => Ok((a, b)),
        Problem::Discrete(..) => Err(CliError::Parse("this command needs Gaussian measures".into())),
    }
}

pub fn discrete_pair(path: &Path) -> Result<(DiscreteMeasure, DiscreteMeasure), CliError> {
    match read_problem(path)? {
        Problem::Discrete(a, b) => Ok((a, b)),
        Problem::Gaussian(..) => Err(CliError::Parse("this command needs discrete measures".into())),
    }
}
