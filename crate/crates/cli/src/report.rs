//! Canonical JSON output: sorted keys, shortest round-trip floats.

use std::io::Write;
use std::path::Path;

use convex_order::linalg::matrix_to_rows;
use convex_order::{DiscreteMeasure, Matrix, Vector};
use serde_json::{json, Value};

use crate::CliError;

pub fn matrix(m: &Matrix) -> Value {
    json!(matrix_to_rows(m))
}

pub fn vector(v: &Vector) -> Value {
    json!(v.as_slice())
}

/// Points are flat for 1-d measures and row-major otherwise.
pub fn measure(m: &DiscreteMeasure) -> Value {
    let points = if m.dim() == 1 {
        json!(m.points().column(0).as_slice())
    } else {
        json!(m.rows())
    };
    json!({ "points": points, "weights": m.weights().as_slice() })
}

pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn emit(v: &Value, output: Option<&Path>) -> Result<(), CliError> {
    let text = to_canonical_string(v);
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io("stdout".into(), e)),
    }
}
