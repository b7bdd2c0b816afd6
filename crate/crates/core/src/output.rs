//! CSV and JSON artifacts.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same value.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Corner;
use crate::kernel::{KernelParams, Weight};
use crate::scalar::Scalar;
use crate::simulate::{Plan, SamplePath, SimulateError};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("row {row} has {found} values, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
}

/// Shortest round-trip decimal representation.
pub fn format_scalar<T: Scalar>(x: T) -> String {
    format!("{x:?}")
}

/// One row per replicate, one column per corner; the header holds the
/// corner coordinates.
pub fn write_sample_csv<T: Scalar, W: Write>(path: &SamplePath<T>, out: W) -> Result<(), OutputError> {
    write_matrix_csv(&path.corners, &path.values, out)
}

pub fn write_matrix_csv<T: Scalar, W: Write>(
    corners: &[Corner<T>],
    values: &[Vec<T>],
    out: W,
) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(corners.iter().map(|c| c.to_string()))?;
    for (row, v) in values.iter().enumerate() {
        if v.len() != corners.len() {
            return Err(OutputError::Ragged {
                row,
                expected: corners.len(),
                found: v.len(),
            });
        }
        w.write_record(v.iter().map(|&x| format_scalar(x)))?;
    }
    w.flush()?;
    Ok(())
}

/// Long format `(replicate, t, y)` for sheet integrals.
pub fn write_sheet_csv<T: Scalar, W: Write>(
    points: &[Corner<T>],
    values: &[Vec<T>],
    out: W,
) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replicate", "t", "y"])?;
    for (r, row) in values.iter().enumerate() {
        if row.len() != points.len() {
            return Err(OutputError::Ragged {
                row: r,
                expected: points.len(),
                found: row.len(),
            });
        }
        for (p, &y) in points.iter().zip(row) {
            w.write_record([r.to_string(), p.to_string(), format_scalar(y)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Transition data of one plan step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct StepRecord<T> {
    pub corner: Corner<T>,
    /// Canonical corners of the already-sampled union, clipped to `corner`.
    pub past: Vec<Corner<T>>,
    pub weights: Vec<Weight<T>>,
    pub variance: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct PlanRecord<T> {
    pub corners: Vec<Corner<T>>,
    pub steps: Vec<StepRecord<T>>,
}

pub fn plan_record<T: Scalar>(plan: &Plan<T>, params: &KernelParams<T>) -> Result<PlanRecord<T>, SimulateError> {
    let transitions = plan.transitions(params)?;
    let steps = plan
        .steps()
        .iter()
        .zip(transitions)
        .map(|(s, tp)| StepRecord {
            corner: s.increment.a().clone(),
            past: s.increment.b().corners().to_vec(),
            weights: tp.weights,
            variance: tp.variance,
        })
        .collect();
    Ok(PlanRecord {
        corners: plan.corners().to_vec(),
        steps,
    })
}

/// Top-level shape of every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<C, R> {
    pub config: C,
    pub results: Vec<R>,
}

pub fn write_json<C: Serialize, R: Serialize, W: Write>(
    mut out: W,
    config: &C,
    results: &[R],
) -> Result<(), OutputError> {
    #[derive(Serialize)]
    struct Borrowed<'a, C, R> {
        config: &'a C,
        results: &'a [R],
    }
    serde_json::to_writer_pretty(&mut out, &Borrowed { config, results })?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
