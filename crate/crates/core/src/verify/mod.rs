//! Verification harness: deterministic identity checks on the covariance
//! structure and Monte Carlo moment checks on the samplers.
//!
//! Every check returns a [`CheckReport`]; a check passes exactly when its
//! statistic does not exceed its tolerance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::{GaussianError, RngSeed};
use crate::geometry::{Corner, GeometryError};
use crate::kernel::KernelError;
use crate::measure::MeasureError;
use crate::scalar::Scalar;
use crate::sheet::SheetError;
use crate::simulate::SimulateError;

mod deterministic;
pub mod fixtures;
mod monte_carlo;

pub use deterministic::*;
pub use monte_carlo::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{found} replicates supplied, at least {required} required")]
    TooFewReplicates { found: usize, required: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
    #[error(transparent)]
    Sheet(#[from] SheetError),
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub statistic: f64,
    pub tolerance: f64,
    pub details: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, statistic: f64, tolerance: f64, details: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            // NaN statistics fail.
            passed: statistic <= tolerance,
            statistic,
            tolerance,
            details: details.into(),
        }
    }

    /// Same report under a qualified name.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}{}", self.name);
        self
    }
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// Piecewise-linear monotone path through `waypoints`, starting at the
/// origin. The parameter runs over `[0, segments]`, one unit per segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct FlowSpec<T> {
    waypoints: Vec<Corner<T>>,
}

impl<T: Scalar> FlowSpec<T> {
    pub fn new(waypoints: Vec<Corner<T>>) -> Result<Self, VerifyError> {
        if waypoints.len() < 2 {
            return Err(VerifyError::InvalidFlow("a flow needs at least two waypoints".into()));
        }
        if !waypoints[0].is_origin() {
            return Err(VerifyError::InvalidFlow("a flow must start at the origin".into()));
        }
        let dim = waypoints[0].dim();
        for (i, w) in waypoints.windows(2).enumerate() {
            w[1].check_dim(dim)?;
            if !w[0].le(&w[1]) {
                return Err(VerifyError::InvalidFlow(format!(
                    "waypoint {} is not componentwise above waypoint {i}",
                    i + 1
                )));
            }
        }
        Ok(Self { waypoints })
    }

    pub fn waypoints(&self) -> &[Corner<T>] {
        &self.waypoints
    }

    pub fn dim(&self) -> usize {
        self.waypoints[0].dim()
    }

    pub fn segments(&self) -> usize {
        self.waypoints.len() - 1
    }

    /// Point of the flow at parameter `tau`, clamped to `[0, segments]`.
    pub fn at(&self, tau: T) -> Corner<T> {
        let k = self.segments();
        let tau = tau.max(T::zero()).min(T::from_count(k));
        let seg = tau.floor().to_usize().unwrap_or(0).min(k - 1);
        let frac = tau - T::from_count(seg);
        let (p, q) = (&self.waypoints[seg], &self.waypoints[seg + 1]);
        let coords = p
            .coords()
            .iter()
            .zip(q.coords())
            .map(|(&x, &y)| (x + frac * (y - x)).max(T::zero()))
            .collect();
        Corner::new(coords).expect("interpolated coordinates are finite and nonnegative")
    }
}

/// Sub-seed for check number `k` of a suite.
pub(crate) fn sub_seed(seed: RngSeed, k: u64) -> RngSeed {
    seed.with_stream(seed.stream.wrapping_add(k << 32))
}

/// Converts a statistic to `f64`, mapping NaN to infinity.
pub(crate) fn stat<T: Scalar>(x: T) -> f64 {
    let v = x.as_f64();
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}
