//! Set-indexed Ornstein-Uhlenbeck (SIOU) processes on the rectangle indexing
//! collection `{[0,t] : t in R^N_+}`.
//!
//! The crate covers the stationary covariance kernel, the C-Markov transition
//! system and its frontier machinery, sequential simulation from an arbitrary
//! initial law, the Brownian-sheet integral representation, and a harness of
//! deterministic and Monte Carlo checks.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`.

pub mod gaussian;
pub mod geometry;
pub mod kernel;
pub mod measure;
pub mod output;
pub mod scalar;
pub mod sheet;
pub mod simulate;
pub mod verify;

use thiserror::Error;

pub use gaussian::{GaussianError, RngSeed};
pub use geometry::{GeometryError, Sign};
pub use kernel::{CovarianceModel, KernelError};
pub use measure::MeasureError;
pub use scalar::Scalar;
pub use sheet::SheetError;
pub use simulate::SimulateError;
pub use verify::{CheckReport, VerifyError};

pub type Corner = geometry::Corner<f64>;
pub type UnionSet = geometry::UnionSet<f64>;
pub type Increment = geometry::Increment<f64>;
pub type Frontier = geometry::Frontier<f64>;
pub type MeasureSpec = measure::MeasureSpec<f64>;
pub type KernelParams = kernel::KernelParams<f64>;
pub type TransitionParams = kernel::TransitionParams<f64>;
pub type Matrix = gaussian::Matrix<f64>;
pub type GaussianSpec = gaussian::GaussianSpec<f64>;
pub type InitialLaw = simulate::InitialLaw<f64>;
pub type Plan = simulate::Plan<f64>;
pub type SamplePath = simulate::SamplePath<f64>;
pub type GridSpec = sheet::GridSpec<f64>;
pub type SheetField = sheet::SheetField<f64>;

pub type Corner32 = geometry::Corner<f32>;
pub type MeasureSpec32 = measure::MeasureSpec<f32>;
pub type KernelParams32 = kernel::KernelParams<f32>;

/// Any error raised by the crate.
#[derive(Debug, Error)]
pub enum Error {
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
    #[error(transparent)]
    Verify(#[from] verify::VerifyError),
    #[error(transparent)]
    Output(#[from] output::OutputError),
}
