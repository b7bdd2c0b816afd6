//! Deliberately broken covariance models used as negative controls.

use crate::geometry::Corner;
use crate::kernel::{CovarianceModel, KernelParams};
use crate::measure::MeasureSpec;
use crate::scalar::Scalar;

/// The stationary and Dirac-start covariances with the sign of every
/// exponent flipped: `(σ²/2λ) exp(+λ m(U Δ V))`, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct SignFlippedKernel<T> {
    params: KernelParams<T>,
}

impl<T: Scalar> SignFlippedKernel<T> {
    pub fn new(params: KernelParams<T>) -> Self {
        Self { params }
    }
}

impl<T: Scalar> CovarianceModel<T> for SignFlippedKernel<T> {
    fn params(&self) -> &KernelParams<T> {
        &self.params
    }

    fn cov_stationary(&self, u: &Corner<T>, v: &Corner<T>) -> T {
        let p = &self.params;
        p.stationary_variance() * (p.lambda() * p.measure().symdiff(u, v)).exp()
    }

    fn cov_dirac(&self, u: &Corner<T>, v: &Corner<T>) -> T {
        let p = &self.params;
        let m = p.measure();
        let near = (p.lambda() * m.symdiff(u, v)).exp();
        let far = (p.lambda() * (m.rect(u) + m.rect(v))).exp();
        p.stationary_variance() * (near - far)
    }

    fn with_measure(&self, measure: MeasureSpec<T>) -> Self {
        Self::new(self.params.with_measure(measure))
    }
}
