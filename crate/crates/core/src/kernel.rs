//! Covariance, mean and C-Markov transition formulas of the set-indexed
//! Ornstein-Uhlenbeck process.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Corner, GeometryError, Increment};
use crate::measure::{MeasureError, MeasureSpec};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("{name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("conditional variance is negative ({value})")]
    NegativeVariance { value: f64 },
    #[error("conditional variance is zero; the transition law is a point mass")]
    DegenerateKernel,
    #[error("expected {expected} frontier values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Decay rate `λ`, noise scale `σ` and the measure `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct KernelParams<T> {
    lambda: T,
    sigma: T,
    measure: MeasureSpec<T>,
}

impl<T: Scalar> KernelParams<T> {
    pub fn new(lambda: T, sigma: T, measure: MeasureSpec<T>) -> Result<Self, KernelError> {
        for (name, value) in [("lambda", lambda), ("sigma", sigma)] {
            if !(value.is_finite() && value > T::zero()) {
                return Err(KernelError::InvalidParameter {
                    name,
                    value: value.as_f64(),
                });
            }
        }
        measure.validate()?;
        Ok(Self {
            lambda,
            sigma,
            measure,
        })
    }

    /// Same as [`KernelParams::new`] but takes `σ²`.
    pub fn from_variance(lambda: T, sigma2: T, measure: MeasureSpec<T>) -> Result<Self, KernelError> {
        if !(sigma2.is_finite() && sigma2 > T::zero()) {
            return Err(KernelError::InvalidParameter {
                name: "sigma^2",
                value: sigma2.as_f64(),
            });
        }
        Self::new(lambda, sigma2.sqrt(), measure)
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn measure(&self) -> &MeasureSpec<T> {
        &self.measure
    }

    pub fn with_measure(&self, measure: MeasureSpec<T>) -> Self {
        Self {
            measure,
            ..self.clone()
        }
    }

    /// `σ² / 2λ`.
    pub fn stationary_variance(&self) -> T {
        self.sigma * self.sigma / (T::lit(2.0) * self.lambda)
    }

    /// `(σ²/2λ) exp(-λ m(U Δ V))`.
    pub fn cov_stationary(&self, u: &Corner<T>, v: &Corner<T>) -> T {
        self.stationary_variance() * (-self.lambda * self.measure.symdiff(u, v)).exp()
    }

    /// Covariance under a Dirac initial law:
    /// `(σ²/2λ)(exp(-λ m(U Δ V)) - exp(-λ(m(U) + m(V))))`.
    pub fn cov_dirac(&self, u: &Corner<T>, v: &Corner<T>) -> T {
        let m = &self.measure;
        let near = (-self.lambda * m.symdiff(u, v)).exp();
        let far = (-self.lambda * (m.rect(u) + m.rect(v))).exp();
        self.stationary_variance() * (near - far)
    }

    /// `x0 exp(-λ m(U))`.
    pub fn mean_dirac(&self, x0: T, u: &Corner<T>) -> T {
        x0 * (-self.lambda * self.measure.rect(u)).exp()
    }

    /// Conditional law of `X_A` given the values on the C-frontier of `inc`.
    pub fn transition_params(&self, inc: &Increment<T>) -> Result<TransitionParams<T>, KernelError> {
        self.measure.check_dim(inc.dim())?;
        let frontier = inc.frontier()?;
        let m_a = self.measure.rect(inc.a());
        let two_lambda = T::lit(2.0) * self.lambda;
        let mut tail = T::zero();
        let weights = frontier
            .entries()
            .iter()
            .map(|e| {
                let gap = m_a - self.measure.rect(&e.corner);
                let sign = e.sign.value::<T>();
                tail = tail + sign * (-two_lambda * gap).exp();
                Weight {
                    corner: e.corner.clone(),
                    weight: sign * (-self.lambda * gap).exp(),
                }
            })
            .collect();
        let variance = self.stationary_variance() * (T::one() - tail);
        if variance < -T::variance_slack() {
            return Err(KernelError::NegativeVariance {
                value: variance.as_f64(),
            });
        }
        Ok(TransitionParams {
            weights,
            variance: variance.max(T::zero()),
        })
    }
}

/// Signed regression weight of one frontier value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Weight<T> {
    pub corner: Corner<T>,
    pub weight: T,
}

/// `X_A | frontier = x  ~  Normal(Σ w_i x_i, σ_C²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct TransitionParams<T> {
    pub weights: Vec<Weight<T>>,
    pub variance: T,
}

impl<T: Scalar> TransitionParams<T> {
    pub fn conditional_mean(&self, x: &[T]) -> Result<T, KernelError> {
        if x.len() != self.weights.len() {
            return Err(KernelError::LengthMismatch {
                expected: self.weights.len(),
                found: x.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (w, &xi)| acc + w.weight * xi))
    }

    /// Gaussian transition density `p_C(x; y)`.
    pub fn density(&self, x: &[T], y: T) -> Result<T, KernelError> {
        let mean = self.conditional_mean(x)?;
        if self.variance <= T::zero() {
            return Err(KernelError::DegenerateKernel);
        }
        Ok(normal_pdf(y, mean, self.variance))
    }
}

pub fn transition_density<T: Scalar>(
    tp: &TransitionParams<T>,
    x: &[T],
    y: T,
) -> Result<T, KernelError> {
    tp.density(x, y)
}

pub(crate) fn normal_pdf<T: Scalar>(y: T, mean: T, variance: T) -> T {
    let z = y - mean;
    let two = T::lit(2.0);
    (-(z * z) / (two * variance)).exp() / (two * T::PI() * variance).sqrt()
}

/// Source of second-order structure for the verification harness.
///
/// [`KernelParams`] is the reference implementation; deliberately corrupted
/// models are used as negative controls.
pub trait CovarianceModel<T: Scalar>: Sync {
    fn params(&self) -> &KernelParams<T>;
    fn cov_stationary(&self, u: &Corner<T>, v: &Corner<T>) -> T;
    fn cov_dirac(&self, u: &Corner<T>, v: &Corner<T>) -> T;
    fn with_measure(&self, measure: MeasureSpec<T>) -> Self
    where
        Self: Sized;
}

impl<T: Scalar> CovarianceModel<T> for KernelParams<T> {
    fn params(&self) -> &KernelParams<T> {
        self
    }

    fn cov_stationary(&self, u: &Corner<T>, v: &Corner<T>) -> T {
        KernelParams::cov_stationary(self, u, v)
    }

    fn cov_dirac(&self, u: &Corner<T>, v: &Corner<T>) -> T {
        KernelParams::cov_dirac(self, u, v)
    }

    fn with_measure(&self, measure: MeasureSpec<T>) -> Self {
        KernelParams::with_measure(self, measure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Corner;

    fn c(x: &[f64]) -> Corner<f64> {
        Corner::from_f64(x).unwrap()
    }

    fn params(lambda: f64, sigma2: f64) -> KernelParams<f64> {
        KernelParams::from_variance(lambda, sigma2, MeasureSpec::Lebesgue).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(KernelParams::new(0.0, 1.0, MeasureSpec::Lebesgue).is_err());
        assert!(KernelParams::new(1.0, -1.0, MeasureSpec::Lebesgue).is_err());
        assert!(KernelParams::new(f64::NAN, 1.0, MeasureSpec::Lebesgue).is_err());
        assert!(KernelParams::new(1.0, 1.0, MeasureSpec::Axis { alpha: vec![0.0] }).is_err());
    }

    #[test]
    fn cov_stationary_examples() {
        let p = params(1.0, 2.0);
        assert!((p.cov_stationary(&c(&[1.2, 0.4]), &c(&[1.2, 0.4])) - 1.0).abs() < 1e-15);
        assert!((p.cov_stationary(&c(&[1.]), &c(&[2.])) - 0.367879441171442).abs() < 1e-12);
        let v = p.cov_stationary(&c(&[1., 2.]), &c(&[2., 1.]));
        assert!((v - 0.1353352832366127).abs() < 1e-12);
    }

    #[test]
    fn cov_dirac_examples() {
        let p = params(1.0, 2.0);
        assert_eq!(p.cov_dirac(&c(&[0., 0.]), &c(&[1., 2.])), 0.0);
        assert_eq!(p.mean_dirac(0.7, &c(&[0., 0.])), 0.7);
        let v = p.cov_dirac(&c(&[1.]), &c(&[2.]));
        assert!((v - 0.3180923728035784).abs() < 1e-12);
        for t in [0.3, 1.0, 2.5] {
            let var = p.cov_dirac(&c(&[t]), &c(&[t]));
            assert!((var - (1.0 - (-2.0 * t).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn cov_dirac_decomposition() {
        let p = KernelParams::from_variance(0.7, 1.3, MeasureSpec::axis(vec![0.5, 2.0]).unwrap())
            .unwrap();
        let (u, v) = (c(&[0.3, 1.1]), c(&[1.4, 0.2]));
        let m = p.measure();
        let correction = p.stationary_variance() * (-0.7 * (m.rect(&u) + m.rect(&v))).exp();
        let lhs = p.cov_dirac(&u, &v);
        let rhs = p.cov_stationary(&u, &v) - correction;
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn transition_one_dimensional_chain() {
        let (lambda, sigma2) = (0.8, 1.5);
        let p = params(lambda, sigma2);
        let (s, t) = (0.6, 1.9);
        let inc = Increment::new(c(&[t]), &[c(&[s])]).unwrap();
        let tp = p.transition_params(&inc).unwrap();
        assert_eq!(tp.weights.len(), 1);
        assert!((tp.weights[0].weight - (-lambda * (t - s)).exp()).abs() < 1e-14);
        let expected = sigma2 / (2.0 * lambda) * (1.0 - (-2.0 * lambda * (t - s)).exp());
        assert!((tp.variance - expected).abs() < 1e-14);
    }

    #[test]
    fn transition_from_origin() {
        let p = params(1.0, 2.0);
        let a = c(&[1.5, 2.0]);
        let inc = Increment::new(a.clone(), &[]).unwrap();
        let tp = p.transition_params(&inc).unwrap();
        assert!(tp.weights[0].corner.is_origin());
        assert!((tp.weights[0].weight - (-3.0f64).exp()).abs() < 1e-15);
        assert!((tp.variance - (1.0 - (-6.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn transition_two_corner_union() {
        let p = params(1.0, 2.0);
        let inc = Increment::new(c(&[2., 2.]), &[c(&[1., 2.]), c(&[2., 1.])]).unwrap();
        let tp = p.transition_params(&inc).unwrap();
        let e = f64::exp;
        assert!((tp.variance - (1.0 - 2.0 * e(-4.0) + e(-6.0))).abs() < 1e-12);
        assert!((tp.variance - 0.965847474399198).abs() < 1e-12);
        for w in &tp.weights {
            let expected = if w.corner.approx_eq(&c(&[1., 1.])) {
                -e(-3.0)
            } else {
                e(-2.0)
            };
            assert!((w.weight - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_increment_has_zero_variance() {
        let p = params(1.0, 2.0);
        let inc = Increment::new(c(&[2., 2.]), &[c(&[2., 2.])]).unwrap();
        let tp = p.transition_params(&inc).unwrap();
        assert_eq!(tp.variance, 0.0);
        assert_eq!(tp.weights[0].weight, 1.0);
        assert_eq!(tp.density(&[0.3], 0.3), Err(KernelError::DegenerateKernel));
    }

    #[test]
    fn density_peak_and_normalization() {
        let tp = TransitionParams {
            weights: vec![Weight {
                corner: c(&[1.0]),
                weight: 0.5,
            }],
            variance: 1.0,
        };
        let peak = tp.density(&[2.0], 1.0).unwrap();
        assert!((peak - 0.3989422804014327).abs() < 1e-15);
        // Composite Simpson on [-12, 14] (mean 1, unit variance).
        let (lo, hi, n) = (-11.0, 13.0, 4000);
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * tp.density(&[2.0], lo + i as f64 * h).unwrap();
        }
        assert!((acc * h / 3.0 - 1.0).abs() < 1e-8);
        assert!(matches!(
            tp.density(&[1.0, 2.0], 0.0),
            Err(KernelError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn density_matches_classical_ou_kernel() {
        let (lambda, sigma) = (1.3f64, 0.9f64);
        let p = KernelParams::new(lambda, sigma, MeasureSpec::Lebesgue).unwrap();
        let inc = Increment::new(c(&[2.0]), &[c(&[0.75])]).unwrap();
        let tp = p.transition_params(&inc).unwrap();
        let dt = 1.25;
        let var = sigma * sigma / (2.0 * lambda) * (1.0 - (-2.0 * lambda * dt).exp());
        for x in [-1.0, 0.0, 0.4, 2.0] {
            for y in [-2.0, -0.3, 0.0, 1.1] {
                let mean = x * (-lambda * dt).exp();
                let classical = (-(y - mean).powi(2) / (2.0 * var)).exp()
                    / (var.sqrt() * (2.0 * std::f64::consts::PI).sqrt());
                assert!((tp.density(&[x], y).unwrap() - classical).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn multiplicity_error_propagates() {
        let p = params(1.0, 1.0);
        let inc = Increment::new(
            c(&[2., 2., 2.]),
            &[c(&[2., 1., 1.]), c(&[1., 2., 1.]), c(&[1., 1., 2.])],
        )
        .unwrap();
        assert!(matches!(
            p.transition_params(&inc),
            Err(KernelError::Geometry(GeometryError::SignMultiplicity { .. }))
        ));
    }
}
