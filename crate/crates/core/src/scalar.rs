//! Floating-point scalar abstraction.
//!
//! Every numeric routine in the crate is generic over [`Scalar`], which is
//! implemented for `f32` and `f64`. The crate root exposes `f64` aliases for
//! the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used for coordinates, measures, covariances and samples.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Absolute tolerance below which two coordinates are considered equal.
    fn coord_tol() -> Self;

    /// Slack allowed on measures of set differences before they count as negative.
    fn measure_slack() -> Self;

    /// Slack allowed on conditional variances before they count as negative.
    fn variance_slack() -> Self;

    /// Draws a standard normal variate (ziggurat method from `rand_distr`).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_scalar {
    ($t:ty, $coord:expr, $measure:expr, $variance:expr) => {
        impl Scalar for $t {
            #[inline]
            fn coord_tol() -> Self {
                $coord
            }
            #[inline]
            fn measure_slack() -> Self {
                $measure
            }
            #[inline]
            fn variance_slack() -> Self {
                $variance
            }
            #[inline]
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                <StandardNormal as Distribution<$t>>::sample(&StandardNormal, rng)
            }
        }
    };
}

impl_scalar!(f64, 1e-12, 1e-9, 1e-10);
impl_scalar!(f32, 1e-6, 1e-4, 1e-5);
