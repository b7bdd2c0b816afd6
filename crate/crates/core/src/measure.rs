//! Radon measures on rectangles and their finite unions.
//!
//! Two measures are supported: Lebesgue measure (`m([0,t]) = ∏ t_i`) and
//! the axis measure `m_α`, which charges only the coordinate axes
//! (`m_α([0,t]) = Σ α_i t_i`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Corner, GeometryError, UnionSet, MAX_UNION_CORNERS};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("axis weights must be positive and finite (alpha[{index}] = {value})")]
    InvalidAlpha { index: usize, value: f64 },
    #[error("axis measure needs at least one weight")]
    EmptyAlpha,
    #[error("corner of dimension {found} used with an axis measure of dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("union of {count} corners exceeds the inclusion-exclusion limit of {limit}")]
    TooManyCorners { count: usize, limit: usize },
    #[error("measure of a set difference is negative ({value})")]
    NegativeDifference { value: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Which measure `m` the indexing collection carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "lowercase",
    bound(serialize = "T: Scalar", deserialize = "T: Scalar")
)]
pub enum MeasureSpec<T> {
    Lebesgue,
    Axis { alpha: Vec<T> },
}

impl<T: Scalar> MeasureSpec<T> {
    pub fn axis(alpha: Vec<T>) -> Result<Self, MeasureError> {
        let spec = MeasureSpec::Axis { alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), MeasureError> {
        if let MeasureSpec::Axis { alpha } = self {
            if alpha.is_empty() {
                return Err(MeasureError::EmptyAlpha);
            }
            for (index, &a) in alpha.iter().enumerate() {
                if !(a.is_finite() && a > T::zero()) {
                    return Err(MeasureError::InvalidAlpha {
                        index,
                        value: a.as_f64(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Dimension fixed by the measure, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            MeasureSpec::Lebesgue => None,
            MeasureSpec::Axis { alpha } => Some(alpha.len()),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<(), MeasureError> {
        match self.dim() {
            Some(expected) if expected != dim => Err(MeasureError::DimensionMismatch {
                expected,
                found: dim,
            }),
            _ => Ok(()),
        }
    }

    /// `m([0,t])`.
    pub fn rect(&self, t: &Corner<T>) -> T {
        match self {
            MeasureSpec::Lebesgue => t.coords().iter().fold(T::one(), |acc, &x| acc * x),
            MeasureSpec::Axis { alpha } => {
                debug_assert_eq!(alpha.len(), t.dim());
                alpha
                    .iter()
                    .zip(t.coords())
                    .fold(T::zero(), |acc, (&a, &x)| acc + a * x)
            }
        }
    }

    /// `m(∪[0,b_i])` by exact inclusion-exclusion over corner meets.
    pub fn union(&self, u: &UnionSet<T>) -> Result<T, MeasureError> {
        let corners = u.corners();
        if let Some(dim) = u.dim() {
            self.check_dim(dim)?;
        }
        if corners.len() > MAX_UNION_CORNERS {
            return Err(MeasureError::TooManyCorners {
                count: corners.len(),
                limit: MAX_UNION_CORNERS,
            });
        }
        // Depth-first over subsets, carrying the running meet.
        fn walk<T: Scalar>(
            spec: &MeasureSpec<T>,
            corners: &[Corner<T>],
            start: usize,
            meet: &Corner<T>,
            size: usize,
            acc: &mut T,
        ) {
            let sign = if size % 2 == 1 { T::one() } else { -T::one() };
            *acc = *acc + sign * spec.rect(meet);
            for j in start..corners.len() {
                let next = meet.meet(&corners[j]);
                walk(spec, corners, j + 1, &next, size + 1, acc);
            }
        }
        let mut acc = T::zero();
        for (i, c) in corners.iter().enumerate() {
            walk(self, corners, i + 1, c, 1, &mut acc);
        }
        Ok(acc)
    }

    /// `m([0,u] Δ [0,v]) = m(u) + m(v) - 2 m(u ∧ v)`.
    pub fn symdiff(&self, u: &Corner<T>, v: &Corner<T>) -> T {
        let two = T::lit(2.0);
        let d = self.rect(u) + self.rect(v) - two * self.rect(&u.meet(v));
        d.max(T::zero())
    }

    /// `m([0,a] \ ∪[0,b_i])`, with `b` clipped to `a` first. Residues in
    /// `[-slack, 0)` are clamped to zero.
    pub fn diff(&self, a: &Corner<T>, b: &UnionSet<T>) -> Result<T, MeasureError> {
        self.check_dim(a.dim())?;
        let clipped = b.clip(a)?;
        let d = self.rect(a) - self.union(&clipped)?;
        if d < -T::measure_slack() {
            return Err(MeasureError::NegativeDifference { value: d.as_f64() });
        }
        Ok(d.max(T::zero()))
    }
}

pub fn measure_rect<T: Scalar>(spec: &MeasureSpec<T>, t: &Corner<T>) -> T {
    spec.rect(t)
}

pub fn measure_union<T: Scalar>(spec: &MeasureSpec<T>, u: &UnionSet<T>) -> Result<T, MeasureError> {
    spec.union(u)
}

pub fn measure_symdiff<T: Scalar>(spec: &MeasureSpec<T>, u: &Corner<T>, v: &Corner<T>) -> T {
    spec.symdiff(u, v)
}

pub fn measure_diff<T: Scalar>(
    spec: &MeasureSpec<T>,
    a: &Corner<T>,
    b: &UnionSet<T>,
) -> Result<T, MeasureError> {
    spec.diff(a, b)
}
