//! Brownian-sheet integral representation of multiparameter OU processes.
//!
//! A sheet is discretized on a rectangular grid of independent cell
//! increments. Integrals are Riemann-Itô sums with the integrand and region
//! membership evaluated at cell centers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::RngSeed;
use crate::geometry::Corner;
use crate::kernel::{KernelError, KernelParams};
use crate::measure::{MeasureError, MeasureSpec};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SheetError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate {index} of the query point ({value}) lies outside the grid (upper {upper})")]
    OutOfRange { index: usize, value: f64, upper: f64 },
    #[error("{name} must be positive and finite")]
    InvalidParameter { name: &'static str },
    #[error("at least one replicate is required")]
    NoReplicates,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Box `[lower, upper]` split into `steps[i]` equal cells along axis `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct GridSpec<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub steps: Vec<usize>,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>, steps: Vec<usize>) -> Result<Self, SheetError> {
        let g = Self { lower, upper, steps };
        g.validate()?;
        Ok(g)
    }

    /// `[-l, t]^dim` with cells of side `step`; `l` and `t` are rounded to
    /// whole cells so that the origin is a grid node.
    pub fn cube(dim: usize, l: T, t: T, step: T) -> Result<Self, SheetError> {
        if !(step.is_finite() && step > T::zero()) {
            return Err(SheetError::InvalidGrid("step must be positive".into()));
        }
        let below = (l / step).round().to_usize().unwrap_or(0);
        let above = (t / step).round().to_usize().unwrap_or(0);
        Self::new(
            vec![-step * T::from_count(below); dim],
            vec![step * T::from_count(above); dim],
            vec![below + above; dim],
        )
    }

    pub fn validate(&self) -> Result<(), SheetError> {
        let n = self.lower.len();
        if n == 0 {
            return Err(SheetError::InvalidGrid("dimension must be at least 1".into()));
        }
        if self.upper.len() != n || self.steps.len() != n {
            return Err(SheetError::InvalidGrid("lower, upper and steps differ in length".into()));
        }
        for i in 0..n {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(SheetError::InvalidGrid(format!("axis {i} has a non-finite bound")));
            }
            if lo > T::zero() || hi <= T::zero() {
                return Err(SheetError::InvalidGrid(format!("axis {i} needs lower <= 0 < upper")));
            }
            if self.steps[i] == 0 {
                return Err(SheetError::InvalidGrid(format!("axis {i} has zero cells")));
            }
        }
        if !(self.cell_volume() > T::zero()) {
            return Err(SheetError::InvalidGrid("cell volume is zero".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, axis: usize) -> T {
        (self.upper[axis] - self.lower[axis]) / T::from_count(self.steps[axis])
    }

    pub fn cell_volume(&self) -> T {
        (0..self.dim()).map(|i| self.width(i)).fold(T::one(), |a, w| a * w)
    }

    pub fn cell_count(&self) -> usize {
        self.steps.iter().product()
    }

    pub fn center(&self, axis: usize, j: usize) -> T {
        self.lower[axis] + (T::from_count(j) + T::lit(0.5)) * self.width(axis)
    }

    /// Number of cells along `axis` whose center is `<= x`.
    fn cells_below(&self, axis: usize, x: T) -> usize {
        (0..self.steps[axis])
            .take_while(|&j| self.center(axis, j) <= x + T::coord_tol())
            .count()
    }

    fn check_point(&self, t: &Corner<T>) -> Result<(), SheetError> {
        if t.dim() != self.dim() {
            return Err(SheetError::DimensionMismatch {
                expected: self.dim(),
                found: t.dim(),
            });
        }
        for (i, &x) in t.coords().iter().enumerate() {
            if x > self.upper[i] + T::coord_tol() {
                return Err(SheetError::OutOfRange {
                    index: i,
                    value: x.as_f64(),
                    upper: self.upper[i].as_f64(),
                });
            }
        }
        Ok(())
    }

    /// Multi-index of flat cell `k`; the last axis varies fastest.
    fn unflatten(&self, mut k: usize, out: &mut [usize]) {
        for i in (0..self.dim()).rev() {
            out[i] = k % self.steps[i];
            k /= self.steps[i];
        }
    }
}

/// One realization of the sheet increments over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct SheetField<T> {
    pub increments: Vec<T>,
    pub spec: GridSpec<T>,
    pub seed: RngSeed,
}

impl<T: Scalar> SheetField<T> {
    /// Field drawn from replicate stream `replicate` of `seed`.
    pub fn for_replicate(spec: &GridSpec<T>, seed: RngSeed, replicate: u64) -> Result<Self, SheetError> {
        spec.validate()?;
        let sd = spec.cell_volume().sqrt();
        let mut rng = seed.replicate_rng(replicate);
        let increments = (0..spec.cell_count())
            .map(|_| sd * T::standard_normal(&mut rng))
            .collect();
        Ok(Self {
            increments,
            spec: spec.clone(),
            seed,
        })
    }

    /// `Σ` over cells with center in the region of `f(center)·ΔW`.
    fn weighted_sum(&self, alpha: &[T], region: impl Fn(&[T]) -> bool) -> T {
        let g = &self.spec;
        let mut idx = vec![0; g.dim()];
        let mut u = vec![T::zero(); g.dim()];
        let mut acc = T::zero();
        for (k, &dw) in self.increments.iter().enumerate() {
            g.unflatten(k, &mut idx);
            for i in 0..g.dim() {
                u[i] = g.center(i, idx[i]);
            }
            if region(&u) {
                let dot = u.iter().zip(alpha).fold(T::zero(), |a, (&x, &al)| a + x * al);
                acc = acc + dot.exp() * dw;
            }
        }
        acc
    }
}

pub fn sheet_increments<T: Scalar>(spec: &GridSpec<T>, seed: RngSeed) -> Result<SheetField<T>, SheetError> {
    SheetField::for_replicate(spec, seed, 0)
}

fn check_alpha_sigma<T: Scalar>(dim: usize, alpha: &[T], sigma: T) -> Result<(), SheetError> {
    if alpha.len() != dim {
        return Err(SheetError::DimensionMismatch {
            expected: dim,
            found: alpha.len(),
        });
    }
    if alpha.iter().any(|a| !(a.is_finite() && *a > T::zero())) {
        return Err(SheetError::InvalidParameter { name: "alpha" });
    }
    if !(sigma.is_finite() && sigma > T::zero()) {
        return Err(SheetError::InvalidParameter { name: "sigma" });
    }
    Ok(())
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn below<T: Scalar>(u: &[T], t: &[T]) -> bool {
    u.iter().zip(t).all(|(&x, &y)| x <= y + T::coord_tol())
}

/// `e^{-<α,t>} (y0 + σ Σ_{u ≤ t, u ≰ 0} e^{<α,u>} ΔW_u)` by direct summation.
pub fn integrate_mpou<T: Scalar>(
    field: &SheetField<T>,
    alpha: &[T],
    sigma: T,
    y0: T,
    t: &Corner<T>,
) -> Result<T, SheetError> {
    check_alpha_sigma(field.spec.dim(), alpha, sigma)?;
    field.spec.check_point(t)?;
    let zero = vec![T::zero(); t.dim()];
    let s = field.weighted_sum(alpha, |u| below(u, t.coords()) && !below(u, &zero));
    Ok((-dot(alpha, t.coords())).exp() * (y0 + sigma * s))
}

/// `σ Σ_{u ≤ t} e^{<α,u-t>} ΔW_u` by direct summation.
pub fn integrate_stationary<T: Scalar>(
    field: &SheetField<T>,
    alpha: &[T],
    sigma: T,
    t: &Corner<T>,
) -> Result<T, SheetError> {
    check_alpha_sigma(field.spec.dim(), alpha, sigma)?;
    field.spec.check_point(t)?;
    let s = field.weighted_sum(alpha, |u| below(u, t.coords()));
    Ok(sigma * (-dot(alpha, t.coords())).exp() * s)
}

/// Prefix sums of `e^{<α,u>} ΔW_u`, answering both integrals in `O(1)` per
/// query point after `O(cells)` setup.
#[derive(Debug, Clone)]
pub struct SheetIntegrator<T> {
    spec: GridSpec<T>,
    alpha: Vec<T>,
    sigma: T,
    /// Shape `steps[i] + 1` per axis; entry `k` sums cells with index `< k`.
    prefix: Vec<T>,
    strides: Vec<usize>,
    origin_cells: Vec<usize>,
}

impl<T: Scalar> SheetIntegrator<T> {
    pub fn new(field: &SheetField<T>, alpha: &[T], sigma: T) -> Result<Self, SheetError> {
        let spec = field.spec.clone();
        check_alpha_sigma(spec.dim(), alpha, sigma)?;
        let n = spec.dim();
        let shape: Vec<usize> = spec.steps.iter().map(|s| s + 1).collect();
        let mut strides = vec![1; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * shape[i + 1];
        }
        let exps: Vec<Vec<T>> = (0..n)
            .map(|i| {
                (0..spec.steps[i])
                    .map(|j| (alpha[i] * spec.center(i, j)).exp())
                    .collect()
            })
            .collect();
        let mut prefix = vec![T::zero(); shape.iter().product()];
        let mut idx = vec![0; n];
        for (k, &dw) in field.increments.iter().enumerate() {
            spec.unflatten(k, &mut idx);
            let mut w = dw;
            let mut pos = 0;
            for i in 0..n {
                w = w * exps[i][idx[i]];
                pos += (idx[i] + 1) * strides[i];
            }
            prefix[pos] = w;
        }
        for axis in 0..n {
            let len = shape[axis];
            for pos in 0..prefix.len() {
                let j = (pos / strides[axis]) % len;
                if j > 0 {
                    prefix[pos] = prefix[pos] + prefix[pos - strides[axis]];
                }
            }
        }
        let origin_cells = (0..n).map(|i| spec.cells_below(i, T::zero())).collect();
        Ok(Self {
            spec,
            alpha: alpha.to_vec(),
            sigma,
            prefix,
            strides,
            origin_cells,
        })
    }

    fn lookup(&self, counts: &[usize]) -> T {
        let pos: usize = counts.iter().zip(&self.strides).map(|(c, s)| c * s).sum();
        self.prefix[pos]
    }

    fn counts(&self, t: &Corner<T>) -> Result<Vec<usize>, SheetError> {
        self.spec.check_point(t)?;
        Ok(t.coords()
            .iter()
            .enumerate()
            .map(|(i, &x)| self.spec.cells_below(i, x))
            .collect())
    }

    pub fn mpou(&self, y0: T, t: &Corner<T>) -> Result<T, SheetError> {
        let k = self.counts(t)?;
        // {u ≤ t} \ {u ≤ 0} = {u ≤ t} minus the box {u ≤ 0}, as t ≥ 0.
        let s = self.lookup(&k) - self.lookup(&self.origin_cells);
        Ok((-dot(&self.alpha, t.coords())).exp() * (y0 + self.sigma * s))
    }

    pub fn stationary(&self, t: &Corner<T>) -> Result<T, SheetError> {
        let k = self.counts(t)?;
        Ok(self.sigma * (-dot(&self.alpha, t.coords())).exp() * self.lookup(&k))
    }
}

/// Which integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "lowercase",
    bound(serialize = "T: Scalar", deserialize = "T: Scalar")
)]
pub enum SheetMode<T> {
    /// Started at `y0` at the origin.
    Mpou { y0: T },
    /// Integral over the whole lower-left orthant.
    Stationary,
}

/// `Y_t` at every point for `replicates` independent fields; replicate `r`
/// uses stream `r` of `seed`. Rows are replicates.
pub fn simulate_sheet<T: Scalar>(
    spec: &GridSpec<T>,
    alpha: &[T],
    sigma: T,
    mode: SheetMode<T>,
    points: &[Corner<T>],
    replicates: usize,
    seed: RngSeed,
) -> Result<Vec<Vec<T>>, SheetError> {
    spec.validate()?;
    check_alpha_sigma(spec.dim(), alpha, sigma)?;
    if replicates == 0 {
        return Err(SheetError::NoReplicates);
    }
    for p in points {
        spec.check_point(p)?;
    }
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let field = SheetField::for_replicate(spec, seed, r as u64)?;
            let integ = SheetIntegrator::new(&field, alpha, sigma)?;
            points
                .iter()
                .map(|p| match mode {
                    SheetMode::Mpou { y0 } => integ.mpou(y0, p),
                    SheetMode::Stationary => integ.stationary(p),
                })
                .collect()
        })
        .collect()
}

/// SIOU parameters with the same covariance as the sheet integral:
/// `λ = 1`, measure `Axis(α)` and `σ̃² = σ² 2^{1-N} / ∏α`.
pub fn equivalent_kernel<T: Scalar>(alpha: &[T], sigma: T) -> Result<KernelParams<T>, SheetError> {
    check_alpha_sigma(alpha.len(), alpha, sigma)?;
    let n = alpha.len() as i32;
    let prod = alpha.iter().fold(T::one(), |a, &x| a * x);
    let var = sigma * sigma * T::lit(2.0).powi(1 - n) / prod;
    Ok(KernelParams::from_variance(T::one(), var, MeasureSpec::axis(alpha.to_vec())?)?)
}

/// Conservative relative second-moment error `e^{-2 min(α) L}` from cutting
/// the integration domain at `-L`.
pub fn truncation_bound<T: Scalar>(alpha: &[T], l: T) -> T {
    let amin = alpha.iter().copied().fold(T::infinity(), T::min);
    (-T::lit(2.0) * amin * l.max(T::zero())).exp().min(T::one())
}

/// Smallest `L` with `truncation_bound(alpha, L) <= tol`.
pub fn truncation_length<T: Scalar>(alpha: &[T], tol: T) -> T {
    let amin = alpha.iter().copied().fold(T::infinity(), T::min);
    (-tol.ln() / (T::lit(2.0) * amin)).max(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: &[f64]) -> Corner<f64> {
        Corner::from_f64(x).unwrap()
    }

    #[test]
    fn cell_variance_is_volume() {
        let g = GridSpec::<f64>::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![10, 10]).unwrap();
        assert!((g.cell_volume() - 0.01).abs() < 1e-15);
        let n = 4000;
        let mut sum2 = 0.0;
        let mut total2 = 0.0;
        for r in 0..n {
            let f = SheetField::for_replicate(&g, RngSeed::new(1, 0), r).unwrap();
            sum2 += f.increments[0] * f.increments[0];
            let tot: f64 = f.increments.iter().sum();
            total2 += tot * tot;
        }
        let (v_cell, v_total) = (sum2 / n as f64, total2 / n as f64);
        let se = (2.0 / n as f64).sqrt();
        assert!((v_cell - 0.01).abs() < 5.0 * 0.01 * se);
        assert!((v_total - 1.0).abs() < 5.0 * se);
    }

    #[test]
    fn same_seed_same_field() {
        let g = GridSpec::<f64>::cube(2, 1.0, 1.0, 0.25).unwrap();
        assert_eq!(
            sheet_increments(&g, RngSeed::new(4, 2)).unwrap(),
            sheet_increments(&g, RngSeed::new(4, 2)).unwrap()
        );
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::<f64>::new(vec![0.5], vec![1.0], vec![4]).is_err());
        assert!(GridSpec::<f64>::new(vec![-1.0], vec![0.0], vec![4]).is_err());
        assert!(GridSpec::<f64>::new(vec![-1.0], vec![1.0], vec![0]).is_err());
        assert!(GridSpec::<f64>::new(vec![-1.0, -1.0], vec![1.0], vec![4, 4]).is_err());
        let g = GridSpec::<f64>::cube(2, 3.5, 1.0, 0.05).unwrap();
        assert_eq!(g.steps, vec![90, 90]);
        assert!((g.lower[0] + 3.5).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_point() {
        let g = GridSpec::<f64>::cube(1, 1.0, 1.0, 0.1).unwrap();
        let f = sheet_increments(&g, RngSeed::default()).unwrap();
        assert!(matches!(
            integrate_mpou(&f, &[1.0], 1.0, 0.0, &c(&[1.5])),
            Err(SheetError::OutOfRange { index: 0, .. })
        ));
    }

    #[test]
    fn origin_returns_y0() {
        let g = GridSpec::<f64>::cube(2, 1.0, 1.0, 0.1).unwrap();
        let f = sheet_increments(&g, RngSeed::new(8, 0)).unwrap();
        let y = integrate_mpou(&f, &[1.0, 2.0], 1.0, 0.7, &c(&[0.0, 0.0])).unwrap();
        assert_eq!(y, 0.7);
        let integ = SheetIntegrator::new(&f, &[1.0, 2.0], 1.0).unwrap();
        assert_eq!(integ.mpou(0.7, &c(&[0.0, 0.0])).unwrap(), 0.7);
    }

    #[test]
    fn prefix_sums_match_direct_sums() {
        for dim in 1..=3 {
            let g = GridSpec::<f64>::cube(dim, 0.6, 1.0, 0.2).unwrap();
            let f = sheet_increments(&g, RngSeed::new(11, dim as u64)).unwrap();
            let alpha: Vec<f64> = (1..=dim).map(|i| 0.5 * i as f64).collect();
            let integ = SheetIntegrator::new(&f, &alpha, 1.3).unwrap();
            for t in [vec![0.4; dim], vec![1.0; dim], (0..dim).map(|i| 0.2 * i as f64).collect()] {
                let t = c(&t);
                let a = integrate_mpou(&f, &alpha, 1.3, -0.2, &t).unwrap();
                let b = integ.mpou(-0.2, &t).unwrap();
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
                let a = integrate_stationary(&f, &alpha, 1.3, &t).unwrap();
                let b = integ.stationary(&t).unwrap();
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn equivalent_kernel_constant() {
        let k = equivalent_kernel::<f64>(&[1.0, 2.0], 1.0).unwrap();
        assert_eq!(k.lambda(), 1.0);
        assert!((k.sigma() * k.sigma() - 0.25).abs() < 1e-15);
        let k1 = equivalent_kernel::<f64>(&[0.5], 2.0).unwrap();
        assert!((k1.sigma() * k1.sigma() - 8.0).abs() < 1e-14);
    }

    #[test]
    fn truncation_bound_values() {
        assert!((truncation_bound::<f64>(&[1.0, 1.0], 5.0) - (-10.0f64).exp()).abs() < 1e-18);
        assert_eq!(truncation_bound::<f64>(&[1.0], 0.0), 1.0);
        assert!(truncation_bound::<f64>(&[2.0, 3.0], 1.0) < truncation_bound::<f64>(&[1.0, 3.0], 1.0));
        let l = truncation_length::<f64>(&[1.0, 2.0], 1e-3);
        assert!((truncation_bound::<f64>(&[1.0, 2.0], l) - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_variance() {
        // Classical OU from 0: Var(Y_t) = σ²(1 - e^{-2αt}) / (2α).
        let g = GridSpec::<f64>::cube(1, 0.5, 1.0, 0.01).unwrap();
        let (alpha, sigma, n) = (1.5, 1.0, 20_000);
        let ys = simulate_sheet(&g, &[alpha], sigma, SheetMode::Mpou { y0: 0.0 }, &[c(&[1.0])], n, RngSeed::new(3, 0))
            .unwrap();
        let v = ys.iter().map(|r| r[0] * r[0]).sum::<f64>() / n as f64;
        let target = sigma * sigma * (1.0 - (-2.0 * alpha).exp()) / (2.0 * alpha);
        assert!((v - target).abs() < 5.0 * target * (2.0 / n as f64).sqrt(), "{v} vs {target}");
    }
}
