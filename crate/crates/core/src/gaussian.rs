//! Dense multivariate Gaussian machinery: covariance factorization with a
//! bounded jitter ladder, seeded sampling, and Schur-complement conditioning.
//!
//! Random numbers come from ChaCha8 (`rand_chacha`). The 256-bit key is
//! expanded from `(seed, stream)` with SplitMix64 and the ChaCha stream id
//! selects the replicate, so every replicate has its own independent
//! sequence regardless of scheduling. Standard normals use the ziggurat
//! sampler of `rand_distr`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Diagonal jitter ladder, as multiples of the largest diagonal entry.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussianError {
    #[error("matrix is not positive semi-definite (most negative pivot {pivot})")]
    NotPsd { pivot: f64 },
    #[error("matrix is not symmetric (entry ({row},{col}) differs by {gap})")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("ragged matrix rows")]
    Ragged,
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<Vec<T>>",
    into = "Vec<Vec<T>>",
    bound(serialize = "T: Scalar", deserialize = "T: Scalar")
)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, GaussianError> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(GaussianError::Ragged);
        }
        Ok(Self {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Symmetric matrix `f(i, j)` evaluated on the upper triangle only.
    pub fn symmetric_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
    }

    pub fn max_diag(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc.max(self[(i, i)]))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        })
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    pub fn check_symmetric(&self) -> Result<(), GaussianError> {
        if self.rows != self.cols {
            return Err(GaussianError::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let scale = self.max_abs().max(T::min_positive_value());
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                let gap = (self[(i, j)] - self[(j, i)]).abs();
                if gap > T::coord_tol() * scale {
                    return Err(GaussianError::NotSymmetric {
                        row: i,
                        col: j,
                        gap: gap.as_f64(),
                    });
                }
            }
        }
        Ok(())
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> TryFrom<Vec<Vec<T>>> for Matrix<T> {
    type Error = GaussianError;

    fn try_from(rows: Vec<Vec<T>>) -> Result<Self, Self::Error> {
        Self::from_rows(rows)
    }
}

impl<T: Scalar> From<Matrix<T>> for Vec<Vec<T>> {
    fn from(m: Matrix<T>) -> Self {
        m.to_rows()
    }
}

/// Lower-triangular `L` with `L Lᵀ = cov + jitter·I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor<T> {
    pub lower: Matrix<T>,
    pub jitter: T,
}

impl<T: Scalar> CholeskyFactor<T> {
    /// `L y = b`; zero pivots (exactly degenerate directions) resolve to 0.
    fn solve_lower(&self, b: &mut [T]) {
        let l = &self.lower;
        for i in 0..l.nrows() {
            let mut acc = b[i];
            for k in 0..i {
                acc = acc - l[(i, k)] * b[k];
            }
            b[i] = if l[(i, i)] > T::zero() {
                acc / l[(i, i)]
            } else {
                T::zero()
            };
        }
    }

    /// `Lᵀ x = y`.
    fn solve_upper(&self, y: &mut [T]) {
        let l = &self.lower;
        for i in (0..l.nrows()).rev() {
            let mut acc = y[i];
            for k in i + 1..l.nrows() {
                acc = acc - l[(k, i)] * y[k];
            }
            y[i] = if l[(i, i)] > T::zero() {
                acc / l[(i, i)]
            } else {
                T::zero()
            };
        }
    }

    /// `(L Lᵀ)⁻¹ b`, using a generalized inverse along zero pivots.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_lower(&mut x);
        self.solve_upper(&mut x);
        x
    }
}

enum Attempt<T> {
    Ok(Matrix<T>),
    Failed(T),
}

fn cholesky_attempt<T: Scalar>(cov: &Matrix<T>, jitter: T) -> Attempt<T> {
    let n = cov.nrows();
    let scale = cov.max_diag() + jitter;
    let floor = T::epsilon() * scale * T::from_count(n.max(1));
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = cov[(j, j)] + jitter;
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if d < -floor {
            return Attempt::Failed(d);
        }
        if d > floor {
            let root = d.sqrt();
            l[(j, j)] = root;
            for i in j + 1..n {
                let mut r = cov[(i, j)];
                for k in 0..j {
                    r = r - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = r / root;
            }
        } else {
            // Zero pivot: PSD requires the rest of the column to vanish too.
            let bound = (floor * scale).sqrt();
            for i in j + 1..n {
                let mut r = cov[(i, j)];
                for k in 0..j {
                    r = r - l[(i, k)] * l[(j, k)];
                }
                if r.abs() > bound {
                    return Attempt::Failed(d.min(-r.abs()));
                }
            }
        }
    }
    Attempt::Ok(l)
}

/// Cholesky factorization with diagonal jitter escalating through
/// [`JITTER_LADDER`] (relative to the largest diagonal entry).
pub fn factorize<T: Scalar>(cov: &Matrix<T>) -> Result<CholeskyFactor<T>, GaussianError> {
    cov.check_symmetric()?;
    let scale = cov.max_diag();
    let mut worst = T::zero();
    for rel in JITTER_LADDER {
        let jitter = T::lit(rel) * scale;
        match cholesky_attempt(cov, jitter) {
            Attempt::Ok(lower) => return Ok(CholeskyFactor { lower, jitter }),
            Attempt::Failed(pivot) => worst = pivot,
        }
    }
    Err(GaussianError::NotPsd {
        pivot: worst.as_f64(),
    })
}

/// Explicit `(seed, stream)` address of a random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Same seed, different stream.
    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    /// Generator for replicate `replicate` of this `(seed, stream)`.
    pub fn replicate_rng(&self, replicate: u64) -> ChaCha8Rng {
        let mut state = self.seed ^ self.stream.rotate_left(32) ^ 0x5349_4f55_0000_0000;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(replicate);
        rng
    }

    pub fn rng(&self) -> ChaCha8Rng {
        self.replicate_rng(0)
    }
}

/// Mean vector and covariance matrix of a multivariate normal law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct GaussianSpec<T> {
    pub mean: Vec<T>,
    pub cov: Matrix<T>,
}

impl<T: Scalar> GaussianSpec<T> {
    pub fn new(mean: Vec<T>, cov: Matrix<T>) -> Result<Self, GaussianError> {
        cov.check_symmetric()?;
        if mean.len() != cov.nrows() {
            return Err(GaussianError::DimensionMismatch {
                expected: cov.nrows(),
                found: mean.len(),
            });
        }
        Ok(Self { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// `n` i.i.d. draws `mean + L z`; draw `i` uses replicate stream `i`.
pub fn sample<T: Scalar>(
    spec: &GaussianSpec<T>,
    n: usize,
    seed: RngSeed,
) -> Result<Vec<Vec<T>>, GaussianError> {
    let factor = factorize(&spec.cov)?;
    Ok((0..n)
        .into_par_iter()
        .map(|i| draw(spec, &factor, &mut seed.replicate_rng(i as u64)))
        .collect())
}

pub(crate) fn draw<T: Scalar, R: rand::Rng>(
    spec: &GaussianSpec<T>,
    factor: &CholeskyFactor<T>,
    rng: &mut R,
) -> Vec<T> {
    let d = spec.dim();
    let z: Vec<T> = (0..d).map(|_| T::standard_normal(rng)).collect();
    let l = &factor.lower;
    (0..d)
        .map(|i| spec.mean[i] + (0..=i).map(|k| l[(i, k)] * z[k]).sum::<T>())
        .collect()
}

/// Regression of the unobserved block on the observed block.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurComplement<T> {
    pub unobserved: Vec<usize>,
    /// `Σ_ao Σ_oo⁻¹`, one row per unobserved index.
    pub gain: Matrix<T>,
    /// `Σ_aa - Σ_ao Σ_oo⁻¹ Σ_oa`.
    pub cov: Matrix<T>,
}

pub fn schur_complement<T: Scalar>(
    cov: &Matrix<T>,
    observed: &[usize],
) -> Result<SchurComplement<T>, GaussianError> {
    let n = cov.nrows();
    for &i in observed {
        if i >= n {
            return Err(GaussianError::IndexOutOfRange { index: i, dim: n });
        }
    }
    let unobserved: Vec<usize> = (0..n).filter(|i| !observed.contains(i)).collect();
    let factor = factorize(&cov.submatrix(observed, observed))?;
    let cross = cov.submatrix(&unobserved, observed);
    let gain_rows: Vec<Vec<T>> = (0..unobserved.len())
        .map(|a| factor.solve(cross.row(a)))
        .collect();
    let gain = if unobserved.is_empty() {
        Matrix::zeros(0, observed.len())
    } else {
        Matrix::from_rows(gain_rows)?
    };
    let mut schur = cov.submatrix(&unobserved, &unobserved);
    for i in 0..unobserved.len() {
        for j in 0..unobserved.len() {
            let reduction: T = (0..observed.len())
                .map(|k| gain[(i, k)] * cross[(j, k)])
                .sum();
            schur[(i, j)] = schur[(i, j)] - reduction;
        }
    }
    let sym = Matrix::symmetric_from_fn(unobserved.len(), |i, j| {
        (schur[(i, j)] + schur[(j, i)]) / T::lit(2.0)
    });
    Ok(SchurComplement {
        unobserved,
        gain,
        cov: sym,
    })
}

/// Conditional law given `x[observed[k]] = values[k]`, expressed on the full
/// index set: observed components become point masses.
pub fn conditional<T: Scalar>(
    spec: &GaussianSpec<T>,
    observed: &[usize],
    values: &[T],
) -> Result<GaussianSpec<T>, GaussianError> {
    if observed.len() != values.len() {
        return Err(GaussianError::DimensionMismatch {
            expected: observed.len(),
            found: values.len(),
        });
    }
    let sc = schur_complement(&spec.cov, observed)?;
    let residual: Vec<T> = observed
        .iter()
        .zip(values)
        .map(|(&o, &v)| v - spec.mean[o])
        .collect();
    let mut mean = spec.mean.clone();
    for (&o, &v) in observed.iter().zip(values) {
        mean[o] = v;
    }
    let mut cov = Matrix::zeros(spec.dim(), spec.dim());
    for (ia, &a) in sc.unobserved.iter().enumerate() {
        mean[a] = mean[a]
            + (0..observed.len())
                .map(|k| sc.gain[(ia, k)] * residual[k])
                .sum::<T>();
        for (ib, &b) in sc.unobserved.iter().enumerate() {
            cov[(a, b)] = sc.cov[(ia, ib)];
        }
    }
    Ok(GaussianSpec { mean, cov })
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Scalar>(m: &Matrix<T>) -> Result<Vec<T>, GaussianError> {
    m.check_symmetric()?;
    let n = m.nrows();
    let mut a = m.clone();
    let two = T::lit(2.0);
    let scale = a.max_abs();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= T::epsilon() * scale * T::lit(1e-2) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn factorize_identity() {
        let f = factorize(&Matrix::<f64>::identity(4)).unwrap();
        assert_eq!(f.lower, Matrix::identity(4));
        assert_eq!(f.jitter, 0.0);
    }

    #[test]
    fn factorize_two_by_two() {
        let r = (-1.0f64).exp();
        let f = factorize(&m(&[&[1.0, r], &[r, 1.0]])).unwrap();
        assert!((f.lower[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((f.lower[(1, 0)] - r).abs() < 1e-15);
        assert!((f.lower[(1, 1)] - (1.0 - r * r).sqrt()).abs() < 1e-15);
        assert_eq!(f.lower[(0, 1)], 0.0);
    }

    #[test]
    fn factorize_rejects_indefinite() {
        match factorize(&m(&[&[1.0, 2.0], &[2.0, 1.0]])) {
            Err(GaussianError::NotPsd { pivot }) => assert!(pivot < -2.9),
            other => panic!("expected NotPsd, got {other:?}"),
        }
        assert!(matches!(
            factorize(&m(&[&[1.0, 0.5], &[0.4, 1.0]])),
            Err(GaussianError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn factorize_handles_exact_degeneracy() {
        // Rank one: [1 1; 1 1].
        let f = factorize(&m(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        let back = f.lower.matmul(&f.lower.transpose());
        assert!(back.max_abs_diff(&m(&[&[1.0, 1.0], &[1.0, 1.0]])) < 1e-10);
        let zero = factorize(&Matrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(zero.lower.max_abs(), 0.0);
    }

    #[test]
    fn factorization_round_trip() {
        let c = Matrix::symmetric_from_fn(6, |i, j| (-((i as f64) - (j as f64)).abs() * 0.3).exp());
        let f = factorize(&c).unwrap();
        let back = f.lower.matmul(&f.lower.transpose());
        let mut target = c.clone();
        for i in 0..6 {
            target[(i, i)] += f.jitter;
        }
        assert!(back.max_abs_diff(&target) <= 1e-10 * c.max_abs());
    }

    #[test]
    fn zero_covariance_sample_is_mean() {
        let spec = GaussianSpec::new(vec![1.5, -2.0], Matrix::zeros(2, 2)).unwrap();
        for x in sample(&spec, 5, RngSeed::new(3, 0)).unwrap() {
            assert_eq!(x, vec![1.5, -2.0]);
        }
    }

    #[test]
    fn unit_variance_sample() {
        let spec = GaussianSpec::new(vec![0.0], Matrix::identity(1)).unwrap();
        let xs = sample(&spec, 100_000, RngSeed::new(11, 2)).unwrap();
        let var = xs.iter().map(|x| x[0] * x[0]).sum::<f64>() / xs.len() as f64;
        assert!((0.98..=1.02).contains(&var), "variance {var}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = GaussianSpec::new(vec![0.0, 1.0], m(&[&[2.0, 0.3], &[0.3, 1.0]])).unwrap();
        let a = sample(&spec, 50, RngSeed::new(9, 4)).unwrap();
        let b = sample(&spec, 50, RngSeed::new(9, 4)).unwrap();
        let c = sample(&spec, 50, RngSeed::new(9, 5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sample_moments_converge() {
        let cov = m(&[&[1.0, 0.6, 0.1], &[0.6, 2.0, -0.4], &[0.1, -0.4, 0.5]]);
        let spec = GaussianSpec::new(vec![0.5, -1.0, 2.0], cov.clone()).unwrap();
        let n = 100_000;
        let xs = sample(&spec, n, RngSeed::new(1, 0)).unwrap();
        let nf = n as f64;
        for i in 0..3 {
            let mi = xs.iter().map(|x| x[i]).sum::<f64>() / nf;
            assert!((mi - spec.mean[i]).abs() < 5.0 * (cov[(i, i)] / nf).sqrt());
            for j in 0..3 {
                let mj = xs.iter().map(|x| x[j]).sum::<f64>() / nf;
                let c = xs.iter().map(|x| (x[i] - mi) * (x[j] - mj)).sum::<f64>() / (nf - 1.0);
                let se = ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)].powi(2)) / nf).sqrt();
                assert!((c - cov[(i, j)]).abs() < 5.0 * se);
            }
        }
    }

    #[test]
    fn conditional_independent_blocks() {
        let spec = GaussianSpec::new(vec![1.0, 2.0], m(&[&[3.0, 0.0], &[0.0, 4.0]])).unwrap();
        let c = conditional(&spec, &[1], &[7.0]).unwrap();
        assert_eq!(c.mean, vec![1.0, 7.0]);
        assert_eq!(c.cov[(0, 0)], 3.0);
        assert_eq!(c.cov[(1, 1)], 0.0);
    }

    #[test]
    fn conditional_bivariate() {
        let rho = 0.35;
        let spec = GaussianSpec::new(vec![0.0, 0.0], m(&[&[1.0, rho], &[rho, 1.0]])).unwrap();
        let c = conditional(&spec, &[1], &[1.7]).unwrap();
        assert!((c.mean[0] - rho * 1.7).abs() < 1e-15);
        assert!((c.cov[(0, 0)] - (1.0 - rho * rho)).abs() < 1e-15);
    }

    #[test]
    fn conditional_on_everything() {
        let spec = GaussianSpec::new(vec![0.0, 0.0], m(&[&[1.0, 0.2], &[0.2, 1.0]])).unwrap();
        let c = conditional(&spec, &[0, 1], &[0.4, -0.1]).unwrap();
        assert_eq!(c.mean, vec![0.4, -0.1]);
        assert_eq!(c.cov, Matrix::zeros(2, 2));
    }

    #[test]
    fn conditional_rejects_indefinite_block() {
        let spec = GaussianSpec::new(
            vec![0.0; 3],
            m(&[&[1.0, 2.0, 0.0], &[2.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]),
        )
        .unwrap();
        assert!(matches!(
            conditional(&spec, &[0, 1], &[0.0, 0.0]),
            Err(GaussianError::NotPsd { .. })
        ));
    }

    #[test]
    fn jacobi_eigenvalues() {
        let e = symmetric_eigenvalues(&m(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
        let e = symmetric_eigenvalues(&m(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]))
            .unwrap();
        let s2 = 2f64.sqrt();
        for (got, want) in e.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn matrix_json_is_row_major() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[1.0,2.0],[3.0,4.0]]");
    }
}
