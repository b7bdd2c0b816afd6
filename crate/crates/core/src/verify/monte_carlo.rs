use serde::{Deserialize, Serialize};

use super::{sub_seed, CheckReport, VerifyError};
use crate::gaussian::{GaussianSpec, Matrix, RngSeed};
use crate::geometry::Corner;
use crate::kernel::KernelParams;
use crate::measure::MeasureSpec;
use crate::scalar::Scalar;
use crate::sheet::{equivalent_kernel, simulate_sheet, truncation_length, GridSpec, SheetMode};
use crate::simulate::{moments, simulate, simulate_exact, InitialLaw, Plan, SamplePath};

pub const MC_TOLERANCE: f64 = 5.0;
pub const MIN_REPLICATES: usize = 1000;

/// Sample mean and unbiased covariance, accumulated in `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

impl Moments {
    /// Moments of a sample large enough for the z-score checks.
    pub fn from_rows<T: Scalar>(values: &[Vec<T>]) -> Result<Self, VerifyError> {
        if values.len() < MIN_REPLICATES {
            return Err(VerifyError::TooFewReplicates {
                found: values.len(),
                required: MIN_REPLICATES,
            });
        }
        Self::compute(values)
    }

    /// Moments of any sample with at least two rows.
    pub fn compute<T: Scalar>(values: &[Vec<T>]) -> Result<Self, VerifyError> {
        let n = values.len();
        if n < 2 {
            return Err(VerifyError::TooFewReplicates { found: n, required: 2 });
        }
        let d = values[0].len();
        if values.iter().any(|r| r.len() != d) {
            return Err(VerifyError::Precondition("rows differ in length".into()));
        }
        let mut mean = vec![0.0; d];
        for row in values {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x.as_f64();
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut cov = vec![vec![0.0; d]; d];
        let mut centered = vec![0.0; d];
        for row in values {
            for j in 0..d {
                centered[j] = row[j].as_f64() - mean[j];
            }
            for i in 0..d {
                for j in i..d {
                    cov[i][j] += centered[i] * centered[j];
                }
            }
        }
        for i in 0..d {
            for j in i..d {
                cov[i][j] /= (n - 1) as f64;
                cov[j][i] = cov[i][j];
            }
        }
        Ok(Self { n, mean, cov })
    }

    /// Standard error of the mean of component `i`.
    pub fn mean_se(&self, i: usize) -> f64 {
        (self.cov[i][i] / self.n as f64).sqrt()
    }

    /// Gaussian standard error of covariance entry `(i, j)`:
    /// `sqrt((S_ii S_jj + S_ij²) / n)`.
    pub fn cov_se(&self, i: usize, j: usize) -> f64 {
        let c = &self.cov;
        ((c[i][i] * c[j][j] + c[i][j] * c[i][j]) / self.n as f64).sqrt()
    }
}

/// `|diff| / se`. Differences at rounding level score 0, so a degenerate
/// component that matches exactly passes; any other difference at zero
/// standard error scores infinity.
fn z_score(diff: f64, se: f64, scale: f64) -> f64 {
    if diff.abs() <= 1e-12 * (1.0 + scale.abs()) {
        0.0
    } else if se > 0.0 {
        diff.abs() / se
    } else {
        f64::INFINITY
    }
}

/// Largest |z| of empirical means and covariances against a Gaussian law.
pub fn check_mc_moments<T: Scalar>(
    name: &str,
    values: &[Vec<T>],
    theory: &GaussianSpec<T>,
) -> Result<CheckReport, VerifyError> {
    let emp = Moments::from_rows(values)?;
    let d = theory.dim();
    if emp.mean.len() != d {
        return Err(VerifyError::Precondition(format!(
            "sample has {} columns, theory has {d}",
            emp.mean.len()
        )));
    }
    let mut worst = (0.0f64, String::new());
    let mut note = |z: f64, what: String| {
        if !(z <= worst.0) {
            worst = (z, what);
        }
    };
    for i in 0..d {
        let mu = theory.mean[i].as_f64();
        note(z_score(emp.mean[i] - mu, emp.mean_se(i), mu), format!("mean[{i}]"));
        for j in i..d {
            let c = theory.cov[(i, j)].as_f64();
            note(z_score(emp.cov[i][j] - c, emp.cov_se(i, j), c), format!("cov[{i},{j}]"));
        }
    }
    Ok(CheckReport::new(
        name,
        worst.0,
        MC_TOLERANCE,
        format!("n = {}, {d} components; max |z| at {}", emp.n, worst.1),
    ))
}

/// Two-sample |z| of means and covariances between two samples of the same
/// columns.
pub fn check_mc_agreement<T: Scalar>(
    name: &str,
    a: &[Vec<T>],
    b: &[Vec<T>],
) -> Result<CheckReport, VerifyError> {
    let (ea, eb) = (Moments::from_rows(a)?, Moments::from_rows(b)?);
    let d = ea.mean.len();
    if eb.mean.len() != d {
        return Err(VerifyError::Precondition("samples have different widths".into()));
    }
    let mut worst = (0.0f64, String::new());
    for i in 0..d {
        let se = (ea.mean_se(i).powi(2) + eb.mean_se(i).powi(2)).sqrt();
        let z = z_score(ea.mean[i] - eb.mean[i], se, ea.mean[i]);
        if !(z <= worst.0) {
            worst = (z, format!("mean[{i}]"));
        }
        for j in i..d {
            let se = (ea.cov_se(i, j).powi(2) + eb.cov_se(i, j).powi(2)).sqrt();
            let z = z_score(ea.cov[i][j] - eb.cov[i][j], se, ea.cov[i][j]);
            if !(z <= worst.0) {
                worst = (z, format!("cov[{i},{j}]"));
            }
        }
    }
    Ok(CheckReport::new(
        name,
        worst.0,
        MC_TOLERANCE,
        format!("n = {} vs {}, {d} components; max |z| at {}", ea.n, eb.n, worst.1),
    ))
}

/// Covariances of selected column pairs against theory, allowing an
/// absolute bias `allowance` before the z-score: `max(|diff| - allowance, 0) / se`.
pub fn check_cov_pairs<T: Scalar>(
    name: &str,
    values: &[Vec<T>],
    pairs: &[(usize, usize)],
    theory: &[T],
    allowance: T,
) -> Result<CheckReport, VerifyError> {
    if pairs.len() != theory.len() {
        return Err(VerifyError::Precondition("one theoretical value per pair is required".into()));
    }
    let emp = Moments::from_rows(values)?;
    let allowance = allowance.as_f64();
    let (mut worst, mut raw) = (0.0f64, 0.0f64);
    let mut lines = Vec::new();
    for (&(i, j), c) in pairs.iter().zip(theory) {
        let c = c.as_f64();
        let diff = emp.cov[i][j] - c;
        let se = emp.cov_se(i, j);
        let z = z_score((diff.abs() - allowance).max(0.0), se, c);
        worst = worst.max(z);
        raw = raw.max(z_score(diff, se, c));
        lines.push(format!("({i},{j}): emp {:.5} theory {c:.5} se {se:.2e}", emp.cov[i][j]));
    }
    Ok(CheckReport::new(
        name,
        worst,
        MC_TOLERANCE,
        format!(
            "n = {}; allowance {allowance}; max |z| without allowance {raw:.3}; {}",
            emp.n,
            lines.join("; ")
        ),
    ))
}

/// Columns of `path` reordered to follow `corners`.
pub fn align_columns<T: Scalar>(path: &SamplePath<T>, corners: &[Corner<T>]) -> Result<Vec<Vec<T>>, VerifyError> {
    let idx = corners
        .iter()
        .map(|c| {
            path.corners
                .iter()
                .position(|p| p.approx_eq(c))
                .ok_or_else(|| VerifyError::Precondition(format!("corner {c} not in sample")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(path
        .values
        .iter()
        .map(|row| idx.iter().map(|&j| row[j]).collect())
        .collect())
}

/// Sizes of the Monte Carlo suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub replicates: usize,
    pub sheet_replicates: usize,
    pub sheet_step: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            replicates: 100_000,
            sheet_replicates: 20_000,
            sheet_step: 0.05,
        }
    }
}

fn corner(xs: &[f64]) -> Corner<f64> {
    Corner::from_f64(xs).expect("fixed corners are valid")
}

/// Six-corner meet-closed family in two dimensions, including the origin.
pub fn mc_family() -> Vec<Corner<f64>> {
    vec![corner(&[1.0, 2.0]), corner(&[2.0, 1.0]), corner(&[2.0, 2.0]), corner(&[0.5, 0.5])]
}

/// Query points of the sheet check; all covariances over `POINTS_S × POINTS_T`.
pub const SHEET_POINTS_S: [[f64; 2]; 3] = [[0.25, 0.5], [0.5, 0.25], [0.5, 0.5]];
pub const SHEET_POINTS_T: [[f64; 2]; 3] = [[0.75, 1.0], [1.0, 0.5], [1.0, 1.0]];

/// Monte Carlo sampler checks: sequential sampler against its law and
/// against the joint-Gaussian sampler, stationary initial law, order
/// independence, the one-dimensional chain, and the sheet representation.
pub fn run_mc_suite(seed: RngSeed, cfg: McConfig) -> Result<Vec<CheckReport>, VerifyError> {
    let n = cfg.replicates;
    let params = KernelParams::from_variance(1.0, 2.0, MeasureSpec::Lebesgue)?;
    let plan = Plan::new(&mc_family())?;
    let corners = plan.corners().to_vec();
    let mut out = Vec::new();

    let dirac = InitialLaw::Dirac { x0: 0.7 };
    let seq = simulate(&plan, &params, &dirac, n, sub_seed(seed, 1))?;
    out.push(check_mc_moments("mc/dirac_law", &seq.values, &moments(&corners, &params, &dirac)?)?);
    let exact = simulate_exact(&corners, &params, &dirac, n, sub_seed(seed, 2))?;
    out.push(check_mc_agreement("mc/sampler_agreement", &seq.values, &align_columns(&exact, &corners)?)?);

    let stationary = InitialLaw::stationary(&params);
    let st = simulate(&plan, &params, &stationary, n, sub_seed(seed, 3))?;
    let theory = GaussianSpec::new(
        vec![0.0; corners.len()],
        Matrix::symmetric_from_fn(corners.len(), |i, j| params.cov_stationary(&corners[i], &corners[j])),
    )?;
    out.push(check_mc_moments("mc/stationary_law", &st.values, &theory)?);

    // Same set, (1,2) and (2,1) swapped.
    let mut alt = corners.clone();
    let (i, j) = (plan.index_of(&corner(&[1.0, 2.0])), plan.index_of(&corner(&[2.0, 1.0])));
    if let (Some(i), Some(j)) = (i, j) {
        alt.swap(i, j);
    }
    let alt_plan = Plan::from_ordered(alt)?;
    let other = simulate(&alt_plan, &params, &dirac, n, sub_seed(seed, 4))?;
    out.push(check_mc_agreement("mc/order_independence", &seq.values, &align_columns(&other, &corners)?)?);

    out.push(chain_check(n, sub_seed(seed, 5))?);
    out.push(sheet_check(cfg, sub_seed(seed, 6))?);
    out.push(sheet_stationary_check(cfg, sub_seed(seed, 7))?);
    Ok(out)
}

/// Chain `(s), (t)` from `x0` against the classical two-point OU law.
fn chain_check(n: usize, seed: RngSeed) -> Result<CheckReport, VerifyError> {
    let (lambda, sigma2, x0, s, t) = (0.8, 1.5, 1.0, 0.5, 1.5);
    let params = KernelParams::from_variance(lambda, sigma2, MeasureSpec::Lebesgue)?;
    let plan = Plan::new(&[corner(&[s]), corner(&[t])])?;
    let path = simulate(&plan, &params, &InitialLaw::Dirac { x0 }, n, seed)?;
    let cols = align_columns(&path, &[corner(&[s]), corner(&[t])])?;
    let var = |u: f64| sigma2 / (2.0 * lambda) * (1.0 - (-2.0 * lambda * u).exp());
    let theory = GaussianSpec::new(
        vec![x0 * (-lambda * s).exp(), x0 * (-lambda * t).exp()],
        Matrix::from_rows(vec![
            vec![var(s), (-lambda * (t - s)).exp() * var(s)],
            vec![(-lambda * (t - s)).exp() * var(s), var(t)],
        ])?,
    )?;
    check_mc_moments("mc/chain_1d", &cols, &theory)
}

fn sheet_grid(alpha: &[f64], step: f64) -> Result<(GridSpec<f64>, f64), VerifyError> {
    let l = (truncation_length(alpha, 1e-3) / step).ceil() * step;
    Ok((GridSpec::cube(alpha.len(), l, 1.0, step)?, l))
}

/// Started sheet integral with `α = (1, 2)`, `σ = 1`, `y0 = 0` against the
/// Dirac-start covariance under the axis measure.
fn sheet_check(cfg: McConfig, seed: RngSeed) -> Result<CheckReport, VerifyError> {
    let (alpha, sigma) = ([1.0, 2.0], 1.0);
    let (grid, l) = sheet_grid(&alpha, cfg.sheet_step)?;
    let points: Vec<Corner<f64>> = SHEET_POINTS_S.iter().chain(&SHEET_POINTS_T).map(|p| corner(p)).collect();
    let values = simulate_sheet(&grid, &alpha, sigma, SheetMode::Mpou { y0: 0.0 }, &points, cfg.sheet_replicates, seed)?;
    let k = equivalent_kernel(&alpha, sigma)?;
    let mut pairs = Vec::new();
    let mut theory = Vec::new();
    for i in 0..3 {
        for j in 3..6 {
            pairs.push((i, j));
            theory.push(k.cov_dirac(&points[i], &points[j]));
        }
    }
    let r = check_cov_pairs("mc/sheet_representation", &values, &pairs, &theory, 2.0 * cfg.sheet_step)?;
    Ok(CheckReport {
        details: format!("L = {l}, step {}; {}", cfg.sheet_step, r.details),
        ..r
    })
}

/// Stationary sheet integral at shifted pairs against
/// `σ²/(2^N ∏α) exp(-Σ α_i |s_i - t_i|)`.
fn sheet_stationary_check(cfg: McConfig, seed: RngSeed) -> Result<CheckReport, VerifyError> {
    let (alpha, sigma) = ([1.0, 2.0], 1.0);
    let (grid, _) = sheet_grid(&alpha, cfg.sheet_step)?;
    // (0,1) and (2,3) are the same pair shifted by (0.5, 0.25).
    let points: Vec<Corner<f64>> = [[0.25, 0.25], [0.5, 0.5], [0.75, 0.5], [1.0, 0.75], [0.5, 1.0], [1.0, 0.0]]
        .iter()
        .map(|p| corner(p))
        .collect();
    let values = simulate_sheet(&grid, &alpha, sigma, SheetMode::Stationary, &points, cfg.sheet_replicates, seed)?;
    let pairs = [(0, 1), (2, 3), (0, 0), (3, 3), (4, 5), (1, 4)];
    let scale = sigma * sigma / (4.0 * alpha[0] * alpha[1]);
    let theory: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| {
            let d: f64 = (0..2)
                .map(|k| alpha[k] * (points[i].coords()[k] - points[j].coords()[k]).abs())
                .sum();
            scale * (-d).exp()
        })
        .collect();
    check_cov_pairs("mc/sheet_stationary", &values, &pairs, &theory, 2.0 * cfg.sheet_step)
}
