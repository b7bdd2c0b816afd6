//! Sequential C-Markov simulation of a general SIOU process on a finite,
//! meet-closed family of corners, plus a one-shot joint-Gaussian sampler used
//! as an independent oracle.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::{self, factorize, GaussianError, GaussianSpec, Matrix, RngSeed};
use crate::geometry::{
    is_linear_extension, is_min_closed, min_closure, Corner, Frontier, GeometryError, Increment,
};
use crate::kernel::{KernelError, KernelParams, TransitionParams};
use crate::measure::MeasureError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulateError {
    #[error("invalid initial law: {0}")]
    InvalidInitial(String),
    #[error("exact sampling needs a Gaussian initial law (Dirac or Normal)")]
    NonGaussianInitial,
    #[error("at least one replicate is required")]
    NoReplicates,
    #[error("the first corner of a plan must be the origin")]
    OriginNotFirst,
    #[error("corner family is not closed under componentwise minimum")]
    NotMinClosed,
    #[error("corner order is not a linear extension of the componentwise order")]
    NotLinearExtension,
    #[error("frontier corner {corner:?} of step {step} was not sampled earlier")]
    FrontierNotSampled { step: usize, corner: Vec<f64> },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
}

/// Law `ν` of the value at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "lowercase",
    bound(serialize = "T: Scalar", deserialize = "T: Scalar")
)]
pub enum InitialLaw<T> {
    Dirac { x0: T },
    Normal { mu: T, var: T },
    /// Uniform resampling (with replacement) from the listed values.
    Empirical { values: Vec<T> },
}

impl<T: Scalar> InitialLaw<T> {
    /// The stationary choice `Normal(0, σ²/2λ)`.
    pub fn stationary(params: &KernelParams<T>) -> Self {
        InitialLaw::Normal {
            mu: T::zero(),
            var: params.stationary_variance(),
        }
    }

    pub fn validate(&self) -> Result<(), SimulateError> {
        match self {
            InitialLaw::Dirac { x0 } if !x0.is_finite() => {
                Err(SimulateError::InvalidInitial("x0 must be finite".into()))
            }
            InitialLaw::Normal { mu, var } if !(mu.is_finite() && var.is_finite() && *var >= T::zero()) => {
                Err(SimulateError::InvalidInitial(
                    "normal law needs a finite mean and a nonnegative variance".into(),
                ))
            }
            InitialLaw::Empirical { values } if values.is_empty() => {
                Err(SimulateError::InvalidInitial("empirical law needs at least one value".into()))
            }
            InitialLaw::Empirical { values } if values.iter().any(|v| !v.is_finite()) => {
                Err(SimulateError::InvalidInitial("empirical values must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> T {
        match self {
            InitialLaw::Dirac { x0 } => *x0,
            InitialLaw::Normal { mu, .. } => *mu,
            InitialLaw::Empirical { values } => {
                values.iter().copied().sum::<T>() / T::from_count(values.len())
            }
        }
    }

    pub fn variance(&self) -> T {
        match self {
            InitialLaw::Dirac { .. } => T::zero(),
            InitialLaw::Normal { var, .. } => *var,
            InitialLaw::Empirical { values } => {
                let m = self.mean();
                values.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / T::from_count(values.len())
            }
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self {
            InitialLaw::Dirac { x0 } => *x0,
            InitialLaw::Normal { mu, var } => *mu + var.sqrt() * T::standard_normal(rng),
            InitialLaw::Empirical { values } => values[rng.random_range(0..values.len())],
        }
    }
}

/// One sequential step: sample `X_{corners[index]}` given earlier values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct PlanStep<T> {
    pub index: usize,
    pub increment: Increment<T>,
    pub frontier: Frontier<T>,
    /// Position in the plan of each frontier corner.
    pub frontier_indices: Vec<usize>,
}

/// Meet-closed corner family in a linear-extension order, with the
/// increments `C_i = A_i \ (A_0 ∪ ... ∪ A_{i-1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Plan<T> {
    corners: Vec<Corner<T>>,
    steps: Vec<PlanStep<T>>,
}

impl<T: Scalar> Plan<T> {
    /// Closes `corners` under meets, adds the origin and orders the result.
    pub fn new(corners: &[Corner<T>]) -> Result<Self, SimulateError> {
        Self::from_ordered(min_closure(corners)?)
    }

    /// Uses the given order, which must start at the origin, be meet-closed
    /// and be a linear extension of the componentwise order.
    pub fn from_ordered(corners: Vec<Corner<T>>) -> Result<Self, SimulateError> {
        match corners.first() {
            Some(c) if c.is_origin() => {}
            _ => return Err(SimulateError::OriginNotFirst),
        }
        let dim = corners[0].dim();
        for c in &corners {
            c.check_dim(dim)?;
        }
        if !is_min_closed(&corners) {
            return Err(SimulateError::NotMinClosed);
        }
        if !is_linear_extension(&corners) {
            return Err(SimulateError::NotLinearExtension);
        }
        let mut steps = Vec::with_capacity(corners.len().saturating_sub(1));
        for (i, a) in corners.iter().enumerate().skip(1) {
            let b: Vec<_> = corners[..i].iter().map(|c| c.meet(a)).collect();
            let increment = Increment::new(a.clone(), &b)?;
            let frontier = increment.frontier()?;
            let frontier_indices = frontier
                .corners()
                .map(|f| {
                    corners[..i]
                        .iter()
                        .position(|c| c.approx_eq(f))
                        .ok_or_else(|| SimulateError::FrontierNotSampled {
                            step: i,
                            corner: f.to_f64_vec(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            steps.push(PlanStep {
                index: i,
                increment,
                frontier,
                frontier_indices,
            });
        }
        Ok(Self { corners, steps })
    }

    pub fn corners(&self) -> &[Corner<T>] {
        &self.corners
    }

    pub fn steps(&self) -> &[PlanStep<T>] {
        &self.steps
    }

    pub fn dim(&self) -> usize {
        self.corners[0].dim()
    }

    pub fn index_of(&self, corner: &Corner<T>) -> Option<usize> {
        self.corners.iter().position(|c| c.approx_eq(corner))
    }

    /// Transition parameters of every step under `params`.
    pub fn transitions(
        &self,
        params: &KernelParams<T>,
    ) -> Result<Vec<TransitionParams<T>>, SimulateError> {
        params.measure().check_dim(self.dim())?;
        self.steps
            .iter()
            .map(|s| params.transition_params(&s.increment).map_err(Into::into))
            .collect()
    }
}

pub fn plan<T: Scalar>(corners: &[Corner<T>]) -> Result<Plan<T>, SimulateError> {
    Plan::new(corners)
}

/// Simulated values, one row per replicate and one column per plan corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct SamplePath<T> {
    pub corners: Vec<Corner<T>>,
    pub values: Vec<Vec<T>>,
    pub seed: RngSeed,
    pub params: KernelParams<T>,
    pub initial: InitialLaw<T>,
}

impl<T: Scalar> SamplePath<T> {
    pub fn replicates(&self) -> usize {
        self.values.len()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = T> + '_ {
        self.values.iter().map(move |row| row[j])
    }
}

/// Sequential sampler: `X_0 ~ ν`, then each corner from its C-transition
/// kernel. Replicate `r` uses random stream `r` of `seed`.
pub fn simulate<T: Scalar>(
    plan: &Plan<T>,
    params: &KernelParams<T>,
    initial: &InitialLaw<T>,
    replicates: usize,
    seed: RngSeed,
) -> Result<SamplePath<T>, SimulateError> {
    initial.validate()?;
    if replicates == 0 {
        return Err(SimulateError::NoReplicates);
    }
    let transitions = plan.transitions(params)?;
    let compiled: Vec<(usize, Vec<(usize, T)>, T)> = plan
        .steps()
        .iter()
        .zip(&transitions)
        .map(|(step, tp)| {
            let terms = step
                .frontier_indices
                .iter()
                .zip(&tp.weights)
                .map(|(&j, w)| (j, w.weight))
                .collect();
            (step.index, terms, tp.variance.sqrt())
        })
        .collect();
    let n = plan.corners().len();
    let values = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed.replicate_rng(r as u64);
            let mut x = vec![T::zero(); n];
            x[0] = initial.draw(&mut rng);
            for (i, terms, sd) in &compiled {
                let mean = terms
                    .iter()
                    .fold(T::zero(), |acc, &(j, w)| acc + w * x[j]);
                x[*i] = if *sd > T::zero() {
                    mean + *sd * T::standard_normal(&mut rng)
                } else {
                    mean
                };
            }
            x
        })
        .collect();
    Ok(SamplePath {
        corners: plan.corners().to_vec(),
        values,
        seed,
        params: params.clone(),
        initial: initial.clone(),
    })
}

/// First two moments of `(X_U)` for `U` in `corners` under initial law `ν`:
/// mean `E[ν] e^{-λ m(U)}`, covariance
/// `cov_dirac(U,V) + Var[ν] e^{-λ(m(U)+m(V))}`.
pub fn moments<T: Scalar>(
    corners: &[Corner<T>],
    params: &KernelParams<T>,
    initial: &InitialLaw<T>,
) -> Result<GaussianSpec<T>, SimulateError> {
    initial.validate()?;
    if let Some(c) = corners.first() {
        params.measure().check_dim(c.dim())?;
    }
    let m = params.measure();
    let (mu, var0) = (initial.mean(), initial.variance());
    let mean = corners.iter().map(|u| params.mean_dirac(mu, u)).collect();
    let cov = Matrix::symmetric_from_fn(corners.len(), |i, j| {
        let (u, v) = (&corners[i], &corners[j]);
        params.cov_dirac(u, v) + var0 * (-params.lambda() * (m.rect(u) + m.rect(v))).exp()
    });
    Ok(GaussianSpec::new(mean, cov)?)
}

/// One-shot sampling from the joint Gaussian law over the meet-closure of
/// `corners` (same column order as [`Plan::new`]).
pub fn simulate_exact<T: Scalar>(
    corners: &[Corner<T>],
    params: &KernelParams<T>,
    initial: &InitialLaw<T>,
    replicates: usize,
    seed: RngSeed,
) -> Result<SamplePath<T>, SimulateError> {
    if matches!(initial, InitialLaw::Empirical { .. }) {
        return Err(SimulateError::NonGaussianInitial);
    }
    if replicates == 0 {
        return Err(SimulateError::NoReplicates);
    }
    let order = min_closure(corners)?;
    let spec = moments(&order, params, initial)?;
    let factor = factorize(&spec.cov)?;
    let values = (0..replicates)
        .into_par_iter()
        .map(|r| gaussian::draw(&spec, &factor, &mut seed.replicate_rng(r as u64)))
        .collect();
    Ok(SamplePath {
        corners: order,
        values,
        seed,
        params: params.clone(),
        initial: initial.clone(),
    })
}
