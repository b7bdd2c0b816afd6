use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{stat, sub_seed, CheckReport, FlowSpec, VerifyError};
use crate::gaussian::{schur_complement, symmetric_eigenvalues, Matrix, RngSeed};
use crate::geometry::{Corner, GeometryError, Increment, UnionSet};
use crate::kernel::{normal_pdf, CovarianceModel, KernelParams};
use crate::measure::MeasureSpec;
use crate::scalar::Scalar;

pub const PSD_TOLERANCE: f64 = 1e-10;
pub const SCHUR_TOLERANCE: f64 = 1e-8;
/// Relative to `σ²/2λ`.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-9;
/// Relative to `σ²/2λ`.
pub const CONTINUITY_TOLERANCE: f64 = 1e-9;
pub const STATIONARITY_TOLERANCE: f64 = 1e-10;
pub const FLOW_TOLERANCE: f64 = 1e-10;
pub const OU_REDUCTION_TOLERANCE: f64 = 1e-12;

/// Refinement levels `n` of the sequences `τ ± 2^{-n}` in the continuity check.
const CONTINUITY_LEVELS: i32 = 40;

fn lit<T: Scalar>(x: f64) -> T {
    T::lit(x)
}

/// Lebesgue on even trials, an axis measure with random weights on odd ones.
fn trial_measure<T: Scalar>(rng: &mut ChaCha8Rng, trial: usize, dim: usize) -> MeasureSpec<T> {
    if trial % 2 == 0 {
        MeasureSpec::Lebesgue
    } else {
        MeasureSpec::Axis {
            alpha: (0..dim).map(|_| lit(rng.random_range(0.5..2.0))).collect(),
        }
    }
}

fn grid_corner<T: Scalar>(rng: &mut ChaCha8Rng, dim: usize) -> Result<Corner<T>, GeometryError> {
    Corner::new((0..dim).map(|_| lit(0.25 * rng.random_range(1..=8) as f64)).collect())
}

/// Draws increments until one with a nonempty `C` and a unit-sign frontier
/// turns up. Returns the increment and the number of rejected draws.
fn valid_increment<T: Scalar>(
    rng: &mut ChaCha8Rng,
    dim: usize,
    min_b: usize,
) -> Result<(Increment<T>, usize), VerifyError> {
    let mut rejected = 0;
    loop {
        let a = grid_corner(rng, dim)?;
        let nb = rng.random_range(min_b..=3);
        let b = (0..nb)
            .map(|_| grid_corner(rng, dim))
            .collect::<Result<Vec<_>, _>>()?;
        let inc = Increment::new(a, &b)?;
        let covered = inc.b().contains_rect(inc.a());
        match inc.frontier() {
            Ok(_) if !covered => return Ok((inc, rejected)),
            Ok(_) | Err(GeometryError::SignMultiplicity { .. }) => rejected += 1,
            Err(e) => return Err(e.into()),
        }
        if rejected > 10_000 {
            return Err(VerifyError::Precondition("could not draw a valid increment".into()));
        }
    }
}

fn gram<T: Scalar, M: CovarianceModel<T>>(model: &M, corners: &[Corner<T>]) -> Matrix<T> {
    Matrix::symmetric_from_fn(corners.len(), |i, j| model.cov_stationary(&corners[i], &corners[j]))
}

/// Worst `(-min eigenvalue / trace)₊` over random stationary Gram matrices.
pub fn check_psd<T: Scalar, M: CovarianceModel<T>>(
    model: &M,
    trials: usize,
    seed: RngSeed,
) -> Result<CheckReport, VerifyError> {
    if trials == 0 {
        return Err(VerifyError::Precondition("trials must be at least 1".into()));
    }
    let mut worst = 0.0f64;
    let mut worst_trial = 0;
    for trial in 0..trials {
        let mut rng = seed.replicate_rng(trial as u64);
        let dim = rng.random_range(1..=3);
        let measure = trial_measure(&mut rng, trial, dim);
        let k = rng.random_range(1..=12);
        let corners = (0..k)
            .map(|_| Corner::new((0..dim).map(|_| lit(rng.random_range(0.0..2.0))).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        let g = gram(&model.with_measure(measure), &corners);
        let ratio = match symmetric_eigenvalues(&g) {
            Ok(eig) => stat((-eig[0] / g.trace()).max(T::zero())),
            Err(_) => f64::INFINITY,
        };
        if !(ratio <= worst) {
            worst = ratio;
            worst_trial = trial;
        }
    }
    Ok(CheckReport::new(
        "psd",
        worst,
        PSD_TOLERANCE,
        format!("{trials} random Gram matrices (N <= 3, <= 12 corners); worst at trial {worst_trial}"),
    ))
}

/// Compares the closed-form transition weights and variance with the Schur
/// complement of the model's stationary covariance over `[A, frontier]`.
pub fn check_schur<T: Scalar, M: CovarianceModel<T>>(
    model: &M,
    trials: usize,
    seed: RngSeed,
) -> Result<CheckReport, VerifyError> {
    if trials == 0 {
        return Err(VerifyError::Precondition("trials must be at least 1".into()));
    }
    let mut worst = 0.0f64;
    let mut rejected = 0;
    for trial in 0..trials {
        let mut rng = seed.replicate_rng(trial as u64);
        let dim = rng.random_range(1..=3);
        let measure = trial_measure(&mut rng, trial, dim);
        let (inc, r) = valid_increment::<T>(&mut rng, dim, 0)?;
        rejected += r;
        let model = model.with_measure(measure);
        let diff = schur_discrepancy(&model, &inc)?;
        if !(diff <= worst) {
            worst = diff;
        }
    }
    Ok(CheckReport::new(
        "schur",
        worst,
        SCHUR_TOLERANCE,
        format!("{trials} random increments; {rejected} draws rejected (empty increment or frontier multiplicity)"),
    ))
}

/// Largest deviation between closed-form and Schur-complement transition
/// parameters of one increment.
pub fn schur_discrepancy<T: Scalar, M: CovarianceModel<T>>(model: &M, inc: &Increment<T>) -> Result<f64, VerifyError> {
    let tp = model.params().transition_params(inc)?;
    let mut nodes = vec![inc.a().clone()];
    nodes.extend(tp.weights.iter().map(|w| w.corner.clone()));
    let observed: Vec<usize> = (1..nodes.len()).collect();
    let sc = match schur_complement(&gram(model, &nodes), &observed) {
        Ok(sc) => sc,
        Err(_) => return Ok(f64::INFINITY),
    };
    let mut d = stat((sc.cov[(0, 0)] - tp.variance).abs());
    for (k, w) in tp.weights.iter().enumerate() {
        d = d.max(stat((sc.gain[(0, k)] - w.weight).abs()));
    }
    Ok(d)
}

/// `Cov(X_A - Σ w_i X_{C'_i}, X_U)` under the model, or `None` when `[0,U]`
/// meets the increment.
pub fn orthogonality_residual<T: Scalar, M: CovarianceModel<T>>(
    model: &M,
    inc: &Increment<T>,
    u: &Corner<T>,
) -> Result<Option<T>, VerifyError> {
    if !inc.misses(u) {
        return Ok(None);
    }
    let tp = model.params().transition_params(inc)?;
    let projected = tp
        .weights
        .iter()
        .fold(T::zero(), |acc, w| acc + w.weight * model.cov_stationary(&w.corner, u));
    Ok(Some(model.cov_stationary(inc.a(), u) - projected))
}

/// Corner `U` with `U ∧ A <= b`: coordinates where `b` is cut below `A` are
/// drawn inside `[0, b_j]`, the others freely in `[0, 3]`.
fn corner_missing<T: Scalar>(rng: &mut ChaCha8Rng, a: &Corner<T>, b: &Corner<T>) -> Result<Corner<T>, GeometryError> {
    if rng.random_bool(0.25) {
        return Ok(b.clone());
    }
    let coords = a
        .coords()
        .iter()
        .zip(b.coords())
        .map(|(&aj, &bj)| {
            if bj < aj - T::coord_tol() {
                bj * lit(rng.random_range(0.0..=1.0))
            } else {
                lit(rng.random_range(0.0..3.0))
            }
        })
        .collect();
    Corner::new(coords)
}

pub fn check_markov_orthogonality<T: Scalar, M: CovarianceModel<T>>(
    model: &M,
    trials: usize,
    seed: RngSeed,
) -> Result<CheckReport, VerifyError> {
    if trials == 0 {
        return Err(VerifyError::Precondition("trials must be at least 1".into()));
    }
    let scale = model.params().stationary_variance();
    let mut worst = 0.0f64;
    let (mut rejected, mut skipped) = (0, 0);
    for trial in 0..trials {
        let mut rng = seed.replicate_rng(trial as u64);
        let dim = rng.random_range(1..=3);
        let measure = trial_measure(&mut rng, trial, dim);
        let model = model.with_measure(measure);
        let (inc, r) = valid_increment::<T>(&mut rng, dim, 1)?;
        rejected += r;
        let bs = inc.b().corners();
        let b = &bs[rng.random_range(0..bs.len())];
        let u = corner_missing(&mut rng, inc.a(), b)?;
        match orthogonality_residual(&model, &inc, &u)? {
            Some(i_u) => {
                let v = stat(i_u.abs());
                if !(v <= worst) {
                    worst = v;
                }
            }
            None => skipped += 1,
        }
    }
    Ok(CheckReport::new(
        "markov_orthogonality",
        worst / scale.as_f64(),
        ORTHOGONALITY_TOLERANCE,
        format!(
            "max |I_U| / (sigma^2/2lambda) over {trials} (increment, U) pairs; {rejected} increments rejected, {skipped} pairs skipped by the U ∩ C = ∅ filter"
        ),
    ))
}

/// `E|X_U - X_V|²` under the model.
fn l2_gap<T: Scalar, M: CovarianceModel<T>>(model: &M, u: &Corner<T>, v: &Corner<T>) -> T {
    model.cov_stationary(u, u) + model.cov_stationary(v, v) - lit::<T>(2.0) * model.cov_stationary(u, v)
}

/// Inner and outer L² limits along each flow with `τ_n = τ ± 2^{-n}·segments`.
/// Gaps from the model must match `(σ²/λ)(1 - e^{-λ m(U Δ U_n)})`, stay
/// nonnegative, shrink monotonically and end below `tolerance`.
pub fn check_continuity<T: Scalar, M: CovarianceModel<T>>(
    model: &M,
    flows: &[FlowSpec<T>],
    tolerance: T,
) -> Result<CheckReport, VerifyError> {
    let p = model.params();
    let (lambda, m) = (p.lambda(), p.measure());
    let two_s = lit::<T>(2.0) * p.stationary_variance();
    let (mut final_gap, mut mismatch, mut violation) = (0.0f64, 0.0f64, 0.0f64);
    let mut sequences = 0;
    for flow in flows {
        m.check_dim(flow.dim())?;
        let k = T::from_count(flow.segments());
        let half = k / lit(2.0);
        let targets = [(half, -1.0), (half, 1.0), (half, 0.0), (k, -1.0), (T::zero(), 1.0)];
        for (tau, dir) in targets {
            sequences += 1;
            let target = flow.at(tau);
            let mut prev: Option<T> = None;
            let mut last = T::zero();
            for n in 1..=CONTINUITY_LEVELS {
                let step = k * lit::<T>(2.0).powi(-n) * lit(dir);
                let u_n = flow.at(tau + step);
                let gap = l2_gap(model, &target, &u_n);
                let closed = -two_s * (-lambda * m.symdiff(&target, &u_n)).exp_m1();
                mismatch = mismatch.max(stat((gap - closed).abs()));
                violation = violation.max(stat((-gap).max(T::zero())));
                if let Some(g) = prev {
                    violation = violation.max(stat((gap - g).max(T::zero())));
                }
                prev = Some(gap);
                last = gap;
            }
            final_gap = final_gap.max(stat(last.abs()));
        }
    }
    let statistic = final_gap.max(mismatch).max(violation);
    Ok(CheckReport::new(
        "continuity",
        statistic,
        stat(tolerance),
        format!(
            "{sequences} sequences over {} flows, {CONTINUITY_LEVELS} dyadic levels each; final gap {final_gap:.3e}, closed-form mismatch {mismatch:.3e}, monotonicity violation {violation:.3e}",
            flows.len()
        ),
    ))
}

/// `U_i = v + i·h·e_{axis_u}` for `i = 1..=k`, and `A_i = base + x_i e_{axis_a}`
/// with `x_i` solved from `m(A_i) = m(U_i \ [0,v])`. The base point is all
/// ones off `axis_a` when that keeps `x_i >= 0`, otherwise the origin.
pub fn matched_sequences<T: Scalar>(
    measure: &MeasureSpec<T>,
    v: &Corner<T>,
    k: usize,
    h: T,
    axis_u: usize,
    axis_a: usize,
) -> Result<(Vec<Corner<T>>, Vec<Corner<T>>), VerifyError> {
    let dim = v.dim();
    measure.check_dim(dim)?;
    if axis_u >= dim || axis_a >= dim {
        return Err(VerifyError::Precondition("axis index out of range".into()));
    }
    let vset = UnionSet::new(std::slice::from_ref(v))?;
    let mut us = Vec::with_capacity(k);
    let mut targets = Vec::with_capacity(k);
    for i in 1..=k {
        let mut c = v.coords().to_vec();
        c[axis_u] = c[axis_u] + h * T::from_count(i);
        let u = Corner::new(c)?;
        targets.push(measure.diff(&u, &vset.clip(&u)?)?);
        us.push(u);
    }
    let solve = |fill: T| -> Result<Option<Vec<Corner<T>>>, VerifyError> {
        let mut base = vec![fill; dim];
        base[axis_a] = T::zero();
        let m0 = measure.rect(&Corner::new(base.clone())?);
        let mut unit = base.clone();
        unit[axis_a] = T::one();
        let slope = measure.rect(&Corner::new(unit)?) - m0;
        if slope <= T::zero() {
            return Ok(None);
        }
        let mut out = Vec::with_capacity(k);
        for &t in &targets {
            let x = (t - m0) / slope;
            if x < T::zero() {
                return Ok(None);
            }
            let mut c = base.clone();
            c[axis_a] = x;
            out.push(Corner::new(c)?);
        }
        Ok(Some(out))
    };
    let a_seq = match solve(T::one())? {
        Some(a) => a,
        None => solve(T::zero())?.ok_or_else(|| {
            VerifyError::Precondition("no matched sequence along the requested axis".into())
        })?,
    };
    Ok((us, a_seq))
}

/// Gram matrices of `(X_{U_i})` and `(X_{A_i})` must agree with each other
/// and with `(σ²/2λ) e^{-λ |m(A_i) - m(A_j)|}`.
pub fn check_stationarity<T: Scalar, M: CovarianceModel<T>>(
    model: &M,
    v: &Corner<T>,
    us: &[Corner<T>],
    a_seq: &[Corner<T>],
) -> Result<CheckReport, VerifyError> {
    let p = model.params();
    let m = p.measure();
    if us.is_empty() || us.len() != a_seq.len() {
        return Err(VerifyError::Precondition(
            "sequences must be nonempty and of equal length".into(),
        ));
    }
    m.check_dim(v.dim())?;
    for w in us.windows(2).chain(a_seq.windows(2)) {
        if !w[0].le(&w[1]) {
            return Err(VerifyError::Precondition("sequences must be increasing".into()));
        }
    }
    let vset = UnionSet::new(std::slice::from_ref(v))?;
    for (i, (u, a)) in us.iter().zip(a_seq).enumerate() {
        let lhs = m.diff(u, &vset.clip(u)?)?;
        let rhs = m.rect(a);
        if (lhs - rhs).abs() > T::measure_slack() {
            return Err(VerifyError::Precondition(format!(
                "m(U_{i} \\ V) = {lhs} differs from m(A_{i}) = {rhs}"
            )));
        }
    }
    let gu = gram(model, us);
    let ga = gram(model, a_seq);
    let s = p.stationary_variance();
    let mut worst = 0.0f64;
    for i in 0..us.len() {
        for j in 0..us.len() {
            let reference = s * (-p.lambda() * (m.rect(&a_seq[i]) - m.rect(&a_seq[j])).abs()).exp();
            let d = (gu[(i, j)] - ga[(i, j)]).abs().max((ga[(i, j)] - reference).abs());
            worst = worst.max(stat(d));
        }
    }
    Ok(CheckReport::new(
        "stationarity",
        worst,
        STATIONARITY_TOLERANCE,
        format!("V = {v}; U = [{}]; A = [{}]", join(us), join(a_seq)),
    ))
}

fn join<T: Scalar>(cs: &[Corner<T>]) -> String {
    cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

/// Along the flow, the stationary covariance must equal the one-parameter
/// OU covariance `(σ²/2λ) e^{-λ |θ(t) - θ(s)|}` with `θ = m ∘ f`.
pub fn check_flow_projection<T: Scalar, M: CovarianceModel<T>>(
    model: &M,
    flow: &FlowSpec<T>,
    points: usize,
) -> Result<CheckReport, VerifyError> {
    let p = model.params();
    p.measure().check_dim(flow.dim())?;
    let points = points.max(2);
    let k = T::from_count(flow.segments());
    let taus: Vec<T> = (0..points)
        .map(|i| k * T::from_count(i) / T::from_count(points - 1))
        .collect();
    let fs: Vec<Corner<T>> = taus.iter().map(|&t| flow.at(t)).collect();
    let theta: Vec<T> = fs.iter().map(|f| p.measure().rect(f)).collect();
    let s = p.stationary_variance();
    let mut worst = 0.0f64;
    for i in 0..points {
        for j in 0..points {
            let reference = s * (-p.lambda() * (theta[i] - theta[j]).abs()).exp();
            worst = worst.max(stat((model.cov_stationary(&fs[i], &fs[j]) - reference).abs()));
        }
    }
    Ok(CheckReport::new(
        "flow_projection",
        worst,
        FLOW_TOLERANCE,
        format!("{points} points along the flow through [{}]", join(flow.waypoints())),
    ))
}

/// In one dimension with Lebesgue measure, the transition density from `s`
/// to `t` (closed form, and Schur conditional of the model's covariance)
/// must equal the classical OU kernel
/// `N(y; x e^{-λ(t-s)}, (σ²/2λ)(1 - e^{-2λ(t-s)}))`.
pub fn check_ou_reduction<T: Scalar, M: CovarianceModel<T>>(model: &M) -> Result<CheckReport, VerifyError> {
    let model = model.with_measure(MeasureSpec::Lebesgue);
    let p = model.params();
    let (lambda, s_var) = (p.lambda(), p.stationary_variance());
    let starts = [0.0, 0.25, 0.5, 1.0, 2.0];
    let elapsed = [0.25, 0.5, 1.0, 2.0];
    let xs = [-1.5, 0.0, 0.7, 2.0];
    let ys = [-2.0, -0.5, 0.0, 0.3, 1.8];
    let mut worst = 0.0f64;
    let mut count = 0;
    for &s in &starts {
        for &dt in &elapsed {
            let (cs, ct) = (Corner::new(vec![lit::<T>(s)])?, Corner::new(vec![lit::<T>(s + dt)])?);
            let inc = Increment::new(ct.clone(), std::slice::from_ref(&cs))?;
            let tp = p.transition_params(&inc)?;
            let (c_ss, c_ts, c_tt) = (
                model.cov_stationary(&cs, &cs),
                model.cov_stationary(&ct, &cs),
                model.cov_stationary(&ct, &ct),
            );
            let gain = c_ts / c_ss;
            let schur_var = c_tt - c_ts * gain;
            let dt: T = lit(dt);
            let decay = (-lambda * dt).exp();
            let classical_var = s_var * (T::one() - (-lit::<T>(2.0) * lambda * dt).exp());
            for &x in &xs {
                for &y in &ys {
                    let (x, y): (T, T) = (lit(x), lit(y));
                    let classical = normal_pdf(y, x * decay, classical_var);
                    let closed = tp.density(&[x], y).unwrap_or(T::nan());
                    let schur = if schur_var > T::zero() {
                        normal_pdf(y, gain * x, schur_var)
                    } else {
                        T::nan()
                    };
                    worst = worst
                        .max(stat((closed - classical).abs()))
                        .max(stat((schur - classical).abs()));
                    count += 1;
                }
            }
        }
    }
    Ok(CheckReport::new(
        "ou_reduction",
        worst,
        OU_REDUCTION_TOLERANCE,
        format!("{count} (s, t, x, y) grid points"),
    ))
}

/// Flows used by the suite: the diagonal, a staircase and a skewed path.
pub fn default_flows<T: Scalar>(dim: usize) -> Result<Vec<FlowSpec<T>>, VerifyError> {
    let corner = |xs: Vec<f64>| Corner::new(xs.into_iter().map(lit).collect());
    let origin = Corner::origin(dim);
    let diagonal = FlowSpec::new(vec![origin.clone(), corner(vec![2.0; dim])?])?;
    let mut stairs = vec![origin.clone()];
    for i in 0..dim {
        stairs.push(corner((0..dim).map(|j| if j <= i { 1.0 } else { 0.0 }).collect())?);
    }
    stairs.push(corner(vec![2.0; dim])?);
    let skew = FlowSpec::new(vec![
        origin,
        corner((0..dim).map(|j| 0.5 * (j + 1) as f64).collect())?,
        corner((0..dim).map(|j| [2.0, 1.5, 3.0][j % 3]).collect())?,
    ])?;
    Ok(vec![diagonal, FlowSpec::new(stairs)?, skew])
}

/// Measures used by the per-dimension checks of the suite.
pub fn suite_measures<T: Scalar>(dim: usize) -> Vec<MeasureSpec<T>> {
    let alpha = [1.0, 2.0, 0.5];
    vec![
        MeasureSpec::Lebesgue,
        MeasureSpec::Axis {
            alpha: (0..dim).map(|i| lit(alpha[i % 3])).collect(),
        },
    ]
}

/// Every deterministic check for one model, over `N ∈ {1,2,3}` and both
/// measures where the check is dimension-specific.
pub fn deterministic_checks<T: Scalar, M: CovarianceModel<T>>(
    model: &M,
    seed: RngSeed,
) -> Result<Vec<CheckReport>, VerifyError> {
    let scale = model.params().stationary_variance();
    let mut out = vec![
        check_psd(model, 50, sub_seed(seed, 1))?,
        check_schur(model, 100, sub_seed(seed, 2))?,
        check_markov_orthogonality(model, 200, sub_seed(seed, 3))?,
        check_ou_reduction(model)?,
    ];
    for dim in 1..=3 {
        for measure in suite_measures::<T>(dim) {
            let label = match &measure {
                MeasureSpec::Lebesgue => format!("N={dim},lebesgue/"),
                MeasureSpec::Axis { .. } => format!("N={dim},axis/"),
            };
            let m = model.with_measure(measure.clone());
            let flows = default_flows(dim)?;
            out.push(check_continuity(&m, &flows, scale * lit(CONTINUITY_TOLERANCE))?.prefixed(&label));
            let v = Corner::new((0..dim).map(|i| lit(1.0 + 0.5 * i as f64)).collect())?;
            let (us, a_seq) = matched_sequences(&measure, &v, 5, lit(0.3), 0, dim - 1)?;
            out.push(check_stationarity(&m, &v, &us, &a_seq)?.prefixed(&label));
            for (i, f) in flows.iter().enumerate() {
                out.push(check_flow_projection(&m, f, 9)?.prefixed(&format!("{label}flow{i}/")));
            }
        }
    }
    Ok(out)
}

/// `(λ, σ²)` grid of the deterministic suite.
pub const SUITE_PARAMS: [(f64, f64); 6] = [(0.5, 1.0), (0.5, 2.0), (1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0)];

pub fn suite_params<T: Scalar>() -> Vec<KernelParams<T>> {
    SUITE_PARAMS
        .iter()
        .map(|&(lambda, sigma2)| {
            KernelParams::from_variance(lit(lambda), lit(sigma2), MeasureSpec::Lebesgue)
                .expect("suite parameters are valid")
        })
        .collect()
}

pub fn run_deterministic_suite(seed: RngSeed) -> Result<Vec<CheckReport>, VerifyError> {
    let mut out = Vec::new();
    for (&(lambda, sigma2), p) in SUITE_PARAMS.iter().zip(suite_params::<f64>()) {
        let label = format!("lambda={lambda},sigma2={sigma2}/");
        for r in deterministic_checks(&p, seed)? {
            out.push(r.prefixed(&label));
        }
    }
    Ok(out)
}
