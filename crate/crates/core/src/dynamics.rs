//! Numerical integration of Hamilton's equations for H = T + U, with
//! conservation-drift monitoring of every integral of motion.
//!
//! The curved-chart Hamiltonians are non-separable, so the default method is
//! an adaptive embedded Runge-Kutta 5(4) pair (Dormand-Prince) driven by
//! exact dual-number gradients of H. An implicit midpoint rule is available
//! for long-horizon symplectic runs. Trajectories never emit NaN: chart
//! escapes and potential singularities end the run with a diagnosed halt
//! and the last good state.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{chart_map, metric_diag, Chart, ChartPoint};
use crate::ktrig::Curvature;
use crate::phase::PhaseState;
use crate::poisson::gradient;
use crate::swsystem::{
    hamiltonian, integral, sum_rule_residual, HamiltonianFn, IntegralId, SwError, SwParams,
};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("invalid integrator config: {0}")]
    BadConfig(String),
    #[error("initial state rejected: {0}")]
    BadInitialState(String),
    #[error("potential singularity approached: |s_{index}| = {value:e} with beta_{index} != 0")]
    NearSingularity { index: usize, value: f64 },
    #[error("chart degenerates: metric coefficient {index} = {value:e}")]
    ChartDegenerate { index: usize, value: f64 },
    #[error(transparent)]
    Sw(#[from] SwError),
}

/// Integration method.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Method {
    /// Embedded Dormand-Prince 5(4) with adaptive steps.
    AdaptiveRk54,
    /// Implicit midpoint with a fixed step (symplectic).
    ImplicitMidpoint { dt: f64 },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_end: f64,
}

impl IntegratorConfig {
    pub fn adaptive(t_end: f64) -> Self {
        Self {
            method: Method::AdaptiveRk54,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.5,
            t_end,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(DynamicsError::BadConfig("tolerances must be positive".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(DynamicsError::BadConfig("max_step must be positive".into()));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(DynamicsError::BadConfig("t_end must be finite and >= 0".into()));
        }
        if let Method::ImplicitMidpoint { dt } = self.method {
            if !(dt > 0.0) {
                return Err(DynamicsError::BadConfig("midpoint dt must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Why an integration ended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Completed,
    /// Stopped before t_end: potential singularity or chart boundary.
    SingularityHalt { t: f64, reason: String },
    /// Step control collapsed below the representable floor.
    StepSizeUnderflow { t: f64 },
    /// Implicit solver stopped converging.
    IterationStall { t: f64 },
}

/// Integrated trajectory with per-step values of H and every integral.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub hamiltonian: Vec<f64>,
    /// integrals[step][k] = I_{ids[k]} at that step.
    pub integrals: Vec<Vec<f64>>,
    pub integral_ids: Vec<IntegralId>,
    pub params: SwParams,
    pub kappa: Curvature,
    pub chart: Chart,
    pub termination: Termination,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &PhaseState {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }
}

/// Floor used by the singularity guard: halt once |sᵢ| < 1e-6 while βᵢ ≠ 0.
pub const SINGULARITY_GUARD: f64 = 1e-6;

/// Floor on metric coefficients before a chart counts as escaped.
pub const METRIC_GUARD: f64 = 1e-12;

fn guard_state(
    chart: Chart,
    coords: &[f64],
    params: &SwParams,
    kappa: Curvature,
) -> Result<(), DynamicsError> {
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(DynamicsError::ChartDegenerate { index: 0, value: f64::NAN });
    }
    let s = chart_map(chart, coords, kappa);
    for (index, (si, bi)) in s.iter().zip(params.beta().iter()).enumerate() {
        if *bi != 0.0 && si.abs() < SINGULARITY_GUARD {
            return Err(DynamicsError::NearSingularity { index, value: si.abs() });
        }
    }
    let g = metric_diag(chart, coords, kappa);
    for (index, gi) in g.iter().enumerate() {
        if !(gi.is_finite() && *gi > METRIC_GUARD) {
            return Err(DynamicsError::ChartDegenerate { index, value: *gi });
        }
    }
    Ok(())
}

/// Canonical right-hand side (q̇, ṗ) = (∂H/∂p, -∂H/∂q) via exact gradients.
pub fn hamiltons_rhs(
    state: &PhaseState,
    params: &SwParams,
    kappa: Curvature,
) -> Result<Vec<f64>, DynamicsError> {
    guard_state(state.chart(), &state.point.coords, params, kappa)?;
    let h = HamiltonianFn { chart: state.chart(), kappa, params: params.clone() };
    let grad = gradient(&h, state);
    let n = state.n();
    let mut rhs = vec![0.0; 2 * n];
    rhs[..n].copy_from_slice(&grad[n..]);
    for i in 0..n {
        rhs[n + i] = -grad[i];
    }
    Ok(rhs)
}

struct System<'a> {
    chart: Chart,
    n: usize,
    params: &'a SwParams,
    kappa: Curvature,
    h_fn: HamiltonianFn,
}

impl<'a> System<'a> {
    fn rhs(&self, y: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        let n = self.n;
        guard_state(self.chart, &y[..n], self.params, self.kappa)?;
        let state = PhaseState::new_unchecked(
            ChartPoint { chart: self.chart, coords: y[..n].to_vec() },
            y[n..].to_vec(),
        );
        let grad = gradient(&self.h_fn, &state);
        let mut rhs = vec![0.0; 2 * n];
        rhs[..n].copy_from_slice(&grad[n..]);
        for i in 0..n {
            rhs[n + i] = -grad[i];
        }
        Ok(rhs)
    }

    fn state_of(&self, y: &[f64]) -> PhaseState {
        PhaseState::new_unchecked(
            ChartPoint { chart: self.chart, coords: y[..self.n].to_vec() },
            y[self.n..].to_vec(),
        )
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate Hamilton's equations to `config.t_end`.
///
/// The returned trajectory always contains at least the initial sample;
/// early stops are reported in [`Trajectory::termination`] together with the
/// last good state, never as NaN output.
pub fn integrate(
    initial: &PhaseState,
    params: &SwParams,
    kappa: Curvature,
    config: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    config.validate()?;
    initial
        .point
        .validate(kappa)
        .map_err(|e| DynamicsError::BadInitialState(e.to_string()))?;
    if params.beta().len() != initial.n() + 1 {
        return Err(DynamicsError::BadInitialState(format!(
            "need {} couplings, got {}",
            initial.n() + 1,
            params.beta().len()
        )));
    }
    guard_state(initial.chart(), &initial.point.coords, params, kappa)
        .map_err(|e| DynamicsError::BadInitialState(e.to_string()))?;

    let n = initial.n();
    let chart = initial.chart();
    let sys = System {
        chart,
        n,
        params,
        kappa,
        h_fn: HamiltonianFn { chart, kappa, params: params.clone() },
    };
    let ids = IntegralId::all(n);

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        hamiltonian: Vec::new(),
        integrals: Vec::new(),
        integral_ids: ids.clone(),
        params: params.clone(),
        kappa,
        chart,
        termination: Termination::Completed,
    };

    let mut y: Vec<f64> = initial.point.coords.iter().chain(initial.momenta.iter()).cloned().collect();
    let mut t = 0.0;
    log_sample(&mut traj, t, &sys, &y)?;
    if config.t_end == 0.0 {
        return Ok(traj);
    }

    match config.method {
        Method::AdaptiveRk54 => {
            let mut h = config.max_step.min(config.t_end).min(1e-3);
            let mut k1 = match sys.rhs(&y) {
                Ok(v) => v,
                Err(e) => {
                    traj.termination = Termination::SingularityHalt { t, reason: e.to_string() };
                    return Ok(traj);
                }
            };
            'outer: while t < config.t_end {
                h = h.min(config.t_end - t).min(config.max_step);
                if h < 1e-13 * t.abs().max(1.0) {
                    traj.termination = Termination::StepSizeUnderflow { t };
                    break;
                }
                let mut k = vec![k1.clone()];
                let mut failed: Option<DynamicsError> = None;
                for stage in 0..6 {
                    let mut ys = y.clone();
                    for (s, ks) in k.iter().enumerate() {
                        let a = A[stage][s];
                        if a != 0.0 {
                            for (yy, kk) in ys.iter_mut().zip(ks.iter()) {
                                *yy += h * a * kk;
                            }
                        }
                    }
                    match sys.rhs(&ys) {
                        Ok(v) => k.push(v),
                        Err(e) => {
                            failed = Some(e);
                            break;
                        }
                    }
                }
                if let Some(err) = failed {
                    // a trial stage left the valid region: shrink and retry
                    h *= 0.25;
                    if h < 1e-13 * t.abs().max(1.0) {
                        traj.termination =
                            Termination::SingularityHalt { t, reason: err.to_string() };
                        break 'outer;
                    }
                    continue;
                }
                let mut y5 = y.clone();
                let mut err_vec = vec![0.0; 2 * n];
                for (s, ks) in k.iter().enumerate() {
                    for i in 0..2 * n {
                        y5[i] += h * B5[s] * ks[i];
                        err_vec[i] += h * (B5[s] - B4[s]) * ks[i];
                    }
                }
                // scaled RMS error
                let mut acc = 0.0;
                for i in 0..2 * n {
                    let sc = config.abs_tol + config.rel_tol * y[i].abs().max(y5[i].abs());
                    let e = err_vec[i] / sc;
                    acc += e * e;
                }
                let err = (acc / (2 * n) as f64).sqrt();
                if err <= 1.0 {
                    t += h;
                    y = y5;
                    match sys.rhs(&y) {
                        Ok(v) => k1 = v, // FSAL would save this; recompute keeps the code plain
                        Err(e) => {
                            log_sample(&mut traj, t, &sys, &y).ok();
                            traj.termination =
                                Termination::SingularityHalt { t, reason: e.to_string() };
                            break 'outer;
                        }
                    }
                    log_sample(&mut traj, t, &sys, &y)?;
                }
                let factor = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
                h *= factor.clamp(0.2, 5.0);
            }
        }
        Method::ImplicitMidpoint { dt } => {
            while t < config.t_end - 1e-14 {
                let h = dt.min(config.t_end - t);
                // fixed-point iteration on the midpoint value
                let mut mid = y.clone();
                let mut converged = false;
                for _ in 0..100 {
                    let f = match sys.rhs(&mid) {
                        Ok(v) => v,
                        Err(e) => {
                            traj.termination =
                                Termination::SingularityHalt { t, reason: e.to_string() };
                            return Ok(traj);
                        }
                    };
                    let mut next = y.clone();
                    for i in 0..2 * n {
                        next[i] += 0.5 * h * f[i];
                    }
                    let delta = next
                        .iter()
                        .zip(mid.iter())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    mid = next;
                    if delta < 1e-13 {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    traj.termination = Termination::IterationStall { t };
                    break;
                }
                for i in 0..2 * n {
                    y[i] = 2.0 * mid[i] - y[i];
                }
                t += h;
                log_sample(&mut traj, t, &sys, &y)?;
            }
        }
    }
    Ok(traj)
}

fn log_sample(
    traj: &mut Trajectory,
    t: f64,
    sys: &System<'_>,
    y: &[f64],
) -> Result<(), DynamicsError> {
    let state = sys.state_of(y);
    let h = hamiltonian(&state, sys.params, sys.kappa)?;
    let vals: Result<Vec<f64>, SwError> = traj
        .integral_ids
        .iter()
        .map(|&id| integral(id, &state, sys.params, sys.kappa))
        .collect();
    traj.times.push(t);
    traj.states.push(state);
    traj.hamiltonian.push(h);
    traj.integrals.push(vals?);
    Ok(())
}

// ---------------------------------------------------------------------------
// Drift reporting
// ---------------------------------------------------------------------------

/// Drift of one logged invariant along a trajectory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantDrift {
    pub name: String,
    pub initial: f64,
    pub max_abs_deviation: f64,
    /// Deviation relative to max(1, |initial|).
    pub max_rel_drift: f64,
    /// Step index where the worst deviation occurs.
    pub worst_index: usize,
}

/// Machine-readable conservation summary of a trajectory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriftReport {
    pub steps: usize,
    pub t_end: f64,
    pub invariants: Vec<InvariantDrift>,
    pub max_rel_drift: f64,
    /// Max |logged - recomputed-from-state|; nonzero only if states and log
    /// disagree (e.g. a tampered trajectory).
    pub log_integrity: f64,
    /// Max sum-rule residual along the trajectory.
    pub max_sum_rule_residual: f64,
    pub termination: Termination,
}

fn drift_of(name: &str, series: &[f64]) -> InvariantDrift {
    let initial = series[0];
    let scale = initial.abs().max(1.0);
    let mut max_abs = 0.0;
    let mut worst = 0;
    for (i, v) in series.iter().enumerate() {
        let d = (v - initial).abs();
        if d > max_abs {
            max_abs = d;
            worst = i;
        }
    }
    InvariantDrift {
        name: name.to_string(),
        initial,
        max_abs_deviation: max_abs,
        max_rel_drift: max_abs / scale,
        worst_index: worst,
    }
}

/// Per-invariant drift report; recomputes every invariant from the stored
/// states as an integrity cross-check of the log.
pub fn drift_report(traj: &Trajectory) -> Result<DriftReport, DynamicsError> {
    assert!(!traj.is_empty(), "drift report needs a non-empty trajectory");
    let mut invariants = vec![drift_of("H", &traj.hamiltonian)];
    for (kidx, id) in traj.integral_ids.iter().enumerate() {
        let series: Vec<f64> = traj.integrals.iter().map(|row| row[kidx]).collect();
        invariants.push(drift_of(&id.name(), &series));
    }
    let mut log_integrity = 0.0f64;
    let mut max_sum_rule = 0.0f64;
    for (step, state) in traj.states.iter().enumerate() {
        let h = hamiltonian(state, &traj.params, traj.kappa)?;
        log_integrity = log_integrity.max((h - traj.hamiltonian[step]).abs());
        for (kidx, id) in traj.integral_ids.iter().enumerate() {
            let v = integral(*id, state, &traj.params, traj.kappa)?;
            log_integrity = log_integrity.max((v - traj.integrals[step][kidx]).abs());
        }
        max_sum_rule = max_sum_rule.max(sum_rule_residual(state, &traj.params, traj.kappa)?);
    }
    let max_rel_drift = invariants.iter().map(|d| d.max_rel_drift).fold(0.0, f64::max);
    Ok(DriftReport {
        steps: traj.len(),
        t_end: *traj.times.last().unwrap(),
        invariants,
        max_rel_drift,
        log_integrity,
        max_sum_rule_residual: max_sum_rule,
        termination: traj.termination.clone(),
    })
}
