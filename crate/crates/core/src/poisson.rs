//! Canonical Poisson brackets with exact forward-mode derivatives.
//!
//! {f, g} = Σᵢ (∂f/∂qᵢ ∂g/∂pᵢ - ∂g/∂qᵢ ∂f/∂pᵢ)
//!
//! Gradients come from 2N dual-number evaluations per function (one seeded
//! slot each), so bracket residuals are limited only by rounding. A central
//! finite-difference fallback is kept for cross-checks and for the nested
//! brackets of the Jacobi test, where it avoids second-order dual types.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::Chart;
use crate::ktrig::Curvature;
use crate::liealg::{LieAlgError, StructureConstants};
use crate::phase::{kinetic_energy_generic, realize_all, PhaseState, RealizedGenerator};
use crate::report::Check;
use crate::sample::StateSampler;
use crate::scalar::{lift, Dual, Scalar};
use crate::tol;

pub use crate::scalar::Dual as DualScalar;

/// A scalar function on phase space, evaluable with any [`Scalar`] type.
///
/// Implementations must be deterministic and side-effect free; `coords` and
/// `momenta` both have length N.
pub trait PhaseFunction {
    fn eval_generic<S: Scalar>(&self, coords: &[S], momenta: &[S]) -> S;

    fn eval(&self, state: &PhaseState) -> f64 {
        self.eval_generic(&state.point.coords, &state.momenta)
    }
}

impl PhaseFunction for RealizedGenerator {
    fn eval_generic<S: Scalar>(&self, coords: &[S], momenta: &[S]) -> S {
        RealizedGenerator::eval_generic(self, coords, momenta)
    }
}

/// Kinetic energy as a phase function in a fixed chart.
#[derive(Clone, Copy, Debug)]
pub struct KineticEnergyFn {
    pub chart: Chart,
    pub kappa: Curvature,
}

impl PhaseFunction for KineticEnergyFn {
    fn eval_generic<S: Scalar>(&self, coords: &[S], momenta: &[S]) -> S {
        kinetic_energy_generic(self.chart, coords, momenta, self.kappa)
    }
}

/// The i-th coordinate as a phase function.
#[derive(Clone, Copy, Debug)]
pub struct CoordinateFn(pub usize);

impl PhaseFunction for CoordinateFn {
    fn eval_generic<S: Scalar>(&self, coords: &[S], _momenta: &[S]) -> S {
        coords[self.0]
    }
}

/// The i-th momentum as a phase function.
#[derive(Clone, Copy, Debug)]
pub struct MomentumFn(pub usize);

impl PhaseFunction for MomentumFn {
    fn eval_generic<S: Scalar>(&self, _coords: &[S], momenta: &[S]) -> S {
        momenta[self.0]
    }
}

/// Pointwise product f·g.
#[derive(Clone, Copy, Debug)]
pub struct ProductFn<F, G>(pub F, pub G);

impl<F: PhaseFunction, G: PhaseFunction> PhaseFunction for ProductFn<F, G> {
    fn eval_generic<S: Scalar>(&self, coords: &[S], momenta: &[S]) -> S {
        self.0.eval_generic(coords, momenta) * self.1.eval_generic(coords, momenta)
    }
}

// ---------------------------------------------------------------------------
// Gradients and brackets
// ---------------------------------------------------------------------------

/// Exact gradient (∂f/∂q₁..∂f/∂q_N, ∂f/∂p₁..∂f/∂p_N) via 2N dual passes.
pub fn gradient<F: PhaseFunction>(f: &F, state: &PhaseState) -> Vec<f64> {
    let n = state.n();
    let coords = &state.point.coords;
    let momenta = &state.momenta;
    let mut out = vec![0.0; 2 * n];
    for slot in 0..n {
        let mut q: Vec<Dual> = lift(coords);
        q[slot] = Dual::variable(coords[slot]);
        let p: Vec<Dual> = lift(momenta);
        out[slot] = f.eval_generic(&q, &p).d;
    }
    for slot in 0..n {
        let q: Vec<Dual> = lift(coords);
        let mut p: Vec<Dual> = lift(momenta);
        p[slot] = Dual::variable(momenta[slot]);
        out[n + slot] = f.eval_generic(&q, &p).d;
    }
    out
}

/// Central finite-difference gradient, the fallback oracle for [`gradient`].
pub fn gradient_fd<F: PhaseFunction>(f: &F, state: &PhaseState, step: f64) -> Vec<f64> {
    let n = state.n();
    let mut out = vec![0.0; 2 * n];
    for slot in 0..2 * n {
        let h = step * slot_value(state, slot).abs().max(1.0);
        let plus = shifted_state(state, slot, h);
        let minus = shifted_state(state, slot, -h);
        out[slot] = (f.eval(&plus) - f.eval(&minus)) / (2.0 * h);
    }
    out
}

fn slot_value(state: &PhaseState, slot: usize) -> f64 {
    let n = state.n();
    if slot < n {
        state.point.coords[slot]
    } else {
        state.momenta[slot - n]
    }
}

/// Copy of `state` with one phase-space slot shifted by `delta`.
pub fn shifted_state(state: &PhaseState, slot: usize, delta: f64) -> PhaseState {
    let n = state.n();
    let mut s = state.clone();
    if slot < n {
        s.point.coords[slot] += delta;
    } else {
        s.momenta[slot - n] += delta;
    }
    s
}

/// Bracket of two gradient vectors laid out as (∂q, ∂p).
pub fn bracket_from_gradients(df: &[f64], dg: &[f64]) -> f64 {
    let n = df.len() / 2;
    let mut acc = 0.0;
    for i in 0..n {
        acc += df[i] * dg[n + i] - dg[i] * df[n + i];
    }
    acc
}

/// Canonical Poisson bracket {f, g} at a state.
pub fn bracket<F: PhaseFunction, G: PhaseFunction>(f: &F, g: &G, state: &PhaseState) -> f64 {
    bracket_from_gradients(&gradient(f, state), &gradient(g, state))
}

/// |{f, {g, h}} + {g, {h, f}} + {h, {f, g}}| with the outer brackets taken
/// by central finite differences of inner bracket values (step ~1e-5).
pub fn jacobi_residual<F, G, H>(f: &F, g: &G, h: &H, state: &PhaseState, step: f64) -> f64
where
    F: PhaseFunction,
    G: PhaseFunction,
    H: PhaseFunction,
{
    fn outer<A: PhaseFunction, B: PhaseFunction, C: PhaseFunction>(
        a: &A,
        b: &B,
        c: &C,
        state: &PhaseState,
        step: f64,
    ) -> f64 {
        // {a, {b,c}}: exact gradient of a, FD gradient of the inner bracket
        let da = gradient(a, state);
        let n = state.n();
        let mut dinner = vec![0.0; 2 * n];
        for slot in 0..2 * n {
            let hh = step * slot_value(state, slot).abs().max(1.0);
            let plus = shifted_state(state, slot, hh);
            let minus = shifted_state(state, slot, -hh);
            dinner[slot] = (bracket(b, c, &plus) - bracket(b, c, &minus)) / (2.0 * hh);
        }
        bracket_from_gradients(&da, &dinner)
    }
    (outer(f, g, h, state, step) + outer(g, h, f, state, step) + outer(h, f, g, state, step)).abs()
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

/// Residual of one generator pair against the structure-constant expansion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairResidual {
    pub left: String,
    pub right: String,
    pub max_residual: f64,
}

/// Result of sweeping every generator pair over random states.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub n: usize,
    pub kappa: f64,
    pub chart: Chart,
    pub trials: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    pub worst_pair: Option<(String, String)>,
    pub pairs: Vec<PairResidual>,
    pub pass: bool,
}

/// Verify that the realized generators close the so_κ(N+1) brackets:
/// {X̃, Ỹ} = [X, Y]~ (the realization is a +1 homomorphism) at every
/// sampled state.
pub fn verify_algebra(
    n: usize,
    kappa: Curvature,
    chart: Chart,
    trials: usize,
    seed: u64,
) -> Result<AlgebraReport, LieAlgError> {
    let sc = StructureConstants::new(n, kappa)?;
    let gens = realize_all(chart, n, kappa).expect("valid generators");
    let ids = sc.basis().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = StateSampler::new(n, kappa, chart);

    let mut pair_residuals = vec![0.0; ids.len() * ids.len()];
    for _ in 0..trials {
        let state = sampler.sample(&mut rng);
        let grads: Vec<Vec<f64>> = gens.iter().map(|g| gradient(g, &state)).collect();
        let values: Vec<f64> = gens
            .iter()
            .map(|g| g.evaluate(&state).expect("state chart matches"))
            .collect();
        for a in 0..ids.len() {
            for b in (a + 1)..ids.len() {
                let lhs = bracket_from_gradients(&grads[a], &grads[b]);
                let mut rhs = 0.0;
                for &(id, c) in sc.bracket(ids[a], ids[b]) {
                    rhs += c * values[sc.basis_index(id).unwrap()];
                }
                let r = (lhs - rhs).abs();
                let slot = a * ids.len() + b;
                if r > pair_residuals[slot] {
                    pair_residuals[slot] = r;
                }
            }
        }
    }

    let mut pairs = Vec::new();
    let mut max_residual = 0.0;
    let mut worst_pair = None;
    for a in 0..ids.len() {
        for b in (a + 1)..ids.len() {
            let r = pair_residuals[a * ids.len() + b];
            pairs.push(PairResidual {
                left: ids[a].name(),
                right: ids[b].name(),
                max_residual: r,
            });
            if r > max_residual {
                max_residual = r;
                worst_pair = Some((ids[a].name(), ids[b].name()));
            }
        }
    }
    Ok(AlgebraReport {
        n,
        kappa: kappa.kappa(),
        chart,
        trials,
        tolerance: tol::ALGEBRA_BRACKETS,
        max_residual,
        worst_pair,
        pairs,
        pass: max_residual <= tol::ALGEBRA_BRACKETS,
    })
}

/// Report for {X̃, f} residuals over a generator family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CommutationReport {
    pub function: String,
    pub trials: usize,
    pub tolerance: f64,
    pub checks: Vec<Check>,
    pub max_residual: f64,
    pub pass: bool,
}

/// Measure max |{X̃, f}| over random states for every generator in `gens`.
/// Used with f = T (every generator commutes with the kinetic energy) and as
/// a negative control with non-invariant functions.
pub fn verify_commutes_with<F: PhaseFunction>(
    f: &F,
    f_name: &str,
    gens: &[RealizedGenerator],
    n: usize,
    kappa: Curvature,
    chart: Chart,
    trials: usize,
    seed: u64,
) -> CommutationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = StateSampler::new(n, kappa, chart);
    let mut residuals = vec![0.0f64; gens.len()];
    for _ in 0..trials {
        let state = sampler.sample(&mut rng);
        let df = gradient(f, &state);
        for (i, gen) in gens.iter().enumerate() {
            let dg = gradient(gen, &state);
            let r = bracket_from_gradients(&dg, &df).abs();
            if r > residuals[i] {
                residuals[i] = r;
            }
        }
    }
    let checks: Vec<Check> = gens
        .iter()
        .zip(residuals.iter())
        .map(|(g, &r)| {
            Check::new(format!("{{{}, {}}}", g.id().name(), f_name), r, tol::ALGEBRA_BRACKETS)
        })
        .collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    CommutationReport {
        function: f_name.to_string(),
        trials,
        tolerance: tol::ALGEBRA_BRACKETS,
        checks,
        max_residual,
        pass: max_residual <= tol::ALGEBRA_BRACKETS,
    }
}
