//! The Smorodinsky-Winternitz system on S^N_[κ].
//!
//! Ambient form of the potential: U = β₀ (Σ sₗ²)/s₀² + Σᵢ βᵢ/sᵢ². The
//! first term is the curved (Higgs) oscillator, the others are curved
//! centrifugal barriers. H = T + U admits one quadratic integral per Lie
//! algebra generator,
//!
//! ```text
//! I₀ᵢ = p̃ᵢ² + 2β₀ sᵢ²/s₀² + 2βᵢ s₀²/sᵢ²
//! Iᵢⱼ = J̃ᵢⱼ² + 2βᵢ sⱼ²/sᵢ² + 2βⱼ sᵢ²/sⱼ²
//! ```
//!
//! N(N+1)/2 integrals in total, tied to H by the sum rule
//! 2H = Σ I₀ᵢ + κ Σ_{i<j} Iᵢⱼ + 2κ Σ βᵢ. The nested sums
//! Q⁽ˡ⁾ = Σ_{i<j≤l} Iᵢⱼ and Q₍ₗ₎ = Σ_{N-l+1≤i<j} Iᵢⱼ give two involutive
//! families, and {Q⁽²⁾..Q⁽ᴺ⁾, Q₍ᴺ₋₁₎..Q₍₂₎, I₀ᵢ, H} is a functionally
//! independent set of 2N-1 functions: maximal superintegrability.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{chart_map, Chart, ChartPoint};
use crate::ktrig::{cos_k, sin_k, tan_k, Curvature};
use crate::liealg::GeneratorId;
use crate::phase::{
    ambient_position_velocity, kinetic_energy_generic, PhaseError, PhaseState, RealizedGenerator,
};
use crate::poisson::{bracket_from_gradients, gradient, PhaseFunction};
use crate::report::{Check, Measurement};
use crate::sample::StateSampler;
use crate::scalar::Scalar;
use crate::{flat, tol};

/// Ambient components closer to zero than this (with a live coupling) are
/// treated as potential singularities rather than evaluated.
pub const SINGULARITY_FLOOR: f64 = 1e-12;

/// Coupling constants β₀, β₁, ..., β_N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwParams {
    beta: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SwError {
    #[error("need N+1 = {expected} couplings, got {got}")]
    BetaLength { expected: usize, got: usize },
    #[error("coupling beta_{index} is not finite")]
    NonFiniteBeta { index: usize },
    #[error("potential singularity: ambient component s_{index} vanishes with beta_{index} != 0")]
    Singularity { index: usize },
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error("integral index pair ({0}, {1}) needs 0 <= i < j <= N")]
    BadIntegralId(usize, usize),
    #[error("family index l = {l} must lie in 2..=N = {n}")]
    BadFamilyIndex { l: usize, n: usize },
}

impl SwParams {
    /// β must have length N+1 and be finite. Negative couplings are legal
    /// (the dynamics is then unbounded below); see [`SwParams::has_negative`].
    pub fn new(beta: Vec<f64>) -> Result<Self, SwError> {
        if let Some(index) = beta.iter().position(|b| !b.is_finite()) {
            return Err(SwError::NonFiniteBeta { index });
        }
        Ok(Self { beta })
    }

    pub fn for_dimension(beta: Vec<f64>, n: usize) -> Result<Self, SwError> {
        if beta.len() != n + 1 {
            return Err(SwError::BetaLength { expected: n + 1, got: beta.len() });
        }
        Self::new(beta)
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn n(&self) -> usize {
        self.beta.len() - 1
    }

    /// True when some βᵢ < 0 (bounded-below dynamics not guaranteed).
    pub fn has_negative(&self) -> bool {
        self.beta.iter().any(|b| *b < 0.0)
    }

    /// True when some βᵢ = 0 (degenerate for the independence certificate).
    pub fn has_zero(&self) -> bool {
        self.beta.iter().any(|b| *b == 0.0)
    }
}

/// Label (i, j), 0 ≤ i < j ≤ N, of the integral built from J_ij (with the
/// convention J_0i = P_i).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegralId {
    pub i: usize,
    pub j: usize,
}

impl IntegralId {
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self, SwError> {
        if i < j && j <= n {
            Ok(Self { i, j })
        } else {
            Err(SwError::BadIntegralId(i, j))
        }
    }

    /// All N(N+1)/2 labels in lexicographic order.
    pub fn all(n: usize) -> Vec<IntegralId> {
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in (i + 1)..=n {
                out.push(IntegralId { i, j });
            }
        }
        out
    }

    /// The generator whose square provides the momentum part.
    pub fn generator(&self) -> GeneratorId {
        if self.i == 0 {
            GeneratorId::Translation(self.j)
        } else {
            GeneratorId::Rotation(self.i, self.j)
        }
    }

    pub fn name(&self) -> String {
        format!("I_{}_{}", self.i, self.j)
    }

    /// True when the two index pairs share no index (the hypothesis of the
    /// disjoint-pair commutation property).
    pub fn disjoint(&self, other: &IntegralId) -> bool {
        self.i != other.i && self.i != other.j && self.j != other.i && self.j != other.j
    }
}

impl std::fmt::Display for IntegralId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

// ---------------------------------------------------------------------------
// Potential and Hamiltonian
// ---------------------------------------------------------------------------

/// SW potential in chart coordinates (both chart displays).
///
/// Parallel: β₀ Σᵢ S²(aᵢ)/Π_{l≤i}C²(a_l)
///   + Σ_{i<N} βᵢ/(S²(aᵢ) Π_{l>i}C²(a_l)) + β_N/S²(a_N).
/// Polar: β₀T²(r) + (1/S²(r))·[β₁/cos²θ₂
///   + Σ_{1<i<N} βᵢ/(cos²θ_{i+1} Π_{l≤i}sin²θ_l) + β_N/Π sin²θ_l].
pub fn potential_generic<S: Scalar>(
    chart: Chart,
    coords: &[S],
    params: &SwParams,
    kappa: Curvature,
) -> S {
    let n = coords.len();
    let beta = params.beta();
    match chart {
        Chart::Parallel => {
            let c2: Vec<S> = coords
                .iter()
                .map(|&x| {
                    let c = cos_k(kappa, x);
                    c * c
                })
                .collect();
            let s2: Vec<S> = coords
                .iter()
                .map(|&x| {
                    let s = sin_k(kappa, x);
                    s * s
                })
                .collect();
            let mut acc = S::zero();
            // oscillator: β₀ Σ S²(aᵢ) / Π_{l=1..i} C²(a_l)
            let mut prefix = S::one();
            for i in 0..n {
                prefix = prefix * c2[i];
                if beta[0] != 0.0 {
                    acc = acc + (s2[i] / prefix).scale(beta[0]);
                }
            }
            // centrifugal: βᵢ / (S²(aᵢ) Π_{l>i} C²(a_l)); a zero coupling
            // removes the term (and its singularity) entirely
            let mut suffix = S::one();
            for i in (0..n).rev() {
                if beta[i + 1] != 0.0 {
                    acc = acc + (S::one() / (s2[i] * suffix)).scale(beta[i + 1]);
                }
                suffix = suffix * c2[i];
            }
            acc
        }
        Chart::Polar => {
            let tr = tan_k(kappa, coords[0]);
            let sr = sin_k(kappa, coords[0]);
            let mut acc = if beta[0] != 0.0 { (tr * tr).scale(beta[0]) } else { S::zero() };
            let inv_sr2 = S::one() / (sr * sr);
            // Π_{l=2..i} sin²θ_l, grown as i advances
            let mut sin_prod = S::one();
            for i in 1..n {
                let cth = coords[i].cos(); // θ_{i+1}
                if beta[i] != 0.0 {
                    acc = acc + (inv_sr2 / (cth * cth * sin_prod)).scale(beta[i]);
                }
                let sth = coords[i].sin();
                sin_prod = sin_prod * sth * sth;
            }
            if beta[n] != 0.0 {
                acc = acc + (inv_sr2 / sin_prod).scale(beta[n]);
            }
            acc
        }
    }
}

/// Ambient potential β₀ (Σ sₗ²)/s₀² + Σ βᵢ/sᵢ², the oracle for the chart
/// displays.
pub fn potential_ambient(s: &[f64], params: &SwParams) -> f64 {
    let beta = params.beta();
    let spatial: f64 = s[1..].iter().map(|x| x * x).sum();
    let mut acc = beta[0] * spatial / (s[0] * s[0]);
    for i in 1..s.len() {
        acc += beta[i] / (s[i] * s[i]);
    }
    acc
}

fn check_singularities(
    chart: Chart,
    coords: &[f64],
    params: &SwParams,
    kappa: Curvature,
) -> Result<(), SwError> {
    let s = chart_map(chart, coords, kappa);
    for (index, (si, bi)) in s.iter().zip(params.beta().iter()).enumerate() {
        if *bi != 0.0 && si.abs() < SINGULARITY_FLOOR {
            return Err(SwError::Singularity { index });
        }
    }
    Ok(())
}

/// SW potential at a validated chart point; errors on sᵢ = 0 with βᵢ ≠ 0.
pub fn potential(
    point: &ChartPoint,
    params: &SwParams,
    kappa: Curvature,
) -> Result<f64, SwError> {
    point.validate(kappa).map_err(PhaseError::from)?;
    check_singularities(point.chart, &point.coords, params, kappa)?;
    Ok(potential_generic(point.chart, &point.coords, params, kappa))
}

/// H = T + U, generic over the scalar type.
pub fn hamiltonian_generic<S: Scalar>(
    chart: Chart,
    coords: &[S],
    momenta: &[S],
    params: &SwParams,
    kappa: Curvature,
) -> S {
    kinetic_energy_generic(chart, coords, momenta, kappa)
        + potential_generic(chart, coords, params, kappa)
}

/// H = T + U at a state.
pub fn hamiltonian(
    state: &PhaseState,
    params: &SwParams,
    kappa: Curvature,
) -> Result<f64, SwError> {
    check_singularities(state.chart(), &state.point.coords, params, kappa)?;
    Ok(hamiltonian_generic(state.chart(), &state.point.coords, &state.momenta, params, kappa))
}

// ---------------------------------------------------------------------------
// Integrals of motion
// ---------------------------------------------------------------------------

/// Integral value in chart coordinates: the generator square plus the
/// coupling terms, written per chart.
pub fn integral_generic<S: Scalar>(
    id: IntegralId,
    chart: Chart,
    coords: &[S],
    momenta: &[S],
    params: &SwParams,
    kappa: Curvature,
) -> S {
    let n = coords.len();
    let beta = params.beta();
    let gen = RealizedGenerator::new(id.generator(), chart, n, kappa)
        .expect("integral id valid for dimension");
    let g = gen.eval_generic(coords, momenta);
    let quad = g * g;
    let (i, j) = (id.i, id.j);
    // ratio = sⱼ²/sᵢ² expressed per chart
    let ratio: S = match chart {
        Chart::Parallel => {
            let c2 = |l: usize| {
                let c = cos_k(kappa, coords[l - 1]);
                c * c
            };
            let s2 = |l: usize| {
                let s = sin_k(kappa, coords[l - 1]);
                s * s
            };
            if i == 0 {
                // S²(aⱼ)/Π_{l≤j}C²(a_l)
                let mut prefix = S::one();
                for l in 1..=j {
                    prefix = prefix * c2(l);
                }
                s2(j) / prefix
            } else {
                // S²(aⱼ)/(S²(aᵢ) Π_{i<l≤j}C²(a_l))
                let mut mid = S::one();
                for l in (i + 1)..=j {
                    mid = mid * c2(l);
                }
                s2(j) / (s2(i) * mid)
            }
        }
        Chart::Polar => {
            let sin2 = |m: usize| {
                let s = coords[m - 1].sin();
                s * s
            };
            let cos2 = |m: usize| {
                let c = coords[m - 1].cos();
                c * c
            };
            let sin_prod = |lo: usize, hi: usize| {
                let mut acc = S::one();
                for m in lo..=hi {
                    acc = acc * sin2(m);
                }
                acc
            };
            if i == 0 {
                let t = tan_k(kappa, coords[0]);
                let t2 = t * t;
                if j < n {
                    // T²(r) Π_{l=2..j+1}sin²θ_l / tan²θ_{j+1}
                    t2 * sin_prod(2, j + 1) * cos2(j + 1) / sin2(j + 1)
                } else {
                    t2 * sin_prod(2, n)
                }
            } else if j < n {
                // cos²θ_{j+1} Π_{i+1≤l≤j}sin²θ_l / cos²θ_{i+1}
                cos2(j + 1) * sin_prod(i + 1, j) / cos2(i + 1)
            } else {
                sin_prod(i + 1, n) / cos2(i + 1)
            }
        }
    };
    // zero couplings remove their term (and its singularity)
    let mut out = quad;
    if beta[i] != 0.0 {
        out = out + ratio.scale(2.0 * beta[i]);
    }
    if beta[j] != 0.0 {
        out = out + (S::one() / ratio).scale(2.0 * beta[j]);
    }
    out
}

/// Integral of motion at a state.
pub fn integral(
    id: IntegralId,
    state: &PhaseState,
    params: &SwParams,
    kappa: Curvature,
) -> Result<f64, SwError> {
    check_singularities(state.chart(), &state.point.coords, params, kappa)?;
    Ok(integral_generic(id, state.chart(), &state.point.coords, &state.momenta, params, kappa))
}

/// Ambient-form integral (sᵢṡⱼ - sⱼṡᵢ)² + 2βᵢsⱼ²/sᵢ² + 2βⱼsᵢ²/sⱼ², the
/// oracle for the chart expressions.
pub fn integral_ambient(
    id: IntegralId,
    state: &PhaseState,
    params: &SwParams,
    kappa: Curvature,
) -> f64 {
    let (s, sdot) =
        ambient_position_velocity(state.chart(), &state.point.coords, &state.momenta, kappa);
    let (i, j) = (id.i, id.j);
    let ang = s[i] * sdot[j] - s[j] * sdot[i];
    let beta = params.beta();
    ang * ang + 2.0 * beta[i] * (s[j] * s[j]) / (s[i] * s[i])
        + 2.0 * beta[j] * (s[i] * s[i]) / (s[j] * s[j])
}

/// Residual of the sum rule |2H - (Σ I₀ᵢ + κ Σ_{i<j} Iᵢⱼ + 2κ Σ βᵢ)|,
/// with every unordered pair counted once.
pub fn sum_rule_residual(
    state: &PhaseState,
    params: &SwParams,
    kappa: Curvature,
) -> Result<f64, SwError> {
    let n = state.n();
    let k = kappa.kappa();
    let h = hamiltonian(state, params, kappa)?;
    let mut acc = 0.0;
    for id in IntegralId::all(n) {
        let v = integral(id, state, params, kappa)?;
        if id.i == 0 {
            acc += v;
        } else {
            acc += k * v;
        }
    }
    acc += 2.0 * k * params.beta()[1..].iter().sum::<f64>();
    Ok((2.0 * h - acc).abs())
}

// ---------------------------------------------------------------------------
// Involutive families Q^(l), Q_(l)
// ---------------------------------------------------------------------------

/// Labels of the rotation integrals inside Q⁽ˡ⁾ = Σ_{1≤i<j≤l} Iᵢⱼ.
pub fn q_up_members(l: usize, n: usize) -> Result<Vec<IntegralId>, SwError> {
    if !(2..=n).contains(&l) {
        return Err(SwError::BadFamilyIndex { l, n });
    }
    let mut out = Vec::new();
    for i in 1..l {
        for j in (i + 1)..=l {
            out.push(IntegralId { i, j });
        }
    }
    Ok(out)
}

/// Labels inside Q₍ₗ₎ = Σ_{N-l+1≤i<j≤N} Iᵢⱼ.
pub fn q_down_members(l: usize, n: usize) -> Result<Vec<IntegralId>, SwError> {
    if !(2..=n).contains(&l) {
        return Err(SwError::BadFamilyIndex { l, n });
    }
    let lo = n - l + 1;
    let mut out = Vec::new();
    for i in lo..n {
        for j in (i + 1)..=n {
            out.push(IntegralId { i, j });
        }
    }
    Ok(out)
}

/// Q⁽ˡ⁾ at a state.
pub fn q_up(
    l: usize,
    state: &PhaseState,
    params: &SwParams,
    kappa: Curvature,
) -> Result<f64, SwError> {
    q_up_members(l, state.n())?
        .into_iter()
        .map(|id| integral(id, state, params, kappa))
        .sum()
}

/// Q₍ₗ₎ at a state.
pub fn q_down(
    l: usize,
    state: &PhaseState,
    params: &SwParams,
    kappa: Curvature,
) -> Result<f64, SwError> {
    q_down_members(l, state.n())?
        .into_iter()
        .map(|id| integral(id, state, params, kappa))
        .sum()
}

// ---------------------------------------------------------------------------
// Phase-function wrappers for the bracket engine
// ---------------------------------------------------------------------------

/// H = T + U as a phase function in a fixed chart.
#[derive(Clone, Debug)]
pub struct HamiltonianFn {
    pub chart: Chart,
    pub kappa: Curvature,
    pub params: SwParams,
}

impl PhaseFunction for HamiltonianFn {
    fn eval_generic<S: Scalar>(&self, coords: &[S], momenta: &[S]) -> S {
        hamiltonian_generic(self.chart, coords, momenta, &self.params, self.kappa)
    }
}

/// One integral of motion as a phase function.
#[derive(Clone, Debug)]
pub struct IntegralFn {
    pub id: IntegralId,
    pub chart: Chart,
    pub kappa: Curvature,
    pub params: SwParams,
}

impl PhaseFunction for IntegralFn {
    fn eval_generic<S: Scalar>(&self, coords: &[S], momenta: &[S]) -> S {
        integral_generic(self.id, self.chart, coords, momenta, &self.params, self.kappa)
    }
}

// ---------------------------------------------------------------------------
// Involution suite
// ---------------------------------------------------------------------------

/// Residual groups measured by [`verify_involution`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvolutionReport {
    pub n: usize,
    pub kappa: f64,
    pub chart: Chart,
    pub trials: usize,
    /// {Iᵢⱼ, H} for every integral.
    pub conservation: Vec<Check>,
    /// {Iᵢⱼ, Iₗₘ} over disjoint index pairs.
    pub disjoint_pairs: Vec<Check>,
    /// {Q⁽ˡ⁾, Q⁽ᵐ⁾} and {Q⁽ˡ⁾, H}; same for the down family.
    pub families: Vec<Check>,
    /// Sum-rule residual max over trial states.
    pub sum_rule: Check,
    /// Brackets the theory does not constrain, measured for the record:
    /// shared-index pairs like {I₀₁, I₀₂} and the {Q⁽ˡ⁾, I₀ᵢ} values.
    pub unconstrained: Vec<Measurement>,
    pub max_constrained_residual: f64,
    pub pass: bool,
}

/// Sweep random states and measure every bracket the structure theory
/// constrains: conservation, disjoint-pair commutation and the involutive
/// families, plus the sum rule.
pub fn verify_involution(
    n: usize,
    kappa: Curvature,
    params: &SwParams,
    chart: Chart,
    trials: usize,
    seed: u64,
) -> Result<InvolutionReport, SwError> {
    assert!(n >= 2);
    let ids = IntegralId::all(n);
    let h_fn = HamiltonianFn { chart, kappa, params: params.clone() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = StateSampler::new(n, kappa, chart);

    let n_ids = ids.len();
    let mut conservation = vec![0.0f64; n_ids];
    let mut disjoint: Vec<((usize, usize), f64)> = {
        let mut v = Vec::new();
        for a in 0..n_ids {
            for b in (a + 1)..n_ids {
                if ids[a].disjoint(&ids[b]) {
                    v.push(((a, b), 0.0));
                }
            }
        }
        v
    };
    // family labels: ("up"/"down", l, m) with m = 0 meaning H
    let ls: Vec<usize> = (2..=n).collect();
    let mut fam_up = vec![0.0f64; ls.len() * ls.len()];
    let mut fam_down = vec![0.0f64; ls.len() * ls.len()];
    let mut fam_up_h = vec![0.0f64; ls.len()];
    let mut fam_down_h = vec![0.0f64; ls.len()];
    let mut shared_pairs: Vec<((usize, usize), f64)> = {
        let mut v = Vec::new();
        for a in 0..n_ids {
            for b in (a + 1)..n_ids {
                if !ids[a].disjoint(&ids[b]) {
                    v.push(((a, b), 0.0));
                }
            }
        }
        v
    };
    let mut q_vs_i0: Vec<f64> = vec![0.0; ls.len()];
    let mut sum_rule_max = 0.0f64;

    for _ in 0..trials {
        let state = sampler.sample(&mut rng);
        let grads: Vec<Vec<f64>> = ids
            .iter()
            .map(|&id| {
                let f = IntegralFn { id, chart, kappa, params: params.clone() };
                gradient(&f, &state)
            })
            .collect();
        let dh = gradient(&h_fn, &state);

        for (i, di) in grads.iter().enumerate() {
            let r = bracket_from_gradients(di, &dh).abs();
            if r > conservation[i] {
                conservation[i] = r;
            }
        }
        for ((a, b), max) in disjoint.iter_mut() {
            let r = bracket_from_gradients(&grads[*a], &grads[*b]).abs();
            if r > *max {
                *max = r;
            }
        }
        for ((a, b), max) in shared_pairs.iter_mut() {
            let r = bracket_from_gradients(&grads[*a], &grads[*b]).abs();
            if r > *max {
                *max = r;
            }
        }

        // family gradients are sums of member gradients
        let family_grad = |members: &[IntegralId]| -> Vec<f64> {
            let mut acc = vec![0.0; 2 * n];
            for id in members {
                let idx = ids.iter().position(|x| x == id).unwrap();
                for (a, g) in acc.iter_mut().zip(grads[idx].iter()) {
                    *a += g;
                }
            }
            acc
        };
        let up_grads: Vec<Vec<f64>> =
            ls.iter().map(|&l| family_grad(&q_up_members(l, n).unwrap())).collect();
        let down_grads: Vec<Vec<f64>> =
            ls.iter().map(|&l| family_grad(&q_down_members(l, n).unwrap())).collect();
        for (a, ga) in up_grads.iter().enumerate() {
            for (b, gb) in up_grads.iter().enumerate().skip(a + 1) {
                let r = bracket_from_gradients(ga, gb).abs();
                let slot = a * ls.len() + b;
                if r > fam_up[slot] {
                    fam_up[slot] = r;
                }
            }
            let r = bracket_from_gradients(ga, &dh).abs();
            if r > fam_up_h[a] {
                fam_up_h[a] = r;
            }
        }
        for (a, ga) in down_grads.iter().enumerate() {
            for (b, gb) in down_grads.iter().enumerate().skip(a + 1) {
                let r = bracket_from_gradients(ga, gb).abs();
                let slot = a * ls.len() + b;
                if r > fam_down[slot] {
                    fam_down[slot] = r;
                }
            }
            let r = bracket_from_gradients(ga, &dh).abs();
            if r > fam_down_h[a] {
                fam_down_h[a] = r;
            }
        }
        // report-only: {Q^(l), I₀₁}
        let i01_idx = ids.iter().position(|id| id.i == 0 && id.j == 1).unwrap();
        for (a, ga) in up_grads.iter().enumerate() {
            let r = bracket_from_gradients(ga, &grads[i01_idx]).abs();
            if r > q_vs_i0[a] {
                q_vs_i0[a] = r;
            }
        }

        let sr = sum_rule_residual(&state, params, kappa)?;
        if sr > sum_rule_max {
            sum_rule_max = sr;
        }
    }

    let conservation: Vec<Check> = ids
        .iter()
        .zip(conservation.iter())
        .map(|(id, &r)| Check::new(format!("{{{}, H}}", id.name()), r, tol::CONSERVATION))
        .collect();
    let disjoint_pairs: Vec<Check> = disjoint
        .iter()
        .map(|&((a, b), r)| {
            Check::new(
                format!("{{{}, {}}}", ids[a].name(), ids[b].name()),
                r,
                tol::CONSERVATION,
            )
        })
        .collect();
    let mut families = Vec::new();
    for (a, &la) in ls.iter().enumerate() {
        for (b, &lb) in ls.iter().enumerate().skip(a + 1) {
            families.push(Check::new(
                format!("{{Q^({la}), Q^({lb})}}"),
                fam_up[a * ls.len() + b],
                tol::INVOLUTION,
            ));
            families.push(Check::new(
                format!("{{Q_({la}), Q_({lb})}}"),
                fam_down[a * ls.len() + b],
                tol::INVOLUTION,
            ));
        }
        families.push(Check::new(format!("{{Q^({la}), H}}"), fam_up_h[a], tol::INVOLUTION));
        families.push(Check::new(format!("{{Q_({la}), H}}"), fam_down_h[a], tol::INVOLUTION));
    }
    let mut unconstrained: Vec<Measurement> = shared_pairs
        .iter()
        .map(|&((a, b), r)| {
            Measurement::new(format!("{{{}, {}}}", ids[a].name(), ids[b].name()), r)
        })
        .collect();
    for (a, &la) in ls.iter().enumerate() {
        unconstrained.push(Measurement::new(format!("{{Q^({la}), I_0_1}}"), q_vs_i0[a]));
    }
    let sum_rule = Check::new("sum_rule", sum_rule_max, tol::SUM_RULE);

    let max_constrained_residual = conservation
        .iter()
        .chain(disjoint_pairs.iter())
        .chain(families.iter())
        .map(|c| c.residual)
        .fold(0.0, f64::max);
    let pass = crate::report::all_pass(&conservation)
        && crate::report::all_pass(&disjoint_pairs)
        && crate::report::all_pass(&families)
        && sum_rule.pass;

    Ok(InvolutionReport {
        n,
        kappa: kappa.kappa(),
        chart,
        trials,
        conservation,
        disjoint_pairs,
        families,
        sum_rule,
        unconstrained,
        max_constrained_residual,
        pass,
    })
}

// ---------------------------------------------------------------------------
// Independence certificate
// ---------------------------------------------------------------------------

/// Singular-value evidence at one sampled state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankSample {
    pub coords: Vec<f64>,
    pub momenta: Vec<f64>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// σ_smallest-kept / σ_max; the rank decision keeps σ > σ_max·cutoff.
    pub smallest_kept_ratio: f64,
}

/// Functional-independence certificate for the 2N-1 function set
/// {Q⁽²⁾..Q⁽ᴺ⁾, Q₍ᴺ₋₁₎..Q₍₂₎, I₀ᵢ, H}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndependenceCertificate {
    pub n: usize,
    pub kappa: f64,
    pub chart: Chart,
    pub beta: Vec<f64>,
    pub function_names: Vec<String>,
    pub expected_rank: usize,
    pub svd_cutoff: f64,
    pub samples: Vec<RankSample>,
    pub full_rank_fraction: f64,
    pub degenerate_beta_warning: bool,
    pub pass: bool,
}

/// Gradient rows of the independence set at a state: Q-family gradients are
/// sums of integral gradients; the last two rows are I₀ᵢ and H.
fn independence_jacobian(
    state: &PhaseState,
    params: &SwParams,
    kappa: Curvature,
    chart: Chart,
    fixed_i: usize,
) -> DMatrix<f64> {
    let n = state.n();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(2 * n - 1);
    let grad_of = |id: IntegralId| {
        let f = IntegralFn { id, chart, kappa, params: params.clone() };
        gradient(&f, state)
    };
    let sum_grads = |members: Vec<IntegralId>| {
        let mut acc = vec![0.0; 2 * n];
        for id in members {
            for (a, g) in acc.iter_mut().zip(grad_of(id).iter()) {
                *a += g;
            }
        }
        acc
    };
    for l in 2..=n {
        rows.push(sum_grads(q_up_members(l, n).unwrap()));
    }
    for l in (2..n).rev() {
        rows.push(sum_grads(q_down_members(l, n).unwrap()));
    }
    rows.push(grad_of(IntegralId { i: 0, j: fixed_i }));
    let h = HamiltonianFn { chart, kappa, params: params.clone() };
    rows.push(gradient(&h, state));

    DMatrix::from_fn(rows.len(), 2 * n, |r, c| rows[r][c])
}

/// Names of the independence set, in Jacobian row order.
pub fn independence_set_names(n: usize, fixed_i: usize) -> Vec<String> {
    let mut names: Vec<String> = (2..=n).map(|l| format!("Q^({l})")).collect();
    names.extend((2..n).rev().map(|l| format!("Q_({l})")));
    names.push(format!("I_0_{fixed_i}"));
    names.push("H".into());
    names
}

/// Certify maximal superintegrability: the (2N-1)×2N Jacobian of the
/// independence set has rank 2N-1 (SVD cutoff σ > σ_max·1e-8) at ≥95% of
/// sampled generic states.
pub fn independence_certificate(
    n: usize,
    kappa: Curvature,
    params: &SwParams,
    chart: Chart,
    samples: usize,
    fixed_i: usize,
    seed: u64,
) -> Result<IndependenceCertificate, SwError> {
    assert!(n >= 2);
    assert!((1..=n).contains(&fixed_i), "fixed translation index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = StateSampler::new(n, kappa, chart);
    let expected_rank = 2 * n - 1;
    let mut out_samples = Vec::with_capacity(samples);
    let mut full_rank = 0usize;
    for _ in 0..samples {
        let state = sampler.sample(&mut rng);
        let jac = independence_jacobian(&state, params, kappa, chart, fixed_i);
        let mut sv: Vec<f64> = jac.svd(false, false).singular_values.iter().cloned().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let sigma_max = sv[0];
        let cutoff = sigma_max * tol::RANK_SVD_CUTOFF;
        let rank = sv.iter().filter(|s| **s > cutoff).count();
        if rank == expected_rank {
            full_rank += 1;
        }
        let smallest_kept = sv[rank.saturating_sub(1).min(sv.len() - 1)];
        out_samples.push(RankSample {
            coords: state.point.coords.clone(),
            momenta: state.momenta.clone(),
            singular_values: sv,
            rank,
            smallest_kept_ratio: smallest_kept / sigma_max,
        });
    }
    let full_rank_fraction = full_rank as f64 / samples.max(1) as f64;
    Ok(IndependenceCertificate {
        n,
        kappa: kappa.kappa(),
        chart,
        beta: params.beta().to_vec(),
        function_names: independence_set_names(n, fixed_i),
        expected_rank,
        svd_cutoff: tol::RANK_SVD_CUTOFF,
        samples: out_samples,
        full_rank_fraction,
        degenerate_beta_warning: params.has_zero(),
        pass: full_rank_fraction >= tol::RANK_PASS_FRACTION,
    })
}

// ---------------------------------------------------------------------------
// Euclidean limit
// ---------------------------------------------------------------------------

/// Deviations between the curved system and the independent flat code.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EuclideanLimitReport {
    pub n: usize,
    pub trials: usize,
    /// (κ, max deviation over H and all integrals) per probed curvature.
    pub deviations: Vec<(f64, f64)>,
    /// Consecutive deviation ratios; linear κ-scaling puts them at the κ
    /// ratio (1e-2 here).
    pub ratios: Vec<f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Compare the curved system at κ ∈ {1e-4, 1e-6, 1e-8} against the flat SW
/// oracle on shared parallel-chart states; deviations must vanish linearly
/// in κ.
pub fn euclidean_limit_check(
    n: usize,
    params: &SwParams,
    trials: usize,
    seed: u64,
) -> Result<EuclideanLimitReport, SwError> {
    let kappas = [1e-4, 1e-6, 1e-8];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flat_kappa = Curvature::flat();
    let sampler = StateSampler::new(n, flat_kappa, Chart::Parallel);
    let states: Vec<PhaseState> = (0..trials).map(|_| sampler.sample(&mut rng)).collect();

    let mut deviations = Vec::new();
    for &kv in &kappas {
        let kappa = Curvature::new(kv).unwrap();
        let mut max_dev = 0.0f64;
        for state in &states {
            let q = &state.point.coords;
            let p = &state.momenta;
            let h_curved = hamiltonian(state, params, kappa)?;
            let h_flat = flat::hamiltonian(q, p, params.beta());
            max_dev = max_dev.max((h_curved - h_flat).abs());
            for id in IntegralId::all(n) {
                let curved = integral(id, state, params, kappa)?;
                let flat_val = flat::integral(id.i, id.j, q, p, params.beta());
                max_dev = max_dev.max((curved - flat_val).abs());
            }
        }
        deviations.push((kv, max_dev));
    }
    let ratios: Vec<f64> =
        deviations.windows(2).map(|w| w[1].1 / w[0].1).collect();

    let mut checks = vec![Check::new(
        "deviation at kappa=1e-8",
        deviations[2].1,
        tol::EUCLIDEAN_LIMIT,
    )];
    for (i, r) in ratios.iter().enumerate() {
        // linear scaling: ratio must sit at 1e-2 within 10%
        checks.push(Check::new(
            format!("linear-scaling ratio {}", i + 1),
            (r / 1e-2 - 1.0).abs(),
            0.1,
        ));
    }
    let pass = crate::report::all_pass(&checks);
    Ok(EuclideanLimitReport { n, trials, deviations, ratios, checks, pass })
}
