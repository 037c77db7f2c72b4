//! Phase space over S^N_[κ]: canonical momenta, kinetic energy, and the
//! realization of every so_κ(N+1) generator as a phase-space function.
//!
//! Three independent routes to the same generator values are provided:
//!
//! * `realize_parallel` — the explicit product/sum formulas in parallel
//!   canonical coordinates (a, p);
//! * `realize_polar` — the four formula families in polar canonical
//!   coordinates (r, θ; π);
//! * `realize_ambient` — p̃ᵢ = s₀ṡᵢ - sᵢṡ₀, J̃ᵢⱼ = sᵢṡⱼ - sⱼṡᵢ with the
//!   ambient velocities ṡ obtained from the chart velocity maps. This is
//!   the oracle the chart formulas are audited against.
//!
//! All evaluators are generic over [`Scalar`] so dual numbers pass through
//! and Poisson brackets downstream are exact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    chart_map, metric_diag, to_weierstrass, weierstrass_to_parallel, weierstrass_to_polar, Chart,
    ChartPoint, GeometryError,
};
use crate::ktrig::{cos_k, sin_k, tan_k, Curvature};
use crate::liealg::GeneratorId;
use crate::scalar::{lift, Dual, Scalar};

/// A chart point together with its conjugate momenta.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub point: ChartPoint,
    pub momenta: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum PhaseError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("expected {expected} momenta, got {got}")]
    MomentaLength { expected: usize, got: usize },
    #[error("momentum {index} is not finite")]
    NonFiniteMomentum { index: usize },
    #[error("generator {0:?} is not valid for dimension {1}")]
    InvalidGenerator(GeneratorId, usize),
    #[error("state is in the {state} chart but the function expects {expected}")]
    ChartMismatch { state: Chart, expected: Chart },
}

impl PhaseState {
    /// Validating constructor (strict chart-domain checks).
    pub fn new(point: ChartPoint, momenta: Vec<f64>, kappa: Curvature) -> Result<Self, PhaseError> {
        point.validate(kappa)?;
        if momenta.len() != point.dim() {
            return Err(PhaseError::MomentaLength { expected: point.dim(), got: momenta.len() });
        }
        if let Some(index) = momenta.iter().position(|p| !p.is_finite()) {
            return Err(PhaseError::NonFiniteMomentum { index });
        }
        Ok(Self { point, momenta })
    }

    /// Opt-out of domain validation.
    pub fn new_unchecked(point: ChartPoint, momenta: Vec<f64>) -> Self {
        Self { point, momenta }
    }

    pub fn n(&self) -> usize {
        self.point.dim()
    }

    pub fn chart(&self) -> Chart {
        self.point.chart
    }
}

// ---------------------------------------------------------------------------
// Momenta and kinetic energy
// ---------------------------------------------------------------------------

/// p = g(q)·q̇ for the diagonal chart metrics.
pub fn momenta_from_velocities(
    q: &ChartPoint,
    qdot: &[f64],
    kappa: Curvature,
) -> Result<Vec<f64>, PhaseError> {
    let g = crate::geometry::metric_at(q, kappa)?;
    Ok(g.diagonal().iter().zip(qdot).map(|(g, v)| g * v).collect())
}

/// q̇ = g(q)⁻¹·p.
pub fn velocities_from_momenta(
    q: &ChartPoint,
    momenta: &[f64],
    kappa: Curvature,
) -> Result<Vec<f64>, PhaseError> {
    let g = crate::geometry::metric_at(q, kappa)?;
    Ok(g.diagonal().iter().zip(momenta).map(|(g, p)| p / g).collect())
}

/// Kinetic energy T = ½ pᵀ g⁻¹ p, generic over the scalar type.
pub fn kinetic_energy_generic<S: Scalar>(
    chart: Chart,
    coords: &[S],
    momenta: &[S],
    kappa: Curvature,
) -> S {
    let g = metric_diag(chart, coords, kappa);
    let mut acc = S::zero();
    for (p, gi) in momenta.iter().zip(g.iter()) {
        acc = acc + *p * *p / *gi;
    }
    acc.scale(0.5)
}

/// Kinetic energy of a validated state.
pub fn kinetic_energy(state: &PhaseState, kappa: Curvature) -> f64 {
    kinetic_energy_generic(state.chart(), &state.point.coords, &state.momenta, kappa)
}

// ---------------------------------------------------------------------------
// Generator realizations
// ---------------------------------------------------------------------------

#[inline]
fn prod<S: Scalar>(xs: &[S]) -> S {
    xs.iter().fold(S::one(), |acc, &x| acc * x)
}

/// p̃ᵢ in parallel canonical coordinates (1-based i):
/// Π_{k=1..i} C_κ(a_k) · C_κ(aᵢ) pᵢ
///   + κ S_κ(aᵢ) Σ_{s=1..i} S_κ(a_s) [Π_{m=1..s} C_κ(a_m) / Π_{l=s..i} C_κ(a_l)] p_s.
/// The s = i term recombines with the leading one through C² + κS² = 1, which
/// is what collapses p̃₁ to p₁.
fn parallel_translation<S: Scalar>(i: usize, a: &[S], p: &[S], kappa: Curvature) -> S {
    let k = kappa.kappa();
    let c: Vec<S> = a.iter().map(|&x| cos_k(kappa, x)).collect();
    let s: Vec<S> = a.iter().map(|&x| sin_k(kappa, x)).collect();
    let lead = prod(&c[0..i]) * c[i - 1] * p[i - 1];
    if k == 0.0 {
        return lead;
    }
    let mut sum = S::zero();
    for si in 1..=i {
        let num = prod(&c[0..si]);
        let den = prod(&c[si - 1..i]);
        sum = sum + s[si - 1] * (num / den) * p[si - 1];
    }
    lead + (s[i - 1] * sum).scale(k)
}

/// J̃ᵢⱼ in parallel canonical coordinates (1-based i < j):
/// S_κ(aᵢ) C_κ(aⱼ) Π_{s=i+1..j} C_κ(a_s) pⱼ
///   - [C_κ(aᵢ) S_κ(aⱼ) / Π_{k=i+1..j} C_κ(a_k)] pᵢ
///   + κ S_κ(aᵢ) S_κ(aⱼ) Σ_{s=i+1..j} S_κ(a_s) [Π_{m=i+1..s} C_κ(a_m) / Π_{l=s..j} C_κ(a_l)] p_s.
fn parallel_rotation<S: Scalar>(i: usize, j: usize, a: &[S], p: &[S], kappa: Curvature) -> S {
    let k = kappa.kappa();
    let c: Vec<S> = a.iter().map(|&x| cos_k(kappa, x)).collect();
    let s: Vec<S> = a.iter().map(|&x| sin_k(kappa, x)).collect();
    let mid = prod(&c[i..j]);
    let t1 = s[i - 1] * c[j - 1] * mid * p[j - 1];
    let t2 = c[i - 1] * s[j - 1] / mid * p[i - 1];
    if k == 0.0 {
        return t1 - t2;
    }
    let mut sum = S::zero();
    for si in (i + 1)..=j {
        let num = prod(&c[i..si]);
        let den = prod(&c[si - 1..j]);
        sum = sum + s[si - 1] * (num / den) * p[si - 1];
    }
    t1 - t2 + (s[i - 1] * s[j - 1] * sum).scale(k)
}

/// sin/cos tables over the polar angles, indexed by the angle label
/// m = 2..N (entries 0 and 1 unused).
fn polar_angle_tables<S: Scalar>(coords: &[S]) -> (Vec<S>, Vec<S>) {
    let n = coords.len();
    let mut sth = vec![S::one(); n + 1];
    let mut cth = vec![S::one(); n + 1];
    for m in 2..=n {
        sth[m] = coords[m - 1].sin();
        cth[m] = coords[m - 1].cos();
    }
    (sth, cth)
}

#[inline]
fn prod_range<S: Scalar>(table: &[S], lo: usize, hi: usize) -> S {
    // Π_{m=lo..hi} table[m], empty when lo > hi
    if lo > hi {
        S::one()
    } else {
        prod(&table[lo..=hi])
    }
}

/// p̃ᵢ in polar canonical coordinates for i < N.
fn polar_translation<S: Scalar>(i: usize, coords: &[S], mom: &[S], kappa: Curvature) -> S {
    let n = coords.len();
    let (sth, cth) = polar_angle_tables(coords);
    let tkr = tan_k(kappa, coords[0]);
    if i < n {
        let tan_next = sth[i + 1] / cth[i + 1];
        let mut acc = prod_range(&sth, 2, i + 1) / tan_next * mom[0];
        for si in 2..=(i + 1) {
            let num = prod_range(&sth, si, i + 1) * cth[si];
            let den = tkr * tan_next * prod_range(&sth, 2, si);
            acc = acc + num / den * mom[si - 1];
        }
        acc - mom[i] / (tkr * prod_range(&sth, 2, i + 1))
    } else {
        let mut acc = prod_range(&sth, 2, n) * mom[0];
        for si in 2..=n {
            let num = prod_range(&sth, si, n) * cth[si];
            let den = tkr * prod_range(&sth, 2, si);
            acc = acc + num / den * mom[si - 1];
        }
        acc
    }
}

/// J̃ᵢⱼ in polar canonical coordinates (i < j ≤ N).
fn polar_rotation<S: Scalar>(i: usize, j: usize, coords: &[S], mom: &[S], _kappa: Curvature) -> S {
    let n = coords.len();
    let (sth, cth) = polar_angle_tables(coords);
    if j < n {
        let mid = prod_range(&sth, i + 1, j);
        let t1 = sth[i + 1] * cth[j + 1] * mid * mom[i];
        let t2 = cth[i + 1] * sth[j + 1] / mid * mom[j];
        let mut sum = S::zero();
        for si in (i + 1)..=j {
            sum = sum + prod_range(&sth, si, j) * cth[si] / prod_range(&sth, i + 1, si) * mom[si - 1];
        }
        t1 - t2 + cth[i + 1] * cth[j + 1] * sum
    } else {
        let t1 = sth[i + 1] * prod_range(&sth, i + 1, n) * mom[i];
        let mut sum = S::zero();
        for si in (i + 1)..=n {
            sum = sum + prod_range(&sth, si, n) * cth[si] / prod_range(&sth, i + 1, si) * mom[si - 1];
        }
        t1 + cth[i + 1] * sum
    }
}

/// A generator realized as a phase-space function in a fixed chart.
///
/// Immutable after construction; evaluation is pure and linear in the
/// momenta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealizedGenerator {
    id: GeneratorId,
    chart: Chart,
    n: usize,
    kappa: Curvature,
}

impl RealizedGenerator {
    pub fn new(
        id: GeneratorId,
        chart: Chart,
        n: usize,
        kappa: Curvature,
    ) -> Result<Self, PhaseError> {
        id.check(n).map_err(|_| PhaseError::InvalidGenerator(id, n))?;
        Ok(Self { id, chart, n, kappa })
    }

    pub fn id(&self) -> GeneratorId {
        self.id
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn eval_generic<S: Scalar>(&self, coords: &[S], momenta: &[S]) -> S {
        match (self.chart, self.id) {
            (Chart::Parallel, GeneratorId::Translation(i)) => {
                parallel_translation(i, coords, momenta, self.kappa)
            }
            (Chart::Parallel, GeneratorId::Rotation(i, j)) => {
                parallel_rotation(i, j, coords, momenta, self.kappa)
            }
            (Chart::Polar, GeneratorId::Translation(i)) => {
                polar_translation(i, coords, momenta, self.kappa)
            }
            (Chart::Polar, GeneratorId::Rotation(i, j)) => {
                polar_rotation(i, j, coords, momenta, self.kappa)
            }
        }
    }

    pub fn evaluate(&self, state: &PhaseState) -> Result<f64, PhaseError> {
        if state.chart() != self.chart {
            return Err(PhaseError::ChartMismatch { state: state.chart(), expected: self.chart });
        }
        Ok(self.eval_generic(&state.point.coords, &state.momenta))
    }
}

/// Generator realization in parallel canonical coordinates.
pub fn realize_parallel(
    id: GeneratorId,
    n: usize,
    kappa: Curvature,
) -> Result<RealizedGenerator, PhaseError> {
    RealizedGenerator::new(id, Chart::Parallel, n, kappa)
}

/// Generator realization in polar canonical coordinates.
pub fn realize_polar(
    id: GeneratorId,
    n: usize,
    kappa: Curvature,
) -> Result<RealizedGenerator, PhaseError> {
    RealizedGenerator::new(id, Chart::Polar, n, kappa)
}

/// All N(N+1)/2 realized generators for one chart.
pub fn realize_all(
    chart: Chart,
    n: usize,
    kappa: Curvature,
) -> Result<Vec<RealizedGenerator>, PhaseError> {
    GeneratorId::all(n)
        .into_iter()
        .map(|id| RealizedGenerator::new(id, chart, n, kappa))
        .collect()
}

// ---------------------------------------------------------------------------
// Ambient oracle
// ---------------------------------------------------------------------------

/// Ambient velocities ṡ from parallel coordinates and velocities:
/// ṡ₀ = -κ Π C_κ(a_m) Σ T_κ(a_l) ȧ_l,
/// ṡᵢ = Π_{m=i..N} C_κ(a_m) (ȧᵢ - κ T_κ(aᵢ) Σ_{l>i} T_κ(a_l) ȧ_l).
pub fn parallel_velocity_map<S: Scalar>(a: &[S], adot: &[S], kappa: Curvature) -> Vec<S> {
    let n = a.len();
    let k = kappa.kappa();
    let c: Vec<S> = a.iter().map(|&x| cos_k(kappa, x)).collect();
    let t: Vec<S> = a.iter().map(|&x| tan_k(kappa, x)).collect();
    // tail[i] = Σ_{l=i+1..N} T_κ(a_l) ȧ_l (1-based i), tail[n] = 0
    let mut tail = vec![S::zero(); n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + t[i] * adot[i];
    }
    let mut sdot = vec![S::zero(); n + 1];
    sdot[0] = (prod(&c) * tail[0]).scale(-k);
    for i in 1..=n {
        let pref = prod(&c[i - 1..n]);
        sdot[i] = pref * (adot[i - 1] - (t[i - 1] * tail[i]).scale(k));
    }
    sdot
}

/// Ambient velocities ṡ from polar coordinates and velocities:
/// ṡ₀ = -κ S_κ(r) ṙ,
/// ṡⱼ = S_κ(r) Π_{m=2..j+1} sinθ_m (ṙ/(T_κ(r) tanθ_{j+1})
///        + Σ_{l=2..j} θ̇_l/(tanθ_l tanθ_{j+1}) - θ̇_{j+1}) for j < N,
/// ṡ_N = S_κ(r) Π_{m=2..N} sinθ_m (ṙ/T_κ(r) + Σ_{l=2..N} θ̇_l/tanθ_l).
pub fn polar_velocity_map<S: Scalar>(coords: &[S], qdot: &[S], kappa: Curvature) -> Vec<S> {
    let n = coords.len();
    let k = kappa.kappa();
    let r = coords[0];
    let rdot = qdot[0];
    let sr = sin_k(kappa, r);
    let tkr = tan_k(kappa, r);
    let (sth, cth) = polar_angle_tables(coords);
    let mut sdot = vec![S::zero(); n + 1];
    sdot[0] = (sr * rdot).scale(-k);
    // cumulative Σ_{l=2..j} θ̇_l / tanθ_l
    let mut cum = S::zero();
    for j in 1..n {
        let tan_next = sth[j + 1] / cth[j + 1];
        let inner = rdot / (tkr * tan_next) + cum / tan_next - qdot[j];
        sdot[j] = sr * prod_range(&sth, 2, j + 1) * inner;
        cum = cum + qdot[j] / (sth[j + 1] / cth[j + 1]);
    }
    sdot[n] = sr * prod_range(&sth, 2, n) * (rdot / tkr + cum);
    sdot
}

/// Ambient position and velocity of a state, with velocities recovered from
/// the momenta through the inverse metric.
pub fn ambient_position_velocity<S: Scalar>(
    chart: Chart,
    coords: &[S],
    momenta: &[S],
    kappa: Curvature,
) -> (Vec<S>, Vec<S>) {
    let s = chart_map(chart, coords, kappa);
    let g = metric_diag(chart, coords, kappa);
    let qdot: Vec<S> = momenta.iter().zip(g.iter()).map(|(p, g)| *p / *g).collect();
    let sdot = match chart {
        Chart::Parallel => parallel_velocity_map(coords, &qdot, kappa),
        Chart::Polar => polar_velocity_map(coords, &qdot, kappa),
    };
    (s, sdot)
}

/// Generator value from the ambient definition; the independent oracle for
/// `realize_parallel` / `realize_polar`.
pub fn realize_ambient(
    id: GeneratorId,
    state: &PhaseState,
    kappa: Curvature,
) -> Result<f64, PhaseError> {
    id.check(state.n()).map_err(|_| PhaseError::InvalidGenerator(id, state.n()))?;
    let (s, sdot) =
        ambient_position_velocity(state.chart(), &state.point.coords, &state.momenta, kappa);
    Ok(match id {
        GeneratorId::Translation(i) => s[0] * sdot[i] - s[i] * sdot[0],
        GeneratorId::Rotation(i, j) => s[i] * sdot[j] - s[j] * sdot[i],
    })
}

/// Casimir realization Σ p̃ᵢ² + κ Σ_{i<j} J̃ᵢⱼ², which must equal 2T.
pub fn casimir_value(state: &PhaseState, kappa: Curvature) -> Result<f64, PhaseError> {
    let n = state.n();
    let k = kappa.kappa();
    let mut acc = 0.0;
    for id in GeneratorId::all(n) {
        let gen = RealizedGenerator::new(id, state.chart(), n, kappa)?;
        let v = gen.evaluate(state)?;
        match id {
            GeneratorId::Translation(_) => acc += v * v,
            GeneratorId::Rotation(_, _) => acc += k * v * v,
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Chart conversion
// ---------------------------------------------------------------------------

/// Re-express a state in the other chart: same ambient position and
/// velocity, momenta rebuilt through the target metric. The target
/// velocities solve the (N+1)×N ambient Jacobian system J q̇ = ṡ in the
/// least-squares sense (ṡ is tangent, so the solve is exact to rounding).
pub fn convert_state(
    state: &PhaseState,
    target: Chart,
    kappa: Curvature,
) -> Result<PhaseState, PhaseError> {
    if state.chart() == target {
        return Ok(state.clone());
    }
    let n = state.n();
    let w = to_weierstrass(&state.point, kappa)?;
    let (_, sdot) =
        ambient_position_velocity(state.chart(), &state.point.coords, &state.momenta, kappa);
    let target_point = match target {
        Chart::Parallel => weierstrass_to_parallel(&w, kappa)?,
        Chart::Polar => weierstrass_to_polar(&w, kappa)?,
    };
    // ambient Jacobian of the target chart map, one dual pass per column
    let mut jac = nalgebra::DMatrix::zeros(n + 1, n);
    for c in 0..n {
        let mut lifted: Vec<Dual> = lift(&target_point.coords);
        lifted[c] = Dual::variable(target_point.coords[c]);
        let s = chart_map(target, &lifted, kappa);
        for r in 0..=n {
            jac[(r, c)] = s[r].d;
        }
    }
    let rhs = nalgebra::DVector::from_row_slice(&sdot);
    let qdot = jac
        .svd(true, true)
        .solve(&rhs, 0.0)
        .expect("least-squares solve of the chart Jacobian");
    let momenta = momenta_from_velocities(&target_point, qdot.as_slice(), kappa)?;
    PhaseState::new(target_point, momenta, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::StateSampler;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    #[test]
    fn momenta_round_trip() {
        let q = ChartPoint::parallel(vec![0.3, -0.6, 0.9]);
        let qdot = vec![1.2, -0.4, 0.7];
        let p = momenta_from_velocities(&q, &qdot, k(0.7)).unwrap();
        let back = velocities_from_momenta(&q, &p, k(0.7)).unwrap();
        for (a, b) in qdot.iter().zip(back.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
        // flat: identity
        let p = momenta_from_velocities(&q, &qdot, k(0.0)).unwrap();
        assert_eq!(p, qdot);
    }

    #[test]
    fn polar_momenta_example() {
        // N=2, κ=1, r=π/2: π₂ = sin²(π/2)·θ̇₂ = 3
        let q = ChartPoint::polar(vec![std::f64::consts::FRAC_PI_2, 0.8]);
        let p = momenta_from_velocities(&q, &[0.0, 3.0], k(1.0)).unwrap();
        assert_relative_eq!(p[1], 3.0, max_relative = 1e-15);
    }

    #[test]
    fn kinetic_energy_flat_and_zero() {
        let q = ChartPoint::parallel(vec![0.4, 1.1]);
        let state = PhaseState::new(q.clone(), vec![0.0, 0.0], k(1.0)).unwrap();
        assert_eq!(kinetic_energy(&state, k(1.0)), 0.0);
        let state = PhaseState::new(q, vec![2.0, -1.0], k(0.0)).unwrap();
        assert_relative_eq!(kinetic_energy(&state, k(0.0)), 0.5 * (4.0 + 1.0));
    }

    #[test]
    fn parallel_p1_is_p1() {
        // p̃₁ = p₁ in any dimension and curvature
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &kv in &[-1.0, 0.0, 1.0] {
            for n in 2..=5 {
                let sampler = StateSampler::new(n, k(kv), Chart::Parallel);
                let state = sampler.sample(&mut rng);
                let gen = realize_parallel(GeneratorId::Translation(1), n, k(kv)).unwrap();
                assert_relative_eq!(
                    gen.evaluate(&state).unwrap(),
                    state.momenta[0],
                    max_relative = 1e-15
                );
            }
        }
    }

    #[test]
    fn flat_reduction_is_exact() {
        // κ=0: p̃ᵢ = pᵢ and J̃ᵢⱼ = aᵢpⱼ - aⱼpᵢ, bitwise
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..=5 {
            let sampler = StateSampler::new(n, k(0.0), Chart::Parallel);
            for _ in 0..50 {
                let state = sampler.sample(&mut rng);
                let a = &state.point.coords;
                let p = &state.momenta;
                for id in GeneratorId::all(n) {
                    let gen = realize_parallel(id, n, k(0.0)).unwrap();
                    let v = gen.evaluate(&state).unwrap();
                    match id {
                        GeneratorId::Translation(i) => assert_eq!(v, p[i - 1]),
                        GeneratorId::Rotation(i, j) => {
                            assert_eq!(v, a[i - 1] * p[j - 1] - a[j - 1] * p[i - 1])
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn polar_p1_low_dimensional_formula() {
        // N=2, κ=1: p̃₁ = cosθ₂ π₁ - (sinθ₂ / tan r) π₂
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sampler = StateSampler::new(2, k(1.0), Chart::Polar);
        for _ in 0..30 {
            let state = sampler.sample(&mut rng);
            let (r, th) = (state.point.coords[0], state.point.coords[1]);
            let (p1, p2) = (state.momenta[0], state.momenta[1]);
            let expected = th.cos() * p1 - th.sin() / r.tan() * p2;
            let gen = realize_polar(GeneratorId::Translation(1), 2, k(1.0)).unwrap();
            assert_relative_eq!(gen.evaluate(&state).unwrap(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_momenta_kill_every_generator() {
        for &chart in &[Chart::Parallel, Chart::Polar] {
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let sampler = StateSampler::new(4, k(-1.0), chart);
            let mut state = sampler.sample(&mut rng);
            state.momenta.iter_mut().for_each(|p| *p = 0.0);
            for id in GeneratorId::all(4) {
                let gen = RealizedGenerator::new(id, chart, 4, k(-1.0)).unwrap();
                assert_eq!(gen.evaluate(&state).unwrap(), 0.0);
                assert_eq!(realize_ambient(id, &state, k(-1.0)).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn linearity_in_momenta_exact_for_power_of_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for &chart in &[Chart::Parallel, Chart::Polar] {
            for &kv in &[-1.0, 0.0, 1.0] {
                let sampler = StateSampler::new(3, k(kv), chart);
                let state = sampler.sample(&mut rng);
                let scaled = PhaseState::new_unchecked(
                    state.point.clone(),
                    state.momenta.iter().map(|p| 2.0 * p).collect(),
                );
                for id in GeneratorId::all(3) {
                    let gen = RealizedGenerator::new(id, chart, 3, k(kv)).unwrap();
                    let v = gen.evaluate(&state).unwrap();
                    let v2 = gen.evaluate(&scaled).unwrap();
                    assert_eq!(v2, 2.0 * v, "exact doubling fails for {id:?} in {chart}");
                }
            }
        }
    }

    #[test]
    fn chart_formulas_match_ambient_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for &chart in &[Chart::Parallel, Chart::Polar] {
            for &kv in &[-1.0, -0.1, 0.0, 0.1, 1.0] {
                for n in 2..=5 {
                    let sampler = StateSampler::new(n, k(kv), chart);
                    for _ in 0..40 {
                        let state = sampler.sample(&mut rng);
                        for id in GeneratorId::all(n) {
                            let gen = RealizedGenerator::new(id, chart, n, k(kv)).unwrap();
                            let direct = gen.evaluate(&state).unwrap();
                            let oracle = realize_ambient(id, &state, k(kv)).unwrap();
                            assert_abs_diff_eq!(direct, oracle, epsilon = 1e-11);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn velocity_maps_match_dual_directional_derivative() {
        // ṡ formulas vs d/dt of the chart map along q̇, via duals
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for &chart in &[Chart::Parallel, Chart::Polar] {
            for &kv in &[-0.7, 0.0, 1.0] {
                let n = 4;
                let sampler = StateSampler::new(n, k(kv), chart);
                let state = sampler.sample(&mut rng);
                let qdot = velocities_from_momenta(&state.point, &state.momenta, k(kv)).unwrap();
                let coords = &state.point.coords;
                let sdot = match chart {
                    Chart::Parallel => parallel_velocity_map(coords, &qdot, k(kv)),
                    Chart::Polar => polar_velocity_map(coords, &qdot, k(kv)),
                };
                // directional derivative: seed every coordinate with its velocity
                let lifted: Vec<Dual> = coords
                    .iter()
                    .zip(qdot.iter())
                    .map(|(&x, &v)| Dual::new(x, v))
                    .collect();
                let s_dual = chart_map(chart, &lifted, k(kv));
                for (a, b) in sdot.iter().zip(s_dual.iter()) {
                    assert_abs_diff_eq!(a, &b.d, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn casimir_equals_twice_kinetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for &chart in &[Chart::Parallel, Chart::Polar] {
            for &kv in &[-1.0, 0.0, 1.0] {
                for n in 2..=4 {
                    let sampler = StateSampler::new(n, k(kv), chart);
                    for _ in 0..50 {
                        let state = sampler.sample(&mut rng);
                        let c = casimir_value(&state, k(kv)).unwrap();
                        let t = kinetic_energy(&state, k(kv));
                        assert_abs_diff_eq!(c, 2.0 * t, epsilon = 1e-11);
                    }
                }
            }
        }
    }

    #[test]
    fn state_conversion_preserves_generators_and_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for &kv in &[-1.0, 0.5, 1.0] {
            for n in 2..=4 {
                // positive-octant parallel states so the polar principal
                // branch covers them
                let sampler = StateSampler::new(n, k(kv), Chart::Parallel).positive_octant();
                for _ in 0..20 {
                    let state = sampler.sample(&mut rng);
                    let polar = convert_state(&state, Chart::Polar, k(kv)).unwrap();
                    assert_eq!(polar.chart(), Chart::Polar);
                    let t1 = kinetic_energy(&state, k(kv));
                    let t2 = kinetic_energy(&polar, k(kv));
                    assert_abs_diff_eq!(t1, t2, epsilon = 1e-11);
                    for id in GeneratorId::all(n) {
                        let a = RealizedGenerator::new(id, Chart::Parallel, n, k(kv))
                            .unwrap()
                            .evaluate(&state)
                            .unwrap();
                        let b = RealizedGenerator::new(id, Chart::Polar, n, k(kv))
                            .unwrap()
                            .evaluate(&polar)
                            .unwrap();
                        assert_abs_diff_eq!(a, b, epsilon = 1e-11);
                    }
                    let back = convert_state(&polar, Chart::Parallel, k(kv)).unwrap();
                    for (x, y) in state.point.coords.iter().zip(back.point.coords.iter()) {
                        assert_abs_diff_eq!(x, y, epsilon = 1e-10);
                    }
                    for (x, y) in state.momenta.iter().zip(back.momenta.iter()) {
                        assert_abs_diff_eq!(x, y, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn chart_mismatch_is_rejected() {
        let state = PhaseState::new(ChartPoint::parallel(vec![0.1, 0.2]), vec![0.0, 0.0], k(1.0))
            .unwrap();
        let gen = realize_polar(GeneratorId::Translation(1), 2, k(1.0)).unwrap();
        assert!(matches!(gen.evaluate(&state), Err(PhaseError::ChartMismatch { .. })));
    }
}
