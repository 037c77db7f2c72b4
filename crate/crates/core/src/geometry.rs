//! Coordinate charts on the constant-curvature space S^N_[κ].
//!
//! The space is modeled as the quadric Σ: s₀² + κ Σᵢ sᵢ² = 1 in ambient
//! Weierstrass coordinates (s₀, ..., s_N). Two intrinsic charts are
//! provided:
//!
//! * geodesic *parallel* coordinates (a₁, ..., a_N), all lengths, built by
//!   successive translations exp(aᵢ Pᵢ) from the origin O = (1, 0, ..., 0);
//! * geodesic *polar* coordinates (r, θ₂, ..., θ_N), one radial length and
//!   N-1 angles, built as exp(θ_N J_{N-1,N})···exp(θ₂ J₁₂) exp(r P₁) O.
//!
//! Both charts have diagonal metrics. Chart maps are generic over the
//! scalar type so dual numbers flow through for exact differentiation.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ktrig::{checked_tan_k, cos_k, sin_k, Curvature};
use crate::scalar::{lift, Dual, Scalar};
use crate::tol;

/// Which intrinsic chart a coordinate vector lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Parallel,
    Polar,
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Chart::Parallel => write!(f, "parallel"),
            Chart::Polar => write!(f, "polar"),
        }
    }
}

/// A point of S^N_[κ] in one of the two intrinsic charts.
///
/// Parallel: `coords = [a₁, ..., a_N]`. Polar: `coords = [r, θ₂, ..., θ_N]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: Chart,
    pub coords: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("need at least 2 coordinates, got {0}")]
    DimensionTooSmall(usize),
    #[error("coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },
    #[error("parallel chart boundary: |a_{index}| must stay below pi/(2 sqrt(kappa))")]
    ParallelOutOfDomain { index: usize },
    #[error("polar chart singular: {reason}")]
    PolarSingular { reason: String },
    #[error("metric coefficient {index} vanishes at this point")]
    SingularMetric { index: usize },
    #[error("Christoffel pole: {0}")]
    ChristoffelPole(String),
    #[error("point does not satisfy the quadric constraint (defect {defect:e})")]
    OffQuadric { defect: f64 },
    #[error("point is outside the principal branch of the inverse chart (defect {defect:e})")]
    OutsidePrincipalBranch { defect: f64 },
}

impl ChartPoint {
    pub fn parallel(coords: Vec<f64>) -> Self {
        Self { chart: Chart::Parallel, coords }
    }

    pub fn polar(coords: Vec<f64>) -> Self {
        Self { chart: Chart::Polar, coords }
    }

    /// Space dimension N.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Strict chart-domain validation.
    ///
    /// Parallel, κ > 0: |aᵢ| < π/(2√κ) for i < N (the momenta formulas
    /// divide by C_κ(aᵢ)). Polar: S_κ(r) ≠ 0 and sin θ_l ≠ 0 for
    /// l = 2..N-1. Construction through [`ChartPoint::parallel`] /
    /// [`ChartPoint::polar`] skips this; callers that accept external data
    /// should validate.
    pub fn validate(&self, kappa: Curvature) -> Result<(), GeometryError> {
        let n = self.dim();
        if n < 2 {
            return Err(GeometryError::DimensionTooSmall(n));
        }
        for (index, c) in self.coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(GeometryError::NonFiniteCoordinate { index });
            }
        }
        match self.chart {
            Chart::Parallel => {
                if kappa.kappa() > 0.0 {
                    let bound = std::f64::consts::FRAC_PI_2 / kappa.kappa().sqrt();
                    for i in 0..n - 1 {
                        if self.coords[i].abs() >= bound {
                            return Err(GeometryError::ParallelOutOfDomain { index: i + 1 });
                        }
                    }
                }
            }
            Chart::Polar => {
                let r = self.coords[0];
                if sin_k(kappa, r) == 0.0 {
                    return Err(GeometryError::PolarSingular {
                        reason: format!("S_k(r) = 0 at r = {r}"),
                    });
                }
                for l in 2..n {
                    // θ_l for l = 2..N-1 sits at coords[l-1]
                    if self.coords[l - 1].sin() == 0.0 {
                        return Err(GeometryError::PolarSingular {
                            reason: format!("sin(theta_{l}) = 0"),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Ambient Weierstrass coordinates of a point on the quadric Σ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassPoint {
    s: Vec<f64>,
}

impl WeierstrassPoint {
    /// Wrap ambient coordinates, checking the quadric constraint.
    pub fn new(s: Vec<f64>, kappa: Curvature) -> Result<Self, GeometryError> {
        let defect = quadric_defect(&s, kappa);
        if defect > tol::QUADRIC_CONSTRAINT {
            return Err(GeometryError::OffQuadric { defect });
        }
        Ok(Self { s })
    }

    pub fn components(&self) -> &[f64] {
        &self.s
    }

    /// Space dimension N (one less than the ambient dimension).
    pub fn dim(&self) -> usize {
        self.s.len() - 1
    }
}

/// |s₀² + κ Σ sᵢ² - 1|
pub fn quadric_defect(s: &[f64], kappa: Curvature) -> f64 {
    let spatial: f64 = s[1..].iter().map(|x| x * x).sum();
    (s[0] * s[0] + kappa.kappa() * spatial - 1.0).abs()
}

/// Origin O = (1, 0, ..., 0) of S^N_[κ].
pub fn origin(n: usize) -> Vec<f64> {
    let mut o = vec![0.0; n + 1];
    o[0] = 1.0;
    o
}

// ---------------------------------------------------------------------------
// Chart maps (generic over the scalar type)
// ---------------------------------------------------------------------------

/// Parallel chart map: s₀ = Π C_κ(a_l), sᵢ = S_κ(aᵢ) Π_{l>i} C_κ(a_l).
pub fn parallel_map<S: Scalar>(a: &[S], kappa: Curvature) -> Vec<S> {
    let n = a.len();
    let mut s = vec![S::zero(); n + 1];
    // suffix products of C_κ: suffix[i] = Π_{l>i} C_κ(a_l), 1-based i
    let mut suffix = S::one();
    s[n] = sin_k(kappa, a[n - 1]);
    for i in (1..n).rev() {
        suffix = suffix * cos_k(kappa, a[i]); // a_{i+1} in 1-based terms
        s[i] = sin_k(kappa, a[i - 1]) * suffix;
    }
    s[0] = suffix * cos_k(kappa, a[0]);
    s
}

/// Polar chart map: s₀ = C_κ(r), sᵢ = S_κ(r) sinθ₂···sinθᵢ cosθ_{i+1},
/// s_N = S_κ(r) sinθ₂···sinθ_N.
pub fn polar_map<S: Scalar>(coords: &[S], kappa: Curvature) -> Vec<S> {
    let n = coords.len();
    let r = coords[0];
    let sr = sin_k(kappa, r);
    let mut s = vec![S::zero(); n + 1];
    s[0] = cos_k(kappa, r);
    let mut running = sr; // S_κ(r) · sinθ₂ ··· sinθ_i as we walk outward
    for i in 1..n {
        let theta = coords[i]; // θ_{i+1}
        s[i] = running * theta.cos();
        running = running * theta.sin();
    }
    s[n] = running;
    s
}

/// Chart-dispatching map to ambient coordinates.
pub fn chart_map<S: Scalar>(chart: Chart, coords: &[S], kappa: Curvature) -> Vec<S> {
    match chart {
        Chart::Parallel => parallel_map(coords, kappa),
        Chart::Polar => polar_map(coords, kappa),
    }
}

/// Typed wrapper: parallel chart point to the quadric.
pub fn parallel_to_weierstrass(
    q: &ChartPoint,
    kappa: Curvature,
) -> Result<WeierstrassPoint, GeometryError> {
    assert_eq!(q.chart, Chart::Parallel, "expected a parallel-chart point");
    q.validate(kappa)?;
    WeierstrassPoint::new(parallel_map(&q.coords, kappa), kappa)
}

/// Typed wrapper: polar chart point to the quadric.
pub fn polar_to_weierstrass(
    q: &ChartPoint,
    kappa: Curvature,
) -> Result<WeierstrassPoint, GeometryError> {
    assert_eq!(q.chart, Chart::Polar, "expected a polar-chart point");
    q.validate(kappa)?;
    WeierstrassPoint::new(polar_map(&q.coords, kappa), kappa)
}

/// Chart point (either chart) to the quadric.
pub fn to_weierstrass(q: &ChartPoint, kappa: Curvature) -> Result<WeierstrassPoint, GeometryError> {
    q.validate(kappa)?;
    WeierstrassPoint::new(chart_map(q.chart, &q.coords, kappa), kappa)
}

// ---------------------------------------------------------------------------
// Inverse charts
// ---------------------------------------------------------------------------

fn arcsin_k(kappa: Curvature, y: f64) -> f64 {
    let k = kappa.kappa();
    if k > 0.0 {
        let rk = k.sqrt();
        (rk * y).clamp(-1.0, 1.0).asin() / rk
    } else if k < 0.0 {
        let rk = (-k).sqrt();
        (rk * y).asinh() / rk
    } else {
        y
    }
}

/// Invert the parallel chart by back-substitution on its triangular
/// structure: solve a_N from s_N first, then peel the suffix C_κ products.
///
/// Principal branch: every aᵢ lands in [-π/(2√κ), π/(2√κ)] for κ > 0, so
/// points beyond the "equator" s₀ = 0 are rejected (round-trip defect).
pub fn weierstrass_to_parallel(
    w: &WeierstrassPoint,
    kappa: Curvature,
) -> Result<ChartPoint, GeometryError> {
    let s = w.components();
    let n = w.dim();
    let mut a = vec![0.0; n];
    let mut suffix = 1.0; // Π_{l>i} C_κ(a_l)
    for i in (1..=n).rev() {
        let ai = arcsin_k(kappa, s[i] / suffix);
        a[i - 1] = ai;
        suffix *= cos_k(kappa, ai);
    }
    let q = ChartPoint::parallel(a);
    let back = parallel_map(&q.coords, kappa);
    let defect = back
        .iter()
        .zip(s.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if defect > 1e-9 {
        return Err(GeometryError::OutsidePrincipalBranch { defect });
    }
    Ok(q)
}

/// Invert the polar chart. Principal branch: r ≥ 0, θ_l ∈ [0, π] for
/// l = 2..N-1, θ_N ∈ (-π, π].
pub fn weierstrass_to_polar(
    w: &WeierstrassPoint,
    kappa: Curvature,
) -> Result<ChartPoint, GeometryError> {
    let s = w.components();
    let n = w.dim();
    let k = kappa.kappa();
    // S_κ(r) = ‖(s₁..s_N)‖ on the quadric, taking the r ≥ 0 root.
    let sr = s[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if sr == 0.0 {
        return Err(GeometryError::PolarSingular {
            reason: "point is at a pole of the polar chart (S_k(r) = 0)".into(),
        });
    }
    let r = if k > 0.0 {
        let rk = k.sqrt();
        (rk * sr).atan2(s[0]) / rk
    } else if k < 0.0 {
        let rk = (-k).sqrt();
        (rk * sr).asinh() / rk
    } else {
        sr
    };
    let mut coords = vec![0.0; n];
    coords[0] = r;
    // direction vector u = s_spatial / S_κ(r); tail norms give the angles
    let u: Vec<f64> = s[1..].iter().map(|x| x / sr).collect();
    for j in 2..n {
        // θ_j = atan2(‖(u_j..u_N)‖, u_{j-1}); the shared Π sinθ factor cancels
        let tail = u[j - 1..].iter().map(|x| x * x).sum::<f64>().sqrt();
        coords[j - 1] = tail.atan2(u[j - 2]);
    }
    coords[n - 1] = u[n - 1].atan2(u[n - 2]);
    Ok(ChartPoint::polar(coords))
}

// ---------------------------------------------------------------------------
// Metric
// ---------------------------------------------------------------------------

/// Diagonal metric coefficients in either chart.
///
/// Parallel: g_ii = Π_{l>i} C²_κ(a_l), g_NN = 1.
/// Polar: g_rr = 1, g_θᵢθᵢ = S²_κ(r) Π_{l<i} sin²θ_l.
pub fn metric_diag<S: Scalar>(chart: Chart, coords: &[S], kappa: Curvature) -> Vec<S> {
    let n = coords.len();
    let mut g = vec![S::one(); n];
    match chart {
        Chart::Parallel => {
            let mut suffix = S::one();
            for i in (0..n - 1).rev() {
                let c = cos_k(kappa, coords[i + 1]);
                suffix = suffix * c * c;
                g[i] = suffix;
            }
        }
        Chart::Polar => {
            let sr = sin_k(kappa, coords[0]);
            let mut running = sr * sr;
            for i in 1..n {
                g[i] = running;
                let sth = coords[i].sin();
                running = running * sth * sth;
            }
        }
    }
    g
}

/// Metric tensor at a chart point (diagonal in both charts).
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor {
    diag: Vec<f64>,
}

impl MetricTensor {
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&self.diag))
    }

    pub fn inverse_diagonal(&self) -> Vec<f64> {
        self.diag.iter().map(|g| 1.0 / g).collect()
    }
}

/// Metric at a point; errors where a coefficient vanishes (polar chart at
/// S_κ(r) = 0 or sin θ = 0, parallel chart at C_κ(a) = 0).
pub fn metric_at(q: &ChartPoint, kappa: Curvature) -> Result<MetricTensor, GeometryError> {
    q.validate(kappa)?;
    let diag = metric_diag(q.chart, &q.coords, kappa);
    for (index, g) in diag.iter().enumerate() {
        if !(g.is_finite() && *g > 0.0) {
            return Err(GeometryError::SingularMetric { index });
        }
    }
    Ok(MetricTensor { diag })
}

// ---------------------------------------------------------------------------
// Christoffel symbols and curvature
// ---------------------------------------------------------------------------

/// Christoffel symbols Γ^k_{ij} stored dense, symmetric in the lower pair.
#[derive(Clone, Debug)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n] }
    }

    #[inline]
    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.n + i) * self.n + j
    }

    /// Γ^k_{ij} with 0-based indices.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(k, i, j)]
    }

    fn set_sym(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let a = self.idx(k, i, j);
        self.data[a] = v;
        let b = self.idx(k, j, i);
        self.data[b] = v;
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Closed-form Christoffels in the parallel chart: for i < j,
/// Γ^i_{ij} = -κ T_κ(a_j) and Γ^j_{ii} = κ T_κ(a_j) Π_{l=i+1..j} C²_κ(a_l);
/// all others vanish. Everything vanishes at κ = 0.
pub fn christoffel_parallel(
    q: &ChartPoint,
    kappa: Curvature,
) -> Result<Christoffel, GeometryError> {
    assert_eq!(q.chart, Chart::Parallel, "expected a parallel-chart point");
    q.validate(kappa)?;
    let n = q.dim();
    let a = &q.coords;
    let k = kappa.kappa();
    let mut gamma = Christoffel::zeros(n);
    if k == 0.0 {
        return Ok(gamma);
    }
    let tans: Vec<f64> = a
        .iter()
        .map(|&x| checked_tan_k(kappa, x))
        .collect::<Result<_, _>>()
        .map_err(|e| GeometryError::ChristoffelPole(e.to_string()))?;
    for i in 1..=n {
        for j in (i + 1)..=n {
            gamma.set_sym(i - 1, i - 1, j - 1, -k * tans[j - 1]);
            let mut prod = 1.0;
            for l in (i + 1)..=j {
                let c = cos_k(kappa, a[l - 1]);
                prod *= c * c;
            }
            gamma.set_sym(j - 1, i - 1, i - 1, k * tans[j - 1] * prod);
        }
    }
    Ok(gamma)
}

/// Metric partial derivatives ∂_c g_ii via one dual evaluation per
/// coordinate; exact to rounding. partials[c][i] = ∂_c g_ii.
fn metric_diag_partials(chart: Chart, coords: &[f64], kappa: Curvature) -> Vec<Vec<f64>> {
    let n = coords.len();
    let mut partials = vec![vec![0.0; n]; n];
    for c in 0..n {
        let mut lifted: Vec<Dual> = lift(coords);
        lifted[c] = Dual::variable(coords[c]);
        let gd = metric_diag(chart, &lifted, kappa);
        for i in 0..n {
            partials[c][i] = gd[i].d;
        }
    }
    partials
}

/// Christoffels from the standard formula ½ g^{kl}(∂_i g_jl + ∂_j g_il - ∂_l g_ij),
/// specialized to a diagonal metric; works in both charts.
pub fn christoffel_from_metric(
    q: &ChartPoint,
    kappa: Curvature,
) -> Result<Christoffel, GeometryError> {
    let metric = metric_at(q, kappa)?;
    let n = q.dim();
    let diag = metric.diagonal();
    let partials = metric_diag_partials(q.chart, &q.coords, kappa);
    let mut gamma = Christoffel::zeros(n);
    for k in 0..n {
        let ginv = 1.0 / diag[k];
        for i in 0..n {
            for j in i..n {
                let mut v = 0.0;
                if j == k {
                    v += partials[i][k];
                }
                if i == k {
                    v += partials[j][k];
                }
                if i == j {
                    v -= partials[k][i];
                }
                gamma.set_sym(k, i, j, 0.5 * ginv * v);
            }
        }
    }
    Ok(gamma)
}

/// Ricci scalar assembled numerically: exact (dual-based) Christoffels,
/// finite-differenced for the ∂Γ terms. For S^N_[κ] the result must
/// approach N(N-1)κ.
pub fn scalar_curvature_check(q: &ChartPoint, kappa: Curvature) -> Result<f64, GeometryError> {
    let n = q.dim();
    let gamma = christoffel_from_metric(q, kappa)?;
    let metric = metric_at(q, kappa)?;
    let ginv = metric.inverse_diagonal();

    // ∂_c Γ^k_{ij} by central differences of the exact Christoffels
    let mut dgamma = Vec::with_capacity(n);
    for c in 0..n {
        let slice = central_diff_5(
            |x| {
                let point = ChartPoint { chart: q.chart, coords: x.to_vec() };
                let g = christoffel_from_metric(&point, kappa)
                    .expect("chart stays valid within the stencil");
                g.data
            },
            &q.coords,
            c,
            n * n * n,
        );
        dgamma.push(slice);
    }
    let dg = |c: usize, k: usize, i: usize, j: usize| dgamma[c][(k * n + i) * n + j];

    // R_{σν} = ∂_ρ Γ^ρ_{νσ} - ∂_ν Γ^ρ_{ρσ} + Γ^ρ_{ρλ}Γ^λ_{νσ} - Γ^ρ_{νλ}Γ^λ_{ρσ}
    let mut scalar = 0.0;
    for sigma in 0..n {
        let nu = sigma; // only diagonal Ricci entries contribute through g^{σν}
        let mut ricci = 0.0;
        for rho in 0..n {
            ricci += dg(rho, rho, nu, sigma) - dg(nu, rho, rho, sigma);
            for lam in 0..n {
                ricci += gamma.get(rho, rho, lam) * gamma.get(lam, nu, sigma)
                    - gamma.get(rho, nu, lam) * gamma.get(lam, rho, sigma);
            }
        }
        scalar += ginv[sigma] * ricci;
    }
    Ok(scalar)
}

// ---------------------------------------------------------------------------
// Ambient pullback oracle
// ---------------------------------------------------------------------------

/// Step for the finite-difference oracles, scaled per coordinate.
fn fd_step(coord: f64) -> f64 {
    1e-4 * coord.abs().max(1.0)
}

/// Fourth-order central difference of a vector map along one coordinate.
/// With h = 1e-4 the rounding floor ε|f|/h stays near 1e-12·|f| and the
/// truncation term h⁴f⁽⁵⁾/30 is negligible, which a 3-point stencil cannot
/// achieve at hyperbolic scales.
fn central_diff_5<F>(eval: F, coords: &[f64], c: usize, len: usize) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let h = fd_step(coords[c]);
    let mut shifted = |delta: f64| {
        let mut x = coords.to_vec();
        x[c] += delta;
        eval(&x)
    };
    let f2p = shifted(2.0 * h);
    let f1p = shifted(h);
    let f1m = shifted(-h);
    let f2m = shifted(-2.0 * h);
    (0..len)
        .map(|i| (-f2p[i] + 8.0 * f1p[i] - 8.0 * f1m[i] + f2m[i]) / (12.0 * h))
        .collect()
}

/// Pullback of the ambient metric restricted to the quadric, using a central
/// finite-difference Jacobian of the chart map.
///
/// On Σ the constraint eliminates ds₀ = -κ (Σ sᵢ dsᵢ)/s₀, so
/// dσ² = Σ dsᵢ² + κ (Σ sᵢ dsᵢ)² / (1 - κ Σ sᵢ²); that form is total in κ.
pub fn ambient_pullback_metric(q: &ChartPoint, kappa: Curvature) -> Result<DMatrix<f64>, GeometryError> {
    q.validate(kappa)?;
    let n = q.dim();
    let k = kappa.kappa();
    let s = chart_map(q.chart, &q.coords, kappa);
    // finite-difference Jacobian of the spatial ambient components
    let mut jac = DMatrix::zeros(n, n); // rows: s₁..s_N, cols: chart coords
    for c in 0..n {
        let col = central_diff_5(
            |x| chart_map(q.chart, x, kappa),
            &q.coords,
            c,
            n + 1,
        );
        for i in 1..=n {
            jac[(i - 1, c)] = col[i];
        }
    }
    let mut g = jac.transpose() * &jac;
    if k != 0.0 {
        let s0sq = s[0] * s[0];
        // v_c = Σ_i s_i J_{ic}
        let mut v = vec![0.0; n];
        for c in 0..n {
            for i in 1..=n {
                v[c] += s[i] * jac[(i - 1, c)];
            }
        }
        for a in 0..n {
            for b in 0..n {
                g[(a, b)] += k * v[a] * v[b] / s0sq;
            }
        }
    }
    Ok(g)
}
