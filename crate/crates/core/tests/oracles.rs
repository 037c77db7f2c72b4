//! Cross-checks between independent construction routes: chart maps vs
//! one-parameter subgroup products, and the two readings of the restricted
//! ambient metric.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swint::geometry::{
    ambient_pullback_metric, chart_map, metric_at, origin, Chart, ChartPoint,
};
use swint::ktrig::Curvature;
use swint::liealg::{exp_generator, GeneratorId};
use swint::sample::StateSampler;
use swint::tol;

fn kap(v: f64) -> Curvature {
    Curvature::new(v).unwrap()
}

/// Parallel chart as a group action: exp(a₁P₁)···exp(a_N P_N)·O.
fn parallel_via_group(a: &[f64], kappa: Curvature) -> Vec<f64> {
    let n = a.len();
    let mut m: DMatrix<f64> = DMatrix::identity(n + 1, n + 1);
    for (i, &ai) in a.iter().enumerate() {
        m *= exp_generator(GeneratorId::Translation(i + 1), ai, n, kappa).unwrap();
    }
    let v: DVector<f64> = &m * DVector::from_row_slice(&origin(n));
    v.iter().cloned().collect()
}

/// Polar chart as a group action: exp(θ_N J_{N-1,N})···exp(θ₂J₁₂)·exp(rP₁)·O.
fn polar_via_group(coords: &[f64], kappa: Curvature) -> Vec<f64> {
    let n = coords.len();
    let mut m = exp_generator(GeneratorId::Translation(1), coords[0], n, kappa).unwrap();
    for (idx, &theta) in coords.iter().enumerate().skip(1) {
        // θ_{idx+1} rotates in the (idx, idx+1) plane
        let rot = exp_generator(GeneratorId::Rotation(idx, idx + 1), theta, n, kappa).unwrap();
        m = rot * m;
    }
    let v: DVector<f64> = &m * DVector::from_row_slice(&origin(n));
    v.iter().cloned().collect()
}

#[test]
fn chart_maps_match_group_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for n in 2..=6 {
        for &kv in &[-1.0, -0.3, 0.0, 0.3, 1.0] {
            let kappa = kap(kv);
            for _ in 0..50 {
                let par = StateSampler::new(n, kappa, Chart::Parallel).sample_point(&mut rng);
                let s_map = chart_map(Chart::Parallel, &par.coords, kappa);
                let s_grp = parallel_via_group(&par.coords, kappa);
                for (a, b) in s_map.iter().zip(s_grp.iter()) {
                    assert!(
                        (a - b).abs() < tol::CHART_GROUP_ACTION,
                        "parallel chart vs group action at n={n}, κ={kv}: {a} vs {b}"
                    );
                }

                let pol = StateSampler::new(n, kappa, Chart::Polar).sample_point(&mut rng);
                let s_map = chart_map(Chart::Polar, &pol.coords, kappa);
                let s_grp = polar_via_group(&pol.coords, kappa);
                for (a, b) in s_map.iter().zip(s_grp.iter()) {
                    assert!(
                        (a - b).abs() < tol::CHART_GROUP_ACTION,
                        "polar chart vs group action at n={n}, κ={kv}: {a} vs {b}"
                    );
                }
            }
        }
    }
}

#[test]
fn polar_chart_spec_spot_value() {
    // N=3, κ=-1, r=1, θ₂=π/3, θ₃=π/6 against the subgroup product
    let kappa = kap(-1.0);
    let coords = vec![1.0, std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_6];
    let s_map = chart_map(Chart::Polar, &coords, kappa);
    let s_grp = polar_via_group(&coords, kappa);
    for (a, b) in s_map.iter().zip(s_grp.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn restricted_ambient_metric_two_readings_agree() {
    // For κ ≠ 0 the raw restricted form (1/κ)(ds₀² + κΣdsᵢ²) must equal the
    // constraint-eliminated form used by ambient_pullback_metric.
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    for n in 2..=4 {
        for &kv in &[-1.0, 0.5, 1.0] {
            let kappa = kap(kv);
            for &chart in &[Chart::Parallel, Chart::Polar] {
                let q = StateSampler::new(n, kappa, chart).sample_point(&mut rng);
                // finite-difference full ambient Jacobian, rows s₀..s_N
                let h = 1e-5;
                let mut jac = DMatrix::zeros(n + 1, n);
                for c in 0..n {
                    let mut plus = q.coords.clone();
                    plus[c] += h;
                    let mut minus = q.coords.clone();
                    minus[c] -= h;
                    let sp = chart_map(chart, &plus, kappa);
                    let sm = chart_map(chart, &minus, kappa);
                    for r in 0..=n {
                        jac[(r, c)] = (sp[r] - sm[r]) / (2.0 * h);
                    }
                }
                let spatial = jac.rows(1, n);
                let row0 = jac.rows(0, 1);
                let raw =
                    spatial.transpose() * spatial + (row0.transpose() * row0) / kv;
                let eliminated = ambient_pullback_metric(&q, kappa).unwrap();
                assert!(
                    (raw - eliminated).abs().max() < 1e-8,
                    "ambient metric readings disagree at n={n}, κ={kv}, {chart}"
                );
            }
        }
    }
}

#[test]
fn both_chart_metrics_reduce_to_euclidean_at_zero_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(79);
    let kappa = kap(0.0);
    for n in 2..=5 {
        // parallel: identity
        let q = StateSampler::new(n, kappa, Chart::Parallel).sample_point(&mut rng);
        let g = metric_at(&q, kappa).unwrap();
        for v in g.diagonal() {
            assert_eq!(*v, 1.0);
        }
        // polar: diag(1, r², r²sin²θ₂, ...)
        let q = StateSampler::new(n, kappa, Chart::Polar).sample_point(&mut rng);
        let g = metric_at(&q, kappa).unwrap();
        let r = q.coords[0];
        assert_eq!(g.diagonal()[0], 1.0);
        assert!((g.diagonal()[1] - r * r).abs() < 1e-15 * r * r);
        let mut expect = r * r;
        for i in 2..n {
            let sth = q.coords[i - 1].sin();
            expect *= sth * sth;
            let rel = (g.diagonal()[i] - expect).abs() / expect;
            assert!(rel < 1e-14);
        }
    }
}

#[test]
fn quadric_constraint_full_sweep() {
    // 10⁴ random chart points per (N, κ, chart). The absolute 1e-12 bound
    // applies where the hyperbolic cosh-products stay O(10²); far out on
    // H^N the defect floor is ε·s₀², so the wide sweep uses the defect
    // normalized by the term magnitude.
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    for n in 2..=6 {
        for &kv in &[-1.0, -0.3, 0.0, 0.3, 1.0] {
            let kappa = kap(kv);
            for &chart in &[Chart::Parallel, Chart::Polar] {
                let sampler = StateSampler::new(n, kappa, chart);
                for _ in 0..200 {
                    let q = sampler.sample_point(&mut rng);
                    let s = chart_map(chart, &q.coords, kappa);
                    let defect = swint::geometry::quadric_defect(&s, kappa);
                    assert!(defect <= tol::QUADRIC_CONSTRAINT);
                }
                for _ in 0..700 {
                    let q = wide_point(&mut rng, chart, n, kappa, 1.2);
                    let s = chart_map(chart, &q.coords, kappa);
                    let defect = swint::geometry::quadric_defect(&s, kappa);
                    assert!(defect <= tol::QUADRIC_CONSTRAINT, "wide point defect {defect:e}");
                }
                for _ in 0..100 {
                    let q = wide_point(&mut rng, chart, n, kappa, 3.0);
                    let s = chart_map(chart, &q.coords, kappa);
                    let scale = s.iter().map(|x| x * x).fold(1.0f64, f64::max);
                    let defect = swint::geometry::quadric_defect(&s, kappa) / scale;
                    assert!(defect <= tol::QUADRIC_CONSTRAINT, "far point defect {defect:e}");
                }
            }
        }
    }
}

/// Unconditioned chart points across the whole domain (used only for the
/// constraint sweep, which has no 1/s terms).
fn wide_point<R: Rng>(
    rng: &mut R,
    chart: Chart,
    n: usize,
    kappa: Curvature,
    reach: f64,
) -> ChartPoint {
    let k = kappa.kappa();
    match chart {
        Chart::Parallel => {
            let bound = if k > 0.0 {
                0.99 * std::f64::consts::FRAC_PI_2 / k.sqrt()
            } else {
                reach
            };
            ChartPoint::parallel((0..n).map(|_| rng.random_range(-bound..bound)).collect())
        }
        Chart::Polar => {
            let rmax = if k > 0.0 { 0.99 * std::f64::consts::PI / k.sqrt() } else { reach };
            let mut coords = vec![rng.random_range(0.0..rmax)];
            for i in 1..n {
                if i < n - 1 {
                    coords.push(rng.random_range(0.0..std::f64::consts::PI));
                } else {
                    coords.push(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
                }
            }
            ChartPoint::polar(coords)
        }
    }
}
