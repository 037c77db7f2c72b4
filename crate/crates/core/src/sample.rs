//! Random phase-space states on valid chart domains.
//!
//! The SW potential and the polar/parallel generator formulas divide by the
//! ambient components sᵢ and by the metric coefficients, and their Poisson
//! brackets cancel products of those gradients. A state with some sᵢ ≈ 0.1
//! already pushes bracket rounding residue toward the 1e-9 verification
//! tolerance (the worst products scale like 1/sᵢ⁶), so the sampler rejects
//! candidates until every ambient component and every metric coefficient
//! clears a floor. The distance floor to singular sets never drops below
//! [`MIN_MARGIN`].

use rand::Rng;

use crate::geometry::{chart_map, metric_diag, Chart, ChartPoint};
use crate::ktrig::Curvature;
use crate::phase::PhaseState;

/// Hard floor on the distance to chart/potential singular sets.
pub const MIN_MARGIN: f64 = 1e-2;

/// Default floor on |sᵢ| (all ambient components, and s₀ for κ > 0).
const DEFAULT_COMPONENT_FLOOR: f64 = 0.25;

/// Default floor on the diagonal metric coefficients.
const DEFAULT_METRIC_FLOOR: f64 = 0.05;

const MAX_TRIES: usize = 100_000;

/// Samples chart points and phase states on well-conditioned chart domain.
#[derive(Clone, Debug)]
pub struct StateSampler {
    n: usize,
    kappa: Curvature,
    chart: Chart,
    component_floor: f64,
    metric_floor: f64,
    momentum_scale: f64,
    positive_octant: bool,
}

impl StateSampler {
    pub fn new(n: usize, kappa: Curvature, chart: Chart) -> Self {
        assert!(n >= 2, "dimension must be at least 2");
        Self {
            n,
            kappa,
            chart,
            component_floor: DEFAULT_COMPONENT_FLOOR,
            metric_floor: DEFAULT_METRIC_FLOOR,
            momentum_scale: 1.0,
            positive_octant: false,
        }
    }

    /// Floor on |sᵢ| (floored at [`MIN_MARGIN`]).
    pub fn with_component_floor(mut self, floor: f64) -> Self {
        self.component_floor = floor.max(MIN_MARGIN);
        self
    }

    pub fn with_momentum_scale(mut self, scale: f64) -> Self {
        self.momentum_scale = scale;
        self
    }

    /// Restrict to the all-components-positive region (every sᵢ > 0), where
    /// the polar principal branch covers the parallel chart.
    pub fn positive_octant(mut self) -> Self {
        self.positive_octant = true;
        self
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    fn candidate<R: Rng>(&self, rng: &mut R) -> ChartPoint {
        let k = self.kappa.kappa();
        match self.chart {
            Chart::Parallel => {
                let half_period = if k > 0.0 {
                    std::f64::consts::FRAC_PI_2 / k.sqrt()
                } else {
                    f64::INFINITY
                };
                let hi = (1.1f64).min(0.87 * half_period);
                let coords = (0..self.n)
                    .map(|_| {
                        let mag = rng.random_range(0.25 * hi..hi);
                        if self.positive_octant || rng.random::<bool>() {
                            mag
                        } else {
                            -mag
                        }
                    })
                    .collect();
                ChartPoint::parallel(coords)
            }
            Chart::Polar => {
                let (rmin, rmax) = if k > 0.0 {
                    let rk = k.sqrt();
                    (0.4 / rk, (std::f64::consts::FRAC_PI_2 - 0.25) / rk)
                } else {
                    (0.4, 1.2)
                };
                let mut coords = vec![rng.random_range(rmin..rmax)];
                // balanced ambient direction, inverted to angles: keeps all
                // sᵢ comparable instead of letting nested sines collapse
                let u: Vec<f64> = (0..self.n).map(|_| rng.random_range(0.3..1.0)).collect();
                for j in 2..self.n {
                    let tail = u[j - 1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                    coords.push(tail.atan2(u[j - 2]));
                }
                coords.push(u[self.n - 1].atan2(u[self.n - 2]));
                ChartPoint::polar(coords)
            }
        }
    }

    fn well_conditioned(&self, point: &ChartPoint) -> bool {
        let s = chart_map(self.chart, &point.coords, self.kappa);
        if s[1..].iter().any(|si| si.abs() < self.component_floor) {
            return false;
        }
        if self.kappa.kappa() > 0.0 && s[0].abs() < self.component_floor {
            return false;
        }
        let g = metric_diag(self.chart, &point.coords, self.kappa);
        g.iter().all(|gi| *gi >= self.metric_floor)
    }

    /// One chart point on the valid domain, clear of singular sets.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> ChartPoint {
        for _ in 0..MAX_TRIES {
            let point = self.candidate(rng);
            if self.well_conditioned(&point) {
                return point;
            }
        }
        panic!(
            "no well-conditioned chart point found for n={}, kappa={}, chart={}",
            self.n, self.kappa, self.chart
        );
    }

    /// One phase state: a well-conditioned chart point plus momenta uniform
    /// in [-momentum_scale, momentum_scale].
    pub fn sample<R: Rng>(&self, rng: &mut R) -> PhaseState {
        let point = self.sample_point(rng);
        let momenta = (0..self.n)
            .map(|_| rng.random_range(-self.momentum_scale..self.momentum_scale))
            .collect();
        PhaseState::new(point, momenta, self.kappa).expect("sampled state is on-domain")
    }
}

/// Coupling constants β₀..β_N uniform in [0.1, 2], the "generic β" range
/// used by the verification sweeps.
pub fn random_beta<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..=n).map(|_| rng.random_range(0.1..2.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::quadric_defect;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_valid_and_off_singular_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &kv in &[-1.0, -0.1, 0.0, 0.1, 1.0] {
            let kappa = Curvature::new(kv).unwrap();
            for &chart in &[Chart::Parallel, Chart::Polar] {
                for n in 2..=5 {
                    let sampler = StateSampler::new(n, kappa, chart);
                    for _ in 0..100 {
                        let state = sampler.sample(&mut rng);
                        assert!(state.point.validate(kappa).is_ok());
                        let s = chart_map(chart, &state.point.coords, kappa);
                        assert!(quadric_defect(&s, kappa) < 1e-12);
                        for si in &s[1..] {
                            assert!(si.abs() >= DEFAULT_COMPONENT_FLOOR);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn positive_octant_keeps_components_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sampler =
            StateSampler::new(4, Curvature::new(1.0).unwrap(), Chart::Parallel).positive_octant();
        for _ in 0..50 {
            let state = sampler.sample(&mut rng);
            let s = chart_map(Chart::Parallel, &state.point.coords, sampler.kappa);
            assert!(s.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn component_floor_is_floored() {
        let sampler =
            StateSampler::new(2, Curvature::flat(), Chart::Polar).with_component_floor(0.0);
        assert!(sampler.component_floor >= MIN_MARGIN);
    }
}
