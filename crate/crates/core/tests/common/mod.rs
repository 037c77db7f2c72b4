//! Shared helpers for the integration and acceptance suites.

use rand::Rng;

use swint::geometry::Chart;
use swint::ktrig::{cos_k, sin_k, tan_k, Curvature};
use swint::phase::{kinetic_energy, PhaseState};
use swint::sample::StateSampler;
use swint::swsystem::{potential, SwParams};

/// The N = 4 closed forms written out longhand (independently of the
/// library's generic product/sum loops): Hamiltonian, all ten generators in
/// parallel canonical coordinates, and all ten integrals.
pub struct N4Fixture {
    pub c: [f64; 4],
    pub s: [f64; 4],
    pub t: [f64; 4],
    pub p: [f64; 4],
    pub beta: [f64; 5],
    pub kappa: f64,
}

impl N4Fixture {
    pub fn at(state: &PhaseState, params: &SwParams, kappa: Curvature) -> Self {
        assert_eq!(state.chart(), Chart::Parallel);
        let a = &state.point.coords;
        let mut c = [0.0; 4];
        let mut s = [0.0; 4];
        let mut t = [0.0; 4];
        for i in 0..4 {
            c[i] = cos_k(kappa, a[i]);
            s[i] = sin_k(kappa, a[i]);
            t[i] = tan_k(kappa, a[i]);
        }
        let mut p = [0.0; 4];
        p.copy_from_slice(&state.momenta);
        let mut beta = [0.0; 5];
        beta.copy_from_slice(params.beta());
        Self { c, s, t, p, beta, kappa: kappa.kappa() }
    }

    pub fn hamiltonian(&self) -> f64 {
        let [c1, c2, c3, c4] = self.c;
        let [s1, s2, s3, s4] = self.s;
        let [t1, t2, t3, t4] = self.t;
        let [p1, p2, p3, p4] = self.p;
        let b = &self.beta;
        0.5 * (p1 * p1 / (c2 * c2 * c3 * c3 * c4 * c4)
            + p2 * p2 / (c3 * c3 * c4 * c4)
            + p3 * p3 / (c4 * c4)
            + p4 * p4)
            + b[0]
                * (t1 * t1
                    + t2 * t2 / (c1 * c1)
                    + t3 * t3 / (c1 * c1 * c2 * c2)
                    + t4 * t4 / (c1 * c1 * c2 * c2 * c3 * c3))
            + b[1] / (s1 * s1 * c2 * c2 * c3 * c3 * c4 * c4)
            + b[2] / (s2 * s2 * c3 * c3 * c4 * c4)
            + b[3] / (s3 * s3 * c4 * c4)
            + b[4] / (s4 * s4)
    }

    pub fn p_tilde(&self, i: usize) -> f64 {
        let k = self.kappa;
        let [c1, c2, c3, _c4] = self.c;
        let [s1, s2, s3, _s4] = self.s;
        let [_t1, t2, t3, t4] = self.t;
        let [p1, p2, p3, p4] = self.p;
        match i {
            1 => p1,
            2 => c1 * p2 + k * s1 * t2 * p1,
            3 => c1 * c2 * p3 + k * t3 * (s1 / c2 * p1 + c1 * s2 * p2),
            4 => {
                c1 * c2 * c3 * p4
                    + k * t4 * (s1 / (c2 * c3) * p1 + c1 * s2 / c3 * p2 + c1 * c2 * s3 * p3)
            }
            _ => unreachable!(),
        }
    }

    pub fn j_tilde(&self, i: usize, j: usize) -> f64 {
        let k = self.kappa;
        let [c1, c2, c3, _c4] = self.c;
        let [s1, s2, s3, _s4] = self.s;
        let [_t1, t2, t3, t4] = self.t;
        let [p1, p2, p3, p4] = self.p;
        match (i, j) {
            (1, 2) => s1 * p2 - c1 * t2 * p1,
            (1, 3) => s1 * c2 * p3 - c1 / c2 * t3 * p1 + k * s1 * s2 * t3 * p2,
            (1, 4) => {
                s1 * c2 * c3 * p4 - c1 / (c2 * c3) * t4 * p1
                    + k * s1 * t4 * (s2 / c3 * p2 + c2 * s3 * p3)
            }
            (2, 3) => s2 * p3 - c2 * t3 * p2,
            (2, 4) => s2 * c3 * p4 - c2 / c3 * t4 * p2 + k * s2 * s3 * t4 * p3,
            (3, 4) => s3 * p4 - c3 * t4 * p3,
            _ => unreachable!(),
        }
    }

    pub fn integral(&self, i: usize, j: usize) -> f64 {
        let [c1, c2, c3, _c4] = self.c;
        let [s1, s2, s3, _s4] = self.s;
        let [t1, t2, t3, t4] = self.t;
        let b = &self.beta;
        let sq = |x: f64| x * x;
        match (i, j) {
            (0, 1) => sq(self.p_tilde(1)) + 2.0 * b[0] * t1 * t1 + 2.0 * b[1] / (t1 * t1),
            (0, 2) => {
                sq(self.p_tilde(2))
                    + 2.0 * b[0] * t2 * t2 / (c1 * c1)
                    + 2.0 * b[2] * c1 * c1 / (t2 * t2)
            }
            (0, 3) => {
                sq(self.p_tilde(3))
                    + 2.0 * b[0] * t3 * t3 / (c1 * c1 * c2 * c2)
                    + 2.0 * b[3] * c1 * c1 * c2 * c2 / (t3 * t3)
            }
            (0, 4) => {
                sq(self.p_tilde(4))
                    + 2.0 * b[0] * t4 * t4 / (c1 * c1 * c2 * c2 * c3 * c3)
                    + 2.0 * b[4] * c1 * c1 * c2 * c2 * c3 * c3 / (t4 * t4)
            }
            (1, 2) => {
                sq(self.j_tilde(1, 2))
                    + 2.0 * b[1] * t2 * t2 / (s1 * s1)
                    + 2.0 * b[2] * s1 * s1 / (t2 * t2)
            }
            (1, 3) => {
                sq(self.j_tilde(1, 3))
                    + 2.0 * b[1] * t3 * t3 / (s1 * s1 * c2 * c2)
                    + 2.0 * b[3] * s1 * s1 * c2 * c2 / (t3 * t3)
            }
            (1, 4) => {
                sq(self.j_tilde(1, 4))
                    + 2.0 * b[1] * t4 * t4 / (s1 * s1 * c2 * c2 * c3 * c3)
                    + 2.0 * b[4] * s1 * s1 * c2 * c2 * c3 * c3 / (t4 * t4)
            }
            (2, 3) => {
                sq(self.j_tilde(2, 3))
                    + 2.0 * b[2] * t3 * t3 / (s2 * s2)
                    + 2.0 * b[3] * s2 * s2 / (t3 * t3)
            }
            (2, 4) => {
                sq(self.j_tilde(2, 4))
                    + 2.0 * b[2] * t4 * t4 / (s2 * s2 * c3 * c3)
                    + 2.0 * b[4] * s2 * s2 * c3 * c3 / (t4 * t4)
            }
            (3, 4) => {
                sq(self.j_tilde(3, 4))
                    + 2.0 * b[3] * t4 * t4 / (s3 * s3)
                    + 2.0 * b[4] * s3 * s3 / (t4 * t4)
            }
            _ => unreachable!(),
        }
    }
}

/// Random initial condition for a bounded orbit. On the sphere every orbit
/// is bounded; flat SW confines through the β₀ oscillator; on H^N the
/// oscillator saturates at β₀, so the energy is kept under that escape
/// threshold by rescaling the momenta.
pub fn bounded_initial_condition<R: Rng>(
    rng: &mut R,
    n: usize,
    kappa: Curvature,
    params: &SwParams,
) -> PhaseState {
    let chart = if kappa.kappa() > 0.0 { Chart::Polar } else { Chart::Parallel };
    let sampler = StateSampler::new(n, kappa, chart).with_momentum_scale(0.4);
    loop {
        let state = sampler.sample(rng);
        if kappa.kappa() >= 0.0 {
            return state;
        }
        let u = potential(&state.point, params, kappa).unwrap();
        let escape = params.beta()[0];
        if u > 0.75 * escape {
            continue;
        }
        let t = kinetic_energy(&state, kappa);
        let budget = 0.85 * escape - u;
        if t <= budget {
            return state;
        }
        // keep the point, shrink the momenta into the energy budget
        let scale = (budget / t).sqrt() * 0.95;
        let momenta: Vec<f64> = state.momenta.iter().map(|p| p * scale).collect();
        return PhaseState::new(state.point, momenta, kappa).unwrap();
    }
}
