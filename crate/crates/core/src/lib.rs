//! Smorodinsky-Winternitz systems on the N-dimensional sphere, Euclidean and
//! hyperbolic spaces, unified by a curvature parameter κ.
//!
//! The crate builds the curved SW Hamiltonian together with its full set of
//! N(N+1)/2 quadratic integrals of motion and machine-verifies the structure
//! that makes the system maximally superintegrable:
//!
//! * [`ktrig`] — κ-deformed trigonometry, numerically stable across κ = 0;
//! * [`liealg`] — the abstract Lie algebra so_κ(N+1): structure constants,
//!   vector representation, one-parameter subgroups, Killing-Cartan form;
//! * [`geometry`] — Weierstrass, geodesic-parallel and geodesic-polar charts,
//!   metrics, Christoffel symbols, curvature cross-checks;
//! * [`phase`] — canonical momenta, kinetic energy, and phase-space
//!   realizations of all generators in both charts plus the ambient oracle;
//! * [`poisson`] — canonical Poisson brackets with exact forward-mode
//!   derivatives, and the bracket-table verification suites;
//! * [`swsystem`] — the SW potential, Hamiltonian, integrals of motion,
//!   involutive families and the functional-independence certificate;
//! * [`flat`] — the independently coded Euclidean SW system used as the
//!   κ → 0 limit oracle;
//! * [`dynamics`] — adaptive integration of Hamilton's equations with
//!   conservation-drift monitoring.

pub mod dynamics;
pub mod flat;
pub mod geometry;
pub mod ktrig;
pub mod liealg;
pub mod phase;
pub mod poisson;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod swsystem;
pub mod tol;

pub use geometry::{Chart, ChartPoint, WeierstrassPoint};
pub use ktrig::{Curvature, CurvatureClass};
pub use liealg::GeneratorId;
pub use phase::PhaseState;
pub use scalar::{Dual, Scalar};
pub use swsystem::{IntegralId, SwParams};
