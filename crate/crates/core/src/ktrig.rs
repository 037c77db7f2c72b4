//! Curvature-dependent trigonometry.
//!
//! The functions `cos_k`, `sin_k`, `versin_k`, `tan_k` interpolate circular
//! (κ > 0), parabolic (κ = 0) and hyperbolic (κ < 0) trigonometry in a single
//! parameter κ:
//!
//! ```text
//! C_κ(x) = Σ_l (-κ)^l x^(2l) / (2l)!   = cos(√κ x) | 1 | cosh(√-κ x)
//! S_κ(x) = Σ_l (-κ)^l x^(2l+1)/(2l+1)! = sin(√κ x)/√κ | x | sinh(√-κ x)/√-κ
//! V_κ(x) = (1 - C_κ(x)) / κ,  V_0(x) = x²/2
//! T_κ(x) = S_κ(x) / C_κ(x)
//! ```
//!
//! κ is never normalized to ±1 internally; every formula carries it
//! explicitly so the whole one-parameter family can be swept continuously.
//! Near κ·x² = 0 the closed forms are replaced by truncated power series,
//! which keeps all four functions smooth across the κ = 0 transition and
//! saves `V_κ` from catastrophic cancellation in `(1 - C_κ)/κ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Switch to the series branch when |κ|·x² drops below this. Chosen so both
/// branches agree to better than 1e-13 at the boundary.
const SERIES_THRESHOLD: f64 = 1e-4;

/// Terms kept in the series branch. At |κ|x² = 1e-4 the first dropped term
/// is below 1e-30.
const SERIES_TERMS: usize = 8;

/// Sign classification of a curvature value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurvatureClass {
    /// κ > 0: sphere.
    Positive,
    /// κ = 0: Euclidean space.
    Zero,
    /// κ < 0: hyperbolic space.
    Negative,
}

/// Constant sectional curvature κ (units 1/length²). Always finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Curvature(f64);

#[derive(Debug, Error, PartialEq)]
pub enum KtrigError {
    #[error("curvature must be finite, got {0}")]
    NonFinite(f64),
    #[error("T_k pole: C_k(x) vanishes at x = {x} for kappa = {kappa}")]
    TangentPole { kappa: f64, x: f64 },
}

impl Curvature {
    pub fn new(kappa: f64) -> Result<Self, KtrigError> {
        if !kappa.is_finite() {
            return Err(KtrigError::NonFinite(kappa));
        }
        Ok(Self(kappa))
    }

    /// Flat (Euclidean) space, κ = 0.
    pub const fn flat() -> Self {
        Self(0.0)
    }

    pub fn kappa(self) -> f64 {
        self.0
    }

    pub fn class(self) -> CurvatureClass {
        if self.0 > 0.0 {
            CurvatureClass::Positive
        } else if self.0 < 0.0 {
            CurvatureClass::Negative
        } else {
            CurvatureClass::Zero
        }
    }
}

impl std::fmt::Display for Curvature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn use_series<S: Scalar>(kappa: f64, x: S) -> bool {
    let xv = x.value();
    kappa.abs() * xv * xv < SERIES_THRESHOLD
}

/// κ-cosine.
pub fn cos_k<S: Scalar>(kappa: Curvature, x: S) -> S {
    let k = kappa.kappa();
    if k == 0.0 {
        return S::one();
    }
    if use_series(k, x) {
        // Σ_l (-κ)^l x^(2l) / (2l)!
        let x2 = x * x;
        let mut term = S::one();
        let mut acc = term;
        for l in 1..SERIES_TERMS {
            let denom = ((2 * l - 1) * (2 * l)) as f64;
            term = term * x2.scale(-k / denom);
            acc = acc + term;
        }
        return acc;
    }
    if k > 0.0 {
        x.scale(k.sqrt()).cos()
    } else {
        x.scale((-k).sqrt()).cosh()
    }
}

/// κ-sine.
pub fn sin_k<S: Scalar>(kappa: Curvature, x: S) -> S {
    let k = kappa.kappa();
    if k == 0.0 {
        return x;
    }
    if use_series(k, x) {
        // x · Σ_l (-κ)^l x^(2l) / (2l+1)!
        let x2 = x * x;
        let mut term = S::one();
        let mut acc = term;
        for l in 1..SERIES_TERMS {
            let denom = ((2 * l) * (2 * l + 1)) as f64;
            term = term * x2.scale(-k / denom);
            acc = acc + term;
        }
        return acc * x;
    }
    if k > 0.0 {
        let r = k.sqrt();
        x.scale(r).sin().scale(1.0 / r)
    } else {
        let r = (-k).sqrt();
        x.scale(r).sinh().scale(1.0 / r)
    }
}

/// κ-versine V_κ(x) = (1 - C_κ(x)) / κ, continued through κ = 0 as x²/2.
pub fn versin_k<S: Scalar>(kappa: Curvature, x: S) -> S {
    let k = kappa.kappa();
    if k == 0.0 || use_series(k, x) {
        // x²/2 · Σ_l (-κ)^l x^(2l) · 2/(2l+2)!  (first term x²/2)
        let x2 = x * x;
        let mut term = x2.scale(0.5);
        let mut acc = term;
        for l in 1..SERIES_TERMS {
            let denom = ((2 * l + 1) * (2 * l + 2)) as f64;
            term = term * x2.scale(-k / denom);
            acc = acc + term;
        }
        return acc;
    }
    (S::one() - cos_k(kappa, x)).scale(1.0 / k)
}

/// κ-tangent T_κ(x) = S_κ(x)/C_κ(x). Has poles where C_κ vanishes (κ > 0,
/// x at odd multiples of π/(2√κ)); see [`checked_tan_k`] for the guarded
/// `f64` entry point.
pub fn tan_k<S: Scalar>(kappa: Curvature, x: S) -> S {
    sin_k(kappa, x) / cos_k(kappa, x)
}

/// `tan_k` over `f64` that reports the pole instead of overflowing through it.
pub fn checked_tan_k(kappa: Curvature, x: f64) -> Result<f64, KtrigError> {
    let c = cos_k(kappa, x);
    if c.abs() <= f64::EPSILON {
        return Err(KtrigError::TangentPole { kappa: kappa.kappa(), x });
    }
    Ok(sin_k(kappa, x) / c)
}
