//! Central verification tolerances.
//!
//! Every threshold used by the verification suites lives here, so the
//! acceptance story has no scattered magic numbers. Values are absolute
//! residual bounds unless noted otherwise.

/// C²_κ + κS²_κ = 1 defect over random (κ, x).
pub const KTRIG_IDENTITY: f64 = 1e-13;

/// κ-trig derivative identities vs central finite differences (relative).
pub const KTRIG_DERIVATIVE_FD: f64 = 1e-7;

/// Matrix commutator of the vector representation vs structure constants.
pub const VECTOR_REP_HOMOMORPHISM: f64 = 1e-13;

/// Isometry defect exp(xX)ᵀ I_κ exp(xX) - I_κ.
pub const ISOMETRY: f64 = 1e-12;

/// One-parameter subgroup closed form vs truncated exponential series.
pub const EXP_SERIES: f64 = 1e-10;

/// Quadric constraint s₀² + κ Σ sᵢ² = 1 after chart maps.
pub const QUADRIC_CONSTRAINT: f64 = 1e-12;

/// Chart maps vs products of one-parameter subgroups applied to the origin.
pub const CHART_GROUP_ACTION: f64 = 1e-12;

/// Chart metric vs pullback of the ambient metric (finite-difference Jacobian).
pub const METRIC_PULLBACK: f64 = 1e-10;

/// Closed-form Christoffels vs ½ g^{kl} ∂g finite-difference assembly.
pub const CHRISTOFFEL_FD: f64 = 1e-7;

/// Phase-space bracket table vs structure constants.
pub const ALGEBRA_BRACKETS: f64 = 1e-10;

/// Parallel ≡ polar ≡ ambient realization agreement.
pub const THREE_WAY_AGREEMENT: f64 = 1e-11;

/// Casimir identity 2T = Σ p̃² + κ Σ J̃².
pub const CASIMIR: f64 = 1e-11;

/// Sum rule 2H = Σ I₀ᵢ + κ Σ Iᵢⱼ + 2κ Σ βᵢ.
pub const SUM_RULE: f64 = 1e-10;

/// {I, H} conservation and disjoint-index commutation residuals.
pub const CONSERVATION: f64 = 1e-9;

/// Involution residuals of the Q-families.
pub const INVOLUTION: f64 = 1e-9;

/// Numerical Jacobi identity (finite differences of bracket values).
pub const JACOBI: f64 = 1e-9;

/// Dual-number gradients vs central finite differences (relative).
pub const GRADIENT_FD: f64 = 1e-6;

/// Relative SVD cutoff for rank decisions: keep σ > σ_max · this.
pub const RANK_SVD_CUTOFF: f64 = 1e-8;

/// Fraction of sampled states that must certify full rank.
pub const RANK_PASS_FRACTION: f64 = 0.95;

/// Curved system vs independent flat system at κ = 1e-8.
pub const EUCLIDEAN_LIMIT: f64 = 1e-6;

/// N = 4 hand-transcribed fixtures vs generic-N code.
pub const N4_FIXTURES: f64 = 1e-13;

/// Relative drift of H and every integral along a trajectory.
pub const TRAJECTORY_DRIFT: f64 = 1e-7;

/// Time-reversal round-trip distance to the initial state.
pub const TIME_REVERSAL: f64 = 1e-6;
