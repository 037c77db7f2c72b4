//! The abstract Lie algebra so_κ(N+1).
//!
//! Basis {P_1..P_N, J_ij (i<j)}, N(N+1)/2 generators in total. The
//! non-vanishing brackets, for i < j < k, are
//!
//! ```text
//! [J_ij, J_ik] = J_jk    [J_ij, J_jk] = -J_ik    [J_ik, J_jk] = J_ij
//! [J_ij, P_i]  = P_j     [J_ij, P_j]  = -P_i     [P_i, P_j]   = κ J_ij
//! ```
//!
//! Everything here is the ground truth the phase-space realizations are
//! checked against: structure constants, the (N+1)×(N+1) vector
//! representation, one-parameter subgroup exponentials and the
//! Killing-Cartan form.
//!
//! Indexing convention: ambient index 0 is the Weierstrass slot; generator
//! indices are always the space indices 1..N. `GeneratorId` never exposes
//! raw ambient indices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ktrig::{sin_k, versin_k, Curvature};

/// Basis generator of so_κ(N+1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorId {
    /// P_i, 1 ≤ i ≤ N.
    Translation(usize),
    /// J_ij, 1 ≤ i < j ≤ N.
    Rotation(usize, usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum LieAlgError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("generator {0:?} is not valid for dimension {1}")]
    InvalidGenerator(GeneratorId, usize),
}

impl GeneratorId {
    /// Validate against a space dimension N.
    pub fn check(self, n: usize) -> Result<Self, LieAlgError> {
        let ok = match self {
            GeneratorId::Translation(i) => 1 <= i && i <= n,
            GeneratorId::Rotation(i, j) => 1 <= i && i < j && j <= n,
        };
        if ok {
            Ok(self)
        } else {
            Err(LieAlgError::InvalidGenerator(self, n))
        }
    }

    /// All N(N+1)/2 generators for dimension N: translations first, then
    /// rotations in lexicographic (i, j) order.
    pub fn all(n: usize) -> Vec<GeneratorId> {
        let mut ids = Vec::with_capacity(n * (n + 1) / 2);
        for i in 1..=n {
            ids.push(GeneratorId::Translation(i));
        }
        for i in 1..n {
            for j in (i + 1)..=n {
                ids.push(GeneratorId::Rotation(i, j));
            }
        }
        ids
    }

    pub fn name(&self) -> String {
        match self {
            GeneratorId::Translation(i) => format!("P{i}"),
            GeneratorId::Rotation(i, j) => format!("J{i}{j}"),
        }
    }
}

impl std::fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// `J_ab` with unordered indices normalized to the i < j basis element:
/// returns (id, sign) with J_ab = sign · J_(min,max); None when a = b.
fn rotation_normalized(a: usize, b: usize) -> Option<(GeneratorId, f64)> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Some((GeneratorId::Rotation(a, b), 1.0)),
        std::cmp::Ordering::Greater => Some((GeneratorId::Rotation(b, a), -1.0)),
        std::cmp::Ordering::Equal => None,
    }
}

/// Bracket [A, B] expanded over the basis. At most one term is ever present
/// for this algebra; the vector form keeps the expansion general.
pub fn bracket(a: GeneratorId, b: GeneratorId, kappa: Curvature) -> Vec<(GeneratorId, f64)> {
    use GeneratorId::*;
    let k = kappa.kappa();
    let mut out = Vec::with_capacity(1);
    match (a, b) {
        (Translation(i), Translation(j)) => {
            // [P_i, P_j] = κ J_ij
            if let Some((id, sign)) = rotation_normalized(i, j) {
                if k != 0.0 {
                    out.push((id, sign * k));
                }
            }
        }
        (Rotation(i, j), Translation(m)) => {
            // [J_ij, P_m] = δ_im P_j - δ_jm P_i
            if m == i {
                out.push((Translation(j), 1.0));
            } else if m == j {
                out.push((Translation(i), -1.0));
            }
        }
        (Translation(_m), Rotation(_i, _j)) => {
            for (id, c) in bracket(b, a, kappa) {
                out.push((id, -c));
            }
        }
        (Rotation(i, j), Rotation(p, q)) => {
            // [J_ij, J_pq] = -δ_jp J_iq - δ_iq J_jp + δ_jq J_ip + δ_ip J_jq
            let mut add = |x: usize, y: usize, c: f64| {
                if let Some((id, sign)) = rotation_normalized(x, y) {
                    out.push((id, sign * c));
                }
            };
            if j == p {
                add(i, q, -1.0);
            }
            if i == q {
                add(j, p, -1.0);
            }
            if j == q {
                add(i, p, 1.0);
            }
            if i == p {
                add(j, q, 1.0);
            }
        }
    }
    out
}

/// Full structure-constant table for dimension N.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    n: usize,
    kappa: Curvature,
    basis: Vec<GeneratorId>,
    /// table[a][b] = expansion of [basis[a], basis[b]]
    table: Vec<Vec<Vec<(GeneratorId, f64)>>>,
}

impl StructureConstants {
    pub fn new(n: usize, kappa: Curvature) -> Result<Self, LieAlgError> {
        if n < 2 {
            return Err(LieAlgError::DimensionTooSmall(n));
        }
        let basis = GeneratorId::all(n);
        let table = basis
            .iter()
            .map(|&a| basis.iter().map(|&b| bracket(a, b, kappa)).collect())
            .collect();
        Ok(Self { n, kappa, basis, table })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> Curvature {
        self.kappa
    }

    pub fn basis(&self) -> &[GeneratorId] {
        &self.basis
    }

    pub fn basis_index(&self, id: GeneratorId) -> Option<usize> {
        self.basis.iter().position(|&g| g == id)
    }

    /// Expansion of [a, b] over the basis.
    pub fn bracket(&self, a: GeneratorId, b: GeneratorId) -> &[(GeneratorId, f64)] {
        let ia = self.basis_index(a).expect("generator not in basis");
        let ib = self.basis_index(b).expect("generator not in basis");
        &self.table[ia][ib]
    }

    /// Adjoint matrix of `id` over the basis: (ad X)_{ca} with [X, e_a] = Σ_c (ad X)_{ca} e_c.
    pub fn adjoint(&self, id: GeneratorId) -> DMatrix<f64> {
        let dim = self.basis.len();
        let mut ad = DMatrix::zeros(dim, dim);
        for (a, &ea) in self.basis.iter().enumerate() {
            for &(target, coeff) in self.bracket(id, ea) {
                let c = self.basis_index(target).expect("bracket target in basis");
                ad[(c, a)] += coeff;
            }
        }
        ad
    }
}

/// Vector representation: P_i = -κ e_{0i} + e_{i0}, J_ij = -e_{ij} + e_{ji},
/// as dense (N+1)×(N+1) matrices (rows/columns 0..N).
pub fn vector_rep(id: GeneratorId, n: usize, kappa: Curvature) -> Result<DMatrix<f64>, LieAlgError> {
    id.check(n)?;
    let mut m = DMatrix::zeros(n + 1, n + 1);
    match id {
        GeneratorId::Translation(i) => {
            m[(0, i)] = -kappa.kappa();
            m[(i, 0)] = 1.0;
        }
        GeneratorId::Rotation(i, j) => {
            m[(i, j)] = -1.0;
            m[(j, i)] = 1.0;
        }
    }
    Ok(m)
}

/// One-parameter subgroup exp(x X) in closed form:
/// translations via I + P S_κ(x) + P² V_κ(x), rotations via
/// I + J sin x + J² (1 - cos x).
pub fn exp_generator(
    id: GeneratorId,
    x: f64,
    n: usize,
    kappa: Curvature,
) -> Result<DMatrix<f64>, LieAlgError> {
    let gen = vector_rep(id, n, kappa)?;
    let eye = DMatrix::identity(n + 1, n + 1);
    let m = match id {
        GeneratorId::Translation(_) => {
            &eye + &gen * sin_k(kappa, x) + (&gen * &gen) * versin_k(kappa, x)
        }
        GeneratorId::Rotation(_, _) => &eye + &gen * x.sin() + (&gen * &gen) * (1.0 - x.cos()),
    };
    Ok(m)
}

/// Truncated matrix-exponential series Σ (xX)^k / k!, used as an oracle for
/// the closed forms.
pub fn exp_generator_series(
    id: GeneratorId,
    x: f64,
    n: usize,
    kappa: Curvature,
    terms: usize,
) -> Result<DMatrix<f64>, LieAlgError> {
    let gen = vector_rep(id, n, kappa)? * x;
    let mut acc = DMatrix::identity(n + 1, n + 1);
    let mut term = DMatrix::identity(n + 1, n + 1);
    for k in 1..terms {
        term = (&term * &gen) / k as f64;
        acc += &term;
    }
    Ok(acc)
}

/// The bilinear form I_κ = diag(1, κ, ..., κ) preserved by SO_κ(N+1).
pub fn ambient_bilinear_form(n: usize, kappa: Curvature) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m[(0, 0)] = 1.0;
    for i in 1..=n {
        m[(i, i)] = kappa.kappa();
    }
    m
}

/// Killing-Cartan form g(X, Y) = Trace(ad X · ad Y) over all generator pairs,
/// computed from the structure constants.
pub fn killing_form(
    n: usize,
    kappa: Curvature,
) -> Result<Vec<(GeneratorId, GeneratorId, f64)>, LieAlgError> {
    let sc = StructureConstants::new(n, kappa)?;
    let ads: Vec<DMatrix<f64>> = sc.basis.iter().map(|&id| sc.adjoint(id)).collect();
    let mut out = Vec::new();
    for (a, ad_a) in ads.iter().enumerate() {
        for (b, ad_b) in ads.iter().enumerate() {
            out.push((sc.basis[a], sc.basis[b], (ad_a * ad_b).trace()));
        }
    }
    Ok(out)
}
