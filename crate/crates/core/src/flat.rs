//! The Euclidean Smorodinsky-Winternitz system, coded on its own.
//!
//! H = ½ Σᵢ (pᵢ² + 2β₀qᵢ² + 2βᵢ/qᵢ²) with integrals
//! I₀ᵢ = pᵢ² + 2β₀qᵢ² + 2βᵢ/qᵢ² and
//! Iᵢⱼ = (qᵢpⱼ - qⱼpᵢ)² + 2βᵢqⱼ²/qᵢ² + 2βⱼqᵢ²/qⱼ².
//!
//! Deliberately not routed through the curved code at κ = 0: this module is
//! the independent oracle the κ → 0 limit of the curved system is checked
//! against.

/// Flat SW Hamiltonian in Cartesian coordinates.
pub fn hamiltonian(q: &[f64], p: &[f64], beta: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..q.len() {
        acc += p[i] * p[i] + 2.0 * beta[0] * q[i] * q[i] + 2.0 * beta[i + 1] / (q[i] * q[i]);
    }
    0.5 * acc
}

/// Flat integral I_ij for 0 ≤ i < j ≤ N (1-based space indices).
pub fn integral(i: usize, j: usize, q: &[f64], p: &[f64], beta: &[f64]) -> f64 {
    assert!(i < j && j <= q.len());
    if i == 0 {
        let qi = q[j - 1];
        let pi = p[j - 1];
        pi * pi + 2.0 * beta[0] * qi * qi + 2.0 * beta[j] / (qi * qi)
    } else {
        let (qi, qj) = (q[i - 1], q[j - 1]);
        let (pi, pj) = (p[i - 1], p[j - 1]);
        let ang = qi * pj - qj * pi;
        ang * ang + 2.0 * beta[i] * (qj * qj) / (qi * qi) + 2.0 * beta[j] * (qi * qi) / (qj * qj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hamiltonian_is_half_the_translation_integral_sum() {
        // 2H = Σᵢ I₀ᵢ, the flat separability statement
        let q = [0.7, -1.2, 0.5];
        let p = [0.3, 0.8, -0.6];
        let beta = [0.4, 1.1, 0.9, 0.2];
        let h = hamiltonian(&q, &p, &beta);
        let sum: f64 = (1..=3).map(|j| integral(0, j, &q, &p, &beta)).sum();
        assert_abs_diff_eq!(2.0 * h, sum, epsilon = 1e-14);
    }

    #[test]
    fn free_particle_reduces_to_kinetic() {
        let q = [0.7, -1.2];
        let p = [0.3, 0.8];
        let beta = [0.0, 0.0, 0.0];
        assert_abs_diff_eq!(
            hamiltonian(&q, &p, &beta),
            0.5 * (p[0] * p[0] + p[1] * p[1]),
            epsilon = 1e-15
        );
        let ang = q[0] * p[1] - q[1] * p[0];
        assert_abs_diff_eq!(integral(1, 2, &q, &p, &beta), ang * ang, epsilon = 1e-15);
    }
}
