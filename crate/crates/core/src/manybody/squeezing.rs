use alloc::format;

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;

use super::SpinState;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezingReport {
    /// Wineland ξ²
    pub xi2: f64,
    /// Angle of the minimal-variance quadrature in the plane ⊥ ⟨S⟩, rad.
    pub optimal_angle: f64,
    /// |⟨S⟩|
    pub mean_spin: f64,
    /// ⟨S⟩
    pub mean: [f64; 3],
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// ξ² = N min_φ Var(S_φ^⊥) / |⟨S⟩|².
///
/// The angle φ is measured from e₁ toward e₂, where e₁ is the unit vector in
/// the plane of ẑ and ⟨S⟩ orthogonal to ⟨S⟩ (or x̂ when ⟨S⟩ ∥ ẑ) and
/// e₂ = n̂ × e₁.
pub fn squeezing_parameter(state: &SpinState) -> Result<SqueezingReport> {
    let n = state.n_sites() as f64;
    let psi = state.amplitudes();
    let s: [alloc::vec::Vec<Complex64>; 3] = [state.apply_collective(0), state.apply_collective(1), state.apply_collective(2)];
    let mean = [dot(psi, &s[0]).re, dot(psi, &s[1]).re, dot(psi, &s[2]).re];
    let len = (mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]).sqrt();
    if len < 1e-6 * n / 2.0 {
        return Err(Error::Degenerate(format!("mean spin {len:.3e} too small to define a direction")));
    }
    let nhat = [mean[0] / len, mean[1] / len, mean[2] / len];
    let e1 = {
        let z = [0.0, 0.0, 1.0];
        let proj = nhat[2];
        let v = [z[0] - proj * nhat[0], z[1] - proj * nhat[1], z[2] - proj * nhat[2]];
        let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if l > 1e-8 {
            [v[0] / l, v[1] / l, v[2] / l]
        } else {
            [1.0, 0.0, 0.0]
        }
    };
    let e2 = [nhat[1] * e1[2] - nhat[2] * e1[1], nhat[2] * e1[0] - nhat[0] * e1[2], nhat[0] * e1[1] - nhat[1] * e1[0]];
    // symmetrised second moments ⟨{S_a, S_b}⟩/2 = Re⟨S_a ψ|S_b ψ⟩
    let mut m = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            let v = dot(&s[a], &s[b]).re;
            m[a][b] = v;
            m[b][a] = v;
        }
    }
    let quad = |u: [f64; 3], w: [f64; 3]| -> f64 {
        let mut t = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                t += u[a] * w[b] * m[a][b];
            }
        }
        t
    };
    let mu = |u: [f64; 3]| u[0] * mean[0] + u[1] * mean[1] + u[2] * mean[2];
    let c11 = quad(e1, e1) - mu(e1).powi(2);
    let c22 = quad(e2, e2) - mu(e2).powi(2);
    let c12 = quad(e1, e2) - mu(e1) * mu(e2);
    let se = SymmetricEigen::new(Matrix2::new(c11, c12, c12, c22));
    let k = if se.eigenvalues[0] <= se.eigenvalues[1] { 0 } else { 1 };
    let lam = se.eigenvalues[k];
    let v = se.eigenvectors.column(k);
    Ok(SqueezingReport { xi2: n * lam / (len * len), optimal_angle: Float::atan2(v[1], v[0]), mean_spin: len, mean })
}

/// ξ² = (1 + 2Γ_d t₀)/(Nχt₀)² + N²(χt₀)⁴/6 for one-axis twisting with white
/// dephasing (χ in rad/s, Γ_d in 1/s).
pub fn oat_squeezing_with_noise(n: usize, chi: f64, t0: f64, gamma_d: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Invalid(format!("need at least 2 spins, got {n}")));
    }
    let x = chi * t0;
    if !(x > 0.0) {
        return Err(Error::Invalid(format!("χt₀ must be positive, got {x}")));
    }
    let nf = n as f64;
    Ok((1.0 + 2.0 * gamma_d * t0) / (nf * x).powi(2) + nf * nf * x.powi(4) / 6.0)
}

/// t = c/J with J the angular frequency of a coupling given as J/2π in Hz.
pub fn optimal_time(coefficient: f64, j_hz: f64) -> f64 {
    coefficient / super::angular(j_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn coherent_state_is_unsqueezed() {
        for n in 1..=6 {
            let r = squeezing_parameter(&SpinState::plus(n).unwrap()).unwrap();
            assert!((r.xi2 - 1.0).abs() < 1e-12);
            assert!((r.mean_spin - 0.5 * n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_mean_spin_is_rejected() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let singlet = SpinState::from_amplitudes(2, alloc::vec![z, Complex64::new(s, 0.0), Complex64::new(-s, 0.0), z]).unwrap();
        assert!(matches!(squeezing_parameter(&singlet), Err(Error::Degenerate(_))));
    }

    #[test]
    fn oat_formula_terms() {
        let n = 1000usize;
        let x = (n as f64).powf(-2.0 / 3.0);
        let xi2 = oat_squeezing_with_noise(n, x, 1.0, 0.0).unwrap();
        assert!((xi2 - (x + x / 6.0)).abs() < 1e-12 * xi2);
        let (chi, t0, g) = (0.01, 2.0, 0.3);
        let base = oat_squeezing_with_noise(50, chi, t0, g).unwrap();
        let doubled = oat_squeezing_with_noise(50, chi, t0, 2.0 * g).unwrap();
        let second = 2500.0 * (chi * t0).powi(4) / 6.0;
        let ratio = (doubled - second) / (base - second);
        assert!((ratio - (1.0 + 4.0 * g * t0) / (1.0 + 2.0 * g * t0)).abs() < 1e-9);
        assert!(oat_squeezing_with_noise(1, chi, t0, g).is_err());
        assert!(oat_squeezing_with_noise(5, chi, 0.0, g).is_err());
    }

    #[test]
    fn optimal_times() {
        assert!((optimal_time(4.69, 500.0) * 1e3 - 1.4929).abs() < 1e-3);
        assert!((optimal_time(10.5, 500.0) * 1e3 - 3.3423).abs() < 1e-3);
    }
}
