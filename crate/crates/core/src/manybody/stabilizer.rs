use alloc::format;

#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;

use super::SpinState;
use crate::couplings::LatticeGeometry;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Site must have the full bulk neighbour set.
    Bulk,
    /// Missing neighbours are dropped and the prefactor follows the actual count.
    Open,
}

/// ⟨K⟩_j = 2^{n+1} ⟨S^x_j Π_k S^z_k⟩ over the n nearest neighbours k of j.
pub fn stabilizer_expectation(state: &SpinState, j: usize, geom: &LatticeGeometry, boundary: Boundary) -> Result<f64> {
    if geom.n_sites() != state.n_sites() || j >= state.n_sites() {
        return Err(Error::Structure(format!("site {j} / {} sites vs geometry with {}", state.n_sites(), geom.n_sites())));
    }
    let nb = geom.neighbours(j);
    if boundary == Boundary::Bulk && nb.len() != geom.coordination() {
        return Err(Error::Invalid(format!("site {j} is on the boundary ({} neighbours)", nb.len())));
    }
    Ok(pauli_correlator(state, j, &nb))
}

/// 2^{n+1}⟨S^x_j Π S^z_k⟩ for an explicit neighbour list.
pub(crate) fn pauli_correlator(state: &SpinState, j: usize, nb: &[usize]) -> f64 {
    let amps = state.amplitudes();
    let mut acc = 0.0;
    for (b, a) in amps.iter().enumerate() {
        let sign = nb.iter().fold(1.0, |s, &k| if b >> k & 1 == 1 { s } else { -s });
        // ⟨ψ|σ^x_j|b⟩ψ_b
        acc += sign * (amps[b ^ (1 << j)].conj() * a).re;
    }
    acc
}

/// e^{−Γ_d t/2} F: white-noise decay of a single stabilizer.
pub fn stabilizer_with_dephasing(f_value: f64, gamma_d: f64, t: f64) -> Result<f64> {
    if !(gamma_d >= 0.0) {
        return Err(Error::Invalid(format!("dephasing rate must be non-negative, got {gamma_d}")));
    }
    Ok(f_value * (-0.5 * gamma_d * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_state_has_zero_stabilizers() {
        let g = LatticeGeometry::chain(4, 500.0);
        let s = SpinState::plus(4).unwrap();
        for j in 0..4 {
            assert!(stabilizer_expectation(&s, j, &g, Boundary::Open).unwrap().abs() < 1e-14);
        }
        assert!(stabilizer_expectation(&s, 0, &g, Boundary::Bulk).is_err());
        assert!(stabilizer_expectation(&s, 1, &g, Boundary::Bulk).is_ok());
    }

    #[test]
    fn dephasing_factor() {
        let k = stabilizer_with_dephasing(1.0, 1.0 / 0.470, 2.95e-3).unwrap();
        assert!((k - 0.9969).abs() < 5e-5);
        assert_eq!(stabilizer_with_dephasing(0.7, 0.0, 3.0).unwrap(), 0.7);
        assert!((stabilizer_with_dephasing(1.0, 4.0, 0.5).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(stabilizer_with_dephasing(1.0, -1.0, 1.0).is_err());
    }
}
