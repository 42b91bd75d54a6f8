//! Angular-momentum algebra in the uncoupled basis |N M_N⟩|S M_S⟩|I_ν M_ν⟩.

mod basis;
mod half;
mod wigner;

pub use basis::{build_basis, BasisKet, BasisSet};
pub use half::Half;
pub use wigner::{
    clebsch_gordan, quadrupole_tensor, rank2_product, rotor_tensor, scalar_product, spin_component,
    wigner3j,
};

use crate::{Error, Result};
use alloc::format;

/// ⟨N' M_N'| C^k_q |N M_N⟩ between two basis kets. The operator acts on the
/// rotor only, so the element vanishes unless every spin projection matches.
pub fn tensor_element(bra: &BasisKet, k: u32, q: i32, ket: &BasisKet) -> Result<f64> {
    if !(1..=2).contains(&k) {
        return Err(Error::Domain(format!("rank {k} not supported (expected 1 or 2)")));
    }
    if q.unsigned_abs() > k {
        return Err(Error::Domain(format!("component {q} out of range for rank {k}")));
    }
    bra.validate()?;
    ket.validate()?;
    if bra.m_s != ket.m_s || bra.m_i != ket.m_i {
        return Ok(0.0);
    }
    Ok(rotor_tensor(bra.n, bra.m_n, k, q, ket.n, ket.m_n))
}
