//! Molecular constants and external field points.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::angular::Half;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpeciesKind {
    /// ¹Σ: closed-shell, two nuclear spins (bialkali class).
    #[serde(rename = "1Sigma")]
    Singlet,
    /// ²Σ: one unpaired electron and one nuclear spin.
    #[serde(rename = "2Sigma")]
    Doublet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NucleusSpec {
    pub label: String,
    pub spin: Half,
    /// Nuclear g-factor g_ν.
    pub g_factor: f64,
    /// Isotropic shielding σ_ν (dimensionless, not ppm).
    #[serde(default)]
    pub shielding: f64,
    /// eQq_ν in MHz.
    #[serde(default)]
    pub quadrupole: f64,
    /// Nuclear spin-rotation constant c_ν in MHz.
    #[serde(default)]
    pub spin_rotation: f64,
}

/// ²Σ electron-spin constants, all in MHz except the g-factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectronSpin {
    /// γ
    pub spin_rotation: f64,
    /// Fermi-contact-like b
    pub hyperfine_b: f64,
    /// dipolar c
    pub hyperfine_c: f64,
    pub g_factor: f64,
}

/// Nuclear spin-spin constants of a ¹Σ molecule, in MHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSpin {
    /// c₄ (scalar I₁·I₂)
    pub scalar: f64,
    /// c₃ (tensor)
    pub tensor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeSpec {
    pub name: String,
    #[serde(default)]
    pub source: String,
    pub kind: SpeciesKind,
    /// B_e in MHz.
    pub rotational_constant: f64,
    /// Permanent dipole in Debye.
    pub dipole_moment: f64,
    #[serde(default)]
    pub rotational_g: f64,
    #[serde(default)]
    pub nuclei: Vec<NucleusSpec>,
    #[serde(default)]
    pub electron: Option<ElectronSpin>,
    #[serde(default)]
    pub spin_spin: Option<SpinSpin>,
}

impl MoleculeSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Invalid(format!("{}: {msg}", self.name)));
        if !(self.rotational_constant > 0.0) {
            return bad(format!("rotational_constant must be positive, got {}", self.rotational_constant));
        }
        if !(self.dipole_moment >= 0.0) {
            return bad(format!("dipole_moment must be non-negative, got {}", self.dipole_moment));
        }
        for n in &self.nuclei {
            if n.spin.twice() < 0 {
                return bad(format!("nucleus {} has negative spin", n.label));
            }
        }
        match self.kind {
            SpeciesKind::Singlet => {
                if self.electron.is_some() {
                    return bad(String::from("a 1Sigma molecule cannot carry electron-spin constants"));
                }
            }
            SpeciesKind::Doublet => {
                if self.electron.is_none() {
                    return bad(String::from("a 2Sigma molecule needs electron-spin constants"));
                }
                if self.nuclei.len() != 1 {
                    return bad(format!("a 2Sigma molecule takes exactly one nucleus, got {}", self.nuclei.len()));
                }
                if self.spin_spin.is_some() {
                    return bad(String::from("nuclear spin-spin constants apply to 1Sigma molecules only"));
                }
            }
        }
        if self.spin_spin.is_some() && self.nuclei.len() != 2 {
            return bad(String::from("spin-spin constants need exactly two nuclei"));
        }
        Ok(())
    }

    /// β_E = E d / B_e for a field in kV/cm.
    pub fn stark_parameter(&self, e_field: f64) -> f64 {
        e_field * self.dipole_moment * crate::units::DEBYE_KV_PER_CM_IN_MHZ / self.rotational_constant
    }

    /// Field in kV/cm giving the Stark parameter `beta`.
    pub fn field_for_stark_parameter(&self, beta: f64) -> f64 {
        beta * self.rotational_constant / (self.dipole_moment * crate::units::DEBYE_KV_PER_CM_IN_MHZ)
    }
}

/// Parallel electric (kV/cm) and magnetic (G) field magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldPoint {
    pub e_field: f64,
    pub b_field: f64,
}

impl FieldPoint {
    pub fn new(e_field: f64, b_field: f64) -> Result<Self> {
        if !(e_field >= 0.0) || !(b_field >= 0.0) || !e_field.is_finite() || !b_field.is_finite() {
            return Err(Error::Domain(format!("fields must be finite and non-negative, got E = {e_field}, B = {b_field}")));
        }
        Ok(FieldPoint { e_field, b_field })
    }
}

impl MoleculeSpec {
    /// A spinless rigid rotor with rotational constant `b_e` (MHz) and dipole
    /// `d` (Debye).
    pub fn rigid_rotor(b_e: f64, d: f64) -> Self {
        MoleculeSpec {
            name: String::from("rotor"),
            source: String::new(),
            kind: SpeciesKind::Singlet,
            rotational_constant: b_e,
            dipole_moment: d,
            rotational_g: 0.0,
            nuclei: Vec::new(),
            electron: None,
            spin_spin: None,
        }
    }
}
