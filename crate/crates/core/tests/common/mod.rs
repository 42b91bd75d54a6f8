#![allow(dead_code)]

use molspin::molecule::{ElectronSpin, NucleusSpec, SpinSpin};
use molspin::{Half, MoleculeSpec, SpeciesKind};

pub fn krb() -> MoleculeSpec {
    MoleculeSpec {
        name: "KRb".into(),
        source: "test fixture".into(),
        kind: SpeciesKind::Singlet,
        rotational_constant: 1113.950,
        dipole_moment: 0.566,
        rotational_g: 0.0140,
        nuclei: vec![
            NucleusSpec {
                label: "40K".into(),
                spin: Half::from_int(4),
                g_factor: -0.324,
                shielding: 1321e-6,
                quadrupole: 0.452,
                spin_rotation: -24.1e-6,
            },
            NucleusSpec {
                label: "87Rb".into(),
                spin: Half(3),
                g_factor: 1.834,
                shielding: 3469e-6,
                quadrupole: -1.308,
                spin_rotation: 420.1e-6,
            },
        ],
        electron: None,
        spin_spin: Some(SpinSpin { scalar: -2030.4e-6, tensor: -48.2e-6 }),
    }
}

pub fn yo() -> MoleculeSpec {
    MoleculeSpec {
        name: "YO".into(),
        source: "test fixture".into(),
        kind: SpeciesKind::Doublet,
        rotational_constant: 11633.6,
        dipole_moment: 4.524,
        rotational_g: 0.0,
        nuclei: vec![NucleusSpec {
            label: "89Y".into(),
            spin: Half(1),
            g_factor: -0.2748,
            shielding: 0.0,
            quadrupole: 0.0,
            spin_rotation: 0.0,
        }],
        electron: Some(ElectronSpin { spin_rotation: -9.2225, hyperfine_b: -762.976, hyperfine_c: -28.236, g_factor: 2.00232 }),
        spin_spin: None,
    }
}

/// A ¹Σ spec with every coupling beyond the bare rotor removed.
pub fn bare_singlet() -> MoleculeSpec {
    let mut s = krb();
    for n in &mut s.nuclei {
        n.quadrupole = 0.0;
        n.spin_rotation = 0.0;
    }
    s.spin_spin = None;
    s
}

pub fn h(x: f64) -> Half {
    Half::from_f64(x).unwrap()
}

pub fn singlet_ket(n: u32, m_n: i32, m1: f64, m2: f64) -> molspin::BasisKet {
    molspin::BasisKet::new(n, m_n, None, vec![h(m1), h(m2)])
}

pub fn doublet_ket(n: u32, m_n: i32, m_s: f64, m_i: f64) -> molspin::BasisKet {
    molspin::BasisKet::new(n, m_n, Some(h(m_s)), vec![h(m_i)])
}
