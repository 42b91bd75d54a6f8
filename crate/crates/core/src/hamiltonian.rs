//! Single-molecule Hamiltonians in the uncoupled basis.
//!
//! Every matrix is real symmetric, in MHz, and split as
//! H(E, B) = H₀ + E·H_E + B·H_B with E in kV/cm and B in Gauss.
//!
//! ¹Σ terms: rotation, Stark, nuclear electric quadrupole, nuclear
//! spin-rotation, scalar and tensor nuclear spin-spin, and Zeeman
//! (rotational plus shielded nuclear).
//!
//! ²Σ terms: rotation, Stark, electron spin-rotation γ N·S, isotropic
//! hyperfine (b + c/3) I·S, dipolar hyperfine and electron Zeeman
//! +g_S μ_B B M_S. Rotational and nuclear Zeeman are left out for ²Σ.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::angular::{quadrupole_tensor, rank2_product, rotor_tensor, scalar_product, BasisKet, BasisSet, Half};
use crate::molecule::{FieldPoint, MoleculeSpec, SpeciesKind};
use crate::units::{BOHR_MAGNETON_MHZ_PER_GAUSS, DEBYE_KV_PER_CM_IN_MHZ, NUCLEAR_MAGNETON_MHZ_PER_GAUSS};
use crate::{Error, Result};

const SQRT6: f64 = 2.449_489_742_783_178;

/// Individually switchable Hamiltonian terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Rotation,
    Stark,
    Zeeman,
    Quadrupole,
    NuclearSpinRotation,
    ScalarSpinSpin,
    TensorSpinSpin,
    ElectronSpinRotation,
    IsotropicHyperfine,
    DipolarHyperfine,
}

impl Term {
    pub const ALL: [Term; 10] = [
        Term::Rotation,
        Term::Stark,
        Term::Zeeman,
        Term::Quadrupole,
        Term::NuclearSpinRotation,
        Term::ScalarSpinSpin,
        Term::TensorSpinSpin,
        Term::ElectronSpinRotation,
        Term::IsotropicHyperfine,
        Term::DipolarHyperfine,
    ];

    const fn bit(self) -> u16 {
        1 << (self as u16)
    }

    /// Which part of the field decomposition the term contributes to.
    fn slot(self) -> Slot {
        match self {
            Term::Stark => Slot::Electric,
            Term::Zeeman => Slot::Magnetic,
            _ => Slot::FieldFree,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    FieldFree,
    Electric,
    Magnetic,
}

/// Set of enabled terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermMask(u16);

impl TermMask {
    pub const fn all() -> Self {
        TermMask(0x3ff)
    }

    pub const fn none() -> Self {
        TermMask(0)
    }

    pub fn only(terms: &[Term]) -> Self {
        TermMask(terms.iter().fold(0, |acc, t| acc | t.bit()))
    }

    /// Rotation, Stark and Zeeman only.
    pub fn no_hyperfine() -> Self {
        Self::only(&[Term::Rotation, Term::Stark, Term::Zeeman])
    }

    pub const fn with(self, t: Term) -> Self {
        TermMask(self.0 | t.bit())
    }

    pub const fn without(self, t: Term) -> Self {
        TermMask(self.0 & !t.bit())
    }

    pub const fn contains(self, t: Term) -> bool {
        self.0 & t.bit() != 0
    }
}

impl Default for TermMask {
    fn default() -> Self {
        Self::all()
    }
}

/// Field-independent part and unit-field derivatives of H on one basis.
#[derive(Clone, Debug)]
pub struct HamiltonianParts {
    basis: BasisSet,
    pub field_free: DMatrix<f64>,
    /// ∂H/∂E in MHz per kV/cm.
    pub electric: DMatrix<f64>,
    /// ∂H/∂B in MHz per Gauss.
    pub magnetic: DMatrix<f64>,
}

impl HamiltonianParts {
    pub fn new(spec: &MoleculeSpec, basis: &BasisSet, mask: TermMask) -> Result<Self> {
        check_basis(spec, basis)?;
        let n = basis.len();
        let mut parts = HamiltonianParts {
            basis: basis.clone(),
            field_free: DMatrix::zeros(n, n),
            electric: DMatrix::zeros(n, n),
            magnetic: DMatrix::zeros(n, n),
        };
        let mut assembler = Assembler::new(spec);
        for t in Term::ALL {
            if !mask.contains(t) {
                continue;
            }
            let target = match t.slot() {
                Slot::FieldFree => &mut parts.field_free,
                Slot::Electric => &mut parts.electric,
                Slot::Magnetic => &mut parts.magnetic,
            };
            assembler.accumulate(t, basis, target);
        }
        Ok(parts)
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn at(&self, point: FieldPoint) -> DMatrix<f64> {
        &self.field_free + &self.electric * point.e_field + &self.magnetic * point.b_field
    }
}

/// H(E, B) with every term switched on.
pub fn assemble_hamiltonian(spec: &MoleculeSpec, point: FieldPoint, basis: &BasisSet) -> Result<DMatrix<f64>> {
    Ok(HamiltonianParts::new(spec, basis, TermMask::all())?.at(point))
}

/// Matrix of a single term. Stark and Zeeman are returned per unit field.
pub fn term_matrix(spec: &MoleculeSpec, basis: &BasisSet, term: Term) -> Result<DMatrix<f64>> {
    check_basis(spec, basis)?;
    let mut m = DMatrix::zeros(basis.len(), basis.len());
    Assembler::new(spec).accumulate(term, basis, &mut m);
    Ok(m)
}

/// d·⟨bra|C¹_q|ket⟩ in Debye between two kets of `spec`.
pub fn dipole_ket_element(spec: &MoleculeSpec, bra: &BasisKet, q: i32, ket: &BasisKet) -> f64 {
    if bra.m_s != ket.m_s || bra.m_i != ket.m_i {
        return 0.0;
    }
    spec.dipole_moment * rotor_tensor(bra.n, bra.m_n, 1, q, ket.n, ket.m_n)
}

fn check_basis(spec: &MoleculeSpec, basis: &BasisSet) -> Result<()> {
    spec.validate()?;
    for k in basis.kets() {
        k.check_against(spec).map_err(|e| Error::Structure(format!("basis does not belong to {}: {e}", spec.name)))?;
    }
    Ok(())
}

/// Caches the 3-j based angular factors used while filling matrices.
struct Assembler<'a> {
    spec: &'a MoleculeSpec,
    rotor: BTreeMap<(u32, i32, u32, i32, u32, i32), f64>,
}

impl<'a> Assembler<'a> {
    fn new(spec: &'a MoleculeSpec) -> Self {
        Assembler { spec, rotor: BTreeMap::new() }
    }

    fn c(&mut self, bra: &BasisKet, k: u32, q: i32, ket: &BasisKet) -> f64 {
        if bra.m_n != ket.m_n + q {
            return 0.0;
        }
        *self
            .rotor
            .entry((bra.n, bra.m_n, k, q, ket.n, ket.m_n))
            .or_insert_with(|| rotor_tensor(bra.n, bra.m_n, k, q, ket.n, ket.m_n))
    }

    fn accumulate(&mut self, term: Term, basis: &BasisSet, out: &mut DMatrix<f64>) {
        let kets = basis.kets();
        let mf: Vec<Half> = kets.iter().map(BasisKet::total_projection).collect();
        for i in 0..kets.len() {
            for j in 0..=i {
                // parallel fields conserve M_F
                if mf[i] != mf[j] || kets[i].n.abs_diff(kets[j].n) > 2 {
                    continue;
                }
                let v = self.element(term, &kets[i], &kets[j]);
                if v != 0.0 {
                    out[(i, j)] += v;
                    if i != j {
                        out[(j, i)] += v;
                    }
                }
            }
        }
    }

    fn element(&mut self, term: Term, bra: &BasisKet, ket: &BasisKet) -> f64 {
        let spec = self.spec;
        let same_n = bra.n == ket.n && bra.m_n == ket.m_n;
        let same_spins = bra.m_s == ket.m_s && bra.m_i == ket.m_i;
        let diagonal = same_n && same_spins;
        let rotor_j = |n: u32| Half::from_int(n as i32);
        match term {
            Term::Rotation => {
                if diagonal {
                    spec.rotational_constant * f64::from(bra.n * (bra.n + 1))
                } else {
                    0.0
                }
            }
            Term::Stark => {
                if same_spins {
                    -spec.dipole_moment * DEBYE_KV_PER_CM_IN_MHZ * self.c(bra, 1, 0, ket)
                } else {
                    0.0
                }
            }
            Term::Zeeman => {
                if !diagonal {
                    return 0.0;
                }
                match spec.kind {
                    SpeciesKind::Singlet => {
                        let mut z = -spec.rotational_g * NUCLEAR_MAGNETON_MHZ_PER_GAUSS * f64::from(bra.m_n);
                        for (nuc, m) in spec.nuclei.iter().zip(&bra.m_i) {
                            z -= nuc.g_factor * NUCLEAR_MAGNETON_MHZ_PER_GAUSS * m.value() * (1.0 - nuc.shielding);
                        }
                        z
                    }
                    SpeciesKind::Doublet => {
                        let gs = spec.electron.as_ref().map_or(0.0, |e| e.g_factor);
                        gs * BOHR_MAGNETON_MHZ_PER_GAUSS * bra.m_s.map_or(0.0, Half::value)
                    }
                }
            }
            Term::Quadrupole => {
                if bra.m_s != ket.m_s {
                    return 0.0;
                }
                let mut total = 0.0;
                for (nu, nuc) in spec.nuclei.iter().enumerate() {
                    if nuc.quadrupole == 0.0 || nuc.spin.twice() < 2 || !others_equal(&bra.m_i, &ket.m_i, nu) {
                        continue;
                    }
                    let i = nuc.spin.value();
                    let pre = nuc.quadrupole / (4.0 * i * (2.0 * i - 1.0)) * SQRT6;
                    for p in -2..=2 {
                        let c = self.c(bra, 2, -p, ket);
                        if c == 0.0 {
                            continue;
                        }
                        total += pre * sign(p) * c * quadrupole_tensor(nuc.spin, bra.m_i[nu], ket.m_i[nu], p);
                    }
                }
                total
            }
            Term::NuclearSpinRotation => {
                if bra.n != ket.n || bra.m_s != ket.m_s {
                    return 0.0;
                }
                let mut total = 0.0;
                for (nu, nuc) in spec.nuclei.iter().enumerate() {
                    if nuc.spin_rotation == 0.0 || !others_equal(&bra.m_i, &ket.m_i, nu) {
                        continue;
                    }
                    total += nuc.spin_rotation
                        * scalar_product(
                            rotor_j(bra.n),
                            Half::from_int(bra.m_n),
                            Half::from_int(ket.m_n),
                            nuc.spin,
                            bra.m_i[nu],
                            ket.m_i[nu],
                        );
                }
                total
            }
            Term::ScalarSpinSpin => match &spec.spin_spin {
                Some(ss) if same_n && bra.m_s == ket.m_s => {
                    let (a, b) = (&spec.nuclei[0], &spec.nuclei[1]);
                    ss.scalar * scalar_product(a.spin, bra.m_i[0], ket.m_i[0], b.spin, bra.m_i[1], ket.m_i[1])
                }
                _ => 0.0,
            },
            Term::TensorSpinSpin => match &spec.spin_spin {
                Some(ss) if bra.m_s == ket.m_s && ss.tensor != 0.0 => {
                    let (a, b) = (&spec.nuclei[0], &spec.nuclei[1]);
                    let mut total = 0.0;
                    for p in -2..=2 {
                        let c = self.c(bra, 2, -p, ket);
                        if c == 0.0 {
                            continue;
                        }
                        total += sign(p) * c * rank2_product(a.spin, bra.m_i[0], ket.m_i[0], b.spin, bra.m_i[1], ket.m_i[1], p);
                    }
                    -ss.tensor * SQRT6 * total
                }
                _ => 0.0,
            },
            Term::ElectronSpinRotation => match (&spec.electron, bra.m_s, ket.m_s) {
                (Some(el), Some(sb), Some(sk)) if bra.n == ket.n && bra.m_i == ket.m_i => {
                    el.spin_rotation * scalar_product(rotor_j(bra.n), Half::from_int(bra.m_n), Half::from_int(ket.m_n), Half::HALF, sb, sk)
                }
                _ => 0.0,
            },
            Term::IsotropicHyperfine => match (&spec.electron, bra.m_s, ket.m_s) {
                (Some(el), Some(sb), Some(sk)) if same_n => {
                    let nuc = &spec.nuclei[0];
                    (el.hyperfine_b + el.hyperfine_c / 3.0) * scalar_product(nuc.spin, bra.m_i[0], ket.m_i[0], Half::HALF, sb, sk)
                }
                _ => 0.0,
            },
            Term::DipolarHyperfine => match (&spec.electron, bra.m_s, ket.m_s) {
                (Some(el), Some(sb), Some(sk)) if el.hyperfine_c != 0.0 => {
                    let nuc = &spec.nuclei[0];
                    let mut total = 0.0;
                    for q in -2..=2 {
                        let c = self.c(bra, 2, -q, ket);
                        if c == 0.0 {
                            continue;
                        }
                        total += sign(q) * c * rank2_product(nuc.spin, bra.m_i[0], ket.m_i[0], Half::HALF, sb, sk, q);
                    }
                    el.hyperfine_c * SQRT6 / 3.0 * total
                }
                _ => 0.0,
            },
        }
    }
}

fn sign(p: i32) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn others_equal(a: &[Half], b: &[Half], skip: usize) -> bool {
    a.iter().zip(b).enumerate().all(|(k, (x, y))| k == skip || x == y)
}
