use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::Half;
use crate::molecule::MoleculeSpec;
use crate::{Error, Result};

/// One product state |N M_N⟩|S M_S⟩|I₁ M₁⟩…
///
/// Field order gives the lexicographic basis ordering (N, M_N, M_S, M_I).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisKet {
    pub n: u32,
    pub m_n: i32,
    pub m_s: Option<Half>,
    pub m_i: Vec<Half>,
}

impl BasisKet {
    pub fn new(n: u32, m_n: i32, m_s: Option<Half>, m_i: Vec<Half>) -> Self {
        BasisKet { n, m_n, m_s, m_i }
    }

    /// Total projection M_F = M_N + M_S + ΣM_I.
    pub fn total_projection(&self) -> Half {
        let mut t = Half::from_int(self.m_n) + self.m_s.unwrap_or(Half::ZERO);
        for &m in &self.m_i {
            t = t + m;
        }
        t
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.m_n.unsigned_abs() > self.n {
            return Err(Error::Domain(format!("|M_N| = {} exceeds N = {}", self.m_n.abs(), self.n)));
        }
        if let Some(ms) = self.m_s {
            if ms.twice().abs() != 1 {
                return Err(Error::Domain(format!("M_S = {ms} is not ±1/2")));
            }
        }
        Ok(())
    }

    /// Checks the spin projections against a molecule's nuclear spins.
    pub fn check_against(&self, spec: &MoleculeSpec) -> Result<()> {
        self.validate()?;
        if self.m_s.is_some() != spec.electron.is_some() {
            return Err(Error::Structure(format!("ket {self} does not match the electron spin of {}", spec.name)));
        }
        if self.m_i.len() != spec.nuclei.len() {
            return Err(Error::Structure(format!(
                "ket {self} has {} nuclear projections, {} has {} nuclei",
                self.m_i.len(),
                spec.name,
                spec.nuclei.len()
            )));
        }
        for (m, nuc) in self.m_i.iter().zip(&spec.nuclei) {
            if m.twice().abs() > nuc.spin.twice() || (m.twice() - nuc.spin.twice()) % 2 != 0 {
                return Err(Error::Domain(format!("M = {m} invalid for I = {} ({})", nuc.spin, nuc.label)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for BasisKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{} {}", self.n, self.m_n)?;
        if let Some(ms) = self.m_s {
            write!(f, ", {ms}")?;
        }
        for m in &self.m_i {
            write!(f, ", {m}")?;
        }
        write!(f, "⟩")
    }
}

/// Ordered, duplicate-free list of basis kets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSet {
    kets: Vec<BasisKet>,
    n_max: u32,
    mf_filter: Option<Half>,
}

impl BasisSet {
    pub fn kets(&self) -> &[BasisKet] {
        &self.kets
    }

    pub fn len(&self) -> usize {
        self.kets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kets.is_empty()
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn mf_filter(&self) -> Option<Half> {
        self.mf_filter
    }

    pub fn index_of(&self, ket: &BasisKet) -> Option<usize> {
        self.kets.binary_search(ket).ok()
    }

    /// Indices of the kets in each M_F block, keyed by M_F.
    pub fn blocks(&self) -> BTreeMap<Half, Vec<usize>> {
        let mut out: BTreeMap<Half, Vec<usize>> = BTreeMap::new();
        for (i, k) in self.kets.iter().enumerate() {
            out.entry(k.total_projection()).or_default().push(i);
        }
        out
    }

    /// The sub-basis of one M_F block.
    pub fn restrict(&self, mf: Half) -> BasisSet {
        BasisSet {
            kets: self.kets.iter().filter(|k| k.total_projection() == mf).cloned().collect(),
            n_max: self.n_max,
            mf_filter: Some(mf),
        }
    }
}

/// Full uncoupled basis for `spec` up to `n_max`, optionally restricted to a
/// single M_F block.
pub fn build_basis(spec: &MoleculeSpec, n_max: u32, mf_filter: Option<Half>) -> Result<BasisSet> {
    if n_max < 1 {
        return Err(Error::Invalid(String::from("n_max must be at least 1")));
    }
    let spins: Vec<Half> = spec.nuclei.iter().map(|n| n.spin).collect();
    let ms_values: Vec<Option<Half>> = match spec.electron {
        Some(_) => vec![Some(Half(-1)), Some(Half(1))],
        None => vec![None],
    };
    let nuclear = nuclear_projections(&spins);
    let mut kets = Vec::new();
    for n in 0..=n_max {
        for m_n in -(n as i32)..=(n as i32) {
            for &m_s in &ms_values {
                for m_i in &nuclear {
                    let ket = BasisKet { n, m_n, m_s, m_i: m_i.clone() };
                    if mf_filter.is_none_or(|mf| ket.total_projection() == mf) {
                        kets.push(ket);
                    }
                }
            }
        }
    }
    // generation order is already lexicographic; sorting keeps that a guarantee
    kets.sort();
    Ok(BasisSet { kets, n_max, mf_filter })
}

/// Every combination of nuclear projections, each nucleus ascending,
/// lexicographic over nuclei.
fn nuclear_projections(spins: &[Half]) -> Vec<Vec<Half>> {
    let mut out: Vec<Vec<Half>> = vec![Vec::new()];
    for &i in spins {
        let mut next = Vec::with_capacity(out.len() * (i.twice() as usize + 1));
        for prefix in &out {
            for m in i.projections().rev() {
                let mut v = prefix.clone();
                v.push(m);
                next.push(v);
            }
        }
        out = next;
    }
    out
}
