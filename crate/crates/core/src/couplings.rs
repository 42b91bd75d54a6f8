//! Dipolar spin-coupling constants and lattice coupling maps.
//!
//! Constants are kept in Debye² until a geometry is applied; maps hold
//! J/2π in Hz. Many-body evolution multiplies by 2π.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::effective::EffectiveSpinHalf;
use crate::spectrum::DipoleTriple;
use crate::units::dipolar_hz;
use crate::{Error, Result};

/// J_⊥ = 2d_↑↓², J_z = (d_↑ − d_↓)², W_z = ½(d_↑² − d_↓²), V = ¼(d_↑ + d_↓)², all in D².
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SpinCouplingConstants {
    pub j_perp: f64,
    pub j_z: f64,
    pub w_z: f64,
    pub v: f64,
}

pub fn coupling_constants(d: &DipoleTriple) -> SpinCouplingConstants {
    SpinCouplingConstants {
        j_perp: 2.0 * d.d_cross * d.d_cross,
        j_z: (d.d_up - d.d_down).powi(2),
        w_z: 0.5 * (d.d_up * d.d_up - d.d_down * d.d_down),
        v: 0.25 * (d.d_up + d.d_down).powi(2),
    }
}

impl From<&EffectiveSpinHalf> for SpinCouplingConstants {
    fn from(eff: &EffectiveSpinHalf) -> Self {
        coupling_constants(&eff.dipoles)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dims {
    Chain,
    Square,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub dims: Dims,
    /// Sites per side.
    pub l: usize,
    /// Spacing, nm.
    pub a: f64,
    /// Common E/B axis in lattice coordinates (x along the chain, z out of
    /// the plane). Normalised on use.
    pub field_axis: [f64; 3],
}

impl LatticeGeometry {
    /// Square plane with the field perpendicular to it.
    pub fn square(l: usize, a: f64) -> Self {
        LatticeGeometry { dims: Dims::Square, l, a, field_axis: [0.0, 0.0, 1.0] }
    }

    /// Chain along x with the field along z.
    pub fn chain(l: usize, a: f64) -> Self {
        LatticeGeometry { dims: Dims::Chain, l, a, field_axis: [0.0, 0.0, 1.0] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::Invalid(format!("lattice size must be at least 2, got {}", self.l)));
        }
        if !(self.a > 0.0) {
            return Err(Error::Invalid(format!("lattice spacing must be positive, got {}", self.a)));
        }
        let n = norm(self.field_axis);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Invalid(format!("field axis {:?} has no direction", self.field_axis)));
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        match self.dims {
            Dims::Chain => self.l,
            Dims::Square => self.l * self.l,
        }
    }

    /// Integer lattice coordinates of a site (row-major for the square).
    pub fn coords(&self, site: usize) -> (i64, i64) {
        match self.dims {
            Dims::Chain => (site as i64, 0),
            Dims::Square => ((site % self.l) as i64, (site / self.l) as i64),
        }
    }

    /// Position in nm.
    pub fn position(&self, site: usize) -> [f64; 3] {
        let (x, y) = self.coords(site);
        [x as f64 * self.a, y as f64 * self.a, 0.0]
    }

    /// Nearest neighbours of a site under open boundaries.
    pub fn neighbours(&self, site: usize) -> Vec<usize> {
        let (x, y) = self.coords(site);
        let l = self.l as i64;
        let steps: &[(i64, i64)] = match self.dims {
            Dims::Chain => &[(-1, 0), (1, 0)],
            Dims::Square => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
        };
        let ymax = if self.dims == Dims::Chain { 1 } else { l };
        steps
            .iter()
            .map(|(dx, dy)| (x + dx, y + dy))
            .filter(|&(a, b)| a >= 0 && a < l && b >= 0 && b < ymax)
            .map(|(a, b)| (b * l + a) as usize)
            .collect()
    }

    /// Bulk coordination number: 2 for a chain, 4 for a square.
    pub fn coordination(&self) -> usize {
        match self.dims {
            Dims::Chain => 2,
            Dims::Square => 4,
        }
    }
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// (1 − 3cos²θ)/|R|³ in nm⁻³, θ measured from the field axis.
pub fn geometric_factor(r: [f64; 3], field_axis: [f64; 3]) -> Result<f64> {
    let rn = norm(r);
    if !(rn > 0.0) {
        return Err(Error::Domain(format!("zero separation {r:?}")));
    }
    let an = norm(field_axis);
    if !(an > 0.0) {
        return Err(Error::Domain(format!("field axis {field_axis:?} has no direction")));
    }
    let cos = (r[0] * field_axis[0] + r[1] * field_axis[1] + r[2] * field_axis[2]) / (rn * an);
    Ok((1.0 - 3.0 * cos * cos) / (rn * rn * rn))
}

/// One coupled pair, i < j, couplings as J/2π in Hz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCoupling {
    pub i: usize,
    pub j: usize,
    pub jz_hz: f64,
    pub jperp_hz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingMap {
    pub n_sites: usize,
    pub pairs: Vec<PairCoupling>,
    pub geometry: Option<LatticeGeometry>,
    /// Nearest-neighbour J_z/2π and J_⊥/2π along the first lattice axis, Hz.
    pub nn_jz_hz: f64,
    pub nn_jperp_hz: f64,
}

pub fn coupling_map(geom: &LatticeGeometry, consts: &SpinCouplingConstants, cutoff_nm: Option<f64>) -> Result<CouplingMap> {
    geom.validate()?;
    let n = geom.n_sites();
    let mut pairs = Vec::new();
    for i in 0..n {
        let pi = geom.position(i);
        for j in i + 1..n {
            let pj = geom.position(j);
            let r = [pj[0] - pi[0], pj[1] - pi[1], pj[2] - pi[2]];
            if cutoff_nm.is_some_and(|c| norm(r) > c) {
                continue;
            }
            let g = geometric_factor(r, geom.field_axis)?;
            pairs.push(PairCoupling { i, j, jz_hz: dipolar_hz(g * consts.j_z), jperp_hz: dipolar_hz(g * consts.j_perp) });
        }
    }
    let g_nn = geometric_factor([geom.a, 0.0, 0.0], geom.field_axis)?;
    Ok(CouplingMap {
        n_sites: n,
        pairs,
        geometry: Some(*geom),
        nn_jz_hz: dipolar_hz(g_nn * consts.j_z),
        nn_jperp_hz: dipolar_hz(g_nn * consts.j_perp),
    })
}

impl CouplingMap {
    /// Map from explicit pairs (no geometry).
    pub fn from_pairs(n_sites: usize, pairs: Vec<PairCoupling>) -> Result<Self> {
        for p in &pairs {
            if p.i >= p.j || p.j >= n_sites {
                return Err(Error::Structure(format!("pair ({}, {}) invalid for {n_sites} sites", p.i, p.j)));
            }
        }
        let nn = pairs.iter().find(|p| p.j == p.i + 1).copied();
        Ok(CouplingMap {
            n_sites,
            pairs,
            geometry: None,
            nn_jz_hz: nn.map_or(0.0, |p| p.jz_hz),
            nn_jperp_hz: nn.map_or(0.0, |p| p.jperp_hz),
        })
    }

    /// Every pair coupled with the same constants.
    pub fn all_to_all(n_sites: usize, jz_hz: f64, jperp_hz: f64) -> Self {
        let mut pairs = Vec::new();
        for i in 0..n_sites {
            for j in i + 1..n_sites {
                pairs.push(PairCoupling { i, j, jz_hz, jperp_hz });
            }
        }
        CouplingMap { n_sites, pairs, geometry: None, nn_jz_hz: jz_hz, nn_jperp_hz: jperp_hz }
    }

    pub fn scaled(&self, jz: f64, jperp: f64) -> Self {
        let mut m = self.clone();
        for p in &mut m.pairs {
            p.jz_hz *= jz;
            p.jperp_hz *= jperp;
        }
        m.nn_jz_hz *= jz;
        m.nn_jperp_hz *= jperp;
        m
    }

    /// J_jk/2π for one unordered pair (0 when absent).
    pub fn jz(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.pairs.iter().find(|p| p.i == a && p.j == b).map_or(0.0, |p| p.jz_hz)
    }
}

/// (J̄_z, J̄_⊥) = (1/N²) Σ_{i≠j} J_ij over ordered pairs, Hz.
pub fn mean_couplings(map: &CouplingMap) -> (f64, f64) {
    let n2 = (map.n_sites * map.n_sites) as f64;
    let (sz, sp) = map.pairs.iter().fold((0.0, 0.0), |(a, b), p| (a + p.jz_hz, b + p.jperp_hz));
    (2.0 * sz / n2, 2.0 * sp / n2)
}
