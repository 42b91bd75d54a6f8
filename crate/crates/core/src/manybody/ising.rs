use alloc::format;
use alloc::vec::Vec;

use super::{angular, SpinState};
use crate::couplings::CouplingMap;
use crate::{Error, Result};

fn check(map: &CouplingMap, state: &SpinState) -> Result<()> {
    if map.n_sites != state.n_sites() {
        return Err(Error::Structure(format!("map has {} sites, state has {}", map.n_sites, state.n_sites())));
    }
    Ok(())
}

/// Σ_{i<j} 2πJ^z_ij s_i s_j for every basis state, rad/s.
pub fn ising_energies(map: &CouplingMap) -> Vec<f64> {
    let dim = 1usize << map.n_sites;
    let mut e = alloc::vec![0.0; dim];
    for p in &map.pairs {
        let w = angular(p.jz_hz) * 0.25;
        if w == 0.0 {
            continue;
        }
        for (b, x) in e.iter_mut().enumerate() {
            let same = (b >> p.i & 1) == (b >> p.j & 1);
            *x += if same { w } else { -w };
        }
    }
    e
}

/// exp(−i t Σ_{i<j} 2πJ^z_ij S^z_i S^z_j)|ψ⟩.
pub fn evolve_ising(map: &CouplingMap, state: &SpinState, t: f64) -> Result<SpinState> {
    check(map, state)?;
    let e = ising_energies(map);
    let mut out = state.clone();
    out.apply_diagonal_phase(|b| e[b] * t);
    Ok(out)
}

/// Local z rotations exp(−i t Σ_j h_j S^z_j) with h_j = ½ Σ_k 2πJ^z_jk.
///
/// Pure S^zS^z evolution to t = π/J leaves each neighbour pair a
/// controlled-phase gate dressed by these single-site phases; removing them
/// turns |+⟩^⊗n into the standard cluster state.
pub fn frame_correction(map: &CouplingMap, state: &SpinState, t: f64) -> Result<SpinState> {
    check(map, state)?;
    let mut h = alloc::vec![0.0; map.n_sites];
    for p in &map.pairs {
        let w = 0.5 * angular(p.jz_hz);
        h[p.i] += w;
        h[p.j] += w;
    }
    let theta: Vec<f64> = h.iter().map(|x| x * t).collect();
    let mut out = state.clone();
    out.apply_z_rotations(&theta);
    Ok(out)
}

/// t_c = π / |2π J^z_nn| in seconds.
pub fn cluster_time(map: &CouplingMap) -> Result<f64> {
    let w = angular(map.nn_jz_hz).abs();
    if !(w > 0.0) {
        return Err(Error::Degenerate(alloc::string::String::from("nearest-neighbour J_z vanishes; the Ising protocol is undefined")));
    }
    Ok(core::f64::consts::PI / w)
}
