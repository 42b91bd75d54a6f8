use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;
use rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ising::{frame_correction, ising_energies};
use super::stabilizer::{pauli_correlator, stabilizer_expectation, Boundary};
use super::{angular, squeezing_parameter, SpinState, XxzPropagator};
use crate::couplings::{CouplingMap, LatticeGeometry};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StaticProfile {
    /// h_i = ΔE_↑↓ |r_i − r_centre|² in lattice units (deterministic).
    Harmonic,
    /// h_i drawn independently from N(0, σ²), σ in Hz.
    Gaussian { sigma: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseKind {
    White,
    Static(StaticProfile),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    /// White-noise dephasing rate 1/T₂, 1/s.
    pub gamma_d: f64,
    /// Harmonic splitting scale ΔE_↑↓, Hz.
    pub delta_e_updown: f64,
    pub kind: NoiseKind,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_d >= 0.0) || !(self.delta_e_updown >= 0.0) {
            return Err(Error::Invalid(format!("noise rates must be non-negative: Γ_d = {}, ΔE = {}", self.gamma_d, self.delta_e_updown)));
        }
        if let NoiseKind::Static(StaticProfile::Gaussian { sigma }) = self.kind {
            if !(sigma >= 0.0) {
                return Err(Error::Invalid(format!("Gaussian width must be non-negative, got {sigma}")));
            }
        }
        Ok(())
    }
}

/// Sample mean and standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleStat {
    pub mean: f64,
    pub stderr: f64,
}

impl EnsembleStat {
    fn from_samples(x: &[f64]) -> Self {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        if x.len() < 2 {
            return EnsembleStat { mean, stderr: 0.0 };
        }
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        EnsembleStat { mean, stderr: (var / n).sqrt() }
    }
}

/// e^{−Γ_d t/2}.
pub fn white_noise_decay(gamma_d: f64, t: f64) -> f64 {
    (-0.5 * gamma_d * t).exp()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// 2⟨S^x⟩ of a single free spin under white noise h(t) with
/// ⟨h(t)h(t′)⟩ = Γ_d δ(t − t′), by Euler–Maruyama phase kicks.
pub fn white_noise_single_spin(gamma_d: f64, t: f64, steps: usize, n_traj: usize, seed: u64) -> Result<EnsembleStat> {
    if n_traj < 1 || steps < 1 {
        return Err(Error::Invalid(String::from("need at least one trajectory and one step")));
    }
    let dt = t / steps as f64;
    let kick = (gamma_d * dt).sqrt();
    let samples: Vec<f64> = (0..n_traj)
        .map(|k| {
            let mut rng = rng_for(seed, k as u64);
            let mut phi = 0.0;
            for _ in 0..steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                phi += kick * z;
            }
            phi.cos()
        })
        .collect();
    Ok(EnsembleStat::from_samples(&samples))
}


/// Trajectory average of the cluster stabilizer at `site` for Ising evolution
/// plus independent white noise on every site (validation mode, N ≤ 6).
#[allow(clippy::too_many_arguments)]
pub fn white_noise_stabilizer(
    map: &CouplingMap,
    geom: &LatticeGeometry,
    site: usize,
    gamma_d: f64,
    t: f64,
    steps: usize,
    n_traj: usize,
    seed: u64,
) -> Result<EnsembleStat> {
    if map.n_sites > 6 {
        return Err(Error::Invalid(format!("trajectory mode is limited to 6 sites, got {}", map.n_sites)));
    }
    if n_traj < 1 || steps < 1 {
        return Err(Error::Invalid(String::from("need at least one trajectory and one step")));
    }
    let dt = t / steps as f64;
    let kick = (gamma_d * dt).sqrt();
    let energies = ising_energies(map);
    let n = map.n_sites;
    let start = SpinState::plus(n)?;
    let mut samples = Vec::with_capacity(n_traj);
    for k in 0..n_traj {
        let mut rng = rng_for(seed, k as u64);
        let mut psi = start.clone();
        for _ in 0..steps {
            let theta: Vec<f64> = (0..n)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    kick * z
                })
                .collect();
            psi.apply_z_rotations(&theta);
            psi.apply_diagonal_phase(|b| energies[b] * dt);
        }
        let psi = frame_correction(map, &psi, t)?;
        samples.push(stabilizer_expectation(&psi, site, geom, Boundary::Open)?);
    }
    Ok(EnsembleStat::from_samples(&samples))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dynamics {
    /// Ising evolution; `frame_correct` removes the single-site phases at the end.
    Ising { frame_correct: bool },
    Xxz,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    /// 2^{n+1}⟨S^x_j Π S^z_k⟩ over the given neighbours.
    Stabilizer { site: usize, neighbours: Vec<usize> },
    /// Wineland ξ².
    Squeezing,
}

/// Per-site static fields h_i/2π in Hz for one sample.
fn static_fields(geom: Option<&LatticeGeometry>, n: usize, noise: &NoiseModel, rng: &mut ChaCha20Rng) -> Result<Vec<f64>> {
    match noise.kind {
        NoiseKind::Static(StaticProfile::Harmonic) => {
            let g = geom.ok_or_else(|| Error::Invalid(String::from("harmonic profile needs a lattice geometry")))?;
            let c = 0.5 * (g.l as f64 - 1.0);
            Ok((0..n)
                .map(|s| {
                    let (x, y) = g.coords(s);
                    let cy = if g.dims == crate::couplings::Dims::Chain { 0.0 } else { c };
                    noise.delta_e_updown * ((x as f64 - c).powi(2) + (y as f64 - cy).powi(2))
                })
                .collect())
        }
        NoiseKind::Static(StaticProfile::Gaussian { sigma }) => Ok((0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            })
            .collect()),
        NoiseKind::White => Err(Error::Invalid(String::from("static ensemble needs a static noise model"))),
    }
}

/// Sample-averaged observables after evolving `state` for time t under the
/// spin Hamiltonian plus static fields Σ h_i S^z_i. With `echo`, every spin
/// is flipped at t/2 and again at t.
#[allow(clippy::too_many_arguments)]
pub fn static_noise_ensemble(
    map: &CouplingMap,
    state: &SpinState,
    noise: &NoiseModel,
    dynamics: Dynamics,
    echo: bool,
    t: f64,
    n_samples: usize,
    seed: u64,
    observables: &[Observable],
) -> Result<Vec<EnsembleStat>> {
    noise.validate()?;
    if n_samples < 1 {
        return Err(Error::Invalid(String::from("n_samples must be at least 1")));
    }
    if map.n_sites != state.n_sites() {
        return Err(Error::Structure(format!("map has {} sites, state has {}", map.n_sites, state.n_sites())));
    }
    let n = map.n_sites;
    let mut samples = vec![Vec::with_capacity(n_samples); observables.len()];
    let ising = ising_energies(map);
    for k in 0..n_samples {
        let mut rng = rng_for(seed, k as u64);
        let fields = static_fields(map.geometry.as_ref(), n, noise, &mut rng)?;
        let segments: &[f64] = if echo { &[0.5, 0.5] } else { &[1.0] };
        let mut psi = state.clone();
        match dynamics {
            Dynamics::Ising { frame_correct } => {
                let field_w: Vec<f64> = fields.iter().map(|&h| angular(h)).collect();
                for (s, frac) in segments.iter().enumerate() {
                    let dt = t * frac;
                    psi.apply_diagonal_phase(|b| ising[b] * dt);
                    let theta: Vec<f64> = field_w.iter().map(|w| w * dt).collect();
                    psi.apply_z_rotations(&theta);
                    if echo && s < 2 {
                        psi.flip_all();
                    }
                }
                if frame_correct {
                    psi = frame_correction(map, &psi, t)?;
                }
            }
            Dynamics::Xxz => {
                let prop = XxzPropagator::new(map, Some(&fields))?;
                for frac in segments {
                    psi = prop.evolve(&psi, t * frac)?;
                    if echo {
                        psi.flip_all();
                    }
                }
            }
        }
        for (o, obs) in observables.iter().enumerate() {
            let v = match obs {
                Observable::Stabilizer { site, neighbours } => pauli_correlator(&psi, *site, neighbours),
                Observable::Squeezing => squeezing_parameter(&psi)?.xi2,
            };
            samples[o].push(v);
        }
    }
    Ok(samples.iter().map(|s| EnsembleStat::from_samples(s)).collect())
}
