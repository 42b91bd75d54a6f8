use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;

use crate::{Error, Result};

/// Largest supported number of sites.
pub const MAX_SITES: usize = 16;

/// Dense many-body state over 2^n amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    n: usize,
    amps: Vec<Complex64>,
}

impl SpinState {
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::Structure(format!("{} amplitudes for {n} sites", amps.len())));
        }
        Ok(SpinState { n, amps })
    }

    /// Product state |+⟩^⊗n with |+⟩ = (|↑⟩ + |↓⟩)/√2.
    pub fn plus(n: usize) -> Result<Self> {
        check_size(n)?;
        let a = Complex64::new((0.5f64).powi(n as i32).sqrt(), 0.0);
        Ok(SpinState { n, amps: vec![a; 1 << n] })
    }

    /// Computational basis state with bits of `index` as spins.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_size(n)?;
        if index >= 1 << n {
            return Err(Error::Structure(format!("index {index} outside 2^{n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(SpinState { n, amps })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &SpinState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn expect_sz(&self, site: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(b, a)| if b >> site & 1 == 1 { 0.5 } else { -0.5 } * a.norm_sqr())
            .sum()
    }

    /// ⟨S^z_tot⟩ and ⟨(S^z_tot)²⟩.
    pub fn total_sz_moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (b, a) in self.amps.iter().enumerate() {
            let m = f64::from(b.count_ones()) - 0.5 * self.n as f64;
            m1 += m * a.norm_sqr();
            m2 += m * m * a.norm_sqr();
        }
        (m1, m2)
    }

    /// Multiplies each basis amplitude by exp(−i φ(b)).
    pub fn apply_diagonal_phase(&mut self, phase: impl Fn(usize) -> f64) {
        for (b, a) in self.amps.iter_mut().enumerate() {
            let p = phase(b);
            *a *= Complex64::new(p.cos(), -p.sin());
        }
    }

    /// exp(−i Σ_j θ_j S^z_j).
    pub fn apply_z_rotations(&mut self, theta: &[f64]) {
        let n = self.n;
        self.apply_diagonal_phase(|b| (0..n).map(|j| if b >> j & 1 == 1 { 0.5 } else { -0.5 } * theta[j]).sum());
    }

    /// Global π pulse about x (every spin flipped, up to a global phase).
    pub fn flip_all(&mut self) {
        let mask = (1usize << self.n) - 1;
        let old = self.amps.clone();
        for (b, a) in self.amps.iter_mut().enumerate() {
            *a = old[b ^ mask];
        }
    }

    /// exp(−i θ (n̂·S_j)) on every site.
    pub fn rotate_all(&mut self, axis: [f64; 3], theta: f64) {
        let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (nx, ny, nz) = (axis[0] / len, axis[1] / len, axis[2] / len);
        let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
        let i = Complex64::i();
        // single-site matrix in the (↑, ↓) basis
        let uu = Complex64::new(c, 0.0) - i * s * nz;
        let dd = Complex64::new(c, 0.0) + i * s * nz;
        let ud = -i * s * Complex64::new(nx, -ny);
        let du = -i * s * Complex64::new(nx, ny);
        for j in 0..self.n {
            let bit = 1usize << j;
            for b in 0..self.amps.len() {
                if b & bit == 0 {
                    let down = self.amps[b];
                    let up = self.amps[b | bit];
                    self.amps[b | bit] = uu * up + ud * down;
                    self.amps[b] = du * up + dd * down;
                }
            }
        }
    }

    /// Collective spin S_a|ψ⟩ for a ∈ {x, y, z}.
    pub(crate) fn apply_collective(&self, axis: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..self.n {
                let up = b >> j & 1 == 1;
                match axis {
                    0 => out[b ^ (1 << j)] += a * 0.5,
                    1 => {
                        // S^y|↑⟩ = (i/2)|↓⟩, S^y|↓⟩ = −(i/2)|↑⟩
                        let f = if up { Complex64::new(0.0, 0.5) } else { Complex64::new(0.0, -0.5) };
                        out[b ^ (1 << j)] += a * f;
                    }
                    _ => out[b] += a * if up { 0.5 } else { -0.5 },
                }
            }
        }
        out
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::Invalid(format!("site count {n} outside 1..={MAX_SITES}")));
    }
    Ok(())
}
