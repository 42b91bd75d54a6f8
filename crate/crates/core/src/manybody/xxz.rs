use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;

use super::{angular, SpinState};
use crate::couplings::CouplingMap;
use crate::{Error, Result};

/// Sectors larger than this are propagated by Krylov projection instead of
/// full diagonalisation.
pub const KRYLOV_THRESHOLD: usize = 1024;

const KRYLOV_DIM: usize = 40;
const KRYLOV_TOL: f64 = 1e-13;

struct Sector {
    states: Vec<usize>,
    kind: SectorKind,
}

enum SectorKind {
    Dense { values: Vec<f64>, vectors: DMatrix<f64> },
    Sparse { diag: Vec<f64>, hops: Vec<(usize, usize, f64)>, norm_bound: f64 },
}

/// H = Σ_{i<j} 2π[½J^⊥_ij(S⁺_iS⁻_j + h.c.) + J^z_ij S^z_iS^z_j] + Σ_j 2πh_j S^z_j,
/// block-diagonalised by total S^z once and reused for any evolution time.
pub struct XxzPropagator {
    n: usize,
    sectors: Vec<Sector>,
}

impl XxzPropagator {
    /// `fields` are per-site h_j/2π in Hz.
    pub fn new(map: &CouplingMap, fields: Option<&[f64]>) -> Result<Self> {
        let n = map.n_sites;
        if n == 0 || n > super::MAX_SITES {
            return Err(Error::Invalid(format!("site count {n} outside 1..={}", super::MAX_SITES)));
        }
        if let Some(f) = fields {
            if f.len() != n {
                return Err(Error::Structure(format!("{} local fields for {n} sites", f.len())));
            }
        }
        let dim = 1usize << n;
        let mut by_count: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for b in 0..dim {
            by_count[b.count_ones() as usize].push(b);
        }
        let mut index_in_sector = vec![0; dim];
        for states in &by_count {
            for (k, &b) in states.iter().enumerate() {
                index_in_sector[b] = k;
            }
        }
        let diag_of = |b: usize| -> f64 {
            let mut e = 0.0;
            for p in &map.pairs {
                let same = (b >> p.i & 1) == (b >> p.j & 1);
                e += angular(p.jz_hz) * if same { 0.25 } else { -0.25 };
            }
            if let Some(f) = fields {
                for (j, h) in f.iter().enumerate() {
                    e += angular(*h) * if b >> j & 1 == 1 { 0.5 } else { -0.5 };
                }
            }
            e
        };
        let mut sectors = Vec::with_capacity(n + 1);
        for states in by_count {
            let m = states.len();
            let diag: Vec<f64> = states.iter().map(|&b| diag_of(b)).collect();
            let mut hops = Vec::new();
            for (k, &b) in states.iter().enumerate() {
                for p in &map.pairs {
                    if (b >> p.i & 1) != (b >> p.j & 1) {
                        let c = b ^ (1 << p.i) ^ (1 << p.j);
                        let kc = index_in_sector[c];
                        if kc > k {
                            // ⟨↑↓|½J(S⁺S⁻ + S⁻S⁺)|↓↑⟩ = J/2
                            hops.push((k, kc, 0.5 * angular(p.jperp_hz)));
                        }
                    }
                }
            }
            let kind = if m <= KRYLOV_THRESHOLD {
                let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
                for &(a, b, w) in &hops {
                    h[(a, b)] += w;
                    h[(b, a)] += w;
                }
                let se = SymmetricEigen::new(h);
                SectorKind::Dense { values: se.eigenvalues.as_slice().to_vec(), vectors: se.eigenvectors }
            } else {
                let mut row_sum = diag.iter().map(|d| d.abs()).collect::<Vec<_>>();
                for &(a, b, w) in &hops {
                    row_sum[a] += w.abs();
                    row_sum[b] += w.abs();
                }
                let norm_bound = row_sum.iter().copied().fold(0.0, f64::max);
                SectorKind::Sparse { diag, hops, norm_bound }
            };
            sectors.push(Sector { states, kind });
        }
        Ok(XxzPropagator { n, sectors })
    }

    /// exp(−iHt)|ψ⟩.
    pub fn evolve(&self, state: &SpinState, t: f64) -> Result<SpinState> {
        if state.n_sites() != self.n {
            return Err(Error::Structure(format!("propagator has {} sites, state has {}", self.n, state.n_sites())));
        }
        let mut out = state.clone();
        let amps = state.amplitudes();
        let dst = out.amplitudes_mut();
        for sector in &self.sectors {
            let x: Vec<Complex64> = sector.states.iter().map(|&b| amps[b]).collect();
            if x.iter().all(|a| a.norm_sqr() == 0.0) {
                continue;
            }
            let y = match &sector.kind {
                SectorKind::Dense { values, vectors } => dense_exp(values, vectors, &x, t),
                SectorKind::Sparse { diag, hops, norm_bound } => krylov_exp(diag, hops, *norm_bound, &x, t),
            };
            for (&b, v) in sector.states.iter().zip(y) {
                dst[b] = v;
            }
        }
        Ok(out)
    }
}

fn dense_exp(values: &[f64], vectors: &DMatrix<f64>, x: &[Complex64], t: f64) -> Vec<Complex64> {
    let m = x.len();
    let mut coeff = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..m {
        let col = vectors.column(k);
        let c: Complex64 = (0..m).map(|i| x[i] * col[i]).sum();
        let p = values[k] * t;
        coeff[k] = c * Complex64::new(p.cos(), -p.sin());
    }
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..m {
        let col = vectors.column(k);
        for i in 0..m {
            y[i] += coeff[k] * col[i];
        }
    }
    y
}

fn matvec(diag: &[f64], hops: &[(usize, usize, f64)], x: &[Complex64]) -> Vec<Complex64> {
    let mut y: Vec<Complex64> = diag.iter().zip(x).map(|(d, v)| v * *d).collect();
    for &(a, b, w) in hops {
        y[a] += x[b] * w;
        y[b] += x[a] * w;
    }
    y
}

/// Lanczos propagation with time steps small enough that ‖H‖dt stays below
/// a few units, so a 40-dimensional Krylov space is converged.
fn krylov_exp(diag: &[f64], hops: &[(usize, usize, f64)], norm_bound: f64, x: &[Complex64], t: f64) -> Vec<Complex64> {
    let n_steps = ((norm_bound * t.abs()) / 4.0).ceil().max(1.0) as usize;
    let dt = t / n_steps as f64;
    let mut v = x.to_vec();
    for _ in 0..n_steps {
        v = lanczos_step(diag, hops, &v, dt);
    }
    v
}

fn lanczos_step(diag: &[f64], hops: &[(usize, usize, f64)], x: &[Complex64], dt: f64) -> Vec<Complex64> {
    let beta0 = x.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if beta0 == 0.0 {
        return x.to_vec();
    }
    let mut basis: Vec<Vec<Complex64>> = vec![x.iter().map(|a| a / beta0).collect()];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for k in 0..KRYLOV_DIM {
        let mut w = matvec(diag, hops, &basis[k]);
        let a: f64 = basis[k].iter().zip(&w).map(|(q, y)| (q.conj() * y).re).sum();
        alpha.push(a);
        // full reorthogonalisation
        for q in &basis {
            let c: Complex64 = q.iter().zip(&w).map(|(qi, wi)| qi.conj() * wi).sum();
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
        let b = w.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if b < KRYLOV_TOL || k + 1 == KRYLOV_DIM {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|a| a / b).collect());
    }
    let m = alpha.len();
    let mut tri = DMatrix::zeros(m, m);
    for i in 0..m {
        tri[(i, i)] = alpha[i];
        if i + 1 < m {
            tri[(i, i + 1)] = beta[i];
            tri[(i + 1, i)] = beta[i];
        }
    }
    let se = SymmetricEigen::new(tri);
    // exp(−iT dt) e₁
    let mut c = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..m {
        let p = se.eigenvalues[k] * dt;
        let ph = Complex64::new(p.cos(), -p.sin()) * se.eigenvectors[(0, k)];
        for i in 0..m {
            c[i] += ph * se.eigenvectors[(i, k)];
        }
    }
    let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
    for (ci, q) in c.iter().zip(&basis) {
        for (yi, qi) in y.iter_mut().zip(q) {
            *yi += ci * qi * beta0;
        }
    }
    y
}

/// One-shot XXZ evolution; build an [`XxzPropagator`] to reuse sectors.
pub fn evolve_xxz(map: &CouplingMap, state: &SpinState, t: f64, fields: Option<&[f64]>) -> Result<SpinState> {
    if map.n_sites != state.n_sites() {
        return Err(Error::Structure(format!("map has {} sites, state has {}", map.n_sites, state.n_sites())));
    }
    XxzPropagator::new(map, fields)?.evolve(state, t)
}
