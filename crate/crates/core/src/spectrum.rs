//! Field sweeps with adiabatic state tracking.
//!
//! Each tracked label lives in one M_F block. Blocks are diagonalised
//! separately, so crossings between different M_F are followed diabatically.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::angular::{BasisKet, BasisSet, Half};
use crate::eigen::{symmetric_eigen, Eigen};
use crate::hamiltonian::{dipole_ket_element, HamiltonianParts, TermMask};
use crate::molecule::{FieldPoint, MoleculeSpec};
use crate::{Error, Result};

/// How a label picks its state at the first sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SeedTarget {
    /// The eigenstate with the largest weight on this bare ket.
    Ket(BasisKet),
    /// The `index`-th lowest eigenstate of the M_F block.
    Index { mf: Half, index: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub label: String,
    pub target: SeedTarget,
}

impl Seed {
    /// Seeds on a bare ket and names the label after it, e.g. `|1̃0,-4,1/2⟩`.
    pub fn ket(ket: BasisKet) -> Self {
        Seed { label: adiabatic_label(&ket), target: SeedTarget::Ket(ket) }
    }

    pub fn named(label: impl Into<String>, ket: BasisKet) -> Self {
        Seed { label: label.into(), target: SeedTarget::Ket(ket) }
    }

    fn mf(&self) -> Half {
        match &self.target {
            SeedTarget::Ket(k) => k.total_projection(),
            SeedTarget::Index { mf, .. } => *mf,
        }
    }
}

/// `|Ñ M_N, M_S, M_I…⟩` with a tilde marking the field-dressed state.
pub fn adiabatic_label(ket: &BasisKet) -> String {
    let mut s = format!("|{}\u{303}{}", ket.n, ket.m_n);
    if let Some(ms) = ket.m_s {
        s.push_str(&format!(",{ms}"));
    }
    for m in &ket.m_i {
        s.push_str(&format!(",{m}"));
    }
    s.push('⟩');
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackOptions {
    /// Minimum |⟨v(k)|v(k+1)⟩| accepted between successive points.
    pub threshold: f64,
    /// Eigenvalues closer than this (MHz) are treated as degenerate.
    pub degeneracy_tol: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions { threshold: 0.5, degeneracy_tol: 1e-9 }
    }
}

/// Hamiltonian split into the M_F blocks needed by a set of seeds.
#[derive(Clone, Debug)]
pub struct BlockedHamiltonian {
    basis: BasisSet,
    blocks: Vec<Block>,
}

#[derive(Clone, Debug)]
struct Block {
    mf: Half,
    /// positions of the block kets inside the full basis
    support: Vec<usize>,
    parts: HamiltonianParts,
}

impl BlockedHamiltonian {
    /// Builds the blocks in `mfs` (deduplicated) from `basis`.
    pub fn new(spec: &MoleculeSpec, basis: &BasisSet, mfs: &[Half], mask: TermMask) -> Result<Self> {
        let all = basis.blocks();
        let mut wanted: Vec<Half> = mfs.to_vec();
        wanted.sort();
        wanted.dedup();
        let mut blocks = Vec::with_capacity(wanted.len());
        for mf in wanted {
            let support = all.get(&mf).cloned().ok_or_else(|| Error::Structure(format!("basis has no M_F = {mf} block")))?;
            let parts = HamiltonianParts::new(spec, &basis.restrict(mf), mask)?;
            blocks.push(Block { mf, support, parts });
        }
        Ok(BlockedHamiltonian { basis: basis.clone(), blocks })
    }

    /// Blocks needed to host every seed.
    pub fn for_seeds(spec: &MoleculeSpec, basis: &BasisSet, seeds: &[Seed], mask: TermMask) -> Result<Self> {
        let mfs: Vec<Half> = seeds.iter().map(Seed::mf).collect();
        Self::new(spec, basis, &mfs, mask)
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn block_parts(&self, mf: Half) -> Option<&HamiltonianParts> {
        self.blocks.iter().find(|b| b.mf == mf).map(|b| &b.parts)
    }

    fn block_index(&self, mf: Half) -> Option<usize> {
        self.blocks.iter().position(|b| b.mf == mf)
    }
}

/// Eigen-decomposition of every block at one field point. Independent of
/// every other point, so callers may compute these in parallel.
#[derive(Clone, Debug)]
pub struct PointSpectrum {
    pub point: FieldPoint,
    blocks: Vec<Eigen>,
}

impl PointSpectrum {
    pub fn compute(h: &BlockedHamiltonian, point: FieldPoint) -> Self {
        let blocks = h.blocks.iter().map(|b| symmetric_eigen(b.parts.at(point))).collect();
        PointSpectrum { point, blocks }
    }

    /// Eigenvalues of the M_F block (ascending), if that block was built.
    pub fn block_values(&self, h: &BlockedHamiltonian, mf: Half) -> Option<&[f64]> {
        h.block_index(mf).map(|i| self.blocks[i].values.as_slice())
    }
}

/// Labelled energies and eigenvectors along a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumTrack {
    pub sweep: Vec<FieldPoint>,
    pub labels: Vec<String>,
    basis: BasisSet,
    /// positions in `basis` spanned by each label's block
    support: Vec<Vec<usize>>,
    /// energies[point][label], MHz
    pub energies: Vec<Vec<f64>>,
    /// vectors[point][label], amplitudes over `support[label]`
    vectors: Vec<Vec<Vec<f64>>>,
    /// smallest accepted overlap on each step (length = points − 1)
    pub min_overlap: Vec<f64>,
}

impl SpectrumTrack {
    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.sweep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sweep.is_empty()
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownLabel(String::from(label)))
    }

    pub fn energy(&self, label: &str, point: usize) -> Result<f64> {
        let l = self.label_index(label)?;
        self.check_point(point)?;
        Ok(self.energies[point][l])
    }

    /// Energies of one label along the whole sweep.
    pub fn series(&self, label: &str) -> Result<Vec<f64>> {
        let l = self.label_index(label)?;
        Ok(self.energies.iter().map(|e| e[l]).collect())
    }

    /// Eigenvector of a label expanded over the full basis.
    pub fn vector(&self, label: &str, point: usize) -> Result<DVector<f64>> {
        let l = self.label_index(label)?;
        self.check_point(point)?;
        let mut v = DVector::zeros(self.basis.len());
        for (&i, &a) in self.support[l].iter().zip(&self.vectors[point][l]) {
            v[i] = a;
        }
        Ok(v)
    }

    /// Amplitude of a label on one bare ket.
    pub fn amplitude(&self, label: &str, point: usize, ket: &BasisKet) -> Result<f64> {
        let l = self.label_index(label)?;
        self.check_point(point)?;
        let Some(pos) = self.basis.index_of(ket) else {
            return Err(Error::Structure(format!("ket {ket} not in basis")));
        };
        Ok(self.support[l].iter().position(|&i| i == pos).map_or(0.0, |k| self.vectors[point][l][k]))
    }

    fn check_point(&self, point: usize) -> Result<()> {
        if point >= self.sweep.len() {
            return Err(Error::Invalid(format!("point {point} outside sweep of length {}", self.sweep.len())));
        }
        Ok(())
    }

    /// d·⟨a|C¹_q|b⟩ in Debye between two tracked states.
    pub fn dipole_element(&self, spec: &MoleculeSpec, a: &str, b: &str, point: usize, q: i32) -> Result<f64> {
        if q.abs() > 1 {
            return Err(Error::Invalid(format!("dipole component q = {q} out of range")));
        }
        let la = self.label_index(a)?;
        let lb = self.label_index(b)?;
        self.check_point(point)?;
        let kets = self.basis.kets();
        let mut total = 0.0;
        for (&i, &x) in self.support[la].iter().zip(&self.vectors[point][la]) {
            if x == 0.0 {
                continue;
            }
            for (&j, &y) in self.support[lb].iter().zip(&self.vectors[point][lb]) {
                if y != 0.0 {
                    total += x * y * dipole_ket_element(spec, &kets[i], q, &kets[j]);
                }
            }
        }
        Ok(total)
    }

    /// ⟨a|O|b⟩ for an operator given on one M_F block of the basis (as
    /// returned by [`crate::hamiltonian::term_matrix`] on the restricted basis).
    pub fn block_operator_element(&self, op: &nalgebra::DMatrix<f64>, mf: Half, a: &str, b: &str, point: usize) -> Result<f64> {
        let block = self.basis.blocks().remove(&mf).ok_or_else(|| Error::Structure(format!("no M_F = {mf} block")))?;
        if op.nrows() != block.len() || op.ncols() != block.len() {
            return Err(Error::Structure(format!("operator is {}×{}, block has {} kets", op.nrows(), op.ncols(), block.len())));
        }
        let va = self.vector(a, point)?;
        let vb = self.vector(b, point)?;
        let xa = DVector::from_iterator(block.len(), block.iter().map(|&i| va[i]));
        let xb = DVector::from_iterator(block.len(), block.iter().map(|&i| vb[i]));
        Ok(xa.dot(&(op * xb)))
    }
}

/// Diagonal dipoles of the encoded pair and their q = 0 transition element.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct DipoleTriple {
    pub d_up: f64,
    pub d_down: f64,
    pub d_cross: f64,
}

pub fn dipole_elements(spec: &MoleculeSpec, track: &SpectrumTrack, up: &str, down: &str, point: usize) -> Result<DipoleTriple> {
    Ok(DipoleTriple {
        d_up: track.dipole_element(spec, up, up, point, 0)?,
        d_down: track.dipole_element(spec, down, down, point, 0)?,
        d_cross: track.dipole_element(spec, up, down, point, 0)?,
    })
}

/// (E_main_upper − E_main_lower) − (E_comp_upper − E_comp_lower) in MHz.
pub fn differential_stark_shift(track: &SpectrumTrack, main: (&str, &str), competing: (&str, &str), point: usize) -> Result<f64> {
    let (ml, mu) = main;
    let (cl, cu) = competing;
    Ok((track.energy(mu, point)? - track.energy(ml, point)?) - (track.energy(cu, point)? - track.energy(cl, point)?))
}

/// Diagonalises every point, then tracks the seeds along the sweep.
pub fn sweep_and_track(
    spec: &MoleculeSpec,
    basis: &BasisSet,
    sweep: &[FieldPoint],
    seeds: &[Seed],
    mask: TermMask,
    opts: TrackOptions,
) -> Result<SpectrumTrack> {
    let h = BlockedHamiltonian::for_seeds(spec, basis, seeds, mask)?;
    let spectra: Vec<PointSpectrum> = sweep.iter().map(|&p| PointSpectrum::compute(&h, p)).collect();
    track(&h, &spectra, seeds, opts)
}

/// Sequential tracking pass over precomputed spectra.
pub fn track(h: &BlockedHamiltonian, spectra: &[PointSpectrum], seeds: &[Seed], opts: TrackOptions) -> Result<SpectrumTrack> {
    if spectra.is_empty() {
        return Err(Error::Invalid(String::from("sweep is empty")));
    }
    if seeds.is_empty() {
        return Err(Error::Invalid(String::from("no seeds given")));
    }
    for (i, s) in seeds.iter().enumerate() {
        if seeds[..i].iter().any(|o| o.label == s.label) {
            return Err(Error::Invalid(format!("duplicate label `{}`", s.label)));
        }
    }
    let n_labels = seeds.len();
    let block_of: Vec<usize> = seeds
        .iter()
        .map(|s| h.block_index(s.mf()).ok_or_else(|| Error::Structure(format!("no block for seed `{}`", s.label))))
        .collect::<Result<_>>()?;
    let mut by_block: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (l, &b) in block_of.iter().enumerate() {
        by_block.entry(b).or_default().push(l);
    }

    let mut energies = vec![vec![0.0; n_labels]; spectra.len()];
    let mut vectors: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); n_labels]; spectra.len()];
    let mut min_overlap = vec![1.0f64; spectra.len().saturating_sub(1)];

    for (&b, labels) in &by_block {
        let block = &h.blocks[b];
        // initial assignment
        let first = &spectra[0].blocks[b];
        let mut cols = Vec::with_capacity(labels.len());
        for &l in labels {
            let col = match &seeds[l].target {
                SeedTarget::Ket(ket) => {
                    let pos = h.basis.index_of(ket).ok_or_else(|| Error::Structure(format!("seed ket {ket} not in basis")))?;
                    let row = block.support.iter().position(|&i| i == pos).expect("ket lies in its own M_F block");
                    (0..first.values.len())
                        .max_by(|&x, &y| first.vectors[(row, x)].abs().total_cmp(&first.vectors[(row, y)].abs()).then(y.cmp(&x)))
                        .expect("non-empty block")
                }
                SeedTarget::Index { index, mf } => {
                    if *index >= first.values.len() {
                        return Err(Error::Invalid(format!("index {index} outside M_F = {mf} block of {} states", first.values.len())));
                    }
                    *index
                }
            };
            if let Some(k) = cols.iter().position(|&c| c == col) {
                return Err(Error::Degenerate(format!(
                    "seeds `{}` and `{}` select the same eigenstate",
                    seeds[labels[k]].label, seeds[l].label
                )));
            }
            cols.push(col);
        }
        let mut prev: Vec<DVector<f64>> = cols.iter().map(|&c| first.vectors.column(c).clone_owned()).collect();
        for (k, &l) in labels.iter().enumerate() {
            energies[0][l] = first.values[cols[k]];
            vectors[0][l] = prev[k].as_slice().to_vec();
        }

        for step in 1..spectra.len() {
            let eig = &spectra[step].blocks[b];
            let overlaps: Vec<Vec<f64>> = prev
                .iter()
                .map(|p| (0..eig.values.len()).map(|c| p.dot(&eig.vectors.column(c)).abs()).collect())
                .collect();
            let assign = assign_columns(&overlaps);
            let mut next = Vec::with_capacity(labels.len());
            for (k, &l) in labels.iter().enumerate() {
                let c = assign[k];
                let v = resolve_degenerate(eig, c, &prev[k], &next, opts.degeneracy_tol);
                let ov = v.dot(&prev[k]);
                let overlap = ov.abs();
                if overlap < opts.threshold {
                    let mut ranked: Vec<usize> = (0..eig.values.len()).collect();
                    ranked.sort_by(|&x, &y| overlaps[k][y].total_cmp(&overlaps[k][x]));
                    let p = spectra[step].point;
                    return Err(Error::Tracking {
                        label: seeds[l].label.clone(),
                        point: step,
                        e_field: p.e_field,
                        b_field: p.b_field,
                        overlap,
                        first: ranked[0],
                        second: ranked.get(1).copied().unwrap_or(ranked[0]),
                    });
                }
                min_overlap[step - 1] = min_overlap[step - 1].min(overlap);
                let v = if ov < 0.0 { -v } else { v };
                energies[step][l] = eig.values[c];
                vectors[step][l] = v.as_slice().to_vec();
                next.push(v);
            }
            prev = next;
        }
    }

    let support = block_of.iter().map(|&b| h.blocks[b].support.clone()).collect();
    Ok(SpectrumTrack {
        sweep: spectra.iter().map(|s| s.point).collect(),
        labels: seeds.iter().map(|s| s.label.clone()).collect(),
        basis: h.basis.clone(),
        support,
        energies,
        vectors,
        min_overlap,
    })
}

/// Greedy maximum-overlap assignment of labels to columns followed by a
/// pairwise swap pass that keeps any exchange raising the total overlap.
fn assign_columns(overlaps: &[Vec<f64>]) -> Vec<usize> {
    let n_labels = overlaps.len();
    let n_cols = overlaps.first().map_or(0, Vec::len);
    let mut assign = vec![usize::MAX; n_labels];
    let mut taken = vec![false; n_cols];
    for _ in 0..n_labels {
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for (l, row) in overlaps.iter().enumerate() {
            if assign[l] != usize::MAX {
                continue;
            }
            for (c, &o) in row.iter().enumerate() {
                if !taken[c] && o > best.0 {
                    best = (o, l, c);
                }
            }
        }
        assign[best.1] = best.2;
        taken[best.2] = true;
    }
    loop {
        let mut improved = false;
        for a in 0..n_labels {
            for b in a + 1..n_labels {
                let (ca, cb) = (assign[a], assign[b]);
                if overlaps[a][cb] + overlaps[b][ca] > overlaps[a][ca] + overlaps[b][cb] + 1e-12 {
                    assign.swap(a, b);
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    assign
}

/// Inside a degenerate cluster the solver's basis is arbitrary; use the
/// projection of the predecessor onto the cluster instead, orthogonal to
/// labels already placed there.
fn resolve_degenerate(eig: &Eigen, c: usize, prev: &DVector<f64>, placed: &[DVector<f64>], tol: f64) -> DVector<f64> {
    let e = eig.values[c];
    let cluster: Vec<usize> = (0..eig.values.len()).filter(|&k| (eig.values[k] - e).abs() <= tol).collect();
    let own = eig.vectors.column(c).clone_owned();
    if cluster.len() < 2 {
        return own;
    }
    let mut v = DVector::zeros(prev.len());
    for &k in &cluster {
        let col = eig.vectors.column(k);
        v += col * col.dot(prev);
    }
    for p in placed {
        let in_cluster: f64 = cluster.iter().map(|&k| { let x = eig.vectors.column(k).dot(p); x * x }).sum();
        if in_cluster > 0.5 {
            v -= p * p.dot(&v);
        }
    }
    let norm = v.norm();
    if norm < 1e-8 {
        own
    } else {
        v / norm
    }
}

impl SpectrumTrack {
    /// Index seeds reproducing the tracked labels at `point`, for restarting
    /// a sweep from there.
    pub fn index_seeds(&self, h: &BlockedHamiltonian, spectrum: &PointSpectrum) -> Result<Vec<Seed>> {
        let point = self
            .sweep
            .iter()
            .position(|p| *p == spectrum.point)
            .ok_or_else(|| Error::Invalid(String::from("spectrum is not a point of this track")))?;
        let mut seeds = Vec::with_capacity(self.labels.len());
        for (l, label) in self.labels.iter().enumerate() {
            let mf = self.basis.kets()[self.support[l][0]].total_projection();
            let vals = spectrum.block_values(h, mf).ok_or_else(|| Error::Structure(format!("no M_F = {mf} block")))?;
            let e = self.energies[point][l];
            let index = (0..vals.len()).min_by(|&a, &b| (vals[a] - e).abs().total_cmp(&(vals[b] - e).abs())).expect("non-empty block");
            seeds.push(Seed { label: label.clone(), target: SeedTarget::Index { mf, index } });
        }
        Ok(seeds)
    }
}
