//! Effective two-level models: the ²Σ avoided crossing, microwave-dressed
//! ¹Σ states, and the encoded spin-1/2 record used by the coupling layer.
//!
//! In the ²Σ models μ₀B denotes the M_S = +1/2 Zeeman energy (g_S/2)μ_B B,
//! the same quantity that appears on the diagonal of the full Hamiltonian.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};
#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::angular::Half;
use crate::hamiltonian::{term_matrix, Term, TermMask};
use crate::molecule::{FieldPoint, MoleculeSpec, SpeciesKind};
use crate::spectrum::{dipole_elements, sweep_and_track, BlockedHamiltonian, DipoleTriple, PointSpectrum, Seed, SpectrumTrack, TrackOptions};
use crate::units::{BOHR_MAGNETON_MHZ_PER_GAUSS, DEBYE_KV_PER_CM_IN_MHZ};
use crate::{BasisSet, Error, Result};

/// Above this Stark parameter the weak-field 2×2 reduction is unreliable.
pub const WEAK_FIELD_LIMIT: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Analytic,
    Numeric,
}

/// [[e_up, v], [v, e_down]] in MHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelEffective {
    pub e_up: f64,
    pub e_down: f64,
    pub v: f64,
    pub provenance: Provenance,
    /// β_E = Ed/B_e at which the model was built (0 when not applicable).
    pub beta_e: f64,
}

impl TwoLevelEffective {
    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.e_up, self.v, self.v, self.e_down)
    }

    /// Eigenvalues, lower first.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.e_up + self.e_down);
        let half = (0.25 * (self.e_up - self.e_down).powi(2) + self.v * self.v).sqrt();
        [mean - half, mean + half]
    }

    pub fn gap(&self) -> f64 {
        let [lo, hi] = self.eigenvalues();
        hi - lo
    }

    pub fn is_weak_field(&self) -> bool {
        self.beta_e <= WEAK_FIELD_LIMIT
    }
}

fn require_doublet(spec: &MoleculeSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    match (&spec.kind, &spec.electron) {
        (SpeciesKind::Doublet, Some(el)) => Ok((el.spin_rotation, 0.5 * el.g_factor * BOHR_MAGNETON_MHZ_PER_GAUSS)),
        _ => Err(Error::Kind(format!("{} is not a 2Sigma molecule", spec.name))),
    }
}

/// Hamiltonian on {|0 0 ½⟩, |1 0 ½⟩, |1 1 −½⟩} with the nuclear spin a spectator.
pub fn alc_three_level(spec: &MoleculeSpec, point: FieldPoint) -> Result<Matrix3<f64>> {
    let (gamma, mu0) = require_doublet(spec)?;
    let zb = mu0 * point.b_field;
    let ed = point.e_field * spec.dipole_moment * DEBYE_KV_PER_CM_IN_MHZ;
    let be = spec.rotational_constant;
    let s = -ed / 3f64.sqrt();
    let g = gamma / 2f64.sqrt();
    Ok(Matrix3::new(zb, s, 0.0, s, 2.0 * be + zb, g, 0.0, g, 2.0 * be - zb - 0.5 * gamma))
}

/// Weak-field reduction of the three-level problem onto |0̃0½⟩, |1̃1−½⟩.
pub fn alc_effective_2x2(spec: &MoleculeSpec, point: FieldPoint) -> Result<TwoLevelEffective> {
    let (gamma, mu0) = require_doublet(spec)?;
    let ed = point.e_field * spec.dipole_moment * DEBYE_KV_PER_CM_IN_MHZ;
    let be = spec.rotational_constant;
    Ok(TwoLevelEffective {
        e_up: mu0 * point.b_field - ed * ed / (6.0 * be),
        e_down: 2.0 * be - mu0 * point.b_field - 0.5 * gamma,
        v: ed * gamma / (2.0 * 6f64.sqrt() * be),
        provenance: Provenance::Analytic,
        beta_e: ed / be,
    })
}

/// Closed-form crossing field in Gauss: 2μ₀B_c = 2B_e − γ/2 + (Ed)²/(6B_e).
pub fn crossing_field_analytic(spec: &MoleculeSpec, e_field: f64) -> Result<f64> {
    let (gamma, mu0) = require_doublet(spec)?;
    let ed = e_field * spec.dipole_moment * DEBYE_KV_PER_CM_IN_MHZ;
    let be = spec.rotational_constant;
    Ok((2.0 * be - 0.5 * gamma + ed * ed / (6.0 * be)) / (2.0 * mu0))
}

/// Result of a numeric gap minimisation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Field of the gap minimum, G.
    pub b_c: f64,
    /// Gap at the minimum, MHz.
    pub gap: f64,
}

/// Golden-section tolerance on the crossing field, G.
pub const CROSSING_TOLERANCE: f64 = 1e-3;

/// Relative error of the weak-field 2×2 gap at the crossing against the
/// minimum gap of the three-level model at the same E.
pub fn alc_reduction_error(spec: &MoleculeSpec, e_field: f64) -> Result<f64> {
    let b_c = crossing_field_analytic(spec, e_field)?;
    let reduced = alc_effective_2x2(spec, FieldPoint::new(e_field, b_c)?)?.gap();
    let gap3 = |b: f64| -> f64 {
        let m = alc_three_level(spec, FieldPoint { e_field, b_field: b }).expect("validated above");
        let e = sorted_eigenvalues3(m);
        e[1] - e[0]
    };
    // the full-model minimum sits within a few mG of b_c for β_E ≲ 0.1
    let (_, exact) = golden_section(gap3, b_c - 5.0, b_c + 5.0, 1e-9);
    Ok((exact - reduced).abs() / reduced)
}

/// Gap-minimum field between two tracked states at fixed E.
///
/// The pair is tracked over `n_grid` points in [b_lo, b_hi]; the bracket
/// around the smallest gap is then refined by golden-section search on the
/// two eigenvalues that carry the labels there.
pub fn crossing_field_numeric(
    spec: &MoleculeSpec,
    basis: &BasisSet,
    e_field: f64,
    pair: [Seed; 2],
    (b_lo, b_hi): (f64, f64),
    n_grid: usize,
) -> Result<Crossing> {
    if !(b_hi > b_lo) || n_grid < 3 {
        return Err(Error::Invalid(format!("need b_lo < b_hi and at least 3 grid points, got [{b_lo}, {b_hi}] / {n_grid}")));
    }
    let h = BlockedHamiltonian::for_seeds(spec, basis, &pair, TermMask::all())?;
    let sweep: Vec<FieldPoint> = (0..n_grid)
        .map(|k| FieldPoint::new(e_field, b_lo + (b_hi - b_lo) * k as f64 / (n_grid - 1) as f64))
        .collect::<Result<_>>()?;
    let spectra: Vec<PointSpectrum> = sweep.iter().map(|&p| PointSpectrum::compute(&h, p)).collect();
    let track = crate::spectrum::track(&h, &spectra, &pair, TrackOptions::default())?;
    let gaps: Vec<f64> = track.energies.iter().map(|e| (e[0] - e[1]).abs()).collect();
    let kmin = (0..gaps.len()).min_by(|&a, &b| gaps[a].total_cmp(&gaps[b])).expect("non-empty grid");
    if kmin == 0 || kmin == gaps.len() - 1 {
        return Err(Error::Bracketing { lo: b_lo, hi: b_hi });
    }
    // eigenvalue indices that carry the two labels at the grid minimum
    let mf_a = pair_mf(&pair[0]);
    let mf_b = pair_mf(&pair[1]);
    let idx = |mf: Half, e: f64| -> usize {
        let vals = spectra[kmin].block_values(&h, mf).expect("block built for seed");
        (0..vals.len()).min_by(|&x, &y| (vals[x] - e).abs().total_cmp(&(vals[y] - e).abs())).expect("non-empty block")
    };
    let ia = idx(mf_a, track.energies[kmin][0]);
    let ib = idx(mf_b, track.energies[kmin][1]);
    let gap_at = |b: f64| -> f64 {
        let s = PointSpectrum::compute(&h, FieldPoint { e_field, b_field: b });
        let va = s.block_values(&h, mf_a).expect("block")[ia];
        let vb = s.block_values(&h, mf_b).expect("block")[ib];
        (va - vb).abs()
    };
    let (b_c, gap) = golden_section(gap_at, sweep[kmin - 1].b_field, sweep[kmin + 1].b_field, CROSSING_TOLERANCE);
    Ok(Crossing { b_c, gap })
}

fn pair_mf(seed: &Seed) -> Half {
    match &seed.target {
        crate::spectrum::SeedTarget::Ket(k) => k.total_projection(),
        crate::spectrum::SeedTarget::Index { mf, .. } => *mf,
    }
}

/// Minimum of a unimodal function on [a, b].
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Encoded spin-1/2: compositions over named zeroth-order states, the
/// dipole triple in Debye and the gap E_↑ − E_↓ in MHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSpinHalf {
    pub states: Vec<String>,
    pub up: Vec<f64>,
    pub down: Vec<f64>,
    pub dipoles: DipoleTriple,
    pub gap: f64,
    /// |d_↑↓| / max(|d_↑|, |d_↓|), reported for bare encodings.
    pub cross_suppression: Option<f64>,
}

/// Compositions of the 2×2 eigenvectors over its two zeroth-order states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mixing {
    /// Upper eigenvector.
    pub up: [f64; 2],
    /// Lower eigenvector.
    pub down: [f64; 2],
    pub gap: f64,
}

/// Eigenvectors of the 2×2 with the first component made non-negative and
/// the second vector fixed to (−u₂, u₁), so the pair is a proper rotation.
pub fn mixing_amplitudes(model: &TwoLevelEffective) -> Mixing {
    let delta = 0.5 * (model.e_up - model.e_down);
    let theta = 0.5 * Float::atan2(model.v, delta);
    // upper eigenvector of [[Δ, v], [v, −Δ]] is (cos θ, sin θ)
    let (s, c) = (theta.sin(), theta.cos());
    let up = if c < 0.0 { [-c, -s] } else { [c, s] };
    let down = [-up[1], up[0]];
    let down = if down[0] < 0.0 || (down[0] == 0.0 && down[1] < 0.0) { [-down[0], -down[1]] } else { down };
    Mixing { up, down, gap: model.gap() }
}

/// Rotating-frame microwave-dressed pair built from |0̃0,M⟩ and |1̃0,M⟩.
///
/// With the drive detuned by Δ the photon-dressed |0̃0,M⟩ sits at E₁ + Δ,
/// and the frame Hamiltonian is [[E₁ + Δ, Ω/2], [Ω/2, E₁]] (MHz, Ω/2π).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DressedPair {
    pub omega: f64,
    pub delta: f64,
    pub c0_plus: f64,
    pub c1_plus: f64,
    pub c0_minus: f64,
    pub c1_minus: f64,
    pub e_plus: f64,
    pub e_minus: f64,
}

pub fn dressed_pair(e_1m: f64, omega: f64, delta: f64) -> Result<DressedPair> {
    if !(omega > 0.0) {
        return Err(Error::Invalid(format!("Rabi frequency must be positive, got {omega}")));
    }
    let root = (omega * omega + delta * delta).sqrt();
    // |+⟩ = (cos φ, sin φ), |−⟩ = (sin φ, −cos φ) with tan 2φ = Ω/Δ
    let phi = 0.5 * Float::atan2(omega, delta);
    let (s, c) = (phi.sin(), phi.cos());
    Ok(DressedPair {
        omega,
        delta,
        c0_plus: c,
        c1_plus: s,
        c0_minus: s,
        c1_minus: -c,
        e_plus: e_1m + 0.5 * delta + 0.5 * root,
        e_minus: e_1m + 0.5 * delta - 0.5 * root,
    })
}

/// Labels of the dressed ¹Σ construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DressedLabels {
    /// |0̃0,M⟩
    pub ground: String,
    /// |1̃0,M⟩
    pub excited: String,
    /// |1̃−1,M′⟩
    pub bare: String,
}

/// Dressed encoding at one tracked field point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DressedEncoding {
    pub dressed: DressedPair,
    /// ⟨−,M|H_eQ|1̃−1,M′⟩, MHz
    pub v: f64,
    /// |−,M⟩ vs |1̃−1,M′⟩ in the rotating frame
    pub model: TwoLevelEffective,
    pub spin: EffectiveSpinHalf,
}

/// V_MM′ = ⟨−,M| H_eQ |1̃−1,M′⟩ in MHz. All three labels must share one M_F block.
pub fn quadrupole_coupling(
    spec: &MoleculeSpec,
    track: &SpectrumTrack,
    dressed: &DressedPair,
    labels: &DressedLabels,
    point: usize,
) -> Result<f64> {
    let (mf, hq) = block_quadrupole(spec, track, labels)?;
    let g = track.block_operator_element(&hq, mf, &labels.ground, &labels.bare, point)?;
    let e = track.block_operator_element(&hq, mf, &labels.excited, &labels.bare, point)?;
    Ok(dressed.c0_minus * g + dressed.c1_minus * e)
}

fn block_quadrupole(spec: &MoleculeSpec, track: &SpectrumTrack, labels: &DressedLabels) -> Result<(Half, nalgebra::DMatrix<f64>)> {
    if spec.kind != SpeciesKind::Singlet {
        return Err(Error::Kind(format!("{} is not a 1Sigma molecule", spec.name)));
    }
    let mf_of = |label: &str| -> Result<Half> {
        let v = track.vector(label, 0)?;
        let i = v.iamax();
        Ok(track.basis().kets()[i].total_projection())
    };
    let mf = mf_of(&labels.ground)?;
    if mf_of(&labels.excited)? != mf || mf_of(&labels.bare)? != mf {
        return Err(Error::Structure(String::from("dressed labels must share one M_F block")));
    }
    Ok((mf, term_matrix(spec, &track.basis().restrict(mf), Term::Quadrupole)?))
}

/// Resonant dressed encoding of |−,M⟩ and |1̃−1,M′⟩ at one point.
///
/// The two-level energies are E₋ = E₁ − Ω/2 (plus Δ/2 when detuned) and the
/// bare energy, coupled by V_MM′. Dipoles of |−,M⟩ keep the transition term
/// 2c₀c₁⟨0̃0|d|1̃0⟩ that survives the rotating-wave pair average. The bare
/// state enters the dipole matrix with its |1̃0,M⟩ admixture projected out,
/// since that coupling is carried explicitly by V_MM′.
pub fn dressed_encoding(
    spec: &MoleculeSpec,
    track: &SpectrumTrack,
    labels: &DressedLabels,
    point: usize,
    omega: f64,
    delta: f64,
) -> Result<DressedEncoding> {
    let e1 = track.energy(&labels.excited, point)?;
    let eb = track.energy(&labels.bare, point)?;
    let dressed = dressed_pair(e1, omega, delta)?;
    let v = quadrupole_coupling(spec, track, &dressed, labels, point)?;
    let model = TwoLevelEffective { e_up: dressed.e_minus, e_down: eb, v, provenance: Provenance::Numeric, beta_e: 0.0 };

    let (c0, c1) = (dressed.c0_minus, dressed.c1_minus);
    let d = |a: &str, b: &str| track.dipole_element(spec, a, b, point, 0);
    let d_mm = c0 * c0 * d(&labels.ground, &labels.ground)?
        + c1 * c1 * d(&labels.excited, &labels.excited)?
        + 2.0 * c0 * c1 * d(&labels.ground, &labels.excited)?;
    // bare state orthogonalised against the dressed manifold
    let vb = track.vector(&labels.bare, point)?;
    let v0 = track.vector(&labels.ground, point)?;
    let v1 = track.vector(&labels.excited, point)?;
    let mut perp = &vb - &v0 * v0.dot(&vb) - &v1 * v1.dot(&vb);
    perp /= perp.norm();
    let op = |x: &nalgebra::DVector<f64>, y: &nalgebra::DVector<f64>| -> f64 {
        let kets = track.basis().kets();
        let mut t = 0.0;
        for (i, &a) in x.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b != 0.0 {
                    t += a * b * crate::hamiltonian::dipole_ket_element(spec, &kets[i], 0, &kets[j]);
                }
            }
        }
        t
    };
    let d_bb = op(&perp, &perp);
    let d_mb = c0 * op(&v0, &perp) + c1 * op(&v1, &perp);

    let mix = mixing_amplitudes(&model);
    let dip = |u: [f64; 2], w: [f64; 2]| u[0] * w[0] * d_mm + u[1] * w[1] * d_bb + (u[0] * w[1] + u[1] * w[0]) * d_mb;
    let dipoles = DipoleTriple { d_up: dip(mix.up, mix.up), d_down: dip(mix.down, mix.down), d_cross: dip(mix.up, mix.down) };
    let spin = EffectiveSpinHalf {
        states: vec![String::from("|-,M⟩"), labels.bare.clone()],
        up: mix.up.to_vec(),
        down: mix.down.to_vec(),
        dipoles,
        gap: mix.gap,
        cross_suppression: None,
    };
    Ok(DressedEncoding { dressed, v, model, spin })
}

/// Spin-1/2 encoded directly in two tracked eigenstates.
///
/// Compositions are the normalised projections of the tracked states onto
/// the named zeroth-order kets; pass an empty list to skip them.
pub fn tracked_spin_half(
    spec: &MoleculeSpec,
    track: &SpectrumTrack,
    up: &str,
    down: &str,
    point: usize,
    zeroth: &[(String, crate::BasisKet)],
    bare_encoding: bool,
) -> Result<EffectiveSpinHalf> {
    let dipoles = dipole_elements(spec, track, up, down, point)?;
    let project = |label: &str| -> Result<Vec<f64>> {
        let mut c = Vec::with_capacity(zeroth.len());
        for (_, ket) in zeroth {
            c.push(track.amplitude(label, point, ket)?);
        }
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            c.iter_mut().for_each(|x| *x /= n);
        }
        Ok(c)
    };
    let scale = dipoles.d_up.abs().max(dipoles.d_down.abs());
    Ok(EffectiveSpinHalf {
        states: zeroth.iter().map(|(n, _)| n.clone()).collect(),
        up: project(up)?,
        down: project(down)?,
        dipoles,
        gap: track.energy(up, point)? - track.energy(down, point)?,
        cross_suppression: if bare_encoding { Some(if scale > 0.0 { dipoles.d_cross.abs() / scale } else { 0.0 }) } else { None },
    })
}

/// Ground (|0̃0⟩) and first excited (|1̃0⟩) dipoles of a rigid rotor, in
/// units of d, at Stark parameter β_E.
pub fn rotor_dipoles(beta_e: f64, n_max: u32) -> Result<(f64, f64)> {
    let spec = MoleculeSpec::rigid_rotor(1.0, 1.0);
    let basis = crate::build_basis(&spec, n_max, Some(Half::ZERO))?;
    let point = FieldPoint::new(spec.field_for_stark_parameter(beta_e), 0.0)?;
    let seeds = [Seed::named("0", crate::BasisKet::new(0, 0, None, vec![])), Seed::named("1", crate::BasisKet::new(1, 0, None, vec![]))];
    let track = sweep_and_track(&spec, &basis, &[point], &seeds, TermMask::all(), TrackOptions::default())?;
    Ok((track.dipole_element(&spec, "0", "0", 0, 0)?, track.dipole_element(&spec, "1", "1", 0, 0)?))
}

/// Eigen-decomposition helper shared with tests: eigenvalues of a 3×3, ascending.
pub fn sorted_eigenvalues3(m: Matrix3<f64>) -> [f64; 3] {
    let mut e: [f64; 3] = SymmetricEigen::new(m).eigenvalues.into();
    e.sort_by(f64::total_cmp);
    e
}

/// Field of the dressed avoided crossing, where E₋ = E₁ − Ω/2 meets the bare
/// |1̃−1,M′⟩ level, found by a grid scan followed by bisection. Seeds are
/// `[ground, excited, bare]` and apply at `b_start`; the grid may run in
/// either direction (starting at high field keeps the labels cleanest).
/// Returns the crossing field (G) and the track over the grid.
pub fn dressed_crossing(
    spec: &MoleculeSpec,
    basis: &BasisSet,
    e_field: f64,
    seeds: &[Seed; 3],
    omega: f64,
    (b_start, b_end): (f64, f64),
    n_grid: usize,
) -> Result<(f64, SpectrumTrack)> {
    if b_start == b_end || n_grid < 2 {
        return Err(Error::Invalid(format!("need a non-empty field range and at least 2 grid points, got [{b_start}, {b_end}] / {n_grid}")));
    }
    let (b_lo, b_hi) = (b_start, b_end);
    let h = BlockedHamiltonian::for_seeds(spec, basis, seeds, TermMask::all())?;
    let sweep: Vec<FieldPoint> = (0..n_grid)
        .map(|k| FieldPoint::new(e_field, b_lo + (b_hi - b_lo) * k as f64 / (n_grid - 1) as f64))
        .collect::<Result<_>>()?;
    let spectra: Vec<PointSpectrum> = sweep.iter().map(|&p| PointSpectrum::compute(&h, p)).collect();
    let track = crate::spectrum::track(&h, &spectra, seeds, TrackOptions::default())?;
    let detune = |e: &[f64]| e[1] - 0.5 * omega - e[2];
    let k = (0..n_grid - 1)
        .find(|&k| detune(&track.energies[k]) * detune(&track.energies[k + 1]) <= 0.0)
        .ok_or(Error::Bracketing { lo: b_lo.min(b_hi), hi: b_lo.max(b_hi) })?;
    let restart = track.index_seeds(&h, &spectra[k])?;
    let eval = |b: f64| -> Result<f64> {
        let s = [spectra[k].clone(), PointSpectrum::compute(&h, FieldPoint { e_field, b_field: b })];
        let t = crate::spectrum::track(&h, &s, &restart, TrackOptions::default())?;
        Ok(detune(&t.energies[1]))
    };
    let (mut lo, mut hi) = (sweep[k].b_field, sweep[k + 1].b_field);
    let mut f_lo = detune(&track.energies[k]);
    while (hi - lo).abs() > CROSSING_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(mid)?;
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok((0.5 * (lo + hi), track))
}
