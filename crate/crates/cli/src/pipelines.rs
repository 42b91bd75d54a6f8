//! One pipeline per scenario. Each turns a validated configuration into
//! tables and a report; nothing here touches the filesystem.

use log::{debug, info};
use molspin::couplings::{coupling_constants, coupling_map, geometric_factor, mean_couplings, CouplingMap, SpinCouplingConstants};
use molspin::effective::{
    alc_effective_2x2, crossing_field_analytic, crossing_field_numeric, dressed_crossing, dressed_encoding, DressedLabels, WEAK_FIELD_LIMIT,
};
use molspin::hamiltonian::TermMask;
use molspin::manybody::{
    cluster_time, evolve_ising, frame_correction, gap_protection, optimal_time, squeezing_parameter, stabilizer_expectation,
    stabilizer_with_dephasing, static_noise_ensemble, Boundary, Dynamics, NoiseKind, NoiseModel, Observable, SpinState, StaticProfile,
    XxzPropagator,
};
use molspin::spectrum::{dipole_elements, differential_stark_shift, track, BlockedHamiltonian, DipoleTriple, PointSpectrum, Seed, SpectrumTrack, TrackOptions};
use molspin::units::dipolar_hz;
use molspin::{build_basis, BasisKet, FieldPoint, Half, MoleculeSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Axis, DynamicsSpec, Encoding, LatticeSpec, ProfileSpec, Resolved, Scenario, StateSpec};
use crate::error::{CliError, CliResult, Context};
use crate::output::{num, Cell, Outputs, Table};

/// Squeezing-time coefficients c in t_opt = c / J_⊥.
pub const T_OPT_COEFFICIENTS: [f64; 2] = [4.69, 10.5];

pub fn run_scenario(r: &Resolved) -> CliResult<Outputs> {
    let cfg = &r.config;
    let mol = r.molecule.as_ref();
    let need = || mol.ok_or_else(|| CliError::field("molecule", "required by this scenario"));
    match &cfg.scenario {
        Scenario::Spectrum { e_field, b_field, states } => spectrum(need()?, cfg.n_max, e_field, b_field, states),
        Scenario::Dipoles { e_field, beta, b_field, up, down, dss, a_nm } => {
            let spec = need()?;
            let fields = match (e_field, beta) {
                (Some(e), _) => e.values(),
                (None, Some(b)) => b.values().into_iter().map(|x| spec.field_for_stark_parameter(x)).collect(),
                _ => unreachable!("validated"),
            };
            dipoles(spec, cfg.n_max, &fields, *b_field, up, down, dss.as_ref().map(|d| (&d.main, &d.competing)), *a_nm)
        }
        Scenario::Alc { e_field, window, grid, m_i, scan, a_nm } => alc(need()?, cfg.n_max, *e_field, *window, *grid, *m_i, scan, *a_nm),
        Scenario::Dressed { e_field, omega, delta, ground, excited, bare, window, grid, scan_half_width, scan_steps, a_nm } => dressed(
            need()?,
            cfg.n_max,
            DressedArgs {
                e_field: *e_field,
                omega: *omega,
                delta: *delta,
                states: [ground, excited, bare],
                window: *window,
                grid: *grid,
                half_width: *scan_half_width,
                steps: *scan_steps,
                a_nm: *a_nm,
            },
        ),
        Scenario::Couplings { encoding, lattice, cutoff_nm } => {
            let (map, consts) = build_map(mol, cfg.n_max, encoding, lattice, *cutoff_nm)?;
            couplings(&map, &consts)
        }
        Scenario::Cluster { encoding, lattice, cutoff_nm, t2_ms, t_ms, frame_correct, static_noise } => {
            let (map, _) = build_map(mol, cfg.n_max, encoding, lattice, *cutoff_nm)?;
            let noise = static_noise.as_ref().map(|s| {
                let profile = match s.profile {
                    ProfileSpec::Harmonic => StaticProfile::Harmonic,
                    ProfileSpec::Gaussian => StaticProfile::Gaussian { sigma: s.sigma_hz },
                };
                (NoiseModel { gamma_d: 0.0, delta_e_updown: s.delta_e_hz, kind: NoiseKind::Static(profile) }, s.samples, s.echo)
            });
            cluster(&map, t2_ms.map(|t| 1e3 / t), t_ms.map(|t| t * 1e-3), *frame_correct, noise, cfg.seed)
        }
        Scenario::Squeeze { encoding, lattice, cutoff_nm, t_ms, dynamics } => {
            let (map, _) = build_map(mol, cfg.n_max, encoding, lattice, *cutoff_nm)?;
            squeeze(&map, &t_ms.values(), *dynamics)
        }
        Scenario::Gap { sizes, j_perp_nn_hz, delta_e_hz } => Ok(gap(sizes, *j_perp_nn_hz, *delta_e_hz)),
    }
}

fn seeds_from(states: &[(&StateSpec, String)]) -> CliResult<Vec<Seed>> {
    let mut seeds: Vec<Seed> = Vec::new();
    for (s, path) in states {
        let seed = s.seed(path)?;
        match seeds.iter().find(|x| x.label == seed.label) {
            Some(existing) if existing.target != seed.target => {
                return Err(CliError::field(path, format!("label `{}` is already used by another state", seed.label)));
            }
            Some(_) => {}
            None => seeds.push(seed),
        }
    }
    Ok(seeds)
}

/// Diagonalises every sweep point in parallel, then tracks sequentially.
pub fn track_sweep(spec: &MoleculeSpec, n_max: u32, sweep: &[FieldPoint], seeds: &[Seed]) -> CliResult<SpectrumTrack> {
    let basis = build_basis(spec, n_max, None).at("n_max")?;
    let h = BlockedHamiltonian::for_seeds(spec, &basis, seeds, TermMask::all()).at("states")?;
    debug!("tracking {} labels over {} points", seeds.len(), sweep.len());
    let spectra: Vec<PointSpectrum> = sweep.par_iter().map(|&p| PointSpectrum::compute(&h, p)).collect();
    Ok(track(&h, &spectra, seeds, TrackOptions::default())?)
}

fn points(e: &[f64], b: &[f64]) -> CliResult<Vec<FieldPoint>> {
    let mut out = Vec::with_capacity(e.len() * b.len());
    for &ev in e {
        for &bv in b {
            out.push(FieldPoint::new(ev, bv).at("scenario")?);
        }
    }
    Ok(out)
}

/// Nearest-neighbour couplings J/2π in Hz for a bond ⊥ the field at spacing a.
fn nn_hz(consts: &SpinCouplingConstants, a_nm: f64) -> (f64, f64) {
    let g = 1.0 / (a_nm * a_nm * a_nm);
    (dipolar_hz(g * consts.j_z), dipolar_hz(g * consts.j_perp))
}

fn spectrum(spec: &MoleculeSpec, n_max: u32, e: &Axis, b: &Axis, states: &[StateSpec]) -> CliResult<Outputs> {
    let tagged: Vec<_> = states.iter().enumerate().map(|(k, s)| (s, format!("scenario.states[{k}]"))).collect();
    let seeds = seeds_from(&tagged)?;
    let sweep = points(&e.values(), &b.values())?;
    let track = track_sweep(spec, n_max, &sweep, &seeds)?;
    let mut header = vec!["E [kV/cm]".to_string(), "B [G]".to_string()];
    header.extend(track.labels.iter().map(|l| format!("{l} [MHz]")));
    let mut table = Table { name: "spectrum".into(), header, rows: Vec::new() };
    for (k, p) in track.sweep.iter().enumerate() {
        let mut row: Vec<Cell> = vec![p.e_field.into(), p.b_field.into()];
        row.extend(track.energies[k].iter().map(|&x| Cell::from(x)));
        table.push(row);
    }
    let mut out = Outputs::default();
    out.set("scenario", "spectrum");
    out.set("molecule", spec.name.as_str());
    out.set("labels", track.labels.clone());
    out.set("points", track.len());
    out.set("min_overlap", num(track.min_overlap.iter().copied().fold(1.0, f64::min)));
    out.tables.push(table);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dipoles(
    spec: &MoleculeSpec,
    n_max: u32,
    fields: &[f64],
    b_field: f64,
    up: &StateSpec,
    down: &StateSpec,
    dss: Option<(&[StateSpec; 2], &[StateSpec; 2])>,
    a_nm: f64,
) -> CliResult<Outputs> {
    let mut tagged = vec![(up, "scenario.up".to_string()), (down, "scenario.down".to_string())];
    if let Some((m, c)) = dss {
        tagged.push((&m[0], "scenario.dss.main[0]".into()));
        tagged.push((&m[1], "scenario.dss.main[1]".into()));
        tagged.push((&c[0], "scenario.dss.competing[0]".into()));
        tagged.push((&c[1], "scenario.dss.competing[1]".into()));
    }
    let labels: Vec<String> = tagged.iter().map(|(s, p)| s.seed(p).map(|x| x.label)).collect::<CliResult<_>>()?;
    let seeds = seeds_from(&tagged)?;
    let sweep = points(fields, &[b_field])?;
    let track = track_sweep(spec, n_max, &sweep, &seeds)?;

    let mut header = vec![
        "E [kV/cm]",
        "beta_E [1]",
        "d_up [D]",
        "d_down [D]",
        "d_cross [D]",
        "J_z [D^2]",
        "J_perp [D^2]",
        "J_z_nn [Hz]",
        "J_perp_nn [Hz]",
    ];
    if dss.is_some() {
        header.push("DSS [kHz]");
    }
    let mut table = Table::new("dipoles", &header);
    let mut dss_series = Vec::new();
    for k in 0..track.len() {
        let p = track.sweep[k];
        let d = dipole_elements(spec, &track, &labels[0], &labels[1], k)?;
        let c = coupling_constants(&d);
        let (jz, jp) = nn_hz(&c, a_nm);
        let mut row: Vec<Cell> = vec![
            p.e_field.into(),
            spec.stark_parameter(p.e_field).into(),
            d.d_up.into(),
            d.d_down.into(),
            d.d_cross.into(),
            c.j_z.into(),
            c.j_perp.into(),
            jz.into(),
            jp.into(),
        ];
        if dss.is_some() {
            let s = 1e3 * differential_stark_shift(&track, (&labels[2], &labels[3]), (&labels[4], &labels[5]), k)?;
            dss_series.push((p.e_field, s));
            row.push(s.into());
        }
        table.push(row);
    }

    let mut out = Outputs::default();
    out.set("scenario", "dipoles");
    out.set("molecule", spec.name.as_str());
    out.set("b_field_gauss", num(b_field));
    out.set("a_nm", num(a_nm));
    out.set("up", labels[0].as_str());
    out.set("down", labels[1].as_str());
    let beta = table.column("beta_E [1]").unwrap_or_default();
    let jz = table.column("J_z [D^2]").unwrap_or_default();
    if let Some(k) = (0..jz.len()).max_by(|&a, &b| jz[a].total_cmp(&jz[b])) {
        out.set("j_z_peak_beta", num(beta[k]));
        out.set("j_z_peak_debye2", num(jz[k]));
    }
    let last = track.len() - 1;
    let e_last = track.sweep[last].e_field;
    let jz_nn = table.column("J_z_nn [Hz]").unwrap_or_default();
    let jp_nn = table.column("J_perp_nn [Hz]").unwrap_or_default();
    out.set(
        "final_point",
        json!({
            "e_field_kv_cm": num(e_last),
            "j_z_nn_hz": num(jz_nn[last]),
            "j_perp_nn_hz": num(jp_nn[last]),
        }),
    );
    if !dss_series.is_empty() {
        let zeros = sign_changes(&dss_series);
        out.set("dss_zero_crossings_kv_cm", zeros.into_iter().map(num).collect::<Vec<_>>());
        out.set("dss_first_khz", num(dss_series[0].1));
    }
    out.tables.push(table);
    Ok(out)
}

/// Linear-interpolated zeros of a sampled curve.
pub fn sign_changes(series: &[(f64, f64)]) -> Vec<f64> {
    series
        .windows(2)
        .filter(|w| w[0].1 == 0.0 || w[0].1 * w[1].1 < 0.0)
        .map(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if y0 == 0.0 {
                x0
            } else {
                x0 - y0 * (x1 - x0) / (y1 - y0)
            }
        })
        .collect()
}

/// Sorted, deduplicated union of a grid and extra points.
fn with_points(mut grid: Vec<f64>, extra: &[f64]) -> Vec<f64> {
    grid.extend_from_slice(extra);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    grid
}

/// Evenly spaced approach from `from` up to (excluding) `to`, steps ≤ `step`.
fn approach(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from).abs() / step).ceil() as usize;
    (0..n).map(|k| from + (to - from) * k as f64 / n as f64).collect()
}

#[allow(clippy::too_many_arguments)]
fn alc(spec: &MoleculeSpec, n_max: u32, e_field: f64, window: [f64; 2], grid: usize, m_i: f64, scan: &Axis, a_nm: f64) -> CliResult<Outputs> {
    if spec.electron.is_none() {
        return Err(CliError::field("molecule", format!("{} is not a 2Sigma molecule", spec.name)));
    }
    let mi = Half::from_f64(m_i).at("scenario.m_i")?;
    let up = Seed::ket(BasisKet::new(0, 0, Some(Half::HALF), vec![mi]));
    let down = Seed::ket(BasisKet::new(1, 1, Some(-Half::HALF), vec![mi]));
    let basis = build_basis(spec, n_max, None).at("n_max")?;
    let crossing = crossing_field_numeric(spec, &basis, e_field, [up.clone(), down.clone()], (window[0], window[1]), grid)?;
    let analytic = crossing_field_analytic(spec, e_field).at("molecule")?;
    let model = alc_effective_2x2(spec, FieldPoint::new(e_field, analytic).at("scenario")?).at("molecule")?;
    info!("numeric B_c = {:.3} G, analytic {:.3} G", crossing.b_c, analytic);

    let scan_b = with_points(scan.values(), &[crossing.b_c]);
    let step = (window[1] - window[0]) / (grid - 1) as f64;
    let mut b_path = approach(window[0], scan_b[0], step);
    let lead = b_path.len();
    b_path.extend_from_slice(&scan_b);
    let sweep = points(&[e_field], &b_path)?;
    let track = track_sweep(spec, n_max, &sweep, &[up.clone(), down.clone()])?;

    let mut table = Table::new(
        "alc",
        &["B [G]", "E_a [MHz]", "E_b [MHz]", "gap [MHz]", "d_a [D]", "d_b [D]", "d_cross [D]", "J_z_nn [Hz]", "J_perp_nn [Hz]"],
    );
    let mut at_bc = None;
    for (k, &b) in scan_b.iter().enumerate() {
        let p = lead + k;
        let d = dipole_elements(spec, &track, &up.label, &down.label, p)?;
        let (jz, jp) = nn_hz(&coupling_constants(&d), a_nm);
        let (ea, eb) = (track.energies[p][0], track.energies[p][1]);
        table.push(vec![b.into(), ea.into(), eb.into(), (eb - ea).abs().into(), d.d_up.into(), d.d_down.into(), d.d_cross.into(), jz.into(), jp.into()]);
        if (b - crossing.b_c).abs() < 1e-9 {
            at_bc = Some((d, jz, jp));
        }
    }
    let (d_bc, jz_bc, jp_bc) = at_bc.expect("B_c is a scan point");
    let jp_col = table.column("J_perp_nn [Hz]").unwrap_or_default();
    let k_max = (0..jp_col.len()).max_by(|&a, &b| jp_col[a].abs().total_cmp(&jp_col[b].abs())).unwrap_or(0);

    let mut out = Outputs::default();
    out.set("scenario", "alc");
    out.set("molecule", spec.name.as_str());
    out.set("e_field_kv_cm", num(e_field));
    out.set("states", vec![up.label.clone(), down.label.clone()]);
    out.set("b_c_numeric_gauss", num(crossing.b_c));
    out.set("gap_min_mhz", num(crossing.gap));
    out.set("b_c_analytic_gauss", num(analytic));
    out.set("b_c_difference_gauss", num(analytic - crossing.b_c));
    out.set("beta_e", num(model.beta_e));
    out.set("weak_field", model.beta_e <= WEAK_FIELD_LIMIT);
    out.set("gap_2x2_mhz", num(model.gap()));
    out.set("dipoles_at_b_c", dipole_json(&d_bc));
    out.set("j_z_nn_at_b_c_hz", num(jz_bc));
    out.set("j_perp_nn_at_b_c_hz", num(jp_bc));
    out.set("j_perp_peak_gauss", num(scan_b[k_max]));
    out.set("scan_step_gauss", num(scan_step(&scan_b)));
    out.tables.push(table);
    Ok(out)
}

fn scan_step(b: &[f64]) -> f64 {
    b.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn dipole_json(d: &DipoleTriple) -> Value {
    json!({ "d_up": num(d.d_up), "d_down": num(d.d_down), "d_cross": num(d.d_cross) })
}

struct DressedArgs<'a> {
    e_field: f64,
    omega: f64,
    delta: f64,
    states: [&'a StateSpec; 3],
    window: [f64; 2],
    grid: usize,
    half_width: f64,
    steps: usize,
    a_nm: f64,
}

fn dressed(spec: &MoleculeSpec, n_max: u32, args: DressedArgs) -> CliResult<Outputs> {
    let names = ["scenario.ground", "scenario.excited", "scenario.bare"];
    let seeds: [Seed; 3] = [args.states[0].seed(names[0])?, args.states[1].seed(names[1])?, args.states[2].seed(names[2])?];
    for i in 0..3 {
        for j in i + 1..3 {
            if seeds[i].label == seeds[j].label {
                return Err(CliError::field(names[j], format!("label `{}` repeats {}", seeds[j].label, names[i])));
            }
        }
    }
    let labels = DressedLabels { ground: seeds[0].label.clone(), excited: seeds[1].label.clone(), bare: seeds[2].label.clone() };
    let basis = build_basis(spec, n_max, None).at("n_max")?;
    let (b_c, crossing_track) = dressed_crossing(spec, &basis, args.e_field, &seeds, args.omega, (args.window[0], args.window[1]), args.grid)?;
    info!("dressed crossing at {b_c:.3} G");

    // scan in the direction of the search sweep, restarting from its grid
    let downward = args.window[0] > args.window[1];
    let lo = (b_c - args.half_width).max(0.0);
    let hi = b_c + args.half_width;
    let mut scan = with_points(Axis::Range { from: lo, to: hi, steps: args.steps }.values(), &[b_c]);
    if downward {
        scan.reverse();
    }
    let h = BlockedHamiltonian::for_seeds(spec, &basis, &seeds, TermMask::all())?;
    let k0 = (0..crossing_track.len())
        .filter(|&k| {
            let b = crossing_track.sweep[k].b_field;
            if downward {
                b >= scan[0]
            } else {
                b <= scan[0]
            }
        })
        .max_by(|&a, &b| {
            let d = |k: usize| -(crossing_track.sweep[k].b_field - scan[0]).abs();
            d(a).total_cmp(&d(b))
        })
        .unwrap_or(0);
    let start = PointSpectrum::compute(&h, crossing_track.sweep[k0]);
    let restart = crossing_track.index_seeds(&h, &start)?;
    let mut spectra = vec![start];
    let pts = points(&[args.e_field], &scan)?;
    spectra.extend(pts.par_iter().map(|&p| PointSpectrum::compute(&h, p)).collect::<Vec<_>>());
    let scan_track = track(&h, &spectra, &restart, TrackOptions::default())?;

    let mut table = Table::new("dressed", &["B [G]", "V [kHz]", "d_up [D]", "d_down [D]", "d_cross [D]", "J_z_nn [Hz]", "J_perp_nn [Hz]"]);
    let mut rows = Vec::new();
    let mut at_bc = None;
    for (k, &b) in scan.iter().enumerate() {
        let enc = dressed_encoding(spec, &scan_track, &labels, k + 1, args.omega, args.delta)?;
        let d = enc.spin.dipoles;
        let (jz, jp) = nn_hz(&coupling_constants(&d), args.a_nm);
        let v = 1e3 * enc.v;
        if (b - b_c).abs() < 1e-9 {
            at_bc = Some((v, d, jz, jp));
        }
        rows.push((b, vec![b.into(), v.into(), d.d_up.into(), d.d_down.into(), d.d_cross.into(), jz.into(), jp.into()]));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, r) in rows {
        table.push(r);
    }
    let (v_bc, d_bc, jz_bc, jp_bc) = at_bc.expect("B_c is a scan point");
    let v_col = table.column("V [kHz]").unwrap_or_default();
    let v_min = v_col.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let v_max = v_col.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let scale = d_bc.d_up.abs().max(d_bc.d_down.abs());

    let mut out = Outputs::default();
    out.set("scenario", "dressed");
    out.set("molecule", spec.name.as_str());
    out.set("labels", json!({ "ground": labels.ground, "excited": labels.excited, "bare": labels.bare }));
    out.set("omega_mhz", num(args.omega));
    out.set("b_c_gauss", num(b_c));
    out.set("v_at_b_c_khz", num(v_bc));
    out.set("abs_v_range_khz", vec![num(v_min), num(v_max)]);
    out.set("dipoles_at_b_c", dipole_json(&d_bc));
    out.set("d_up_down_relative_difference", num(if scale > 0.0 { (d_bc.d_up - d_bc.d_down).abs() / scale } else { 0.0 }));
    out.set("j_z_nn_at_b_c_hz", num(jz_bc));
    out.set("j_perp_nn_at_b_c_hz", num(jp_bc));
    out.tables.push(table);
    Ok(out)
}

/// Coupling constants for an encoding, plus the map over the lattice.
pub fn build_map(
    mol: Option<&MoleculeSpec>,
    n_max: u32,
    encoding: &Encoding,
    lattice: &LatticeSpec,
    cutoff_nm: Option<f64>,
) -> CliResult<(CouplingMap, SpinCouplingConstants)> {
    let geom = lattice.geometry();
    let consts = match encoding {
        Encoding::Dipoles { d_up, d_down, d_cross } => coupling_constants(&DipoleTriple { d_up: *d_up, d_down: *d_down, d_cross: *d_cross }),
        Encoding::Tracked { e_field, b_field, up, down, seed_e_field, steps } => {
            let spec = mol.ok_or_else(|| CliError::field("molecule", "required by a tracked encoding"))?;
            let seeds = seeds_from(&[(up, "scenario.encoding.up".into()), (down, "scenario.encoding.down".into())])?;
            if seeds.len() < 2 {
                return Err(CliError::field("scenario.encoding.down", "must differ from up"));
            }
            let ramp = Axis::Range { from: *seed_e_field, to: *e_field, steps: *steps + 1 }.values();
            let track = track_sweep(spec, n_max, &points(&ramp, &[*b_field])?, &seeds)?;
            coupling_constants(&dipole_elements(spec, &track, &seeds[0].label, &seeds[1].label, track.len() - 1)?)
        }
        Encoding::Couplings { j_z_nn_hz, j_perp_nn_hz } => {
            let g = geometric_factor([geom.a, 0.0, 0.0], geom.field_axis).at("scenario.lattice")?;
            let unit = dipolar_hz(g);
            if unit == 0.0 {
                return Err(CliError::field("scenario.lattice.field_axis", "nearest-neighbour bond sits at the magic angle"));
            }
            SpinCouplingConstants { j_z: j_z_nn_hz / unit, j_perp: j_perp_nn_hz / unit, w_z: 0.0, v: 0.0 }
        }
    };
    let map = coupling_map(&geom, &consts, cutoff_nm).at("scenario.lattice")?;
    Ok((map, consts))
}

fn couplings(map: &CouplingMap, consts: &SpinCouplingConstants) -> CliResult<Outputs> {
    let geom = map.geometry.expect("lattice map");
    let mut table = Table::new("couplings", &["i [site]", "j [site]", "R [nm]", "J_z [Hz]", "J_perp [Hz]"]);
    for p in &map.pairs {
        let (a, b) = (geom.position(p.i), geom.position(p.j));
        let r = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2)).sqrt();
        table.push(vec![p.i.into(), p.j.into(), r.into(), p.jz_hz.into(), p.jperp_hz.into()]);
    }
    let (mz, mp) = mean_couplings(map);
    let mut out = Outputs::default();
    out.set("scenario", "couplings");
    out.set("sites", map.n_sites);
    out.set("pairs", map.pairs.len());
    out.set("constants_debye2", json!({ "j_z": num(consts.j_z), "j_perp": num(consts.j_perp), "w_z": num(consts.w_z), "v": num(consts.v) }));
    out.set("j_z_nn_hz", num(map.nn_jz_hz));
    out.set("j_perp_nn_hz", num(map.nn_jperp_hz));
    out.set("mean_j_z_hz", num(mz));
    out.set("mean_j_perp_hz", num(mp));
    out.tables.push(table);
    Ok(out)
}

fn cluster(
    map: &CouplingMap,
    gamma_d: Option<f64>,
    t: Option<f64>,
    frame_correct: bool,
    noise: Option<(NoiseModel, usize, bool)>,
    seed: u64,
) -> CliResult<Outputs> {
    let geom = map.geometry.expect("lattice map");
    let t_c = cluster_time(map)?;
    let t = t.unwrap_or(t_c);
    let plus = SpinState::plus(map.n_sites)?;
    let mut state = evolve_ising(map, &plus, t)?;
    if frame_correct {
        state = frame_correction(map, &state, t)?;
    }
    let n = map.n_sites;
    let stat = match &noise {
        Some((model, samples, echo)) => {
            let obs: Vec<Observable> = (0..n).map(|j| Observable::Stabilizer { site: j, neighbours: geom.neighbours(j) }).collect();
            Some(static_noise_ensemble(map, &plus, model, Dynamics::Ising { frame_correct }, *echo, t, *samples, seed, &obs)?)
        }
        None => None,
    };
    let mut header = vec!["site [index]", "K_noiseless [1]", "K_dephased [1]"];
    if stat.is_some() {
        header.extend(["K_static_mean [1]", "K_static_stderr [1]"]);
    }
    let mut table = Table::new("cluster", &header);
    let mut k_dephased = Vec::with_capacity(n);
    for j in 0..n {
        let k = stabilizer_expectation(&state, j, &geom, Boundary::Open)?;
        let kd = stabilizer_with_dephasing(k, gamma_d.unwrap_or(0.0), t)?;
        k_dephased.push(kd);
        let mut row: Vec<Cell> = vec![j.into(), k.into(), kd.into()];
        if let Some(s) = &stat {
            row.extend([Cell::from(s[j].mean), Cell::from(s[j].stderr)]);
        }
        table.push(row);
    }
    let mean_abs = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64;
    let k_clean = table.column("K_noiseless [1]").unwrap_or_default();

    let mut out = Outputs::default();
    out.set("scenario", "cluster");
    out.set("sites", n);
    out.set("j_z_nn_hz", num(map.nn_jz_hz));
    out.set("t_c_ms", num(1e3 * t_c));
    out.set("t_ms", num(1e3 * t));
    out.set("frame_corrected", frame_correct);
    out.set("gamma_d_per_s", num(gamma_d.unwrap_or(0.0)));
    out.set("mean_abs_k_noiseless", num(mean_abs(&k_clean)));
    out.set("mean_abs_k_dephased", num(mean_abs(&k_dephased)));
    out.set("dephasing_factor", num(stabilizer_with_dephasing(1.0, gamma_d.unwrap_or(0.0), t)?));
    if let Some(s) = &stat {
        let means: Vec<f64> = s.iter().map(|x| x.mean).collect();
        out.set("mean_abs_k_static", num(mean_abs(&means)));
        let (model, samples, echo) = noise.as_ref().expect("noise present");
        out.set("static_noise", json!({ "samples": samples, "echo": echo, "delta_e_hz": num(model.delta_e_updown) }));
    }
    out.tables.push(table);
    Ok(out)
}

fn squeeze(map: &CouplingMap, times_ms: &[f64], dynamics: DynamicsSpec) -> CliResult<Outputs> {
    let plus = SpinState::plus(map.n_sites)?;
    let prop = match dynamics {
        DynamicsSpec::Xxz => Some(XxzPropagator::new(map, None)?),
        DynamicsSpec::Ising => None,
    };
    let xi2: Vec<f64> = times_ms
        .par_iter()
        .map(|&t_ms| -> CliResult<f64> {
            let t = 1e-3 * t_ms;
            let s = match &prop {
                Some(p) => p.evolve(&plus, t)?,
                None => evolve_ising(map, &plus, t)?,
            };
            Ok(squeezing_parameter(&s)?.xi2)
        })
        .collect::<CliResult<_>>()?;
    let mut table = Table::new("squeeze", &["t [ms]", "xi2 [1]", "xi2 [dB]"]);
    for (&t, &x) in times_ms.iter().zip(&xi2) {
        table.push(vec![t.into(), x.into(), (10.0 * x.log10()).into()]);
    }
    let k = (0..xi2.len()).min_by(|&a, &b| xi2[a].total_cmp(&xi2[b])).expect("non-empty axis");
    let mut out = Outputs::default();
    out.set("scenario", "squeeze");
    out.set("sites", map.n_sites);
    out.set("dynamics", match dynamics {
        DynamicsSpec::Xxz => "xxz",
        DynamicsSpec::Ising => "ising",
    });
    out.set("j_perp_nn_hz", num(map.nn_jperp_hz));
    out.set("j_z_nn_hz", num(map.nn_jz_hz));
    out.set("xi2_min", num(xi2[k]));
    out.set("t_at_xi2_min_ms", num(times_ms[k]));
    if map.nn_jperp_hz != 0.0 {
        let t_opt: Vec<Value> =
            T_OPT_COEFFICIENTS.iter().map(|&c| json!({ "coefficient": c, "t_ms": num(1e3 * optimal_time(c, map.nn_jperp_hz.abs())) })).collect();
        out.set("t_opt", t_opt);
    }
    out.tables.push(table);
    Ok(out)
}

fn gap(sizes: &[usize], j_perp_nn: f64, delta_e: f64) -> Outputs {
    let mut table = Table::new("gap", &["L [sites]", "delta_h [Hz]", "delta_h_asymptotic [Hz]", "delta_MB [Hz]", "protected [bool]"]);
    let mut l_max = 0;
    for &l in sizes {
        let r = gap_protection(l, j_perp_nn.abs(), delta_e);
        l_max = r.l_max;
        table.push(vec![l.into(), r.delta_h.into(), r.delta_h_asymptotic.into(), r.delta_mb_nn.into(), r.protected.into()]);
    }
    let mut out = Outputs::default();
    out.set("scenario", "gap");
    out.set("j_perp_nn_hz", num(j_perp_nn));
    out.set("delta_e_hz", num(delta_e));
    out.set("l_max", if l_max == u64::MAX { Value::Null } else { Value::from(l_max) });
    out.tables.push(table);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_crossings_interpolate() {
        let z = sign_changes(&[(0.0, -1.0), (1.0, 1.0), (2.0, 3.0), (3.0, -3.0)]);
        assert_eq!(z, vec![0.5, 2.5]);
    }

    #[test]
    fn approach_stops_short() {
        let a = approach(0.0, 10.0, 3.0);
        assert_eq!(a.len(), 4);
        assert_eq!(a[0], 0.0);
        assert!(a.iter().all(|&x| x < 10.0));
        assert!(approach(5.0, 5.0, 1.0).is_empty());
    }

    #[test]
    fn union_is_sorted_and_unique() {
        assert_eq!(with_points(vec![0.0, 1.0, 2.0], &[1.0, 1.5]), vec![0.0, 1.0, 1.5, 2.0]);
    }
}
