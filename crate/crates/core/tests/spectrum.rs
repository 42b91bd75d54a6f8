mod common;
use common::*;

use molspin::effective::{crossing_field_analytic, quadrupole_coupling, dressed_pair, DressedLabels, tracked_spin_half};
use molspin::hamiltonian::{Term, TermMask};
use molspin::spectrum::*;
use molspin::{build_basis, BasisKet, Error, FieldPoint, Half, MoleculeSpec};

fn rotor_ket(n: u32, m: i32) -> BasisKet {
    BasisKet::new(n, m, None, vec![])
}

#[test]
fn zero_field_dipoles_obey_parity() {
    let spec = bare_singlet();
    let basis = build_basis(&spec, 2, Some(Half(-7))).unwrap();
    let h = BlockedHamiltonian::new(&spec, &basis, &[Half(-7)], TermMask::all()).unwrap();
    let n = basis.len();
    let seeds: Vec<Seed> = (0..n).map(|i| Seed { label: format!("s{i}"), target: SeedTarget::Index { mf: Half(-7), index: i } }).collect();
    let spectra = vec![PointSpectrum::compute(&h, FieldPoint::new(0.0, 400.0).unwrap())];
    let t = track(&h, &spectra, &seeds, TrackOptions::default()).unwrap();
    let parity = |i: usize| -> u32 {
        let v = t.vector(&format!("s{i}"), 0).unwrap();
        let kets = t.basis().kets();
        let p = kets[v.iamax()].n % 2;
        // every component shares the parity
        assert!(v.iter().zip(kets).all(|(c, k)| c.abs() < 1e-12 || k.n % 2 == p));
        p
    };
    let mut checked = 0;
    for a in 0..n {
        for b in 0..n {
            if parity(a) != parity(b) {
                continue;
            }
            checked += 1;
            for q in -1..=1 {
                let d = t.dipole_element(&spec, &format!("s{a}"), &format!("s{b}"), 0, q).unwrap();
                assert!(d.abs() < 1e-12, "{a} {b} {q}: {d}");
            }
        }
    }
    assert!(checked > n);
}

#[test]
fn differential_stark_shift_matches_perturbation_theory() {
    // second order: E(0,0) = −x/6, E(1,0) = 2B + x/10, E(1,±1) = 2B − x/20, x = (Ed)²/B
    let spec = MoleculeSpec::rigid_rotor(1000.0, 1.0);
    let basis = build_basis(&spec, 6, None).unwrap();
    let beta = 0.02;
    let e = spec.field_for_stark_parameter(beta);
    let seeds = [Seed::named("0", rotor_ket(0, 0)), Seed::named("10", rotor_ket(1, 0)), Seed::named("11", rotor_ket(1, 1))];
    let t = sweep_and_track(&spec, &basis, &[FieldPoint::new(e, 0.0).unwrap()], &seeds, TermMask::all(), TrackOptions::default()).unwrap();
    let dss = differential_stark_shift(&t, ("0", "10"), ("0", "11"), 0).unwrap();
    let x = beta * beta * spec.rotational_constant;
    let oracle = 3.0 * x / 20.0;
    assert!((dss - oracle).abs() < 1e-3 * oracle, "{dss} vs {oracle}");
}

#[test]
fn differential_stark_shift_vanishes_without_field_and_quadrupole() {
    let spec = krb();
    let basis = build_basis(&spec, 2, None).unwrap();
    let seeds = [
        Seed::named("g", singlet_ket(0, 0, -4.0, 0.5)),
        Seed::named("e", singlet_ket(1, 0, -4.0, 0.5)),
        Seed::named("e2", singlet_ket(1, 1, -4.0, 0.5)),
    ];
    let mask = TermMask::only(&[Term::Rotation]);
    let t = sweep_and_track(&spec, &basis, &[FieldPoint::new(0.0, 0.0).unwrap()], &seeds, mask, TrackOptions::default()).unwrap();
    assert!(differential_stark_shift(&t, ("g", "e"), ("g", "e2"), 0).unwrap().abs() < 1e-9);
    assert!(matches!(differential_stark_shift(&t, ("g", "x"), ("g", "e2"), 0), Err(Error::UnknownLabel(_))));
}

#[test]
fn single_point_sweep_keeps_seed_labels() {
    let spec = yo();
    let basis = build_basis(&spec, 2, None).unwrap();
    let seeds = [Seed::ket(doublet_ket(0, 0, 0.5, 0.5)), Seed::ket(doublet_ket(1, 1, -0.5, 0.5))];
    let t = sweep_and_track(&spec, &basis, &[FieldPoint::new(5.0, 8000.0).unwrap()], &seeds, TermMask::all(), TrackOptions::default()).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t.labels, vec!["|0\u{303}0,1/2,1/2⟩".to_string(), "|1\u{303}1,-1/2,1/2⟩".to_string()]);
}

#[test]
fn large_steps_report_tracking_failure() {
    let spec = MoleculeSpec::rigid_rotor(1000.0, 1.0);
    let basis = build_basis(&spec, 6, Some(Half::ZERO)).unwrap();
    let sweep = [FieldPoint::new(0.0, 0.0).unwrap(), FieldPoint::new(spec.field_for_stark_parameter(3.0), 0.0).unwrap()];
    let opts = TrackOptions { threshold: 0.999, ..TrackOptions::default() };
    let err = sweep_and_track(&spec, &basis, &sweep, &[Seed::named("g", rotor_ket(0, 0))], TermMask::all(), opts).unwrap_err();
    assert!(matches!(err, Error::Tracking { .. }));
    assert!(err.to_string().contains("halve"));
    // a fine sweep over the same range passes
    let fine: Vec<FieldPoint> = (0..=30).map(|k| FieldPoint::new(spec.field_for_stark_parameter(0.1 * k as f64), 0.0).unwrap()).collect();
    let t = sweep_and_track(&spec, &basis, &fine, &[Seed::named("g", rotor_ket(0, 0))], TermMask::all(), TrackOptions::default()).unwrap();
    assert!(t.min_overlap.iter().all(|&o| o > 0.9));
}

#[test]
fn bare_encoding_suppresses_transition_dipole() {
    let spec = krb();
    let basis = build_basis(&spec, 3, None).unwrap();
    let up = singlet_ket(0, 0, -4.0, 0.5);
    let down = singlet_ket(1, 0, -4.0, 1.5);
    let seeds = [Seed::named("up", up), Seed::named("down", down)];
    let point = FieldPoint::new(5.0, 400.0).unwrap();
    let t = sweep_and_track(&spec, &basis, &[FieldPoint::new(0.0, 400.0).unwrap(), point], &seeds, TermMask::all(), TrackOptions::default()).unwrap();
    let s = tracked_spin_half(&spec, &t, "up", "down", 1, &[], true).unwrap();
    assert!(s.cross_suppression.unwrap() < 1e-2, "{:?}", s.dipoles);
    // at E = 0 every dipole of the bare encoding vanishes
    let z = tracked_spin_half(&spec, &t, "up", "down", 0, &[], true).unwrap();
    assert!(z.dipoles.d_up.abs() < 1e-12 && z.dipoles.d_down.abs() < 1e-12 && z.dipoles.d_cross.abs() < 1e-12);
}

#[test]
fn crossing_field_scales_with_rotational_constant() {
    let spec = yo();
    let mut small = yo();
    small.rotational_constant /= 10.0;
    let ratio = crossing_field_analytic(&spec, 0.0).unwrap() / crossing_field_analytic(&small, 0.0).unwrap();
    assert!((ratio - 10.0).abs() < 0.05, "{ratio}");
}

#[test]
fn quadrupole_coupling_vanishes_without_quadrupole_constants() {
    let mut spec = krb();
    for n in &mut spec.nuclei {
        n.quadrupole = 0.0;
    }
    let basis = build_basis(&spec, 2, Some(Half(-7))).unwrap();
    let seeds = [
        Seed::named("g", singlet_ket(0, 0, -2.0, -1.5)),
        Seed::named("e", singlet_ket(1, 0, -2.0, -1.5)),
        Seed::named("b", singlet_ket(1, -1, -4.0, 1.5)),
    ];
    let t = sweep_and_track(&spec, &basis, &[FieldPoint::new(0.0, 224.0).unwrap()], &seeds, TermMask::all(), TrackOptions::default()).unwrap();
    let labels = DressedLabels { ground: "g".into(), excited: "e".into(), bare: "b".into() };
    let d = dressed_pair(t.energy("e", 0).unwrap(), 2.1, 0.0).unwrap();
    assert_eq!(quadrupole_coupling(&spec, &t, &d, &labels, 0).unwrap(), 0.0);
}
