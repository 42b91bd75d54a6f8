mod common;
use common::*;

use molspin::effective::*;
use molspin::spectrum::Seed;
use molspin::{build_basis, FieldPoint, Half};
use proptest::prelude::*;

#[test]
fn two_level_error_scales_quadratically_in_stark_parameter() {
    let spec = yo();
    let betas = [0.01, 0.02, 0.04, 0.08];
    let pts: Vec<(f64, f64)> = betas
        .iter()
        .map(|&b| {
            let e = spec.field_for_stark_parameter(b);
            (b.ln(), alc_reduction_error(&spec, e).unwrap().ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
}

#[test]
fn analytic_crossing_formula() {
    let spec = yo();
    let el = spec.electron.as_ref().unwrap();
    let mu0 = 0.5 * el.g_factor * molspin::units::BOHR_MAGNETON_MHZ_PER_GAUSS;
    let b0 = crossing_field_analytic(&spec, 0.0).unwrap();
    assert!((b0 - (2.0 * spec.rotational_constant - 0.5 * el.spin_rotation) / (2.0 * mu0)).abs() < 1e-9);
    // at B_c the 2×2 diagonal is degenerate
    for e in [0.5, 2.0, 5.0] {
        let b = crossing_field_analytic(&spec, e).unwrap();
        let m = alc_effective_2x2(&spec, FieldPoint::new(e, b).unwrap()).unwrap();
        assert!((m.e_up - m.e_down).abs() < 1e-8);
        assert!(b > b0);
    }
    assert!(crossing_field_analytic(&krb(), 1.0).is_err());
}

#[test]
fn mixing_is_maximal_at_the_crossing() {
    let spec = yo();
    let e = 2.0;
    let b = crossing_field_analytic(&spec, e).unwrap();
    let m = mixing_amplitudes(&alc_effective_2x2(&spec, FieldPoint::new(e, b).unwrap()).unwrap());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for c in m.up.iter().chain(&m.down) {
        assert!((c.abs() - s).abs() < 1e-9);
    }
    // far from the crossing the states are unmixed
    let far = mixing_amplitudes(&alc_effective_2x2(&spec, FieldPoint::new(e, b + 500.0).unwrap()).unwrap());
    assert!(far.up[0].abs() > 0.999 || far.up[1].abs() > 0.999);
}

#[test]
fn three_level_matrix_entries() {
    let spec = yo();
    let el = spec.electron.as_ref().unwrap();
    let (e, b) = (3.0, 8000.0);
    let m = alc_three_level(&spec, FieldPoint::new(e, b).unwrap()).unwrap();
    let ed = e * spec.dipole_moment * molspin::units::DEBYE_KV_PER_CM_IN_MHZ;
    let zb = 0.5 * el.g_factor * molspin::units::BOHR_MAGNETON_MHZ_PER_GAUSS * b;
    assert!((m[(0, 0)] - zb).abs() < 1e-9);
    assert!((m[(0, 1)] + ed / 3f64.sqrt()).abs() < 1e-9);
    assert_eq!(m[(0, 2)], 0.0);
    assert!((m[(1, 2)] - el.spin_rotation / 2f64.sqrt()).abs() < 1e-12);
    assert!((m[(2, 2)] - (2.0 * spec.rotational_constant - zb - 0.5 * el.spin_rotation)).abs() < 1e-9);
    assert_eq!(m, m.transpose());
}

proptest! {
    #[test]
    fn two_level_crossing_is_symmetric(e in 0.05..5.0f64, db in 0.0..50.0f64) {
        let spec = yo();
        let b = crossing_field_analytic(&spec, e).unwrap();
        let lo = alc_effective_2x2(&spec, FieldPoint::new(e, b - db).unwrap()).unwrap();
        let hi = alc_effective_2x2(&spec, FieldPoint::new(e, b + db).unwrap()).unwrap();
        prop_assert!((lo.gap() - hi.gap()).abs() < 1e-8 * lo.gap().max(1.0));
        prop_assert!(lo.gap() >= 2.0 * lo.v.abs() - 1e-12);
    }

    #[test]
    fn dressed_pair_is_orthonormal(e1 in -1e4..1e4f64, omega in 0.01..50.0f64, delta in -50.0..50.0f64) {
        let p = dressed_pair(e1, omega, delta).unwrap();
        prop_assert!((p.c0_plus.powi(2) + p.c1_plus.powi(2) - 1.0).abs() < 1e-12);
        prop_assert!((p.c0_minus.powi(2) + p.c1_minus.powi(2) - 1.0).abs() < 1e-12);
        prop_assert!((p.c0_plus * p.c0_minus + p.c1_plus * p.c1_minus).abs() < 1e-12);
        // completeness: |0⟩⟨0| recovered from the dressed pair
        prop_assert!((p.c0_plus.powi(2) + p.c0_minus.powi(2) - 1.0).abs() < 1e-12);
        prop_assert!((p.e_plus + p.e_minus - (2.0 * e1 + delta)).abs() < 1e-9 * e1.abs().max(1.0));
        prop_assert!((p.e_plus - p.e_minus - (omega * omega + delta * delta).sqrt()).abs() < 1e-9 * e1.abs().max(1.0));
        // eigenvector check against the frame Hamiltonian
        let h = nalgebra::Matrix2::new(e1 + delta, 0.5 * omega, 0.5 * omega, e1);
        let v = nalgebra::Vector2::new(p.c0_minus, p.c1_minus);
        prop_assert!((h * v - v * p.e_minus).norm() < 1e-9 * e1.abs().max(1.0));
    }

    #[test]
    fn mixing_vectors_diagonalise(e_up in -10.0..10.0f64, e_down in -10.0..10.0f64, v in -3.0..3.0f64) {
        let m = TwoLevelEffective { e_up, e_down, v, provenance: Provenance::Analytic, beta_e: 0.0 };
        let mix = mixing_amplitudes(&m);
        let [lo, hi] = m.eigenvalues();
        let h = m.matrix();
        let up = nalgebra::Vector2::new(mix.up[0], mix.up[1]);
        let down = nalgebra::Vector2::new(mix.down[0], mix.down[1]);
        prop_assert!((h * up - up * hi).norm() < 1e-9);
        prop_assert!((h * down - down * lo).norm() < 1e-9);
        prop_assert!(up.dot(&down).abs() < 1e-12);
    }
}

#[test]
fn resonant_dressing_is_equal_weight() {
    let p = dressed_pair(100.0, 2.1, 0.0).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((p.c0_minus - s).abs() < 1e-12 && (p.c1_minus + s).abs() < 1e-12);
    assert!((p.e_minus - (100.0 - 1.05)).abs() < 1e-12);
    assert!(dressed_pair(0.0, 0.0, 1.0).is_err());
}

#[test]
fn rigid_rotor_dipoles_at_weak_field() {
    // second-order perturbation theory: d₀ = β/3, d₁ = −β/5
    let beta = 0.01;
    let (d0, d1) = rotor_dipoles(beta, 6).unwrap();
    assert!((d0 - beta / 3.0).abs() < 1e-5 * beta);
    assert!((d1 + beta / 5.0).abs() < 1e-3 * beta);
}

fn dressed_seeds() -> [Seed; 3] {
    [
        Seed::named("g", singlet_ket(0, 0, -2.0, -1.5)),
        Seed::named("e", singlet_ket(1, 0, -2.0, -1.5)),
        Seed::named("b", singlet_ket(1, -1, -4.0, 1.5)),
    ]
}

#[test]
fn dressed_crossing_field_krb() {
    // frozen from an independent dense-matrix scan
    let spec = krb();
    let basis = build_basis(&spec, 4, Some(Half(-7))).unwrap();
    let (b_c, track) = dressed_crossing(&spec, &basis, 0.0, &dressed_seeds(), 2.1, (800.0, 50.0), 76).unwrap();
    assert!((b_c - 224.02).abs() < 0.05, "B_c = {b_c}");
    assert_eq!(track.len(), 76);
    // a window without the crossing is a bracketing error
    assert!(dressed_crossing(&spec, &basis, 0.0, &dressed_seeds(), 2.1, (800.0, 790.0), 3).is_err());
}

#[test]
fn dressed_encoding_at_crossing() {
    use molspin::hamiltonian::TermMask;
    use molspin::spectrum::{sweep_and_track, TrackOptions};
    let spec = krb();
    let basis = build_basis(&spec, 4, Some(Half(-7))).unwrap();
    let (b_c, _) = dressed_crossing(&spec, &basis, 0.0, &dressed_seeds(), 2.1, (800.0, 50.0), 76).unwrap();
    let mut sweep: Vec<FieldPoint> = (0..=20).map(|k| FieldPoint::new(0.0, 800.0 - 25.0 * k as f64).unwrap()).filter(|p| p.b_field > b_c).collect();
    sweep.push(FieldPoint::new(0.0, b_c).unwrap());
    let track = sweep_and_track(&spec, &basis, &sweep, &dressed_seeds(), TermMask::all(), TrackOptions::default()).unwrap();
    let labels = DressedLabels { ground: "g".into(), excited: "e".into(), bare: "b".into() };
    let k = sweep.len() - 1;
    let enc = dressed_encoding(&spec, &track, &labels, k, 2.1, 0.0).unwrap();
    // quadrupole coupling of a few kHz; the resonance leaves the pair
    // degenerate up to that coupling
    assert!(enc.v.abs() > 2.5e-3 && enc.v.abs() < 4.0e-3, "V = {} MHz", enc.v);
    assert!((enc.model.e_up - enc.model.e_down).abs() < 1e-3);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((enc.spin.up[0].abs() - s).abs() < 0.05);
    assert!(enc.spin.gap >= 2.0 * enc.v.abs() - 1e-9);
}
