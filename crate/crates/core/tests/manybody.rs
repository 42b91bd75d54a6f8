use molspin::couplings::{coupling_map, CouplingMap, LatticeGeometry, PairCoupling, SpinCouplingConstants};
use molspin::manybody::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn random_state(n: usize, raw: &[(f64, f64)]) -> SpinState {
    let mut amps: Vec<Complex64> = raw.iter().take(1 << n).map(|&(a, b)| Complex64::new(a, b)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    SpinState::from_amplitudes(n, amps).unwrap()
}

fn random_map(n: usize, jz: &[f64], jp: &[f64]) -> CouplingMap {
    let mut pairs = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(PairCoupling { i, j, jz_hz: jz[k], jperp_hz: jp[k] });
            k += 1;
        }
    }
    CouplingMap::from_pairs(n, pairs).unwrap()
}

fn state_strategy() -> impl Strategy<Value = (usize, Vec<(f64, f64)>, Vec<f64>, Vec<f64>, f64)> {
    (2usize..=6).prop_flat_map(|n| {
        let npairs = n * (n - 1) / 2;
        (
            Just(n),
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n),
            prop::collection::vec(-300.0..300.0f64, npairs),
            prop::collection::vec(-300.0..300.0f64, npairs),
            0.0..5e-3f64,
        )
    })
}

/// Ising phase oracle written out independently of the library.
fn ising_oracle(map: &CouplingMap, psi: &SpinState, t: f64) -> Vec<Complex64> {
    psi.amplitudes()
        .iter()
        .enumerate()
        .map(|(b, a)| {
            let mut e = 0.0;
            for p in &map.pairs {
                let si = if b >> p.i & 1 == 1 { 0.5 } else { -0.5 };
                let sj = if b >> p.j & 1 == 1 { 0.5 } else { -0.5 };
                e += 2.0 * std::f64::consts::PI * p.jz_hz * si * sj;
            }
            a * Complex64::from_polar(1.0, -e * t)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ising_matches_phase_oracle((n, raw, jz, jp, t) in state_strategy()) {
        let map = random_map(n, &jz, &jp);
        let psi = random_state(n, &raw);
        let out = evolve_ising(&map, &psi, t).unwrap();
        for (x, y) in out.amplitudes().iter().zip(ising_oracle(&map, &psi, t)) {
            prop_assert!((x - y).norm() < 1e-10);
        }
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
        for j in 0..n {
            prop_assert!((out.expect_sz(j) - psi.expect_sz(j)).abs() < 1e-12);
        }
    }

    #[test]
    fn xxz_without_flip_flop_is_ising((n, raw, jz, _jp, t) in state_strategy()) {
        let map = random_map(n, &jz, &vec![0.0; jz.len()]);
        let psi = random_state(n, &raw);
        let a = evolve_xxz(&map, &psi, t, None).unwrap();
        let b = evolve_ising(&map, &psi, t).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn xxz_conserves_norm_and_total_sz((n, raw, jz, jp, t) in state_strategy()) {
        let map = random_map(n, &jz, &jp);
        let psi = random_state(n, &raw);
        let out = evolve_xxz(&map, &psi, t, None).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
        let (m0, v0) = psi.total_sz_moments();
        let (m1, v1) = out.total_sz_moments();
        prop_assert!((m0 - m1).abs() < 1e-10);
        prop_assert!((v0 - v1).abs() < 1e-10);
    }

    #[test]
    fn squeezing_is_rotation_invariant(
        (n, raw, jz, _jp, t) in state_strategy(),
        axis in prop::array::uniform3(-1.0..1.0f64),
        theta in -3.0..3.0f64,
    ) {
        prop_assume!(axis.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        // squeezed-ish states from Ising evolution of |+⟩
        let _ = raw;
        let map = random_map(n, &jz, &vec![0.0; jz.len()]);
        let psi = evolve_ising(&map, &SpinState::plus(n).unwrap(), t).unwrap();
        let Ok(before) = squeezing_parameter(&psi) else { return Ok(()) };
        prop_assume!(before.mean_spin > 0.05);
        let mut rotated = psi.clone();
        rotated.rotate_all(axis, theta);
        let after = squeezing_parameter(&rotated).unwrap();
        prop_assert!((before.xi2 - after.xi2).abs() < 1e-10);
        prop_assert!((before.mean_spin - after.mean_spin).abs() < 1e-10);
    }

    #[test]
    fn stabilizers_are_bounded((n, raw, ..) in state_strategy(), site in 0usize..6) {
        let psi = random_state(n, &raw);
        let g = LatticeGeometry::chain(n, 500.0);
        let k = stabilizer_expectation(&psi, site % n, &g, Boundary::Open).unwrap();
        prop_assert!(k.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn coherent_states_are_unsqueezed(n in 1usize..=8, axis in prop::array::uniform3(-1.0..1.0f64), theta in -3.0..3.0f64) {
        prop_assume!(axis.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let mut psi = SpinState::plus(n).unwrap();
        psi.rotate_all(axis, theta);
        let r = squeezing_parameter(&psi).unwrap();
        prop_assert!((r.xi2 - 1.0).abs() < 1e-10);
    }
}

fn nn_chain(n: usize, j: f64) -> CouplingMap {
    let pairs = (0..n - 1).map(|i| PairCoupling { i, j: i + 1, jz_hz: j, jperp_hz: 0.0 }).collect();
    CouplingMap::from_pairs(n, pairs).unwrap()
}

#[test]
fn nearest_neighbour_cluster_states_are_stabilized() {
    for n in [3, 5, 8] {
        let map = nn_chain(n, 170.0);
        let t = cluster_time(&map).unwrap();
        let psi = evolve_ising(&map, &SpinState::plus(n).unwrap(), t).unwrap();
        let psi = frame_correction(&map, &psi, t).unwrap();
        let g = LatticeGeometry::chain(n, 500.0);
        for j in 0..n {
            let k = stabilizer_expectation(&psi, j, &g, Boundary::Open).unwrap();
            assert!((k.abs() - 1.0).abs() < 1e-10, "n = {n}, site {j}: {k}");
        }
    }
}

#[test]
fn square_plaquette_cluster_state() {
    let g = LatticeGeometry::square(3, 500.0);
    let mut pairs = Vec::new();
    for i in 0..9 {
        for k in g.neighbours(i) {
            if k > i {
                pairs.push(PairCoupling { i, j: k, jz_hz: 100.0, jperp_hz: 0.0 });
            }
        }
    }
    let map = CouplingMap::from_pairs(9, pairs).unwrap();
    let t = cluster_time(&map).unwrap();
    let psi = frame_correction(&map, &evolve_ising(&map, &SpinState::plus(9).unwrap(), t).unwrap(), t).unwrap();
    let k = stabilizer_expectation(&psi, 4, &g, Boundary::Bulk).unwrap();
    assert!((k.abs() - 1.0).abs() < 1e-10);
}

#[test]
fn long_range_chain_stabilizer_matches_brute_force() {
    let n = 8;
    let g = LatticeGeometry::chain(n, 500.0);
    let consts = SpinCouplingConstants { j_perp: 0.0, j_z: 1.0, w_z: 0.0, v: 0.0 };
    let map = coupling_map(&g, &consts, None).unwrap();
    let t = cluster_time(&map).unwrap();
    let psi = frame_correction(&map, &evolve_ising(&map, &SpinState::plus(n).unwrap(), t).unwrap(), t).unwrap();
    // brute force: ⟨ψ| σ^x_j σ^z_{j−1} σ^z_{j+1} |ψ⟩ from the oracle amplitudes
    let mut plus = SpinState::plus(n).unwrap();
    let amps = ising_oracle(&map, &plus, t);
    plus = SpinState::from_amplitudes(n, amps).unwrap();
    let plus = frame_correction(&map, &plus, t).unwrap();
    let a = plus.amplitudes();
    let j = 3;
    let mut brute = 0.0;
    for b in 0..a.len() {
        let z = |k: usize| if b >> k & 1 == 1 { 1.0 } else { -1.0 };
        brute += (a[b ^ (1 << j)].conj() * a[b]).re * z(j - 1) * z(j + 1);
    }
    let k = stabilizer_expectation(&psi, j, &g, Boundary::Bulk).unwrap();
    assert!((k - brute).abs() < 1e-10);
    assert!(k.abs() < 1.0);
}

/// Exact one-axis-twisting Wineland parameter for H = χS_z² acting on the
/// x-polarised coherent state.
fn kitagawa_ueda(n: usize, chi_t: f64) -> f64 {
    let nf = n as f64;
    let mu = 2.0 * chi_t;
    let a = 1.0 - (mu).cos().powi(n as i32 - 2);
    let b = 4.0 * (0.5 * mu).sin() * (0.5 * mu).cos().powi(n as i32 - 2);
    let v_min = 0.25 * nf * (1.0 + 0.25 * (nf - 1.0) * (a - (a * a + b * b).sqrt()));
    let sx = 0.5 * nf * (0.5 * mu).cos().powi(n as i32 - 1);
    nf * v_min / (sx * sx)
}

#[test]
fn one_axis_twisting_matches_exact_oracle() {
    let n = 8;
    let j = 50.0;
    // Σ_{i<j} 2πJ S^z_i S^z_j = πJ S_z² − const
    let chi = std::f64::consts::PI * j;
    let map = CouplingMap::all_to_all(n, j, 0.0);
    for chi_t in [0.005, 0.02, 0.05, 0.1, 0.2] {
        let t = chi_t / chi;
        let psi = evolve_xxz(&map, &SpinState::plus(n).unwrap(), t, None).unwrap();
        let xi2 = squeezing_parameter(&psi).unwrap().xi2;
        assert!((xi2 - kitagawa_ueda(n, chi_t)).abs() < 1e-10, "χt = {chi_t}: {xi2}");
    }
    // small-t slope −(N − 1)χ
    let h = 1e-5;
    let psi = evolve_ising(&map, &SpinState::plus(n).unwrap(), h / chi).unwrap();
    let slope = (squeezing_parameter(&psi).unwrap().xi2 - 1.0) / h;
    assert!((slope + (n as f64 - 1.0)).abs() < 1e-3, "slope {slope}");
}

#[test]
fn heisenberg_point_keeps_coherent_state() {
    for n in [4, 8] {
        let map = CouplingMap::all_to_all(n, 120.0, 120.0);
        let prop = XxzPropagator::new(&map, None).unwrap();
        for t in [1e-3, 5e-3, 2e-2] {
            let psi = prop.evolve(&SpinState::plus(n).unwrap(), t).unwrap();
            let r = squeezing_parameter(&psi).unwrap();
            assert!((r.xi2 - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn krylov_path_agrees_with_dense() {
    // N = 12 has a 924-state half-filled sector (dense); N = 13 has 1716 (Krylov).
    let n = 13;
    let g = LatticeGeometry::chain(n, 500.0);
    let consts = SpinCouplingConstants { j_perp: 0.1, j_z: 0.05, w_z: 0.0, v: 0.0 };
    let map = coupling_map(&g, &consts, None).unwrap();
    let psi0 = SpinState::plus(n).unwrap();
    let t = 3e-3;
    let fields: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 - 10.0).collect();
    let psi = evolve_xxz(&map, &psi0, t, Some(&fields)).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-10);
    // reference: two half steps must compose to the full step
    let prop = XxzPropagator::new(&map, Some(&fields)).unwrap();
    let half = prop.evolve(&prop.evolve(&psi0, 0.5 * t).unwrap(), 0.5 * t).unwrap();
    for (x, y) in psi.amplitudes().iter().zip(half.amplitudes()) {
        assert!((x - y).norm() < 1e-9);
    }
    // and reversing time must return to the start
    let back = prop.evolve(&psi, -t).unwrap();
    for (x, y) in back.amplitudes().iter().zip(psi0.amplitudes()) {
        assert!((x - y).norm() < 1e-9);
    }
}

#[test]
fn white_noise_single_spin_matches_decay() {
    let gamma = 1.0 / 0.470;
    for t in [0.1, 0.47, 1.0] {
        let s = white_noise_single_spin(gamma, t, 50, 10_000, 7).unwrap();
        let exact = white_noise_decay(gamma, t);
        assert!((s.mean - exact).abs() < 3.0 * s.stderr, "t = {t}: {} ± {} vs {exact}", s.mean, s.stderr);
    }
    let a = white_noise_single_spin(gamma, 0.3, 10, 100, 11).unwrap();
    let b = white_noise_single_spin(gamma, 0.3, 10, 100, 11).unwrap();
    assert_eq!(a, b);
}

#[test]
fn white_noise_stabilizer_trajectories_match_analytic_factor() {
    let n = 4;
    let map = nn_chain(n, 170.0);
    let g = LatticeGeometry::chain(n, 500.0);
    let t = cluster_time(&map).unwrap();
    let gamma = 50.0;
    let s = white_noise_stabilizer(&map, &g, 1, gamma, t, 20, 4000, 3).unwrap();
    let clean = stabilizer_expectation(
        &frame_correction(&map, &evolve_ising(&map, &SpinState::plus(n).unwrap(), t).unwrap(), t).unwrap(),
        1,
        &g,
        Boundary::Open,
    )
    .unwrap();
    let analytic = stabilizer_with_dephasing(clean, gamma, t).unwrap();
    assert!((s.mean - analytic).abs() < 3.0 * s.stderr.max(1e-6), "{} ± {} vs {analytic}", s.mean, s.stderr);
}

#[test]
fn static_noise_with_echo_restores_stabilizers() {
    let n = 6;
    let g = LatticeGeometry::chain(n, 500.0);
    let consts = SpinCouplingConstants { j_perp: 0.0, j_z: 1.0, w_z: 0.0, v: 0.0 };
    let map = coupling_map(&g, &consts, None).unwrap();
    let t = cluster_time(&map).unwrap();
    let psi0 = SpinState::plus(n).unwrap();
    let observables: Vec<Observable> = (0..n).map(|j| Observable::Stabilizer { site: j, neighbours: g.neighbours(j) }).collect();
    let clean = frame_correction(&map, &evolve_ising(&map, &psi0, t).unwrap(), t).unwrap();
    let clean_k: Vec<f64> = (0..n).map(|j| stabilizer_expectation(&clean, j, &g, Boundary::Open).unwrap()).collect();

    let dynamics = Dynamics::Ising { frame_correct: true };
    let zero = NoiseModel { gamma_d: 0.0, delta_e_updown: 0.0, kind: NoiseKind::Static(StaticProfile::Gaussian { sigma: 0.0 }) };
    let r = static_noise_ensemble(&map, &psi0, &zero, dynamics, false, t, 3, 1, &observables).unwrap();
    for (s, k) in r.iter().zip(&clean_k) {
        assert!((s.mean - k).abs() < 1e-12);
    }

    let noisy = NoiseModel { gamma_d: 0.0, delta_e_updown: 0.0, kind: NoiseKind::Static(StaticProfile::Gaussian { sigma: 80.0 }) };
    let plain = static_noise_ensemble(&map, &psi0, &noisy, dynamics, false, t, 20, 5, &observables).unwrap();
    let echoed = static_noise_ensemble(&map, &psi0, &noisy, dynamics, true, t, 20, 5, &observables).unwrap();
    for j in 0..n {
        assert!((echoed[j].mean.abs() - clean_k[j].abs()).abs() < 1e-8);
        assert!(plain[j].mean.abs() < clean_k[j].abs() - 1e-3);
    }

    let harmonic = NoiseModel { gamma_d: 0.0, delta_e_updown: 5.0, kind: NoiseKind::Static(StaticProfile::Harmonic) };
    let echoed = static_noise_ensemble(&map, &psi0, &harmonic, dynamics, true, t, 1, 0, &observables).unwrap();
    for j in 0..n {
        assert!((echoed[j].mean.abs() - clean_k[j].abs()).abs() < 1e-8);
    }
    assert!(static_noise_ensemble(&map, &psi0, &noisy, dynamics, false, t, 0, 5, &observables).is_err());
}

#[test]
fn static_noise_is_reproducible_from_seed() {
    let map = CouplingMap::all_to_all(5, 30.0, 60.0);
    let psi0 = SpinState::plus(5).unwrap();
    let noise = NoiseModel { gamma_d: 0.0, delta_e_updown: 0.0, kind: NoiseKind::Static(StaticProfile::Gaussian { sigma: 20.0 }) };
    let obs = [Observable::Squeezing];
    let a = static_noise_ensemble(&map, &psi0, &noise, Dynamics::Xxz, false, 5e-3, 8, 42, &obs).unwrap();
    let b = static_noise_ensemble(&map, &psi0, &noise, Dynamics::Xxz, false, 5e-3, 8, 42, &obs).unwrap();
    let c = static_noise_ensemble(&map, &psi0, &noise, Dynamics::Xxz, false, 5e-3, 8, 43, &obs).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn gap_protection_ladder() {
    // stronger flip-flop exchange protects the collective spin against a fixed
    // harmonic splitting profile
    let l = 3;
    let g = LatticeGeometry::square(l, 500.0);
    let noise = NoiseModel { gamma_d: 0.0, delta_e_updown: 20.0, kind: NoiseKind::Static(StaticProfile::Harmonic) };
    let psi0 = SpinState::plus(l * l).unwrap();
    let obs = [Observable::Squeezing];
    let mut loss = Vec::new();
    for jp in [0.05, 0.2, 0.8] {
        let consts = SpinCouplingConstants { j_perp: jp, j_z: 0.0, w_z: 0.0, v: 0.0 };
        let map = coupling_map(&g, &consts, None).unwrap();
        let t = 1.0 / (2.0 * std::f64::consts::PI * map.nn_jperp_hz.abs());
        let clean_map = map.clone();
        let clean = squeezing_parameter(&evolve_xxz(&clean_map, &psi0, t, None).unwrap()).unwrap().xi2;
        let noisy = static_noise_ensemble(&map, &psi0, &noise, Dynamics::Xxz, false, t, 1, 0, &obs).unwrap()[0].mean;
        loss.push(noisy - clean);
    }
    assert!(loss[0] > loss[1] && loss[1] > loss[2], "{loss:?}");
}
