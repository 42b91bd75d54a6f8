use molspin::angular::*;
use molspin::Half;
use proptest::prelude::*;

/// All j ≤ 3 in half-integer steps.
fn js() -> Vec<Half> {
    (0..=6).map(Half).collect()
}

fn w(j: [Half; 3], m: [Half; 3]) -> f64 {
    wigner3j(j[0], j[1], j[2], m[0], m[1], m[2]).unwrap()
}

fn parity(x: Half) -> f64 {
    if x.twice().rem_euclid(4) == 0 { 1.0 } else { -1.0 }
}

#[test]
fn three_j_symmetries_up_to_three() {
    for &j1 in &js() {
        for &j2 in &js() {
            for &j3 in &js() {
                if (j1.twice() + j2.twice() + j3.twice()) % 2 != 0 {
                    continue;
                }
                let phase = parity(j1 + j2 + j3);
                for m1 in j1.projections() {
                    for m2 in j2.projections() {
                        let m3 = -(m1 + m2);
                        if m3.abs().twice() > j3.twice() {
                            continue;
                        }
                        let v = w([j1, j2, j3], [m1, m2, m3]);
                        // even permutations
                        assert!((w([j2, j3, j1], [m2, m3, m1]) - v).abs() < 1e-13);
                        assert!((w([j3, j1, j2], [m3, m1, m2]) - v).abs() < 1e-13);
                        // odd permutation and sign reversal
                        assert!((w([j2, j1, j3], [m2, m1, m3]) - phase * v).abs() < 1e-13);
                        assert!((w([j1, j2, j3], [-m1, -m2, -m3]) - phase * v).abs() < 1e-13);
                    }
                }
            }
        }
    }
}

#[test]
fn three_j_orthogonality_up_to_three() {
    for &j1 in &js() {
        for &j2 in &js() {
            let lo = (j1 - j2).abs().twice();
            let hi = (j1 + j2).twice();
            let j3s: Vec<Half> = (lo..=hi).step_by(2).map(Half).collect();
            for &j3 in &j3s {
                for &j3p in &j3s {
                    for m3 in j3.projections() {
                        if m3.abs().twice() > j3p.twice() {
                            continue;
                        }
                        let mut sum = 0.0;
                        for m1 in j1.projections() {
                            let m2 = -(m1 + m3);
                            if m2.abs().twice() > j2.twice() {
                                continue;
                            }
                            sum += w([j1, j2, j3], [m1, m2, m3]) * w([j1, j2, j3p], [m1, m2, m3]);
                        }
                        let expected = if j3 == j3p { 1.0 / f64::from(j3.twice() + 1) } else { 0.0 };
                        assert!((sum - expected).abs() < 1e-13, "{j1} {j2} {j3} {j3p} {m3}");
                    }
                }
            }
        }
    }
}

#[test]
fn clebsch_gordan_completeness() {
    for &j1 in &js() {
        for &j2 in &js() {
            let lo = (j1 - j2).abs().twice();
            let hi = (j1 + j2).twice();
            for m1 in j1.projections() {
                for m2 in j2.projections() {
                    let m = m1 + m2;
                    let norm: f64 = (lo..=hi)
                        .step_by(2)
                        .map(Half)
                        .filter(|j| m.abs().twice() <= j.twice())
                        .map(|j| clebsch_gordan(j1, m1, j2, m2, j, m).unwrap().powi(2))
                        .sum();
                    assert!((norm - 1.0).abs() < 1e-13);
                }
            }
        }
    }
}

#[test]
fn domain_errors() {
    assert!(wigner3j(Half(2), Half(2), Half(2), Half(4), Half(-2), Half(-2)).is_err());
    assert!(wigner3j(Half(1), Half(2), Half(2), Half(0), Half(0), Half(0)).is_err());
}

proptest! {
    #[test]
    fn rotor_tensor_is_hermitian_up_to_phase(n in 0u32..5, dn in 0u32..3, m in -4i32..5, q in -2i32..3, k in 1u32..3) {
        let np = n + dn;
        prop_assume!(m.unsigned_abs() <= n && (m + q).unsigned_abs() <= np && q.unsigned_abs() <= k);
        // ⟨N'M'|C^k_q|NM⟩ = (−1)^q ⟨NM|C^k_{−q}|N'M'⟩
        let a = rotor_tensor(np, m + q, k, q, n, m);
        let b = rotor_tensor(n, m, k, -q, np, m + q);
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() < 1e-13);
    }

    #[test]
    fn spin_components_satisfy_casimir(tj in 1i32..9) {
        // Σ_q (−1)^q J_q J_{−q} = J² on every |j m⟩
        let j = Half(tj);
        let jj = j.value() * (j.value() + 1.0);
        for m in j.projections() {
            let mut diag = 0.0;
            for q in -1..=1i32 {
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                for mid in j.projections() {
                    diag += sign * spin_component(j, m, q, mid) * spin_component(j, mid, -q, m);
                }
            }
            prop_assert!((diag - jj).abs() < 1e-12);
        }
    }
}
