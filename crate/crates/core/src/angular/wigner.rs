//! Wigner 3-j symbols and the spherical-tensor matrix elements built on them.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{Float, One, ToPrimitive, Zero};

use super::Half;
use crate::{Error, Result};

fn factorial(n: u32) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Ratio of two large integers as an `f64`, correct to a few ulp even when
/// both operands overflow the float range.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = num.bits().max(den.bits()).saturating_sub(1000);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    if n.is_finite() && d.is_finite() && d > 0.0 {
        return n / d;
    }
    // Fall back to aligning both operands to 64 significant bits.
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let n = (num >> (nb - 64).max(0) as u64).to_f64().unwrap();
    let d = (den >> (db - 64).max(0) as u64).to_f64().unwrap();
    n / d * Float::powi(2.0, ((nb - 64).max(0) - (db - 64).max(0)) as i32)
}

fn check_jm(j: Half, m: Half) -> Result<()> {
    if j.twice() < 0 {
        return Err(Error::Domain(format!("negative angular momentum {j}")));
    }
    if m.twice().abs() > j.twice() {
        return Err(Error::Domain(format!("|m| = {} exceeds j = {j}", m.abs())));
    }
    if (j.twice() - m.twice()) % 2 != 0 {
        return Err(Error::Domain(format!("j = {j} and m = {m} differ by a half-integer")));
    }
    Ok(())
}

fn triangle(a: Half, b: Half, c: Half) -> bool {
    let (a, b, c) = (a.twice(), b.twice(), c.twice());
    c <= a + b && c >= (a - b).abs() && (a + b + c) % 2 == 0
}

/// Wigner 3-j symbol
/// ```text
/// ⎛ j1 j2 j3 ⎞
/// ⎝ m1 m2 m3 ⎠
/// ```
/// from the Racah sum, evaluated in exact integer arithmetic. Returns an
/// exact zero when the triangle rule or m1 + m2 + m3 = 0 fails.
pub fn wigner3j(j1: Half, j2: Half, j3: Half, m1: Half, m2: Half, m3: Half) -> Result<f64> {
    check_jm(j1, m1)?;
    check_jm(j2, m2)?;
    check_jm(j3, m3)?;
    if (m1 + m2 + m3).twice() != 0 || !triangle(j1, j2, j3) {
        return Ok(0.0);
    }
    // all quantities below are integers
    let h = |x: Half| -> i64 { i64::from(x.twice()) / 2 };
    let (a1, a2, a3) = (j1 + m1, j2 + m2, j3 + m3);
    let (b1, b2, b3) = (j1 - m1, j2 - m2, j3 - m3);
    let t1 = h(j1 + j2 - j3);
    let t2 = h(j1 - j2 + j3);
    let t3 = h(-j1 + j2 + j3);
    let jsum = h(j1 + j2 + j3);

    let f = |n: i64| factorial(n as u32);
    // squared prefactor: Δ(j1 j2 j3) · Π (j ± m)!
    let pre_num = f(t1) * f(t2) * f(t3) * f(h(a1)) * f(h(b1)) * f(h(a2)) * f(h(b2)) * f(h(a3)) * f(h(b3));
    let pre_den = f(jsum + 1);

    // Σ_k (-1)^k / [k! (j3-j2+k+m1)! (j3-j1+k-m2)! (j1+j2-j3-k)! (j1-k-m1)! (j2-k+m2)!]
    let c1 = h(j3 - j2 + m1);
    let c2 = h(j3 - j1 - m2);
    let kmin = 0.max(-c1).max(-c2);
    let kmax = t1.min(h(b1)).min(h(a2));
    let denoms: Vec<BigUint> = (kmin..=kmax)
        .map(|k| f(k) * f(c1 + k) * f(c2 + k) * f(t1 - k) * f(h(b1) - k) * f(h(a2) - k))
        .collect();
    let common = denoms.iter().fold(BigUint::one(), |acc, d| lcm(&acc, d));
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for (k, d) in (kmin..=kmax).zip(&denoms) {
        let term = &common / d;
        if k % 2 == 0 {
            pos += term;
        } else {
            neg += term;
        }
    }
    let (sum, sum_sign) = if pos >= neg { (pos - neg, 1.0) } else { (neg - pos, -1.0) };
    if sum.is_zero() {
        return Ok(0.0);
    }
    // value² = pre_num/pre_den · sum²/common²
    let num = pre_num * &sum * &sum;
    let den = pre_den * &common * &common;
    let magnitude = ratio_to_f64(&num, &den).sqrt();
    let phase = if h(j1 - j2 - m3) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(phase * sum_sign * magnitude)
}

fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    let g = gcd(a.clone(), b.clone());
    a / &g * b
}

fn gcd(mut a: BigUint, mut b: BigUint) -> BigUint {
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// Clebsch–Gordan coefficient ⟨j1 m1 j2 m2 | J M⟩.
pub fn clebsch_gordan(j1: Half, m1: Half, j2: Half, m2: Half, j: Half, m: Half) -> Result<f64> {
    let w = wigner3j(j1, j2, j, m1, m2, -m)?;
    if w == 0.0 {
        return Ok(0.0);
    }
    let phase = (j1 - j2 + m).parity_sign();
    Ok(phase * (f64::from(j.twice() + 1)).sqrt() * w)
}

/// ⟨N' M'| C^k_q |N M⟩ for the Racah-normalised spherical harmonic C^k_q(θ, φ).
pub fn rotor_tensor(n_bra: u32, m_bra: i32, k: u32, q: i32, n_ket: u32, m_ket: i32) -> f64 {
    if m_bra != m_ket + q || q.unsigned_abs() > k {
        return 0.0;
    }
    if n_bra + n_ket < k || n_bra.abs_diff(n_ket) > k || (n_bra + n_ket + k) % 2 != 0 {
        return 0.0;
    }
    if m_bra.unsigned_abs() > n_bra || m_ket.unsigned_abs() > n_ket {
        return 0.0;
    }
    let j = |n: u32| Half::from_int(n as i32);
    let m = Half::from_int;
    let reduced = wigner3j(j(n_bra), j(k), j(n_ket), Half::ZERO, Half::ZERO, Half::ZERO).unwrap_or(0.0);
    if reduced == 0.0 {
        return 0.0;
    }
    let angular = wigner3j(j(n_bra), j(k), j(n_ket), m(-m_bra), m(q), m(m_ket)).unwrap_or(0.0);
    let phase = if m_bra % 2 == 0 { 1.0 } else { -1.0 };
    phase * (f64::from((2 * n_bra + 1) * (2 * n_ket + 1))).sqrt() * angular * reduced
}

/// ⟨j m'| J_q |j m⟩ for the spherical components J_{±1} = ∓(J_x ± iJ_y)/√2,
/// J_0 = J_z.
pub fn spin_component(j: Half, m_bra: Half, q: i32, m_ket: Half) -> f64 {
    let jv = j.value();
    let m = m_ket.value();
    match q {
        0 if m_bra == m_ket => m,
        1 if m_bra.twice() == m_ket.twice() + 2 => -(jv * (jv + 1.0) - m * (m + 1.0)).sqrt() / core::f64::consts::SQRT_2,
        -1 if m_bra.twice() == m_ket.twice() - 2 => (jv * (jv + 1.0) - m * (m - 1.0)).sqrt() / core::f64::consts::SQRT_2,
        _ => 0.0,
    }
}

/// Matrix element of the scalar product J₁·J₂ = Σ_q (-1)^q J₁,q J₂,−q between
/// uncoupled product states |j1 m1⟩|j2 m2⟩.
pub fn scalar_product(j1: Half, m1_bra: Half, m1_ket: Half, j2: Half, m2_bra: Half, m2_ket: Half) -> f64 {
    (-1..=1)
        .map(|q: i32| {
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            sign * spin_component(j1, m1_bra, q, m1_ket) * spin_component(j2, m2_bra, -q, m2_ket)
        })
        .sum()
}

/// ⟨m1' m2'| [J₁ ⊗ J₂]^(2)_p |m1 m2⟩ for two distinct angular momenta.
pub fn rank2_product(j1: Half, m1_bra: Half, m1_ket: Half, j2: Half, m2_bra: Half, m2_ket: Half, p: i32) -> f64 {
    let one = Half::from_int(1);
    let two = Half::from_int(2);
    let mut total = 0.0;
    for a in -1..=1 {
        let b = p - a;
        if b.abs() > 1 {
            continue;
        }
        let x = spin_component(j1, m1_bra, a, m1_ket);
        if x == 0.0 {
            continue;
        }
        let y = spin_component(j2, m2_bra, b, m2_ket);
        if y == 0.0 {
            continue;
        }
        let cg = clebsch_gordan(one, Half::from_int(a), one, Half::from_int(b), two, Half::from_int(p)).unwrap_or(0.0);
        total += cg * x * y;
    }
    total
}

/// ⟨I m'| [I ⊗ I]^(2)_p |I m⟩ of a single angular momentum, from the reduced
/// matrix element ⟨I‖T²(I,I)‖I⟩ = ½ [(2I−1)2I(2I+1)(2I+2)(2I+3)/6]^{1/2}.
pub fn quadrupole_tensor(i: Half, m_bra: Half, m_ket: Half, p: i32) -> f64 {
    let ti = f64::from(i.twice());
    if i.twice() < 2 {
        return 0.0;
    }
    let reduced = 0.5 * ((ti - 1.0) * ti * (ti + 1.0) * (ti + 2.0) * (ti + 3.0) / 6.0).sqrt();
    let w = wigner3j(i, Half::from_int(2), i, -m_bra, Half::from_int(p), m_ket).unwrap_or(0.0);
    (i - m_bra).parity_sign() * w * reduced
}
