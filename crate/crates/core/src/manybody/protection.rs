#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;

/// Splitting h = ΔE_↑↓ (i² + j²) at integer site (i, j) measured from the trap centre.
pub fn site_splitting(delta_e_updown: f64, i: i64, j: i64) -> f64 {
    delta_e_updown * (i * i + j * j) as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapProtectionReport {
    /// Δh from the explicit double sum, Hz.
    pub delta_h: f64,
    /// Δh ≃ L²ΔE/√90, Hz.
    pub delta_h_asymptotic: f64,
    /// Δ_MB = 4J^⊥_nn, Hz.
    pub delta_mb_nn: f64,
    /// ⌊√(4J^⊥_nn √90 / ΔE)⌋ (u64::MAX when ΔE = 0).
    pub l_max: u64,
    pub protected: bool,
}

/// Gap-protection estimate for an L×L square lattice.
///
/// (Δh)² = (1/L²) Σ h² − h̄² with h̄ = (1/L²) Σ h, both sums over
/// i, j = −⌊L/2⌋ … ⌊L/2⌋.
pub fn gap_protection(l: usize, j_perp_nn: f64, delta_e_updown: f64) -> GapProtectionReport {
    let half = (l / 2) as i64;
    let l2 = (l * l) as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for i in -half..=half {
        for j in -half..=half {
            let h = site_splitting(delta_e_updown, i, j);
            s1 += h;
            s2 += h * h;
        }
    }
    let mean = s1 / l2;
    let delta_h = (s2 / l2 - mean * mean).max(0.0).sqrt();
    let delta_h_asymptotic = l2 * delta_e_updown / 90f64.sqrt();
    let delta_mb_nn = 4.0 * j_perp_nn;
    let l_max = if delta_e_updown > 0.0 {
        (4.0 * j_perp_nn * 90f64.sqrt() / delta_e_updown).sqrt().floor() as u64
    } else {
        u64::MAX
    };
    GapProtectionReport { delta_h, delta_h_asymptotic, delta_mb_nn, l_max, protected: delta_mb_nn > delta_h }
}
