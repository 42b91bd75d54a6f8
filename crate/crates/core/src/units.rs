//! Conversion constants. Every unit conversion in the crate goes through
//! this table.

/// Planck constant, J·s (exact, SI 2019).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// d·E for d = 1 D and E = 1 kV/cm, in MHz.
///
/// 1 D = 10⁻²¹/c C·m, so d·E/h = 10⁻²¹·10⁵ / (c·h).
pub const DEBYE_KV_PER_CM_IN_MHZ: f64 = 1.0e-16 / (299_792_458.0 * PLANCK) * 1.0e-6;

/// Bohr magneton μ_B/h in MHz per Gauss.
pub const BOHR_MAGNETON_MHZ_PER_GAUSS: f64 = 1.399_624_493_61;

/// Nuclear magneton μ_N/h in MHz per Gauss.
pub const NUCLEAR_MAGNETON_MHZ_PER_GAUSS: f64 = 7.622_593_229e-4;

/// d₁d₂/(4πε₀R³h) for d₁ = d₂ = 1 D and R = 1 nm, in Hz.
///
/// With 1 D = 10⁻²¹/c C·m the product D²/(4πε₀) is exactly 10⁻⁴⁹ J·m³.
pub const DEBYE2_PER_NM3_IN_HZ: f64 = 1.0e-49 / 1.0e-27 / PLANCK;

/// Converts a dipole product (Debye²) divided by a cubed distance (nm³)
/// into an ordinary frequency in Hz.
pub fn dipolar_hz(debye2_per_nm3: f64) -> f64 {
    debye2_per_nm3 * DEBYE2_PER_NM3_IN_HZ
}

/// MHz → Hz.
pub const MHZ: f64 = 1.0e6;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stark_unit_matches_tabulated_value() {
        // 1 D · 1 kV/cm = 503.411 MHz
        assert!((DEBYE_KV_PER_CM_IN_MHZ - 503.411_17).abs() < 1e-3);
    }

    #[test]
    fn dipolar_round_trip_at_500_nm() {
        let hz = dipolar_hz(1.0 / (500.0f64 * 500.0 * 500.0));
        let expected = 1.0e-49 / (500.0e-9f64).powi(3) / PLANCK;
        assert!(((hz - expected) / expected).abs() < 1e-12);
        assert!((hz - 1207.35).abs() < 0.01);
    }
}
