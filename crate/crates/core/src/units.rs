//! Conversion between reduced Lennard-Jones units and SI. The reduced time
//! unit is tau = sigma * sqrt(m / epsilon); rates in 1/tau convert to 1/s and
//! reduced temperatures to Kelvin through epsilon / k_B.

use crate::error::{Error, Result};

/// Round to `sig` significant decimal digits, for display-precision
/// comparisons against published tables.
pub fn round_sig(x: f64, sig: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(sig - 1 - mag);
    (x * factor).round() / factor
}

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Atomic mass unit, kg.
pub const ATOMIC_MASS: f64 = 1.66053906660e-27;

/// Physical scales fixing the reduced unit system. `boltzmann` is the SI
/// constant unless the scales themselves are dimensionless.
#[derive(Debug, Clone, Copy)]
pub struct UnitScales {
    /// Energy scale, J.
    pub epsilon: f64,
    /// Length scale, m.
    pub sigma: f64,
    /// Particle mass, kg.
    pub mass: f64,
    pub boltzmann: f64,
}

impl UnitScales {
    pub fn new(epsilon: f64, sigma: f64, mass: f64) -> Result<Self> {
        Self::with_boltzmann(epsilon, sigma, mass, BOLTZMANN)
    }

    pub fn with_boltzmann(epsilon: f64, sigma: f64, mass: f64, boltzmann: f64) -> Result<Self> {
        for (name, v) in [
            ("epsilon", epsilon),
            ("sigma", sigma),
            ("mass", mass),
            ("boltzmann", boltzmann),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!(
                    "unit scale {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(UnitScales {
            epsilon,
            sigma,
            mass,
            boltzmann,
        })
    }

    /// Argon: epsilon / k_B = 119.8 K, sigma = 3.405 Angstrom, m = 39.948 u.
    pub fn argon() -> Self {
        UnitScales {
            epsilon: 119.8 * BOLTZMANN,
            sigma: 3.405e-10,
            mass: 39.948 * ATOMIC_MASS,
            boltzmann: BOLTZMANN,
        }
    }

    /// All scales one in consistent units with k_B = 1; conversions become
    /// the identity.
    pub fn reduced() -> Self {
        UnitScales {
            epsilon: 1.0,
            sigma: 1.0,
            mass: 1.0,
            boltzmann: 1.0,
        }
    }

    /// Reduced time unit tau = sigma * sqrt(m / epsilon), seconds.
    pub fn time_unit(&self) -> f64 {
        self.sigma * (self.mass / self.epsilon).sqrt()
    }

    /// Rate in 1/tau to 1/s.
    pub fn rate_to_si(&self, rate_reduced: f64) -> f64 {
        rate_reduced / self.time_unit()
    }

    pub fn rate_from_si(&self, rate_si: f64) -> f64 {
        rate_si * self.time_unit()
    }

    /// Reduced temperature to Kelvin: T_K = (epsilon / k_B) * T.
    pub fn temperature_to_kelvin(&self, t_reduced: f64) -> f64 {
        self.epsilon / self.boltzmann * t_reduced
    }

    pub fn temperature_from_kelvin(&self, t_kelvin: f64) -> f64 {
        t_kelvin * self.boltzmann / self.epsilon
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The published argon table rounds both columns to display precision, so
    /// a row is consistent when some rate inside the printed reduced value's
    /// rounding interval converts into the printed SI value's interval.
    fn row_consistent(scales: &UnitScales, r_reduced: f64, r_si: f64) -> bool {
        let half = |x: f64| 0.5 * 10f64.powi(x.abs().log10().floor() as i32 - 1);
        let (lo, hi) = (
            scales.rate_to_si(r_reduced - half(r_reduced)),
            scales.rate_to_si(r_reduced + half(r_reduced)),
        );
        let hs = half(r_si);
        lo <= r_si + hs && r_si - hs <= hi
    }

    #[test]
    fn round_sig_two_digits() {
        assert_eq!(round_sig(19.9411, 2), 20.0);
        assert_eq!(round_sig(4.267e-11, 2), 4.3e-11);
        assert_eq!(round_sig(-0.0123, 2), -0.012);
    }

    #[test]
    fn argon_time_unit_value() {
        let tau = UnitScales::argon().time_unit();
        assert!((tau - 2.156349414e-12).abs() <= 1e-9 * tau);
    }

    #[test]
    fn argon_escape_rate_table_reproduces_at_display_precision() {
        let scales = UnitScales::argon();
        let rows: [(f64, f64, f64, f64); 7] = [
            (0.06, 7.2, 2.0e-21, 9.5e-10),
            (0.08, 9.6, 5.9e-15, 2.7e-3),
            (0.10, 12.0, 4.3e-11, 2.0e1),
            (0.12, 14.4, 1.8e-8, 8.1e3),
            (0.14, 16.8, 1.6e-6, 7.3e5),
            (0.16, 19.2, 5.7e-5, 2.6e7),
            (0.18, 21.6, 1.1e-3, 4.9e8),
        ];
        for (t_reduced, t_kelvin, r_reduced, r_si) in rows {
            let t = scales.temperature_to_kelvin(t_reduced);
            assert_eq!((t * 10.0).round() / 10.0, t_kelvin, "T* = {t_reduced}");
            assert!(
                row_consistent(&scales, r_reduced, r_si),
                "rate row {r_reduced:e} -> {r_si:e} inconsistent"
            );
        }
        // The canonical row converts directly at two significant figures.
        assert_eq!(round_sig(scales.rate_to_si(4.3e-11), 2), 2.0e1);
        assert_eq!((scales.temperature_to_kelvin(0.10) * 10.0).round() / 10.0, 12.0);
    }

    #[test]
    fn reduced_scales_are_the_identity() {
        let scales = UnitScales::reduced();
        assert_eq!(scales.time_unit(), 1.0);
        assert_eq!(scales.rate_to_si(0.37), 0.37);
        assert_eq!(scales.temperature_to_kelvin(0.15), 0.15);
    }

    #[test]
    fn round_trip_is_identity() {
        let scales = UnitScales::argon();
        for r in [1e-21, 4.3e-11, 2.5, 7.7e8] {
            let back = scales.rate_from_si(scales.rate_to_si(r));
            assert!((back - r).abs() <= 1e-12 * r);
            let t = scales.temperature_from_kelvin(scales.temperature_to_kelvin(r));
            assert!((t - r).abs() <= 1e-12 * r);
        }
    }

    #[test]
    fn nonpositive_scales_are_domain_errors() {
        for (e, s, m) in [(0.0, 1.0, 1.0), (1.0, -2.0, 1.0), (1.0, 1.0, f64::NAN)] {
            let err = UnitScales::new(e, s, m).unwrap_err();
            assert_eq!(err.exit_code(), 1);
        }
    }
}
