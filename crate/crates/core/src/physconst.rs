//! Physical constants.
//!
//! The electron is described by the natural frequency of its wave, `omega_e`;
//! the electron mass is derived from it through `m_e = hbar * omega_e / c^2`
//! and is never stored. All values are SI. Expressions that are written in
//! Gaussian form elsewhere in the crate (magnetic moments, currents) use these
//! same numbers and only their ratios and residuals carry meaning.

use core::f64::consts::PI;

use crate::{Error, Result};

/// Label of the constant set compiled into [`PhysicalConstants::codata`].
pub const CODATA_VERSION: &str = "CODATA 2014";

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_800e-34;
/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_620_8e-19;
/// Natural angular frequency of the electron wave, rad/s.
pub const ELECTRON_FREQUENCY: f64 = 7.763_440_716e20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    c: f64,
    e_charge: f64,
    omega_e: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

impl PhysicalConstants {
    pub const fn codata() -> Self {
        PhysicalConstants {
            hbar: HBAR,
            c: SPEED_OF_LIGHT,
            e_charge: ELEMENTARY_CHARGE,
            omega_e: ELECTRON_FREQUENCY,
        }
    }

    /// Builds a custom constant set. Every value must be finite and positive.
    pub fn new(hbar: f64, c: f64, e_charge: f64, omega_e: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("c", c), ("e_charge", e_charge), ("omega_e", omega_e)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(
                    "PhysicalConstants::new",
                    alloc::format!("{name} must be finite and positive, got {v}"),
                ));
            }
        }
        Ok(PhysicalConstants {
            hbar,
            c,
            e_charge,
            omega_e,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn e_charge(&self) -> f64 {
        self.e_charge
    }

    pub fn omega_e(&self) -> f64 {
        self.omega_e
    }

    /// Electron mass, `hbar * omega_e / c^2`.
    pub fn m_e(&self) -> f64 {
        self.hbar * self.omega_e / (self.c * self.c)
    }

    /// Mass corresponding to an arbitrary natural frequency.
    pub fn electron_mass_from_frequency(&self, omega: f64) -> Result<f64> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::domain(
                "electron_mass_from_frequency",
                alloc::format!("frequency must be positive, got {omega}"),
            ));
        }
        Ok(self.hbar * omega / (self.c * self.c))
    }

    /// Compton wavelength `2 pi hbar / (m_e c)`.
    pub fn compton_wavelength(&self) -> f64 {
        2.0 * PI * self.hbar / (self.m_e() * self.c)
    }

    /// Bohr magneton in the Gaussian form `e hbar / (2 m_e c)`.
    pub fn bohr_magneton(&self) -> f64 {
        self.e_charge * self.hbar / (2.0 * self.m_e() * self.c)
    }

    /// Spin gyromagnetic ratio `-e / (m_e c)`.
    pub fn spin_gyromagnetic_ratio(&self) -> f64 {
        -self.e_charge / (self.m_e() * self.c)
    }

    /// Rest energy `m_e c^2 = hbar omega_e`.
    pub fn rest_energy(&self) -> f64 {
        self.hbar * self.omega_e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn electron_mass_from_natural_frequency() {
        let k = PhysicalConstants::codata();
        let m = k.electron_mass_from_frequency(7.763440716e20).unwrap();
        assert_relative_eq!(m, 9.10938356e-31, max_relative = 5e-9);
        assert_relative_eq!(k.m_e(), m);
    }

    #[test]
    fn zero_frequency_is_rejected() {
        let k = PhysicalConstants::codata();
        let err = k.electron_mass_from_frequency(0.0).unwrap_err();
        assert_eq!(err.op(), "electron_mass_from_frequency");
        assert!(k.electron_mass_from_frequency(-1.0).is_err());
        assert!(k.electron_mass_from_frequency(f64::NAN).is_err());
    }

    #[test]
    fn unit_mass_identity() {
        let k = PhysicalConstants::codata();
        let omega = k.c() * k.c() / k.hbar();
        assert_relative_eq!(
            k.electron_mass_from_frequency(omega).unwrap(),
            1.0,
            max_relative = 4.0 * f64::EPSILON
        );
    }

    #[test]
    fn compton_wavelength_codata() {
        let k = PhysicalConstants::codata();
        // 2 pi hbar / (m_e c) = 2 pi c / omega_e, evaluated independently.
        let lambda = 2.0 * PI * SPEED_OF_LIGHT / ELECTRON_FREQUENCY;
        assert_relative_eq!(k.compton_wavelength(), lambda, max_relative = 1e-14);
        assert_relative_eq!(k.compton_wavelength(), 2.4263102e-12, max_relative = 1e-5);
    }

    #[test]
    fn compton_wavelength_scaling() {
        let k = PhysicalConstants::codata();
        let base = k.compton_wavelength();
        // Doubling hbar at fixed m_e: omega_e must halve to keep the mass.
        let k2 =
            PhysicalConstants::new(2.0 * HBAR, SPEED_OF_LIGHT, ELEMENTARY_CHARGE, ELECTRON_FREQUENCY / 2.0).unwrap();
        assert_relative_eq!(k2.m_e(), k.m_e(), max_relative = 1e-15);
        assert_relative_eq!(k2.compton_wavelength(), 2.0 * base, max_relative = 1e-14);
        // Doubling c at fixed m_e: omega_e scales by 4.
        let k3 =
            PhysicalConstants::new(HBAR, 2.0 * SPEED_OF_LIGHT, ELEMENTARY_CHARGE, 4.0 * ELECTRON_FREQUENCY).unwrap();
        assert_relative_eq!(k3.m_e(), k.m_e(), max_relative = 1e-15);
        assert_relative_eq!(k3.compton_wavelength(), 0.5 * base, max_relative = 1e-14);
    }

    #[test]
    fn rejects_non_positive_constants() {
        assert!(PhysicalConstants::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, 1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn gyromagnetic_ratio_is_twice_orbital() {
        let k = PhysicalConstants::codata();
        let orbital = k.e_charge() / (2.0 * k.m_e() * k.c());
        assert_relative_eq!(-k.spin_gyromagnetic_ratio(), 2.0 * orbital, max_relative = 1e-15);
        assert_relative_eq!(k.bohr_magneton(), orbital * k.hbar(), max_relative = 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn mass_frequency_round_trip(omega in 1e-3f64..1e30) {
            let k = PhysicalConstants::codata();
            let m = k.electron_mass_from_frequency(omega).unwrap();
            let back = m * k.c() * k.c() / k.hbar();
            proptest::prop_assert!(((back - omega) / omega).abs() < 8.0 * f64::EPSILON);
        }
    }
}
