//! Scattering of a plane electromagnetic wave by an electron wave.
//!
//! The incident wave has frequency `omega0` along `k0_dir`; the electron wave
//! component has momentum `p0`. Radiation observed along `n` has frequency
//!
//! ```text
//! omega = (E0 omega0 - c^2 k0.p0) / (E0 - c p0.n + hbar omega0 (1 - cos theta))
//! ```
//!
//! with `E0 = sqrt(c^2 p0^2 + m_e^2 c^4)`, and the outgoing electron-wave
//! momentum is `p = p0 + hbar k0 - n hbar omega / c`. Energy and momentum
//! balance are verified as residuals rather than assumed.

use alloc::format;

use crate::{Error, PhysicalConstants, Result, Vec3};

const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComptonInput {
    pub omega0: f64,
    pub k0_dir: Vec3,
    pub p0: Vec3,
    pub n_dir: Vec3,
}

impl ComptonInput {
    pub fn new(omega0: f64, k0_dir: Vec3, p0: Vec3, n_dir: Vec3) -> Result<Self> {
        const OP: &str = "ComptonInput::new";
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::domain(OP, format!("omega0 must be positive, got {omega0}")));
        }
        for (name, v) in [("k0_dir", k0_dir), ("n_dir", n_dir)] {
            if !(libm::fabs(v.norm() - 1.0) <= UNIT_TOLERANCE) {
                return Err(Error::domain(
                    OP,
                    format!("{name} is not a unit vector (|v| = {})", v.norm()),
                ));
            }
        }
        if !(p0.x.is_finite() && p0.y.is_finite() && p0.z.is_finite()) {
            return Err(Error::domain(OP, "p0 must be finite"));
        }
        Ok(ComptonInput {
            omega0,
            k0_dir,
            p0,
            n_dir,
        })
    }

    pub fn cos_theta(&self) -> f64 {
        self.k0_dir.dot(self.n_dir)
    }
}

/// `E(p) = sqrt(c^2 p^2 + m_e^2 c^4)`.
pub fn electron_energy(consts: &PhysicalConstants, p: Vec3) -> f64 {
    libm::hypot(consts.c() * p.norm(), consts.rest_energy())
}

/// Scattered frequency observed along `n_dir`.
pub fn scattered_frequency(consts: &PhysicalConstants, input: &ComptonInput) -> Result<f64> {
    const OP: &str = "scattered_frequency";
    let c = consts.c();
    let e0 = electron_energy(consts, input.p0);
    let k0 = input.k0_dir * (input.omega0 / c);
    let numerator = e0 * input.omega0 - c * c * k0.dot(input.p0);
    let denominator = e0 - c * input.p0.dot(input.n_dir) + consts.hbar() * input.omega0 * (1.0 - input.cos_theta());
    if !(denominator > 0.0) {
        return Err(Error::KinematicallyInvalid {
            op: OP,
            detail: format!("denominator {denominator:e} is not positive"),
        });
    }
    if !(numerator > 0.0) {
        return Err(Error::KinematicallyInvalid {
            op: OP,
            detail: format!("numerator {numerator:e} is not positive"),
        });
    }
    Ok(numerator / denominator)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComptonResult {
    pub omega: f64,
    pub p: Vec3,
    /// `|E(p) + hbar omega - E0 - hbar omega0| / (E0 + hbar omega0)`.
    pub energy_residual: f64,
    /// Largest component of `|p + n hbar omega / c - p0 - hbar k0|`
    /// relative to `|p0| + hbar omega0 / c`.
    pub momentum_residual: f64,
}

pub fn outgoing_momentum(consts: &PhysicalConstants, input: &ComptonInput, omega: f64) -> ComptonResult {
    let c = consts.c();
    let hbar = consts.hbar();
    let k0 = input.k0_dir * (input.omega0 / c);
    let photon_out = input.n_dir * (hbar * omega / c);
    let p = input.p0 + k0 * hbar - photon_out;

    let e0 = electron_energy(consts, input.p0);
    let e = electron_energy(consts, p);
    let energy_in = e0 + hbar * input.omega0;
    let energy_residual = libm::fabs(e + hbar * omega - energy_in) / energy_in;

    let momentum_in = input.p0 + k0 * hbar;
    let scale = input.p0.norm() + hbar * input.omega0 / c;
    let momentum_residual = ((p + photon_out) - momentum_in).max_abs() / scale;

    ComptonResult {
        omega,
        p,
        energy_residual,
        momentum_residual,
    }
}

/// Solves for the scattered frequency and the outgoing momentum together.
pub fn solve(consts: &PhysicalConstants, input: &ComptonInput) -> Result<ComptonResult> {
    let omega = scattered_frequency(consts, input)?;
    Ok(outgoing_momentum(consts, input, omega))
}

/// Wavelength shift `lambda_C (1 - cos theta)` for scattering off a wave at rest.
pub fn compton_shift(consts: &PhysicalConstants, lambda0: f64, theta: f64) -> Result<f64> {
    if !(lambda0.is_finite() && lambda0 > 0.0) {
        return Err(Error::domain(
            "compton_shift",
            format!("lambda0 must be positive, got {lambda0}"),
        ));
    }
    Ok(consts.compton_wavelength() * (1.0 - libm::cos(theta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{CounterRng, Domain, Stream};
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn direction(theta: f64) -> Vec3 {
        Vec3::new(libm::sin(theta), 0.0, libm::cos(theta))
    }

    fn unit(s: &mut Stream) -> Vec3 {
        loop {
            let v = Vec3::new(s.normal(), s.normal(), s.normal());
            let n = v.norm();
            if n > 1e-6 {
                return v * (1.0 / n);
            }
        }
    }

    #[test]
    fn forward_scattering_is_unshifted() {
        let k = PhysicalConstants::codata();
        let input = ComptonInput::new(3e19, Vec3::Z, Vec3::ZERO, Vec3::Z).unwrap();
        let r = solve(&k, &input).unwrap();
        assert_relative_eq!(r.omega, 3e19, max_relative = 1e-15);
        assert!(r.p.norm() <= 1e-15 * k.m_e() * k.c());
        assert!(r.energy_residual < 1e-15 && r.momentum_residual < 1e-15);
    }

    #[test]
    fn backscatter_at_rest_energy() {
        let k = PhysicalConstants::codata();
        let omega0 = k.omega_e(); // hbar omega0 = m_e c^2
        let input = ComptonInput::new(omega0, Vec3::Z, Vec3::ZERO, -Vec3::Z).unwrap();
        let r = solve(&k, &input).unwrap();
        assert_relative_eq!(r.omega / omega0, 1.0 / 3.0, max_relative = 1e-12);
        let mc = k.m_e() * k.c();
        assert_relative_eq!(r.p.norm(), 4.0 / 3.0 * mc, max_relative = 1e-12);
        let mc2 = k.rest_energy();
        assert_relative_eq!(electron_energy(&k, r.p), 5.0 / 3.0 * mc2, max_relative = 1e-12);
        assert_relative_eq!(mc2 + mc2 - k.hbar() * r.omega, 5.0 / 3.0 * mc2, max_relative = 1e-12);
    }

    #[test]
    fn shift_values() {
        let k = PhysicalConstants::codata();
        assert_eq!(compton_shift(&k, 1e-11, 0.0).unwrap(), 0.0);
        let quarter = compton_shift(&k, 1e-11, PI / 2.0).unwrap();
        assert_relative_eq!(quarter, 2.4263102e-12, max_relative = 1e-5);
        assert_relative_eq!(
            compton_shift(&k, 1e-11, PI).unwrap(),
            2.0 * quarter,
            max_relative = 1e-15
        );
        assert!(compton_shift(&k, 0.0, 1.0).is_err());
    }

    #[test]
    fn input_validation() {
        assert!(ComptonInput::new(0.0, Vec3::Z, Vec3::ZERO, Vec3::Z).is_err());
        assert!(ComptonInput::new(1.0, Vec3::Z * 1.1, Vec3::ZERO, Vec3::Z).is_err());
        assert!(ComptonInput::new(1.0, Vec3::Z, Vec3::ZERO, Vec3::ZERO).is_err());
    }

    #[test]
    fn negative_frequency_is_rejected() {
        // E0 > c|p0| keeps physical inputs valid; bypass the constructor.
        let k = PhysicalConstants::codata();
        let mut input = ComptonInput::new(1e18, Vec3::Z, Vec3::ZERO, -Vec3::Z).unwrap();
        input.omega0 = -1e18;
        let err = scattered_frequency(&k, &input).unwrap_err();
        assert!(matches!(err, Error::KinematicallyInvalid { .. }));
    }

    #[test]
    fn agrees_with_shift_formula_at_rest() {
        let k = PhysicalConstants::codata();
        let rng = CounterRng::new(3);
        for i in 0..100 {
            let mut s = rng.stream(Domain::Auxiliary, i);
            let omega0 = k.omega_e() * libm::pow(10.0, -4.0 + 5.0 * s.uniform());
            let theta = PI * s.uniform();
            let input = ComptonInput::new(omega0, Vec3::Z, Vec3::ZERO, direction(theta)).unwrap();
            let omega = scattered_frequency(&k, &input).unwrap();
            assert!(omega <= omega0);
            let lhs = 1.0 / omega - 1.0 / omega0;
            let rhs = k.hbar() / k.rest_energy() * (1.0 - libm::cos(theta));
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
            let lambda0 = 2.0 * PI * k.c() / omega0;
            let shift = compton_shift(&k, lambda0, theta).unwrap();
            assert_relative_eq!(2.0 * PI * k.c() * lhs, shift, max_relative = 1e-12);
        }
    }

    #[test]
    fn conservation_for_moving_waves() {
        let k = PhysicalConstants::codata();
        let mc = k.m_e() * k.c();
        let rng = CounterRng::new(5);
        for i in 0..1000 {
            let mut s = rng.stream(Domain::Auxiliary, i);
            let omega0 = k.omega_e() * libm::pow(10.0, -3.0 + 4.0 * s.uniform());
            let input = ComptonInput::new(omega0, unit(&mut s), unit(&mut s) * (0.5 * mc), unit(&mut s)).unwrap();
            let r = solve(&k, &input).unwrap();
            assert!(r.omega > 0.0);
            assert!(r.energy_residual < 1e-12, "energy {}", r.energy_residual);
            assert!(r.momentum_residual < 1e-12, "momentum {}", r.momentum_residual);
        }
    }

    #[test]
    fn rotation_invariance() {
        let k = PhysicalConstants::codata();
        let mc = k.m_e() * k.c();
        let rng = CounterRng::new(6);
        for i in 0..100 {
            let mut s = rng.stream(Domain::Auxiliary, i);
            let input =
                ComptonInput::new(k.omega_e() * 0.3, unit(&mut s), unit(&mut s) * (0.8 * mc), unit(&mut s)).unwrap();
            // Rodrigues rotation about a random axis
            let axis = unit(&mut s);
            let angle = 2.0 * PI * s.uniform();
            let rot = |v: Vec3| {
                v * libm::cos(angle)
                    + axis.cross(v) * libm::sin(angle)
                    + axis * (axis.dot(v) * (1.0 - libm::cos(angle)))
            };
            let rotated = ComptonInput {
                omega0: input.omega0,
                k0_dir: rot(input.k0_dir),
                p0: rot(input.p0),
                n_dir: rot(input.n_dir),
            };
            let a = scattered_frequency(&k, &input).unwrap();
            let b = scattered_frequency(&k, &rotated).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }
}
