//! Free Klein-Gordon plane waves `Psi = u exp(-i(omega t - k.r))` and the
//! charge, energy and momentum carried by a finite "portion" of such a wave.
//!
//! Electromagnetic potentials are zero throughout.

use num_complex::Complex64;

use crate::{Error, PhysicalConstants, Result, Vec3};

/// Exact Klein-Gordon frequency, its long-wave (Schrödinger) approximation
/// and the gap between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub omega: f64,
    /// `omega_e + c^2 k^2 / (2 omega_e)`.
    pub long_wave: f64,
    /// `(long_wave - omega) / omega`, computed without cancellation.
    pub relative_gap: f64,
}

/// `omega = sqrt(omega_e^2 + c^2 |k|^2)`.
pub fn dispersion(consts: &PhysicalConstants, k: Vec3, omega_e: f64) -> Result<Dispersion> {
    if !(omega_e.is_finite() && omega_e > 0.0) {
        return Err(Error::domain(
            "dispersion",
            alloc::format!("omega_e must be positive, got {omega_e}"),
        ));
    }
    let c = consts.c();
    let ck = c * k.norm();
    let omega = libm::hypot(omega_e, ck);
    let x = (ck / omega_e) * (ck / omega_e);
    let long_wave = omega_e + c * c * k.norm_sq() / (2.0 * omega_e);
    // (1 + x/2) - sqrt(1 + x) = (x^2 / 4) / ((1 + x/2) + sqrt(1 + x))
    let gap = omega_e * (0.25 * x * x) / ((1.0 + 0.5 * x) + libm::sqrt(1.0 + x));
    Ok(Dispersion {
        omega,
        long_wave,
        relative_gap: gap / omega,
    })
}

/// Group velocity `d omega / d k = c^2 k / omega`.
pub fn group_velocity(consts: &PhysicalConstants, k: Vec3, omega_e: f64) -> Result<Vec3> {
    let omega = dispersion(consts, k, omega_e)?.omega;
    Ok(k * (consts.c() * consts.c() / omega))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveState {
    u: Complex64,
    k: Vec3,
    omega: f64,
    omega_e: f64,
}

impl PlaneWaveState {
    /// Frequency follows from the dispersion relation.
    pub fn new(consts: &PhysicalConstants, u: Complex64, k: Vec3, omega_e: f64) -> Result<Self> {
        if !(u.re.is_finite() && u.im.is_finite()) || !(k.x.is_finite() && k.y.is_finite() && k.z.is_finite()) {
            return Err(Error::domain(
                "PlaneWaveState::new",
                "amplitude and wave vector must be finite",
            ));
        }
        let omega = dispersion(consts, k, omega_e)?.omega;
        Ok(PlaneWaveState { u, k, omega, omega_e })
    }

    /// Electron wave with the constants' own natural frequency.
    pub fn electron(consts: &PhysicalConstants, u: Complex64, k: Vec3) -> Result<Self> {
        Self::new(consts, u, k, consts.omega_e())
    }

    pub fn amplitude(&self) -> Complex64 {
        self.u
    }

    pub fn wave_vector(&self) -> Vec3 {
        self.k
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_e(&self) -> f64 {
        self.omega_e
    }

    fn amp_sq(&self) -> f64 {
        self.u.norm_sqr()
    }
}

/// Densities of a plane wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveDensities {
    /// Charge density `-e (omega/omega_e) |u|^2`.
    pub rho: f64,
    /// Current density `-(e c^2 / omega_e) k |u|^2`.
    pub j: Vec3,
    /// Energy density `hbar omega (omega/omega_e) |u|^2`.
    pub w: f64,
    /// Momentum density `hbar k (omega/omega_e) |u|^2`.
    pub p: Vec3,
}

pub fn plane_wave_densities(consts: &PhysicalConstants, state: &PlaneWaveState) -> PlaneWaveDensities {
    let a2 = state.amp_sq();
    let ratio = state.omega / state.omega_e;
    let e = consts.e_charge();
    let hbar = consts.hbar();
    let c2 = consts.c() * consts.c();
    PlaneWaveDensities {
        rho: -e * ratio * a2,
        j: state.k * (-e * c2 / state.omega_e * a2),
        w: hbar * state.omega * ratio * a2,
        p: state.k * (hbar * ratio * a2),
    }
}

/// Integrated content of a volume `V` of a plane wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePortion {
    /// `Z = V (omega/omega_e) |u|^2`, a Lorentz scalar.
    pub z: f64,
    pub charge: f64,
    pub energy: f64,
    pub momentum: Vec3,
    /// Rest mass `hbar omega_e Z / c^2`.
    pub rest_mass: f64,
}

impl WavePortion {
    /// `(E^2 - c^2 p^2 - M0^2 c^4) / E^2`; zero for an exact portion.
    pub fn mass_shell_residual(&self, consts: &PhysicalConstants) -> f64 {
        let c = consts.c();
        let e2 = self.energy * self.energy;
        if e2 == 0.0 {
            return 0.0;
        }
        let mc2 = self.rest_mass * c * c;
        (e2 - c * c * self.momentum.norm_sq() - mc2 * mc2) / e2
    }
}

pub fn portion(consts: &PhysicalConstants, state: &PlaneWaveState, volume: f64) -> Result<WavePortion> {
    if !(volume.is_finite() && volume >= 0.0) {
        return Err(Error::domain(
            "portion",
            alloc::format!("volume must be >= 0, got {volume}"),
        ));
    }
    let z = volume * (state.omega / state.omega_e) * state.amp_sq();
    let hbar = consts.hbar();
    Ok(WavePortion {
        z,
        charge: -consts.e_charge() * z,
        energy: hbar * state.omega * z,
        momentum: state.k * (hbar * z),
        rest_mass: hbar * state.omega_e * z / (consts.c() * consts.c()),
    })
}

/// Volume holding exactly `Z = 1`.
pub fn unit_portion_volume(state: &PlaneWaveState) -> Result<f64> {
    let a2 = state.amp_sq();
    if !(a2 > 0.0) {
        return Err(Error::domain("unit_portion_volume", "zero amplitude holds no portion"));
    }
    Ok(state.omega_e / (state.omega * a2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{CounterRng, Domain};
    use approx::assert_relative_eq;

    fn k_along(consts: &PhysicalConstants, ck_over_we: f64) -> Vec3 {
        Vec3::X * (ck_over_we * consts.omega_e() / consts.c())
    }

    #[test]
    fn rest_branch() {
        let k = PhysicalConstants::codata();
        let d = dispersion(&k, Vec3::ZERO, k.omega_e()).unwrap();
        assert_eq!(d.omega, k.omega_e());
        assert_eq!(d.relative_gap, 0.0);
        assert!(dispersion(&k, Vec3::ZERO, 0.0).is_err());
    }

    #[test]
    fn light_like_wave_vector() {
        let k = PhysicalConstants::codata();
        let d = dispersion(&k, k_along(&k, 1.0), k.omega_e()).unwrap();
        assert_relative_eq!(d.omega, core::f64::consts::SQRT_2 * k.omega_e(), max_relative = 1e-15);
    }

    #[test]
    fn long_wave_gap() {
        let k = PhysicalConstants::codata();
        let d = dispersion(&k, k_along(&k, 0.01), k.omega_e()).unwrap();
        // series remainder (1/8)(ck/omega_e)^4
        assert_relative_eq!(d.relative_gap, 1.25e-9, max_relative = 0.2);
        assert_relative_eq!((d.long_wave - d.omega) / d.omega, d.relative_gap, max_relative = 1e-5);
    }

    #[test]
    fn rest_densities() {
        let k = PhysicalConstants::codata();
        let s = PlaneWaveState::electron(&k, Complex64::new(1.0, 0.0), Vec3::ZERO).unwrap();
        let d = plane_wave_densities(&k, &s);
        assert_relative_eq!(d.rho, -k.e_charge(), max_relative = 1e-15);
        assert_relative_eq!(d.w, k.hbar() * k.omega_e(), max_relative = 1e-15);
        assert_eq!(d.p, Vec3::ZERO);
        assert_eq!(d.j.norm(), 0.0);
    }

    #[test]
    fn energy_density_at_light_like_k() {
        let k = PhysicalConstants::codata();
        let u = Complex64::new(1.0, 1.0); // |u|^2 = 2
        let s = PlaneWaveState::electron(&k, u, k_along(&k, 1.0)).unwrap();
        let d = plane_wave_densities(&k, &s);
        assert_relative_eq!(d.w, 4.0 * k.hbar() * k.omega_e(), max_relative = 1e-14);
    }

    #[test]
    fn unit_portion_is_an_electron() {
        let k = PhysicalConstants::codata();
        let s = PlaneWaveState::electron(&k, Complex64::new(0.3, -0.7), Vec3::new(1e11, -2e11, 5e10)).unwrap();
        let v = unit_portion_volume(&s).unwrap();
        let p = portion(&k, &s, v).unwrap();
        assert_relative_eq!(p.z, 1.0, max_relative = 1e-15);
        assert_relative_eq!(p.charge, -k.e_charge(), max_relative = 1e-15);
        assert_relative_eq!(p.energy, k.hbar() * s.omega(), max_relative = 1e-15);
        assert_relative_eq!(p.momentum.x, k.hbar() * s.wave_vector().x, max_relative = 1e-15);
        assert_relative_eq!(p.rest_mass, k.m_e(), max_relative = 1e-15);
    }

    #[test]
    fn empty_portion() {
        let k = PhysicalConstants::codata();
        let s = PlaneWaveState::electron(&k, Complex64::new(2.0, 0.0), Vec3::X * 1e12).unwrap();
        let p = portion(&k, &s, 0.0).unwrap();
        assert_eq!((p.z, p.charge, p.energy, p.rest_mass), (0.0, -0.0, 0.0, 0.0));
        assert_eq!(p.momentum, Vec3::ZERO);
        assert!(portion(&k, &s, -1.0).is_err());
    }

    #[test]
    fn random_states_satisfy_identities() {
        let k = PhysicalConstants::codata();
        let rng = CounterRng::new(31);
        for i in 0..1000 {
            let mut s = rng.stream(Domain::Auxiliary, i);
            let scale = k.omega_e() / k.c() * libm::pow(10.0, -3.0 + 5.0 * s.uniform());
            let kv = Vec3::new(s.normal(), s.normal(), s.normal()) * scale;
            let u = Complex64::new(s.normal(), s.normal());
            let st = PlaneWaveState::electron(&k, u, kv).unwrap();

            let omega2 = st.omega() * st.omega();
            let disp = (omega2 - k.c() * k.c() * kv.norm_sq() - k.omega_e() * k.omega_e()) / omega2;
            assert!(disp.abs() < 1e-12);

            let d = plane_wave_densities(&k, &st);
            let w_from_rho = -k.hbar() * st.omega() / k.e_charge() * d.rho;
            assert_relative_eq!(d.w, w_from_rho, max_relative = 1e-12);
            let p_from_w = kv * (d.w / st.omega());
            assert!((d.p - p_from_w).max_abs() <= 1e-12 * d.p.max_abs());
            let j_from_p = d.p * (-k.e_charge() * k.c() * k.c() / (k.hbar() * st.omega()));
            assert!((d.j - j_from_p).max_abs() <= 1e-12 * d.j.max_abs());
            // energy density in the (omega^2 + omega_e^2 + c^2 k^2) form
            let w_sum = k.hbar() / (2.0 * k.omega_e())
                * (omega2 + k.omega_e() * k.omega_e() + k.c() * k.c() * kv.norm_sq())
                * u.norm_sqr();
            assert_relative_eq!(d.w, w_sum, max_relative = 1e-12);

            let vol = unit_portion_volume(&st).unwrap() * 2.0;
            let p = portion(&k, &st, vol).unwrap();
            assert_relative_eq!(p.z, 2.0, max_relative = 1e-14);
            assert!(p.mass_shell_residual(&k).abs() < 1e-12);
            let p2 = portion(&k, &st, 2.0 * vol).unwrap();
            assert_eq!(p2.z, 2.0 * p.z);
            assert_eq!(p2.energy, 2.0 * p.energy);
            assert_eq!(p2.charge, 2.0 * p.charge);
            assert_eq!(p2.rest_mass, 2.0 * p.rest_mass);
            assert_eq!(p2.momentum, p.momentum * 2.0);
        }
    }

    #[test]
    fn long_wave_charge_limit() {
        let k = PhysicalConstants::codata();
        let u = Complex64::new(0.6, 0.8);
        let st = PlaneWaveState::electron(&k, u, k_along(&k, 1e-6)).unwrap();
        let rho = plane_wave_densities(&k, &st).rho;
        let schrodinger = -k.e_charge() * u.norm_sqr();
        assert!(((rho - schrodinger) / schrodinger).abs() <= 1e-11);
    }

    #[test]
    fn group_velocity_matches_finite_difference() {
        let k = PhysicalConstants::codata();
        for ck in [0.01, 0.3, 1.0, 7.0] {
            let kv = k_along(&k, ck);
            let h = kv.x * 1e-5;
            let up = dispersion(&k, Vec3::X * (kv.x + h), k.omega_e()).unwrap().omega;
            let dn = dispersion(&k, Vec3::X * (kv.x - h), k.omega_e()).unwrap().omega;
            let numeric = (up - dn) / (2.0 * h);
            let vg = group_velocity(&k, kv, k.omega_e()).unwrap().x;
            assert_relative_eq!(numeric, vg, max_relative = 1e-6);
            assert!(vg < k.c());
        }
    }
}
