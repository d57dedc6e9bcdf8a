//! Excitation laws shared by light and electron-wave detection.
//!
//! An atom in a wave of intensity `I` (or `|psi|^2`) is excited at rate
//! `w = b I`. For a constant rate it survives unexcited with probability
//! `exp(-w t)`. With the nondimensional exposure `tau = b I0 t` the
//! excitation probability at relative intensity `I/I0` is
//! `1 - exp(-(I/I0) tau)`, and the detection ratio against the brightest
//! point replaces the Born rule at finite exposure.

use alloc::format;

use crate::{Error, Result};

/// Threshold of the hydrogen `1s -> 2p` cross-section fit, atomic units.
pub const XSEC_THRESHOLD_V_SQ: f64 = 0.50;
const XSEC_STRENGTH: f64 = 0.555;

/// Below this exposure the detection ratio is evaluated by its series.
const BORN_SERIES_CUTOFF: f64 = 1e-6;

/// Nondimensional exposure `tau = b I0 t`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExposureTime(f64);

impl ExposureTime {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::domain(
                "ExposureTime::new",
                format!("tau must be >= 0, got {tau}"),
            ));
        }
        Ok(ExposureTime(tau))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_rel(op: &'static str, rel: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rel) {
        return Err(Error::domain(op, format!("relative intensity {rel} outside [0, 1]")));
    }
    Ok(())
}

fn check_non_negative(op: &'static str, name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::domain(op, format!("{name} must be >= 0, got {v}")));
    }
    Ok(())
}

/// `w = b * intensity`.
pub fn excitation_rate(b: f64, intensity: f64) -> Result<f64> {
    check_non_negative("excitation_rate", "b", b)?;
    check_non_negative("excitation_rate", "intensity", intensity)?;
    Ok(b * intensity)
}

/// Probability of staying unexcited for time `t` at constant rate `w`.
pub fn survival_probability(w: f64, t: f64) -> Result<f64> {
    check_non_negative("survival_probability", "w", w)?;
    check_non_negative("survival_probability", "t", t)?;
    Ok(libm::exp(-w * t))
}

/// Trapezoidal `\int w dt` over a sampled rate history.
///
/// `times` must be non-decreasing and the same length as `rates`.
pub fn accumulated_rate(times: &[f64], rates: &[f64]) -> Result<f64> {
    const OP: &str = "accumulated_rate";
    if times.len() != rates.len() {
        return Err(Error::config(OP, "times and rates differ in length"));
    }
    for &w in rates {
        check_non_negative(OP, "w", w)?;
    }
    let mut acc = 0.0;
    for k in 1..times.len() {
        let dt = times[k] - times[k - 1];
        if !(dt >= 0.0) {
            return Err(Error::config(OP, "times must be non-decreasing"));
        }
        acc += 0.5 * (rates[k] + rates[k - 1]) * dt;
    }
    Ok(acc)
}

/// Survival probability `exp(-\int w dt)` for a time-varying rate.
pub fn survival_probability_schedule(times: &[f64], rates: &[f64]) -> Result<f64> {
    Ok(libm::exp(-accumulated_rate(times, rates)?))
}

/// `1 - exp(-rel * tau)`.
pub fn cumulative_excitation_probability(rel: f64, tau: ExposureTime) -> Result<f64> {
    check_rel("cumulative_excitation_probability", rel)?;
    Ok(-libm::expm1(-rel * tau.0))
}

/// `(1 - exp(-rel tau)) / (1 - exp(-tau))`, tending to `rel` as `tau -> 0`.
pub fn detection_ratio(rel: f64, tau: ExposureTime) -> Result<f64> {
    check_rel("detection_ratio", rel)?;
    Ok(detection_ratio_unchecked(rel, tau.0))
}

pub(crate) fn detection_ratio_unchecked(rel: f64, tau: f64) -> f64 {
    if tau < BORN_SERIES_CUTOFF {
        let a = rel;
        a + 0.5 * a * (1.0 - a) * tau + a * (a - 1.0) * (2.0 * a - 1.0) * tau * tau / 12.0
    } else {
        libm::expm1(-rel * tau) / libm::expm1(-tau)
    }
}

/// Hydrogen ground-state to first-excited-state cross-section (atomic units),
/// `(4 pi / v^2) 0.555 ln(v^2 / 0.50)`.
pub fn hydrogen_excitation_cross_section(v: f64) -> Result<f64> {
    let v_sq = v * v;
    if !(v_sq > XSEC_THRESHOLD_V_SQ) || !v_sq.is_finite() {
        return Err(Error::BelowThreshold {
            op: "hydrogen_excitation_cross_section",
            v_sq,
            threshold: XSEC_THRESHOLD_V_SQ,
        });
    }
    Ok(4.0 * core::f64::consts::PI / v_sq * XSEC_STRENGTH * libm::log(v_sq / XSEC_THRESHOLD_V_SQ))
}

/// Rate coefficient `b = sigma v / N0` of a detector with `N0` atoms.
pub fn rate_coefficient(sigma: f64, v: f64, n0: f64) -> Result<f64> {
    const OP: &str = "rate_coefficient";
    check_non_negative(OP, "sigma", sigma)?;
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::domain(OP, format!("speed must be positive, got {v}")));
    }
    if !(n0 >= 1.0) || !n0.is_finite() {
        return Err(Error::domain(OP, format!("atom count must be >= 1, got {n0}")));
    }
    Ok(sigma * v / n0)
}
