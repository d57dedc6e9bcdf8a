//! Numerical core for simulating detection of continuous classical waves by
//! discrete detector atoms.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. File formats,
//! configuration and the command-line driver live in the `semiwave` crate.
//!
//! Modules:
//!
//! * [`physconst`]: constants and the electron mass/frequency relation.
//! * [`fields`]: normalized intensity profiles on the detector screen.
//! * [`rates`]: excitation rates, survival law and the generalized detection ratio.
//! * [`detector`]: random atom screens and Monte Carlo exposure.
//! * [`analysis`]: histograms, theory curves, goodness of fit, ladder calibration.
//! * [`matterwave`]: Klein-Gordon plane waves and wave "portions".
//! * [`spinor`]: Pauli spin, magnetic-moment and current densities.
//! * [`compton`]: kinematics of scattering off an electron wave.
//! * [`wavepacket`]: RMS widths of sampled packets and their uncertainty products.
#![no_std]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod compton;
pub mod detector;
mod error;
mod fft;
pub mod fields;
pub mod matterwave;
pub mod physconst;
pub mod rates;
pub mod rng;
pub mod spinor;
pub mod vec3;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use physconst::PhysicalConstants;
pub use vec3::Vec3;
