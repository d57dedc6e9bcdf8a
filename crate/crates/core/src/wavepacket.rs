//! RMS widths of sampled one-dimensional packets and their uncertainty
//! products.
//!
//! Samples sit at `x_j = -extent/2 + j h` with `h = extent / N`. The
//! spectrum is the Riemann-sum Fourier transform
//! `Phi(k_m) = h sum_j psi_j exp(-i k_m x_j)` on the centred grid
//! `k_m = 2 pi m / (N h)`, `m = -N/2 .. N/2 - 1`, computed with an
//! unnormalized forward FFT. Widths are RMS deviations about the centroid,
//! weighted by `|psi|^2` and `|Phi|^2`. For a time-axis packet the same
//! machinery yields `delta_t` and `delta_omega`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{fft, Error, Result};

pub const MIN_SAMPLES: usize = 16;
/// Largest admissible `max boundary |psi| / max |psi|`.
pub const BOUNDARY_RATIO_LIMIT: f64 = 1e-8;
/// Largest admissible spectral weight fraction near the Nyquist edge.
pub const NYQUIST_WEIGHT_LIMIT: f64 = 1e-6;
/// Bins on each side of the band edge counted as "near Nyquist".
const NYQUIST_BINS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Space,
    Time,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PacketShape {
    /// `exp(-x^2 / (4 sigma^2)) exp(i k_c x)`; `|psi|^2` has RMS width `sigma`.
    Gaussian { sigma: f64, k_c: f64 },
    /// `cos^2(pi x / width)` on `|x| <= width/2`, zero outside, times `exp(i k_c x)`.
    Hann { width: f64, k_c: f64 },
    /// Samples taken as given; length must equal the grid size.
    Tabulated(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledPacket {
    samples: Vec<Complex64>,
    spacing: f64,
    axis: Axis,
}

impl SampledPacket {
    /// Validates size, weight and boundary smallness.
    pub fn new(samples: Vec<Complex64>, spacing: f64, axis: Axis) -> Result<Self> {
        const OP: &str = "SampledPacket::new";
        let n = samples.len();
        if n < MIN_SAMPLES || !n.is_power_of_two() {
            return Err(Error::config(
                OP,
                format!("sample count {n} must be a power of two >= {MIN_SAMPLES}"),
            ));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::config(OP, format!("spacing must be positive, got {spacing}")));
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::config(OP, "samples must be finite"));
        }
        let peak = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::config(OP, "packet has zero weight"));
        }
        let ratio = boundary_ratio(&samples);
        if ratio > BOUNDARY_RATIO_LIMIT {
            return Err(Error::config(
                OP,
                format!("boundary ratio {ratio:e} exceeds {BOUNDARY_RATIO_LIMIT:e}; widen the grid"),
            ));
        }
        Ok(SampledPacket { samples, spacing, axis })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Coordinate of sample `j`.
    pub fn coordinate(&self, j: usize) -> f64 {
        (j as f64 - 0.5 * self.len() as f64) * self.spacing
    }

    pub fn boundary_ratio(&self) -> f64 {
        boundary_ratio(&self.samples)
    }
}

fn boundary_ratio(samples: &[Complex64]) -> f64 {
    let peak = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let edge = samples[0].norm().max(samples[samples.len() - 1].norm());
    edge / peak
}

/// Samples `shape` on `n` points spanning `extent`, centred on zero.
pub fn build_packet(shape: &PacketShape, n: usize, extent: f64, axis: Axis) -> Result<SampledPacket> {
    const OP: &str = "build_packet";
    if n < MIN_SAMPLES || !n.is_power_of_two() {
        return Err(Error::config(
            OP,
            format!("sample count {n} must be a power of two >= {MIN_SAMPLES}"),
        ));
    }
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::config(OP, format!("extent must be positive, got {extent}")));
    }
    let h = extent / n as f64;
    let x = |j: usize| (j as f64 - 0.5 * n as f64) * h;
    let carrier = |x: f64, k_c: f64| Complex64::from_polar(1.0, k_c * x);
    let samples: Vec<Complex64> = match shape {
        PacketShape::Gaussian { sigma, k_c } => {
            if !(*sigma > 0.0) {
                return Err(Error::config(OP, format!("sigma must be positive, got {sigma}")));
            }
            (0..n)
                .map(|j| {
                    let xj = x(j);
                    carrier(xj, *k_c) * libm::exp(-xj * xj / (4.0 * sigma * sigma))
                })
                .collect()
        }
        PacketShape::Hann { width, k_c } => {
            if !(*width > 0.0) {
                return Err(Error::config(OP, format!("width must be positive, got {width}")));
            }
            (0..n)
                .map(|j| {
                    let xj = x(j);
                    if libm::fabs(xj) <= 0.5 * width {
                        let c = libm::cos(PI * xj / width);
                        carrier(xj, *k_c) * (c * c)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        }
        PacketShape::Tabulated(values) => {
            if values.len() != n {
                return Err(Error::config(
                    OP,
                    format!("{} tabulated samples for a grid of {n}", values.len()),
                ));
            }
            values.clone()
        }
    };
    let packet = SampledPacket::new(samples, h, axis).map_err(|e| match e {
        Error::Config { detail, .. } => Error::config(OP, detail),
        other => other,
    })?;
    if let PacketShape::Tabulated(_) = shape {
        let spectrum = Spectrum::of(&packet);
        let edge = spectrum.nyquist_fraction();
        if edge > NYQUIST_WEIGHT_LIMIT {
            return Err(Error::config(
                OP,
                format!("tabulated packet is under-resolved: Nyquist-edge weight fraction {edge:e}"),
            ));
        }
    }
    Ok(packet)
}

struct Spectrum {
    /// `(k_m, |Phi(k_m)|^2)` in ascending `m`.
    bins: Vec<(f64, f64)>,
    dk: f64,
}

impl Spectrum {
    fn of(packet: &SampledPacket) -> Self {
        let n = packet.len();
        let h = packet.spacing;
        let mut data = packet.samples.clone();
        fft::forward(&mut data);
        let dk = 2.0 * PI / (n as f64 * h);
        let half = n / 2;
        // m = -N/2 .. N/2-1 stored at index (m mod N); the grid origin shift
        // only changes the phase of Phi.
        let bins = (0..n)
            .map(|i| {
                let m = i as isize - half as isize;
                let idx = (i + half) % n;
                let phi = data[idx] * h;
                (m as f64 * dk, phi.norm_sqr())
            })
            .collect();
        Spectrum { bins, dk }
    }

    fn total(&self) -> f64 {
        self.bins.iter().map(|b| b.1).sum()
    }

    fn nyquist_fraction(&self) -> f64 {
        let n = self.bins.len();
        let edge: f64 = self.bins[..NYQUIST_BINS].iter().map(|b| b.1).sum::<f64>()
            + self.bins[n - NYQUIST_BINS..].iter().map(|b| b.1).sum::<f64>();
        edge / self.total()
    }

    /// Weight fraction beyond half the band limit.
    fn outer_band_fraction(&self) -> f64 {
        let n = self.bins.len();
        let limit = 0.25 * n as f64 * self.dk;
        let outer: f64 = self.bins.iter().filter(|b| libm::fabs(b.0) >= limit).map(|b| b.1).sum();
        outer / self.total()
    }
}

/// Widths of a packet and of its spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Widths {
    /// RMS width in the sampled coordinate (`delta_x` or `delta_t`).
    pub delta: f64,
    /// RMS width of the conjugate variable (`delta_k` or `delta_omega`).
    pub delta_conjugate: f64,
    pub product: f64,
    pub centroid: f64,
    pub centroid_conjugate: f64,
    /// Grid truncation indicator: spectral weight beyond half the band limit
    /// plus `|psi|^2` weight in the outer twentieth of the window on each side.
    pub eps_grid: f64,
    /// `|sum |psi|^2 h - sum |Phi|^2 dk / 2 pi|` relative to the first sum.
    pub parseval_residual: f64,
}

impl Widths {
    /// `delta_x * delta_p` in units where momentum is `hbar k`.
    pub fn momentum_product(&self, hbar: f64) -> f64 {
        hbar * self.product
    }
}

fn mean_and_rms(points: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let total: f64 = points.clone().map(|p| p.1).sum();
    let mean = points.clone().map(|(x, w)| x * w).sum::<f64>() / total;
    let var = points.map(|(x, w)| (x - mean) * (x - mean) * w).sum::<f64>() / total;
    (mean, libm::sqrt(var))
}

fn widths(packet: &SampledPacket, op: &'static str) -> Result<Widths> {
    let spectrum = Spectrum::of(packet);
    let edge = spectrum.nyquist_fraction();
    if edge > NYQUIST_WEIGHT_LIMIT {
        return Err(Error::Resolution {
            op,
            edge_fraction: edge,
        });
    }
    let h = packet.spacing;
    let n = packet.len();
    let position = (0..n).map(|j| (packet.coordinate(j), packet.samples[j].norm_sqr()));
    let (centroid, delta) = mean_and_rms(position.clone());
    let (centroid_k, delta_k) = mean_and_rms(spectrum.bins.iter().copied());

    let norm_x: f64 = position.clone().map(|p| p.1).sum::<f64>() * h;
    let norm_k = spectrum.total() * spectrum.dk / (2.0 * PI);
    let margin = n / 20;
    let outer_x: f64 = position
        .clone()
        .enumerate()
        .filter(|(j, _)| *j < margin || *j >= n - margin)
        .map(|(_, p)| p.1)
        .sum::<f64>()
        * h
        / norm_x;

    Ok(Widths {
        delta,
        delta_conjugate: delta_k,
        product: delta * delta_k,
        centroid,
        centroid_conjugate: centroid_k,
        eps_grid: spectrum.outer_band_fraction() + outer_x,
        parseval_residual: libm::fabs(norm_x - norm_k) / norm_x,
    })
}

/// `delta_x`, `delta_k` and their product for a space-axis packet.
pub fn rms_widths(packet: &SampledPacket) -> Result<Widths> {
    if packet.axis != Axis::Space {
        return Err(Error::config(
            "rms_widths",
            "packet is sampled in time; use time_frequency_widths",
        ));
    }
    widths(packet, "rms_widths")
}

/// `delta_t`, `delta_omega` and their product for a time-axis packet.
pub fn time_frequency_widths(packet: &SampledPacket) -> Result<Widths> {
    if packet.axis != Axis::Time {
        return Err(Error::config(
            "time_frequency_widths",
            "packet is sampled in space; use rms_widths",
        ));
    }
    widths(packet, "time_frequency_widths")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian(sigma: f64, k_c: f64) -> SampledPacket {
        build_packet(&PacketShape::Gaussian { sigma, k_c }, 4096, 40.0, Axis::Space).unwrap()
    }

    #[test]
    fn gaussian_boundary() {
        assert!(gaussian(1.0, 0.0).boundary_ratio() < 1e-8);
        let err = build_packet(&PacketShape::Gaussian { sigma: 5.0, k_c: 0.0 }, 4096, 40.0, Axis::Space).unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn hann_support() {
        let p = build_packet(&PacketShape::Hann { width: 10.0, k_c: 0.0 }, 4096, 40.0, Axis::Space).unwrap();
        for j in 0..p.len() {
            if p.coordinate(j).abs() > 5.0 {
                assert_eq!(p.samples()[j].norm(), 0.0);
            }
        }
    }

    #[test]
    fn delta_like_table_is_rejected() {
        let mut v = alloc::vec![Complex64::new(0.0, 0.0); 64];
        v[32] = Complex64::new(1.0, 0.0);
        let err = build_packet(&PacketShape::Tabulated(v), 64, 6.4, Axis::Space).unwrap_err();
        assert!(err.is_config());
        // same samples through the unchecked constructor hit the resolution guard
        let mut v = alloc::vec![Complex64::new(0.0, 0.0); 64];
        v[32] = Complex64::new(1.0, 0.0);
        let p = SampledPacket::new(v, 0.1, Axis::Space).unwrap();
        assert!(matches!(rms_widths(&p), Err(Error::Resolution { .. })));
    }

    #[test]
    fn grid_validation() {
        let shape = PacketShape::Gaussian { sigma: 1.0, k_c: 0.0 };
        assert!(build_packet(&shape, 8, 40.0, Axis::Space).is_err());
        assert!(build_packet(&shape, 1000, 40.0, Axis::Space).is_err());
        assert!(build_packet(&shape, 1024, 0.0, Axis::Space).is_err());
        assert!(build_packet(&PacketShape::Tabulated(alloc::vec![]), 16, 1.0, Axis::Space).is_err());
    }

    #[test]
    fn gaussian_is_minimal() {
        let w = rms_widths(&gaussian(1.0, 0.0)).unwrap();
        assert_relative_eq!(w.delta, 1.0, max_relative = 5e-3);
        assert_relative_eq!(w.delta_conjugate, 0.5, max_relative = 5e-3);
        assert_relative_eq!(w.product, 0.5, max_relative = 5e-3);
        assert!(w.parseval_residual < 1e-10);
        assert!(w.eps_grid < 1e-10);
    }

    #[test]
    fn carrier_shifts_spectrum() {
        let base = rms_widths(&gaussian(1.0, 0.0)).unwrap();
        let moving = rms_widths(&gaussian(1.0, 5.0)).unwrap();
        assert_relative_eq!(moving.centroid_conjugate, 5.0, max_relative = 1e-9);
        assert_relative_eq!(moving.delta, base.delta, max_relative = 1e-12);
        assert_relative_eq!(moving.delta_conjugate, base.delta_conjugate, max_relative = 1e-9);
    }

    #[test]
    fn dilation_covariance() {
        let a = rms_widths(&gaussian(1.0, 0.0)).unwrap();
        let b = rms_widths(&gaussian(2.0, 0.0)).unwrap();
        assert_relative_eq!(b.delta, 2.0 * a.delta, max_relative = 1e-3);
        assert_relative_eq!(b.delta_conjugate, 0.5 * a.delta_conjugate, max_relative = 1e-3);
        assert_relative_eq!(b.product, a.product, max_relative = 1e-3);
    }

    #[test]
    fn time_axis() {
        let shape = |sigma| PacketShape::Gaussian { sigma, k_c: 0.0 };
        let wide = build_packet(&shape(1.0), 4096, 40.0, Axis::Time).unwrap();
        let narrow = build_packet(&shape(0.5), 4096, 40.0, Axis::Time).unwrap();
        let a = time_frequency_widths(&wide).unwrap();
        let b = time_frequency_widths(&narrow).unwrap();
        assert_relative_eq!(a.product, 0.5, max_relative = 5e-3);
        assert_relative_eq!(b.delta_conjugate, 2.0 * a.delta_conjugate, max_relative = 1e-3);
        assert!(rms_widths(&wide).unwrap_err().is_config());
        assert!(time_frequency_widths(&gaussian(1.0, 0.0)).unwrap_err().is_config());
    }

    /// Simpson quadrature of `delta_x` and `delta_k` for a real Hann packet,
    /// using `delta_k^2 = int psi'^2 / int psi^2`.
    fn hann_oracle(width: f64) -> (f64, f64) {
        let n = 20_000;
        let a = -0.5 * width;
        let h = width / n as f64;
        let simpson = |f: &dyn Fn(f64) -> f64| {
            let mut s = f(a) + f(-a);
            for i in 1..n {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
            }
            s * h / 3.0
        };
        let psi = |x: f64| libm::pow(libm::cos(PI * x / width), 2.0);
        let dpsi = |x: f64| -PI / width * libm::sin(2.0 * PI * x / width);
        let norm = simpson(&|x| psi(x) * psi(x));
        let x2 = simpson(&|x| x * x * psi(x) * psi(x));
        let k2 = simpson(&|x| dpsi(x) * dpsi(x));
        (libm::sqrt(x2 / norm), libm::sqrt(k2 / norm))
    }

    #[test]
    fn hann_matches_quadrature() {
        let (dx, dk) = hann_oracle(10.0);
        assert_relative_eq!(dx * dk, 0.513_117_313_972_952_6, max_relative = 1e-6);
        let p = build_packet(&PacketShape::Hann { width: 10.0, k_c: 0.0 }, 4096, 40.0, Axis::Space).unwrap();
        let w = rms_widths(&p).unwrap();
        assert_relative_eq!(w.delta, dx, max_relative = 1e-2);
        assert_relative_eq!(w.delta_conjugate, dk, max_relative = 1e-2);
        assert_relative_eq!(w.product, dx * dk, max_relative = 1e-2);
        assert!(w.product > 0.5);
        assert!(w.parseval_residual < 1e-10);
    }

    #[test]
    fn heisenberg_form() {
        let w = rms_widths(&gaussian(1.0, 0.0)).unwrap();
        let hbar = crate::physconst::HBAR;
        assert_eq!(w.momentum_product(hbar), hbar * w.product);
    }
}
