//! Normalized intensity profiles `I/I0` along the screen coordinate `z`.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Below this `|x|` the squared sinc uses its series `1 - x^2/3`.
const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// Two-slit far-field geometry reduced to the combinations that shape the
/// pattern: `c1 = pi b / (lambda H)` and `r = d / b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeGeometry {
    c1: f64,
    r: f64,
}

impl FringeGeometry {
    pub fn new(c1: f64, r: f64) -> Result<Self> {
        if !(c1.is_finite() && c1 > 0.0) {
            return Err(Error::domain(
                "FringeGeometry::new",
                format!("c1 must be positive, got {c1}"),
            ));
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::domain(
                "FringeGeometry::new",
                format!("r must be non-negative, got {r}"),
            ));
        }
        Ok(FringeGeometry { c1, r })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// `cos^2(r x) (sin x / x)^2` with `x = c1 z`.
pub fn double_slit_intensity(z: f64, geom: &FringeGeometry) -> f64 {
    let x = geom.c1 * z;
    let sinc_sq = if libm::fabs(x) < SINC_SERIES_CUTOFF {
        1.0 - x * x / 3.0
    } else {
        let s = libm::sin(x) / x;
        s * s
    };
    let c = libm::cos(geom.r * x);
    c * c * sinc_sq
}

/// Sampled profile with linear interpolation between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityTable {
    z: Vec<f64>,
    rel: Vec<f64>,
}

impl IntensityTable {
    /// Samples must have strictly increasing `z` and values in `[0, 1]`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        const OP: &str = "IntensityTable::new";
        if points.len() < 2 {
            return Err(Error::config(OP, "a table needs at least two samples"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::config(
                    OP,
                    format!("z must be strictly increasing ({} then {})", w[0].0, w[1].0),
                ));
            }
        }
        if let Some(&(z, v)) = points.iter().find(|(z, v)| !z.is_finite() || !(0.0..=1.0).contains(v)) {
            return Err(Error::config(
                OP,
                format!("sample at z = {z} has rel_intensity {v} outside [0, 1]"),
            ));
        }
        let (z, rel) = points.into_iter().unzip();
        Ok(IntensityTable { z, rel })
    }

    pub fn z_range(&self) -> (f64, f64) {
        (self.z[0], self.z[self.z.len() - 1])
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.z.iter().copied().zip(self.rel.iter().copied())
    }

    pub fn max_value(&self) -> f64 {
        self.rel.iter().copied().fold(0.0, f64::max)
    }

    /// Linear interpolation; `z` outside the sampled range is a domain error.
    pub fn interpolate(&self, z: f64) -> Result<f64> {
        let (lo, hi) = self.z_range();
        if !(z >= lo && z <= hi) {
            return Err(Error::domain(
                "tabulated_intensity",
                format!("z = {z} outside table range [{lo}, {hi}]"),
            ));
        }
        // index of the first sample with z_k > z
        let k = self.z.partition_point(|&zk| zk <= z);
        if k == self.z.len() {
            return Ok(self.rel[k - 1]);
        }
        let (z0, z1) = (self.z[k - 1], self.z[k]);
        let (v0, v1) = (self.rel[k - 1], self.rel[k]);
        let t = (z - z0) / (z1 - z0);
        Ok(v0 + t * (v1 - v0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    DoubleSlit(FringeGeometry),
    Uniform,
    Tabulated(IntensityTable),
}

/// An intensity profile together with the screen window it is defined on.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityField {
    kind: FieldKind,
    z_min: f64,
    z_max: f64,
}

impl IntensityField {
    pub fn double_slit(geom: FringeGeometry, z_min: f64, z_max: f64) -> Result<Self> {
        Self::new(FieldKind::DoubleSlit(geom), z_min, z_max)
    }

    pub fn uniform(z_min: f64, z_max: f64) -> Result<Self> {
        Self::new(FieldKind::Uniform, z_min, z_max)
    }

    /// A tabulated field whose window is the table's own range.
    pub fn tabulated(table: IntensityTable) -> Result<Self> {
        let (lo, hi) = table.z_range();
        Self::new(FieldKind::Tabulated(table), lo, hi)
    }

    /// Validates the window against the profile: the window must be
    /// non-empty and the profile must reach 1 inside it.
    pub fn new(kind: FieldKind, z_min: f64, z_max: f64) -> Result<Self> {
        const OP: &str = "IntensityField::new";
        if !(z_min.is_finite() && z_max.is_finite() && z_min < z_max) {
            return Err(Error::config(OP, format!("empty window [{z_min}, {z_max}]")));
        }
        match &kind {
            FieldKind::DoubleSlit(_) => {
                if !(z_min <= 0.0 && z_max >= 0.0) {
                    return Err(Error::config(
                        OP,
                        "double-slit window must contain the central maximum z = 0",
                    ));
                }
            }
            FieldKind::Uniform => {}
            FieldKind::Tabulated(t) => {
                let (lo, hi) = t.z_range();
                if z_min < lo || z_max > hi {
                    return Err(Error::config(
                        OP,
                        format!("window [{z_min}, {z_max}] exceeds table range [{lo}, {hi}]"),
                    ));
                }
                let peak = t
                    .samples()
                    .filter(|(z, _)| *z >= z_min && *z <= z_max)
                    .map(|(_, v)| v)
                    .fold(0.0, f64::max);
                if libm::fabs(peak - 1.0) > 1e-6 {
                    return Err(Error::config(
                        OP,
                        format!("table is not normalized: maximum in window is {peak}"),
                    ));
                }
            }
        }
        Ok(IntensityField { kind, z_min, z_max })
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn window(&self) -> (f64, f64) {
        (self.z_min, self.z_max)
    }

    /// `I/I0` at `z`. Double-slit and uniform profiles are total on the real
    /// line; tabulated profiles fail outside their samples.
    pub fn rel_intensity(&self, z: f64) -> Result<f64> {
        match &self.kind {
            FieldKind::DoubleSlit(g) => Ok(double_slit_intensity(z, g)),
            FieldKind::Uniform => Ok(1.0),
            FieldKind::Tabulated(t) => t.interpolate(z),
        }
    }
}
