//! Monte Carlo detector screens.
//!
//! A screen is a single layer of point atoms scattered uniformly over a
//! rectangle, with unit mean surface density in the natural length scale.
//! Under an intensity field each atom is excited independently; once
//! excited it stays excited.
//!
//! Two exposure procedures are provided:
//!
//! * [`ExposureMode::ExactExponential`] draws one excitation time per atom
//!   from the exponential law with rate `I/I0`.
//! * [`ExposureMode::LiteralPerStep`] steps `tau` in increments of `dtau` and
//!   at every step compares a fresh uniform number against the *cumulative*
//!   probability `1 - exp(-(I/I0) tau)`. This over-counts relative to the
//!   exponential law and is kept for comparison only.
//!
//! All randomness comes from [`CounterRng`] keyed by the screen seed and the
//! atom index, so per-atom results can be computed in any order.

use alloc::format;
use alloc::vec::Vec;

use crate::fields::IntensityField;
use crate::rng::{CounterRng, Domain};
use crate::{Error, Result};

/// Rectangular screen area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenWindow {
    pub z_min: f64,
    pub z_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl ScreenWindow {
    /// `Lz x Ly` rectangle centred on the origin.
    pub fn centered(lz: f64, ly: f64) -> Result<Self> {
        Self::new(-0.5 * lz, 0.5 * lz, -0.5 * ly, 0.5 * ly)
    }

    pub fn new(z_min: f64, z_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let ok = [z_min, z_max, y_min, y_max].iter().all(|v| v.is_finite()) && z_max > z_min && y_max > y_min;
        if !ok {
            return Err(Error::config(
                "ScreenWindow::new",
                format!("window [{z_min}, {z_max}] x [{y_min}, {y_max}] has no area"),
            ));
        }
        Ok(ScreenWindow {
            z_min,
            z_max,
            y_min,
            y_max,
        })
    }

    pub fn lz(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn ly(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.lz() * self.ly()
    }

    pub fn contains(&self, z: f64, y: f64) -> bool {
        z >= self.z_min && z <= self.z_max && y >= self.y_min && y <= self.y_max
    }
}

/// How many atoms to place on a screen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Population {
    /// Atoms per unit area; the count is `round(density * area)`.
    Density(f64),
    Count(usize),
}

impl Default for Population {
    fn default() -> Self {
        Population::Density(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomScreen {
    positions: Vec<(f64, f64)>,
    excited_at: Vec<Option<f64>>,
    window: ScreenWindow,
    seed: u64,
}

/// Places atoms i.i.d. uniformly on `window`. Deterministic in `seed`.
pub fn generate_screen(window: ScreenWindow, population: Population, seed: u64) -> Result<AtomScreen> {
    const OP: &str = "generate_screen";
    let n = match population {
        Population::Density(d) => {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::config(OP, format!("density must be positive, got {d}")));
            }
            libm::round(d * window.area()) as usize
        }
        Population::Count(n) => n,
    };
    if n == 0 {
        return Err(Error::config(OP, "screen would hold no atoms"));
    }
    let rng = CounterRng::new(seed);
    let positions = (0..n)
        .map(|i| {
            let mut s = rng.stream(Domain::Position, i as u64);
            let z = window.z_min + s.uniform() * window.lz();
            let y = window.y_min + s.uniform() * window.ly();
            (z, y)
        })
        .collect();
    Ok(AtomScreen {
        positions,
        excited_at: alloc::vec![None; n],
        window,
        seed,
    })
}

impl AtomScreen {
    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn window(&self) -> ScreenWindow {
        self.window
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Excitation time of each atom from the last recorded exposure.
    pub fn excited_at(&self) -> &[Option<f64>] {
        &self.excited_at
    }

    pub fn record_excitations(&mut self, times: Vec<Option<f64>>) -> Result<()> {
        if times.len() != self.positions.len() {
            return Err(Error::config(
                "AtomScreen::record_excitations",
                format!("{} times for {} atoms", times.len(), self.positions.len()),
            ));
        }
        if times.iter().flatten().any(|t| !(*t >= 0.0)) {
            return Err(Error::domain(
                "AtomScreen::record_excitations",
                "negative excitation time",
            ));
        }
        self.excited_at = times;
        Ok(())
    }
}

/// Strictly increasing, non-negative snapshot times.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureSchedule {
    taus: Vec<f64>,
}

impl ExposureSchedule {
    pub fn new(taus: Vec<f64>) -> Result<Self> {
        const OP: &str = "ExposureSchedule::new";
        if taus.is_empty() {
            return Err(Error::config(OP, "schedule is empty"));
        }
        if let Some(t) = taus.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::config(OP, format!("exposure {t} is negative or not finite")));
        }
        if taus.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config(OP, "exposures must be strictly increasing"));
        }
        Ok(ExposureSchedule { taus })
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn last(&self) -> f64 {
        self.taus[self.taus.len() - 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub tau: f64,
    pub excited_positions: Vec<(f64, f64)>,
}

impl Snapshot {
    pub fn count(&self) -> usize {
        self.excited_positions.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ExposureMode {
    #[default]
    ExactExponential,
    LiteralPerStep {
        dtau: f64,
    },
}

impl ExposureMode {
    /// Parses `exact_exponential` or `literal_per_step` (which uses `dtau`).
    pub fn from_name(name: &str, dtau: f64) -> Result<Self> {
        match name {
            "exact_exponential" => Ok(ExposureMode::ExactExponential),
            "literal_per_step" => {
                if !(dtau.is_finite() && dtau > 0.0) {
                    return Err(Error::config(
                        "ExposureMode::from_name",
                        format!("dtau must be positive, got {dtau}"),
                    ));
                }
                Ok(ExposureMode::LiteralPerStep { dtau })
            }
            other => Err(Error::config(
                "ExposureMode::from_name",
                format!("unknown exposure mode '{other}'"),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExposureMode::ExactExponential => "exact_exponential",
            ExposureMode::LiteralPerStep { .. } => "literal_per_step",
        }
    }
}

/// Inverse-CDF draw from the exponential law with rate `w`.
///
/// Returns `None` (never excited) for `w <= 0`.
pub fn sample_excitation_time(w: f64, u: f64) -> Result<Option<f64>> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain(
            "sample_excitation_time",
            format!("u = {u} outside (0, 1)"),
        ));
    }
    if !(w > 0.0) {
        return Ok(None);
    }
    Ok(Some(-libm::log(u) / w))
}

/// Prepared exposure of one screen under one field.
///
/// [`Exposure::atom_time`] is a pure function of the atom index, so callers
/// may evaluate atoms in parallel and hand the results to
/// [`Exposure::snapshots`].
#[derive(Debug, Clone)]
pub struct Exposure<'a> {
    screen: &'a AtomScreen,
    schedule: &'a ExposureSchedule,
    mode: ExposureMode,
    rel: Vec<f64>,
    steps: Vec<f64>,
    rng: CounterRng,
}

impl<'a> Exposure<'a> {
    pub fn new(
        screen: &'a AtomScreen,
        field: &IntensityField,
        schedule: &'a ExposureSchedule,
        mode: ExposureMode,
    ) -> Result<Self> {
        let rel = screen
            .positions
            .iter()
            .map(|&(z, _)| field.rel_intensity(z))
            .collect::<Result<Vec<_>>>()?;
        let steps = match mode {
            ExposureMode::ExactExponential => Vec::new(),
            ExposureMode::LiteralPerStep { dtau } => {
                if !(dtau.is_finite() && dtau > 0.0) {
                    return Err(Error::config(
                        "run_exposure",
                        format!("dtau must be positive, got {dtau}"),
                    ));
                }
                step_grid(schedule.taus(), dtau)
            }
        };
        Ok(Exposure {
            screen,
            schedule,
            mode,
            rel,
            steps,
            rng: CounterRng::new(screen.seed),
        })
    }

    pub fn atom_count(&self) -> usize {
        self.rel.len()
    }

    /// Relative intensity at each atom.
    pub fn rel_intensities(&self) -> &[f64] {
        &self.rel
    }

    /// Time at which atom `i` becomes excited, `None` if never within the run.
    pub fn atom_time(&self, i: usize) -> Option<f64> {
        let rel = self.rel[i];
        match self.mode {
            ExposureMode::ExactExponential => {
                let u = self.rng.uniform(Domain::Excitation, i as u64, 0);
                // u lies in (0, 1) by construction
                sample_excitation_time(rel, u).ok().flatten()
            }
            ExposureMode::LiteralPerStep { .. } => {
                let mut s = self.rng.stream(Domain::Excitation, i as u64);
                for &tau in &self.steps {
                    let p = -libm::expm1(-rel * tau);
                    if s.uniform() <= p {
                        return Some(tau);
                    }
                }
                None
            }
        }
    }

    /// Snapshots from per-atom excitation times (in atom order).
    pub fn snapshots(&self, times: &[Option<f64>]) -> Vec<Snapshot> {
        self.schedule
            .taus()
            .iter()
            .map(|&tau| Snapshot {
                tau,
                excited_positions: times
                    .iter()
                    .zip(&self.screen.positions)
                    .filter(|(t, _)| t.is_some_and(|t| t <= tau))
                    .map(|(_, &p)| p)
                    .collect(),
            })
            .collect()
    }

    pub fn times(&self) -> Vec<Option<f64>> {
        (0..self.atom_count()).map(|i| self.atom_time(i)).collect()
    }
}

/// Step times `k * dtau` merged with the snapshot times, ascending, zero dropped.
fn step_grid(taus: &[f64], dtau: f64) -> Vec<f64> {
    let last = taus[taus.len() - 1];
    let near_snapshot = |t: f64| taus.iter().any(|&s| libm::fabs(s - t) <= 1e-9 * dtau);
    let mut steps: Vec<f64> = (1..)
        .map(|k| k as f64 * dtau)
        .take_while(|&t| t <= last + 1e-9 * dtau)
        .filter(|&t| !near_snapshot(t))
        .chain(taus.iter().copied().filter(|&t| t > 0.0))
        .collect();
    steps.sort_by(f64::total_cmp);
    steps
}

/// Sequential exposure run; excitation times are also recorded on `screen`.
pub fn run_exposure(
    screen: &mut AtomScreen,
    field: &IntensityField,
    schedule: &ExposureSchedule,
    mode: ExposureMode,
) -> Result<Vec<Snapshot>> {
    let (times, snaps) = {
        let exposure = Exposure::new(screen, field, schedule, mode)?;
        let times = exposure.times();
        let snaps = exposure.snapshots(&times);
        (times, snaps)
    };
    screen.record_excitations(times)?;
    Ok(snaps)
}
