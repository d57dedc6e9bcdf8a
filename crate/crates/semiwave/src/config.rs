//! Run configuration: strict JSON with per-experiment defaults.
//!
//! ```json
//! { "experiment": "double_slit_buildup", "seed": 7, "parameters": { "c1": 0.03 } }
//! ```
//!
//! Parameters not given take the experiment's defaults; unknown keys are
//! rejected anywhere in the document.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::AppError;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    DoubleSlitBuildup,
    BornDeviation,
    MatterwaveSweep,
    SpinCheck,
    ComptonSweep,
    PacketWidths,
    Xsec,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::DoubleSlitBuildup => "double_slit_buildup",
            Experiment::BornDeviation => "born_deviation",
            Experiment::MatterwaveSweep => "matterwave_sweep",
            Experiment::SpinCheck => "spin_check",
            Experiment::ComptonSweep => "compton_sweep",
            Experiment::PacketWidths => "packet_widths",
            Experiment::Xsec => "xsec",
        }
    }
}

/// Screen exposure parameters shared by the two detector experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorParams {
    /// Single-slit phase scale `pi b / (lambda H)`.
    pub c1: f64,
    /// Slit separation over slit width.
    pub r: f64,
    /// Optional `z,rel_intensity` table replacing the double-slit pattern.
    pub field_csv: Option<PathBuf>,
    /// Screen extent along the fringe axis, centred on zero.
    pub lz: f64,
    pub ly: f64,
    pub density: f64,
    /// Overrides `density` when set.
    pub atom_count: Option<usize>,
    pub exposures: Vec<f64>,
    pub realizations: usize,
    pub mode: String,
    pub dtau: f64,
    pub bins: usize,
    pub pixels_per_unit: f64,
}

impl DetectorParams {
    /// Five-step exposure ladder on a screen sized so that about 3452 atoms
    /// fire by tau = 1 and 14530 by tau = 30.
    pub fn buildup() -> Self {
        DetectorParams {
            c1: 0.03,
            r: 5.0,
            field_csv: None,
            lz: 265.448,
            ly: 92.737,
            density: 1.0,
            atom_count: None,
            exposures: vec![0.02, 0.1, 1.0, 10.0, 30.0],
            realizations: 1,
            mode: "exact_exponential".into(),
            dtau: 0.1,
            bins: 100,
            pixels_per_unit: 2.0,
        }
    }

    /// Short against long exposure, averaged over ten screens.
    pub fn deviation() -> Self {
        DetectorParams {
            lz: 300.0,
            ly: 50.0,
            exposures: vec![0.1, 5.0],
            realizations: 10,
            ..Self::buildup()
        }
    }

    fn validate(&self) -> Result<(), AppError> {
        positive("c1", self.c1)?;
        non_negative("r", self.r)?;
        positive("lz", self.lz)?;
        positive("ly", self.ly)?;
        positive("density", self.density)?;
        if self.atom_count == Some(0) {
            return invalid("atom_count", "must be at least 1");
        }
        if self.exposures.is_empty() {
            return invalid("exposures", "must not be empty");
        }
        if self.exposures.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return invalid("exposures", "must be finite and >= 0");
        }
        if self.exposures.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("exposures", "must be strictly increasing");
        }
        if self.realizations == 0 {
            return invalid("realizations", "must be at least 1");
        }
        if !matches!(self.mode.as_str(), "exact_exponential" | "literal_per_step") {
            return invalid("mode", "must be exact_exponential or literal_per_step");
        }
        positive("dtau", self.dtau)?;
        if self.bins == 0 {
            return invalid("bins", "must be at least 1");
        }
        positive("pixels_per_unit", self.pixels_per_unit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatterwaveParams {
    /// Sweep range of `c|k| / omega_e`, log-spaced.
    pub ck_min: f64,
    pub ck_max: f64,
    pub points: usize,
    pub amplitude: f64,
}

impl Default for MatterwaveParams {
    fn default() -> Self {
        MatterwaveParams {
            ck_min: 1e-6,
            ck_max: 1e3,
            points: 181,
            amplitude: 1.0,
        }
    }
}

impl MatterwaveParams {
    fn validate(&self) -> Result<(), AppError> {
        positive("ck_min", self.ck_min)?;
        positive("ck_max", self.ck_max)?;
        if self.ck_max < self.ck_min {
            return invalid("ck_max", "must be >= ck_min");
        }
        if self.points < 2 {
            return invalid("points", "must be at least 2");
        }
        positive("amplitude", self.amplitude)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinParams {
    /// Random spinors drawn for the invariant checks.
    pub samples: usize,
    /// `ix,iy,iz,re_up,im_up,re_down,im_down` grid; a built-in spin helix
    /// is used when absent.
    pub grid_csv: Option<PathBuf>,
    pub grid_points: usize,
    pub spacing: f64,
    pub boundary: String,
}

impl Default for SpinParams {
    fn default() -> Self {
        SpinParams {
            samples: 10_000,
            grid_csv: None,
            grid_points: 16,
            spacing: 1.0,
            boundary: "periodic".into(),
        }
    }
}

impl SpinParams {
    fn validate(&self) -> Result<(), AppError> {
        if self.samples == 0 {
            return invalid("samples", "must be at least 1");
        }
        if self.grid_points < 3 {
            return invalid("grid_points", "must be at least 3");
        }
        positive("spacing", self.spacing)?;
        if !matches!(self.boundary.as_str(), "periodic" | "one_sided") {
            return invalid("boundary", "must be periodic or one_sided");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComptonParams {
    /// Incident photon energy in units of `m_e c^2`.
    pub hbar_omega0_over_mc2: f64,
    /// Initial electron-wave momentum in units of `m_e c`.
    pub p0_over_mc: [f64; 3],
    pub theta_points: usize,
}

impl Default for ComptonParams {
    fn default() -> Self {
        ComptonParams {
            hbar_omega0_over_mc2: 1.0,
            p0_over_mc: [0.0; 3],
            theta_points: 181,
        }
    }
}

impl ComptonParams {
    fn validate(&self) -> Result<(), AppError> {
        positive("hbar_omega0_over_mc2", self.hbar_omega0_over_mc2)?;
        if self.p0_over_mc.iter().any(|p| !p.is_finite()) {
            return invalid("p0_over_mc", "must be finite");
        }
        if self.theta_points < 2 {
            return invalid("theta_points", "must be at least 2");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketParams {
    /// `gaussian`, `hann` or `tabulated`.
    pub shape: String,
    /// Sigma (gaussian) or full width (hann) for each row.
    pub values: Vec<f64>,
    pub k_c: f64,
    pub n: usize,
    pub extent: f64,
    /// `space` or `time`.
    pub axis: String,
    /// `re,im` samples for the tabulated shape.
    pub tabulated_csv: Option<PathBuf>,
}

impl Default for PacketParams {
    fn default() -> Self {
        PacketParams {
            shape: "gaussian".into(),
            values: vec![0.5, 1.0, 2.0],
            k_c: 0.0,
            n: 4096,
            extent: 40.0,
            axis: "space".into(),
            tabulated_csv: None,
        }
    }
}

impl PacketParams {
    fn validate(&self) -> Result<(), AppError> {
        match self.shape.as_str() {
            "gaussian" | "hann" => {
                if self.values.is_empty() {
                    return invalid("values", "must not be empty");
                }
                for &v in &self.values {
                    positive("values", v)?;
                }
            }
            "tabulated" => {
                if self.tabulated_csv.is_none() {
                    return invalid("tabulated_csv", "required for the tabulated shape");
                }
            }
            _ => return invalid("shape", "must be gaussian, hann or tabulated"),
        }
        if !self.k_c.is_finite() {
            return invalid("k_c", "must be finite");
        }
        if self.n < 16 || !self.n.is_power_of_two() {
            return invalid("n", "must be a power of two >= 16");
        }
        positive("extent", self.extent)?;
        if !matches!(self.axis.as_str(), "space" | "time") {
            return invalid("axis", "must be space or time");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XsecParams {
    /// Range of `v^2` in atomic units; must lie above threshold.
    pub v_sq_min: f64,
    pub v_sq_max: f64,
    pub points: usize,
    /// Atom count used to turn the cross-section into a rate coefficient.
    pub detector_atoms: f64,
}

impl Default for XsecParams {
    fn default() -> Self {
        XsecParams {
            v_sq_min: 0.55,
            v_sq_max: 10.0,
            points: 100,
            detector_atoms: 1e4,
        }
    }
}

impl XsecParams {
    fn validate(&self) -> Result<(), AppError> {
        if !(self.v_sq_min > semiwave_core::rates::XSEC_THRESHOLD_V_SQ) {
            return invalid("v_sq_min", "must exceed the 0.5 threshold");
        }
        if !(self.v_sq_max.is_finite() && self.v_sq_max >= self.v_sq_min) {
            return invalid("v_sq_max", "must be >= v_sq_min");
        }
        if self.points < 2 {
            return invalid("points", "must be at least 2");
        }
        if !(self.detector_atoms >= 1.0) {
            return invalid("detector_atoms", "must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Parameters {
    Detector(DetectorParams),
    Matterwave(MatterwaveParams),
    Spin(SpinParams),
    Compton(ComptonParams),
    Packet(PacketParams),
    Xsec(XsecParams),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub parameters: Parameters,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Experiment,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    #[serde(default)]
    parameters: Map<String, Value>,
}

impl RunConfig {
    /// Configuration with every parameter at its default.
    pub fn defaults(experiment: Experiment) -> Self {
        let parameters = match experiment {
            Experiment::DoubleSlitBuildup => Parameters::Detector(DetectorParams::buildup()),
            Experiment::BornDeviation => Parameters::Detector(DetectorParams::deviation()),
            Experiment::MatterwaveSweep => Parameters::Matterwave(MatterwaveParams::default()),
            Experiment::SpinCheck => Parameters::Spin(SpinParams::default()),
            Experiment::ComptonSweep => Parameters::Compton(ComptonParams::default()),
            Experiment::PacketWidths => Parameters::Packet(PacketParams::default()),
            Experiment::Xsec => Parameters::Xsec(XsecParams::default()),
        };
        RunConfig {
            experiment,
            seed: DEFAULT_SEED,
            output_dir: None,
            parameters,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, AppError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;
        let mut config = Self::defaults(raw.experiment);
        config.seed = raw.seed.unwrap_or(DEFAULT_SEED);
        config.output_dir = raw.output_dir;
        config.parameters = match config.parameters {
            Parameters::Detector(d) => Parameters::Detector(overlay(d, raw.parameters)?),
            Parameters::Matterwave(d) => Parameters::Matterwave(overlay(d, raw.parameters)?),
            Parameters::Spin(d) => Parameters::Spin(overlay(d, raw.parameters)?),
            Parameters::Compton(d) => Parameters::Compton(overlay(d, raw.parameters)?),
            Parameters::Packet(d) => Parameters::Packet(overlay(d, raw.parameters)?),
            Parameters::Xsec(d) => Parameters::Xsec(overlay(d, raw.parameters)?),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), AppError> {
        let expected = match self.experiment {
            Experiment::DoubleSlitBuildup | Experiment::BornDeviation => {
                matches!(self.parameters, Parameters::Detector(_))
            }
            Experiment::MatterwaveSweep => matches!(self.parameters, Parameters::Matterwave(_)),
            Experiment::SpinCheck => matches!(self.parameters, Parameters::Spin(_)),
            Experiment::ComptonSweep => matches!(self.parameters, Parameters::Compton(_)),
            Experiment::PacketWidths => matches!(self.parameters, Parameters::Packet(_)),
            Experiment::Xsec => matches!(self.parameters, Parameters::Xsec(_)),
        };
        if !expected {
            return Err(AppError::Config(format!(
                "parameters do not belong to experiment {}",
                self.experiment.name()
            )));
        }
        match &self.parameters {
            Parameters::Detector(p) => p.validate(),
            Parameters::Matterwave(p) => p.validate(),
            Parameters::Spin(p) => p.validate(),
            Parameters::Compton(p) => p.validate(),
            Parameters::Packet(p) => p.validate(),
            Parameters::Xsec(p) => p.validate(),
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, AppError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_json(&text).map_err(|e| match e {
        AppError::Config(msg) => AppError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Replaces fields of `defaults` by the user's values, rejecting unknown keys.
fn overlay<T: Serialize + DeserializeOwned>(defaults: T, user: Map<String, Value>) -> Result<T, AppError> {
    let Value::Object(mut base) = serde_json::to_value(defaults).expect("parameter structs serialize to objects")
    else {
        unreachable!("parameter structs serialize to objects")
    };
    for (key, value) in user {
        if !base.contains_key(&key) {
            return Err(AppError::Config(format!("parameters.{key}: unknown key \"{key}\"")));
        }
        base.insert(key, value);
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| AppError::Config(format!("parameters: {e}")))
}

fn invalid<T>(field: &str, why: &str) -> Result<T, AppError> {
    Err(AppError::Config(format!("parameters.{field}: {why}")))
}

fn positive(field: &str, v: f64) -> Result<(), AppError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        invalid(field, &format!("must be positive, got {v}"))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), AppError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        invalid(field, &format!("must be >= 0, got {v}"))
    }
}
