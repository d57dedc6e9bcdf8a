//! Executes a [`RunConfig`], writing artifacts and `report.json`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use semiwave_core::analysis::{self, FitSummary, Histogram};
use semiwave_core::compton::{self, ComptonInput};
use semiwave_core::detector::{
    generate_screen, Exposure, ExposureMode, ExposureSchedule, Population, ScreenWindow, Snapshot,
};
use semiwave_core::fields::{FieldKind, FringeGeometry, IntensityField};
use semiwave_core::matterwave::{self, PlaneWaveState};
use semiwave_core::physconst::{self, PhysicalConstants};
use semiwave_core::rng::{CounterRng, Domain};
use semiwave_core::spinor::{self, Boundary, Spinor2, SpinorGrid};
use semiwave_core::wavepacket::{self, Axis, PacketShape};
use semiwave_core::{rates, Complex64, Vec3};

use crate::config::{
    ComptonParams, DetectorParams, MatterwaveParams, PacketParams, Parameters, RunConfig, SpinParams, XsecParams,
};
use crate::error::InModule;
use crate::io::{self, CsvOut};
use crate::pgm::render_pgm;
use crate::AppError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "SEMIWAVE_OUT";
pub const DEFAULT_OUT: &str = "semiwave-out";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the config's `output_dir`.
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    /// Value of [`OUT_ENV`] seen by the caller.
    pub env_out: Option<String>,
}

impl RunOptions {
    pub fn resolve_out_dir(&self, config: &RunConfig) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| config.output_dir.clone())
            .or_else(|| self.env_out.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

/// Runs the experiment and returns the report that was written.
pub fn run(config: &RunConfig, opts: &RunOptions) -> Result<Value, AppError> {
    config.validate()?;
    let started = Instant::now();
    let out = opts.resolve_out_dir(config);
    std::fs::create_dir_all(&out).map_err(|e| AppError::output(&out, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| AppError::Config(format!("cannot start {:?} worker threads: {e}", opts.threads)))?;
    let threads = pool.current_num_threads();

    let consts = PhysicalConstants::codata();
    let mut files = Vec::new();
    let results = pool.install(|| match &config.parameters {
        Parameters::Detector(p) => detector(p, config.seed, &out, &mut files),
        Parameters::Matterwave(p) => matterwave_sweep(&consts, p, &out, &mut files),
        Parameters::Spin(p) => spin_check(&consts, p, config.seed, &out, &mut files),
        Parameters::Compton(p) => compton_sweep(&consts, p, &out, &mut files),
        Parameters::Packet(p) => packet_widths(&consts, p, &out, &mut files),
        Parameters::Xsec(p) => xsec(p, &out, &mut files),
    })?;

    let report = json!({
        "experiment": config.experiment.name(),
        "seed": config.seed,
        "config": config,
        "version": env!("CARGO_PKG_VERSION"),
        "constants": {
            "source": physconst::CODATA_VERSION,
            "hbar": consts.hbar(),
            "c": consts.c(),
            "e": consts.e_charge(),
            "omega_e": consts.omega_e(),
            "m_e": consts.m_e(),
            "compton_wavelength": consts.compton_wavelength(),
        },
        "output_dir": out,
        "environment": { OUT_ENV: opts.env_out },
        "threads": threads,
        "files": files,
        "results": results,
        "wall_clock_s": started.elapsed().as_secs_f64(),
    });
    let path = out.join("report.json");
    let text = serde_json::to_string_pretty(&report).expect("report is plain JSON");
    std::fs::write(&path, text + "\n").map_err(|e| AppError::output(&path, e))?;
    Ok(report)
}

fn fit_json(fit: Result<FitSummary, semiwave_core::Error>) -> Value {
    match fit {
        Ok(f) => json!({
            "rmse": f.rmse,
            "chi_square": f.chi_square,
            "dof": f.dof,
            "reduced_chi_square": f.reduced_chi_square(),
        }),
        Err(e) => json!({ "undefined": e.to_string() }),
    }
}

fn build_field(p: &DetectorParams, window: &ScreenWindow) -> Result<IntensityField, AppError> {
    match &p.field_csv {
        Some(path) => {
            let table = io::read_intensity_table(path)?;
            IntensityField::new(FieldKind::Tabulated(table), window.z_min, window.z_max).in_module("fields")
        }
        None => {
            let geom = FringeGeometry::new(p.c1, p.r).in_module("fields")?;
            IntensityField::double_slit(geom, window.z_min, window.z_max).in_module("fields")
        }
    }
}

struct Realization {
    atoms: usize,
    snapshots: Vec<Snapshot>,
    expected: Vec<f64>,
    histograms: Vec<Histogram>,
}

fn expose_one(
    p: &DetectorParams,
    field: &IntensityField,
    window: ScreenWindow,
    schedule: &ExposureSchedule,
    mode: ExposureMode,
    seed: u64,
) -> Result<Realization, AppError> {
    let population = p.atom_count.map_or(Population::Density(p.density), Population::Count);
    let screen = generate_screen(window, population, seed).in_module("detector")?;
    let exposure = Exposure::new(&screen, field, schedule, mode).in_module("detector")?;
    let times: Vec<Option<f64>> = (0..exposure.atom_count())
        .into_par_iter()
        .map(|i| exposure.atom_time(i))
        .collect();
    let snapshots = exposure.snapshots(&times);
    let expected = schedule
        .taus()
        .iter()
        .map(|&tau| analysis::expected_count(field, &screen, tau))
        .collect::<Result<Vec<_>, _>>()
        .in_module("analysis")?;
    let histograms = snapshots
        .iter()
        .map(|s| analysis::histogram(s, (window.z_min, window.z_max), p.bins))
        .collect::<Result<Vec<_>, _>>()
        .in_module("analysis")?;
    Ok(Realization {
        atoms: screen.len(),
        snapshots,
        expected,
        histograms,
    })
}

/// Screen exposures: PGM and snapshot CSV for the first realization,
/// count ladder and averaged histograms over all of them.
fn detector(p: &DetectorParams, seed: u64, out: &Path, files: &mut Vec<String>) -> Result<Value, AppError> {
    let window = ScreenWindow::centered(p.lz, p.ly).in_module("detector")?;
    let field = build_field(p, &window)?;
    let schedule = ExposureSchedule::new(p.exposures.clone()).in_module("detector")?;
    let mode = ExposureMode::from_name(&p.mode, p.dtau).in_module("detector")?;

    let runs = (0..p.realizations as u64)
        .map(|r| expose_one(p, &field, window, &schedule, mode, seed.wrapping_add(r)))
        .collect::<Result<Vec<_>, _>>()?;
    let first = &runs[0];

    let mut snap_csv = CsvOut::create(&out.join("snapshots.csv"), &["tau", "z", "y"])?;
    for (k, snap) in first.snapshots.iter().enumerate() {
        for &(z, y) in &snap.excited_positions {
            snap_csv.floats(&[snap.tau, z, y])?;
        }
        let name = format!("snapshot_{k:02}.pgm");
        let bytes = render_pgm(snap, &window, p.pixels_per_unit)?;
        let path = out.join(&name);
        std::fs::write(&path, bytes).map_err(|e| AppError::output(&path, e))?;
        files.push(name);
    }
    snap_csv.finish()?;
    files.push("snapshots.csv".into());

    let n_runs = runs.len() as f64;
    let mut ladder = CsvOut::create(&out.join("buildup.csv"), &["tau", "observed_count", "expected_count"])?;
    let mut summaries = Vec::new();
    for (k, &tau) in schedule.taus().iter().enumerate() {
        let counts: Vec<usize> = runs.iter().map(|r| r.snapshots[k].count()).collect();
        let observed = counts.iter().sum::<usize>() as f64 / n_runs;
        let expected = runs.iter().map(|r| r.expected[k]).sum::<f64>() / n_runs;
        ladder.floats(&[tau, observed, expected])?;

        let hists: Vec<Histogram> = runs.iter().map(|r| r.histograms[k].clone()).collect();
        let avg = analysis::average_histograms(&hists).in_module("analysis")?;
        let centers = avg.centers();
        let theory = analysis::theoretical_curve(&field, tau, &centers).in_module("analysis")?;
        let born = analysis::theoretical_curve(&field, 0.0, &centers).in_module("analysis")?;
        let name = format!("histogram_{k:02}.csv");
        let mut hist_csv = CsvOut::create(
            &out.join(&name),
            &["bin_center", "count", "normalized", "theory_tau", "theory_born"],
        )?;
        for b in 0..avg.bins() {
            hist_csv.row([
                io::sci(centers[b]),
                avg.counts[b].to_string(),
                io::sci(avg.normalized[b]),
                io::sci(theory[b]),
                io::sci(born[b]),
            ])?;
        }
        hist_csv.finish()?;
        files.push(name);

        let gap = theory.iter().zip(&born).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        summaries.push(json!({
            "tau": tau,
            "counts": counts,
            "mean_count": observed,
            "expected_count": expected,
            "fit_tau": fit_json(analysis::goodness_of_fit(&avg, &theory)),
            "fit_born": fit_json(analysis::goodness_of_fit(&avg, &born)),
            "max_curve_gap": gap,
        }));
    }
    ladder.finish()?;
    files.push("buildup.csv".into());

    Ok(json!({
        "atoms_per_realization": runs.iter().map(|r| r.atoms).collect::<Vec<_>>(),
        "realizations": p.realizations,
        "mode": mode.name(),
        "window": { "z_min": window.z_min, "z_max": window.z_max, "y_min": window.y_min, "y_max": window.y_max },
        "snapshots": summaries,
    }))
}

fn matterwave_sweep(
    consts: &PhysicalConstants,
    p: &MatterwaveParams,
    out: &Path,
    files: &mut Vec<String>,
) -> Result<Value, AppError> {
    let header = [
        "ck_over_omega_e",
        "omega_over_omega_e",
        "rho_over_e",
        "W_over_hbar_omega_e",
    ];
    let mut csv = CsvOut::create(&out.join("matterwave.csv"), &header)?;
    let omega_e = consts.omega_e();
    let (lo, hi) = (p.ck_min.ln(), p.ck_max.ln());
    let mut worst_shell: f64 = 0.0;
    for i in 0..p.points {
        let ck = (lo + (hi - lo) * i as f64 / (p.points - 1) as f64).exp();
        let k = Vec3::X * (ck * omega_e / consts.c());
        let state = PlaneWaveState::electron(consts, Complex64::new(p.amplitude, 0.0), k).in_module("matterwave")?;
        let d = matterwave::plane_wave_densities(consts, &state);
        let volume = matterwave::unit_portion_volume(&state).in_module("matterwave")?;
        let portion = matterwave::portion(consts, &state, volume).in_module("matterwave")?;
        worst_shell = worst_shell.max(portion.mass_shell_residual(consts).abs());
        csv.floats(&[
            ck,
            state.omega() / omega_e,
            d.rho / consts.e_charge(),
            d.w / (consts.hbar() * omega_e),
        ])?;
    }
    csv.finish()?;
    files.push("matterwave.csv".into());
    Ok(json!({ "points": p.points, "max_mass_shell_residual": worst_shell }))
}

/// Spin helix `exp(i k x) (cos(q z / 2), sin(q z / 2))`, periodic on the grid.
fn helix_grid(p: &SpinParams) -> Result<SpinorGrid, AppError> {
    let n = p.grid_points;
    let length = n as f64 * p.spacing;
    let k = 2.0 * PI / length;
    let q = 4.0 * PI / length;
    SpinorGrid::from_fn([n; 3], [p.spacing; 3], |r| {
        let phase = Complex64::from_polar(1.0, k * r.x);
        let half = 0.5 * q * r.z;
        Spinor2::new(phase * half.cos(), phase * half.sin())
    })
    .in_module("spinor")
}

fn spin_check(
    consts: &PhysicalConstants,
    p: &SpinParams,
    seed: u64,
    out: &Path,
    files: &mut Vec<String>,
) -> Result<Value, AppError> {
    let rng = CounterRng::new(seed);
    let hbar = consts.hbar();
    let gamma = consts.spin_gyromagnetic_ratio();
    let (mut length_dev, mut moment_dev): (f64, f64) = (0.0, 0.0);
    for i in 0..p.samples as u64 {
        let mut s = rng.stream(Domain::Spinor, i);
        let chi = Spinor2::new(
            Complex64::new(s.normal(), s.normal()),
            Complex64::new(s.normal(), s.normal()),
        );
        let d = spinor::pointwise_densities(consts, &chi).in_module("spinor")?;
        length_dev = length_dev.max((d.spin_vector.norm() - 0.5 * hbar).abs() / hbar);
        let expect = d.s * gamma;
        for (m, e) in d.m.to_array().into_iter().zip(expect.to_array()) {
            if e != 0.0 {
                moment_dev = moment_dev.max(((m - e) / e).abs());
            }
        }
    }

    let grid = match &p.grid_csv {
        Some(path) => io::read_spinor_grid(path, [p.spacing; 3])?,
        None => helix_grid(p)?,
    };
    let boundary = match p.boundary.as_str() {
        "one_sided" => Boundary::OneSided,
        _ => Boundary::Periodic,
    };
    let currents = spinor::current_on_grid(consts, &grid, boundary).in_module("spinor")?;
    io::write_spinor_grid(&out.join("spinor_grid.csv"), &grid)?;
    for (name, field) in [
        ("current_total.csv", &currents.total),
        ("current_convective.csv", &currents.convective),
        ("current_spin.csv", &currents.spin),
    ] {
        io::write_vector_field(&out.join(name), &grid, field)?;
        files.push(name.into());
    }
    files.push("spinor_grid.csv".into());
    let peak = |f: &[Vec3]| f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(json!({
        "samples": p.samples,
        "max_spin_length_deviation_over_hbar": length_dev,
        "max_moment_relative_deviation": moment_dev,
        "grid_dims": grid.dims(),
        "boundary": p.boundary,
        "max_current_total": peak(&currents.total),
        "max_current_convective": peak(&currents.convective),
        "max_current_spin": peak(&currents.spin),
    }))
}

fn compton_sweep(
    consts: &PhysicalConstants,
    p: &ComptonParams,
    out: &Path,
    files: &mut Vec<String>,
) -> Result<Value, AppError> {
    let header = ["theta_rad", "omega_over_omega0", "delta_lambda_m", "energy_residual"];
    let mut csv = CsvOut::create(&out.join("compton.csv"), &header)?;
    let omega0 = p.hbar_omega0_over_mc2 * consts.omega_e();
    let mc = consts.m_e() * consts.c();
    let p0 = Vec3::from(p.p0_over_mc) * mc;
    let lambda = |omega: f64| 2.0 * PI * consts.c() / omega;
    let (mut worst_energy, mut worst_momentum): (f64, f64) = (0.0, 0.0);
    for i in 0..p.theta_points {
        let theta = PI * i as f64 / (p.theta_points - 1) as f64;
        let n = Vec3::new(theta.sin(), 0.0, theta.cos());
        let input = ComptonInput::new(omega0, Vec3::Z, p0, n).in_module("compton")?;
        let r = compton::solve(consts, &input).in_module("compton")?;
        worst_energy = worst_energy.max(r.energy_residual);
        worst_momentum = worst_momentum.max(r.momentum_residual);
        csv.floats(&[
            theta,
            r.omega / omega0,
            lambda(r.omega) - lambda(omega0),
            r.energy_residual,
        ])?;
    }
    csv.finish()?;
    files.push("compton.csv".into());
    Ok(json!({
        "points": p.theta_points,
        "max_energy_residual": worst_energy,
        "max_momentum_residual": worst_momentum,
    }))
}

fn packet_widths(
    consts: &PhysicalConstants,
    p: &PacketParams,
    out: &Path,
    files: &mut Vec<String>,
) -> Result<Value, AppError> {
    let axis = if p.axis == "time" { Axis::Time } else { Axis::Space };
    let shapes: Vec<(f64, PacketShape)> = match p.shape.as_str() {
        "tabulated" => {
            let path = p.tabulated_csv.as_ref().expect("validated");
            vec![(0.0, PacketShape::Tabulated(io::read_packet_samples(path)?))]
        }
        "hann" => p
            .values
            .iter()
            .map(|&w| (w, PacketShape::Hann { width: w, k_c: p.k_c }))
            .collect(),
        _ => p
            .values
            .iter()
            .map(|&s| (s, PacketShape::Gaussian { sigma: s, k_c: p.k_c }))
            .collect(),
    };
    let mut csv = CsvOut::create(
        &out.join("packet.csv"),
        &["param", "delta_x", "delta_k", "product", "eps_grid"],
    )?;
    let mut rows = Vec::new();
    for (param, shape) in shapes {
        let packet = wavepacket::build_packet(&shape, p.n, p.extent, axis).in_module("wavepacket")?;
        let w = match axis {
            Axis::Space => wavepacket::rms_widths(&packet),
            Axis::Time => wavepacket::time_frequency_widths(&packet),
        }
        .in_module("wavepacket")?;
        csv.floats(&[param, w.delta, w.delta_conjugate, w.product, w.eps_grid])?;
        rows.push(json!({
            "param": param,
            "product": w.product,
            "hbar_product": w.momentum_product(consts.hbar()),
            "centroid_conjugate": w.centroid_conjugate,
            "parseval_residual": w.parseval_residual,
        }));
    }
    csv.finish()?;
    files.push("packet.csv".into());
    Ok(json!({ "axis": p.axis, "rows": rows }))
}

fn xsec(p: &XsecParams, out: &Path, files: &mut Vec<String>) -> Result<Value, AppError> {
    let mut csv = CsvOut::create(&out.join("xsec.csv"), &["v_sq", "sigma2", "rate_coefficient"])?;
    let mut peak = (0.0, 0.0);
    for i in 0..p.points {
        let v_sq = p.v_sq_min + (p.v_sq_max - p.v_sq_min) * i as f64 / (p.points - 1) as f64;
        let v = v_sq.sqrt();
        let sigma = rates::hydrogen_excitation_cross_section(v).in_module("rates")?;
        let b = rates::rate_coefficient(sigma, v, p.detector_atoms).in_module("rates")?;
        if sigma > peak.1 {
            peak = (v_sq, sigma);
        }
        csv.floats(&[v_sq, sigma, b])?;
    }
    csv.finish()?;
    files.push("xsec.csv".into());
    Ok(json!({
        "points": p.points,
        "sigma2_at_v_sq_1": rates::hydrogen_excitation_cross_section(1.0).in_module("rates")?,
        "peak_v_sq": peak.0,
        "peak_sigma2": peak.1,
    }))
}
