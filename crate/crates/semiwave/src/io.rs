//! CSV input and output.
//!
//! Every file has a header row, comma separators and LF line endings.
//! Floating-point values are written with nine significant digits in
//! scientific notation so that reruns are byte-comparable.

use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use semiwave_core::fields::IntensityTable;
use semiwave_core::spinor::{Spinor2, SpinorGrid};
use semiwave_core::{Complex64, Vec3};

use crate::error::InModule;
use crate::AppError;

/// Nine significant digits, scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

pub struct CsvOut {
    writer: csv::Writer<File>,
    path: std::path::PathBuf,
}

impl CsvOut {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self, AppError> {
        let writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)
            .map_err(|e| AppError::output(path, e))?;
        let mut out = CsvOut {
            writer,
            path: path.to_path_buf(),
        };
        out.row(header.iter().map(|s| s.to_string()))?;
        Ok(out)
    }

    pub fn row(&mut self, fields: impl IntoIterator<Item = String>) -> Result<(), AppError> {
        self.writer
            .write_record(fields)
            .map_err(|e| AppError::output(&self.path, e))
    }

    pub fn floats(&mut self, values: &[f64]) -> Result<(), AppError> {
        self.row(values.iter().map(|&v| sci(v)))
    }

    pub fn finish(mut self) -> Result<(), AppError> {
        self.writer.flush().map_err(|e| AppError::output(&self.path, e))
    }
}

/// Reads a CSV whose header must equal `header`, returning the raw rows.
fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>, AppError> {
    let bad = |msg: String| AppError::Config(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let found = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(bad(format!(
            "header must be `{}`, found `{}`",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    reader.records().map(|r| r.map_err(|e| bad(e.to_string()))).collect()
}

fn parse<T: FromStr>(path: &Path, record: &csv::StringRecord, column: usize, name: &str) -> Result<T, AppError> {
    let line = record.position().map_or(0, |p| p.line());
    record
        .get(column)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| AppError::Config(format!("{}: line {line}: cannot parse {name}", path.display())))
}

/// Tabulated relative intensity, columns `z,rel_intensity`.
pub fn read_intensity_table(path: &Path) -> Result<IntensityTable, AppError> {
    let rows = read_rows(path, &["z", "rel_intensity"])?;
    let points = rows
        .iter()
        .map(|r| Ok((parse(path, r, 0, "z")?, parse(path, r, 1, "rel_intensity")?)))
        .collect::<Result<Vec<(f64, f64)>, AppError>>()?;
    IntensityTable::new(points).in_module("fields")
}

pub const SPINOR_HEADER: [&str; 7] = ["ix", "iy", "iz", "re_up", "im_up", "re_down", "im_down"];
pub const VECTOR_HEADER: [&str; 6] = ["ix", "iy", "iz", "jx", "jy", "jz"];

/// Spinor grid; dimensions are taken from the largest index on each axis
/// and every cell must appear exactly once.
pub fn read_spinor_grid(path: &Path, spacing: [f64; 3]) -> Result<SpinorGrid, AppError> {
    let rows = read_rows(path, &SPINOR_HEADER)?;
    let mut cells = Vec::with_capacity(rows.len());
    for r in &rows {
        let idx: [usize; 3] = [
            parse(path, r, 0, "ix")?,
            parse(path, r, 1, "iy")?,
            parse(path, r, 2, "iz")?,
        ];
        let v: [f64; 4] = [
            parse(path, r, 3, "re_up")?,
            parse(path, r, 4, "im_up")?,
            parse(path, r, 5, "re_down")?,
            parse(path, r, 6, "im_down")?,
        ];
        cells.push((
            idx,
            Spinor2::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])),
        ));
    }
    if cells.is_empty() {
        return Err(AppError::Config(format!("{}: no grid cells", path.display())));
    }
    let mut dims = [0usize; 3];
    for (idx, _) in &cells {
        for a in 0..3 {
            dims[a] = dims[a].max(idx[a] + 1);
        }
    }
    let total = dims[0] * dims[1] * dims[2];
    if total != cells.len() {
        return Err(AppError::Config(format!(
            "{}: {} rows for a {}x{}x{} grid",
            path.display(),
            cells.len(),
            dims[0],
            dims[1],
            dims[2]
        )));
    }
    let mut samples: Vec<Option<Spinor2>> = vec![None; total];
    for (idx, chi) in cells {
        let i = idx[0] + dims[0] * (idx[1] + dims[1] * idx[2]);
        if samples[i].replace(chi).is_some() {
            return Err(AppError::Config(format!(
                "{}: cell ({}, {}, {}) listed twice",
                path.display(),
                idx[0],
                idx[1],
                idx[2]
            )));
        }
    }
    // every slot is filled: counts match and none repeated
    let samples = samples.into_iter().map(Option::unwrap).collect();
    SpinorGrid::new(dims, spacing, samples).in_module("spinor")
}

pub fn write_spinor_grid(path: &Path, grid: &SpinorGrid) -> Result<(), AppError> {
    let mut out = CsvOut::create(path, &SPINOR_HEADER)?;
    for (i, chi) in grid.samples().iter().enumerate() {
        let [ix, iy, iz] = grid.coords(i);
        let mut row = vec![ix.to_string(), iy.to_string(), iz.to_string()];
        row.extend([chi.up.re, chi.up.im, chi.down.re, chi.down.im].map(sci));
        out.row(row)?;
    }
    out.finish()
}

pub fn write_vector_field(path: &Path, grid: &SpinorGrid, field: &[Vec3]) -> Result<(), AppError> {
    let mut out = CsvOut::create(path, &VECTOR_HEADER)?;
    for (i, v) in field.iter().enumerate() {
        let [ix, iy, iz] = grid.coords(i);
        let mut row = vec![ix.to_string(), iy.to_string(), iz.to_string()];
        row.extend([v.x, v.y, v.z].map(sci));
        out.row(row)?;
    }
    out.finish()
}

/// Complex packet samples, columns `re,im`.
pub fn read_packet_samples(path: &Path) -> Result<Vec<Complex64>, AppError> {
    read_rows(path, &["re", "im"])?
        .iter()
        .map(|r| Ok(Complex64::new(parse(path, r, 0, "re")?, parse(path, r, 1, "im")?)))
        .collect()
}
