//! Plain (P2) greymap rendering of detector snapshots.

use semiwave_core::detector::{ScreenWindow, Snapshot};

use crate::AppError;

const MAX_PIXELS: u64 = 1 << 28;
/// Values per text line; keeps lines under the 70 characters PGM readers expect.
const PER_LINE: usize = 17;

/// White screen with one black pixel per excited atom.
///
/// The image is `ceil(Lz scale)` wide and `ceil(Ly scale)` tall, with `z`
/// increasing to the right and `y` increasing upward. An atom lands in the
/// pixel whose cell contains it; atoms sharing a pixel leave one black pixel.
pub fn render_pgm(snapshot: &Snapshot, window: &ScreenWindow, scale: f64) -> Result<Vec<u8>, AppError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(AppError::Config(format!(
            "render_pgm: scale must be positive, got {scale}"
        )));
    }
    if !(window.area() > 0.0) {
        return Err(AppError::Config("render_pgm: window has zero area".into()));
    }
    let width = (window.lz() * scale).ceil() as usize;
    let height = (window.ly() * scale).ceil() as usize;
    if (width as u64) * (height as u64) > MAX_PIXELS {
        return Err(AppError::Config(format!(
            "render_pgm: {width}x{height} image is too large"
        )));
    }
    let mut pixels = vec![255u8; width * height];
    for &(z, y) in &snapshot.excited_positions {
        if !window.contains(z, y) {
            continue;
        }
        let col = (((z - window.z_min) * scale) as usize).min(width - 1);
        let row = (((window.y_max - y) * scale) as usize).min(height - 1);
        pixels[row * width + col] = 0;
    }

    let mut out = format!("P2\n{width} {height}\n255\n").into_bytes();
    for row in pixels.chunks(width) {
        for line in row.chunks(PER_LINE) {
            let text: Vec<String> = line.iter().map(u8::to_string).collect();
            out.extend_from_slice(text.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    Ok(out)
}
