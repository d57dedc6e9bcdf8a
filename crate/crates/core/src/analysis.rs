//! Histograms of excited atoms and their comparison with theory.

use alloc::format;
use alloc::vec::Vec;

use crate::detector::{AtomScreen, Snapshot};
use crate::fields::IntensityField;
use crate::rates::detection_ratio_unchecked;
use crate::{Error, Result};

/// Default bin count over the analysis window.
pub const DEFAULT_BINS: usize = 100;
/// Bins with fewer expected events are merged before the chi-square sum.
pub const MIN_EXPECTED: f64 = 5.0;

/// Counts of excited atoms binned along `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Counts scaled so that the fullest bin is 1.
    pub normalized: Vec<f64>,
    /// Points that fell outside the window.
    pub dropped: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

fn normalize_by_max(values: &mut [f64]) {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        values.iter_mut().for_each(|v| *v /= max);
    }
}

/// Bins the snapshot by `z`; bins are `[e_k, e_{k+1})` except the last,
/// which is closed.
pub fn histogram(snapshot: &Snapshot, window: (f64, f64), bins: usize) -> Result<Histogram> {
    histogram_of(snapshot.excited_positions.iter().map(|&(z, _)| z), window, bins)
}

/// Bins arbitrary coordinates the same way as [`histogram`].
pub fn histogram_of(zs: impl IntoIterator<Item = f64>, window: (f64, f64), bins: usize) -> Result<Histogram> {
    const OP: &str = "histogram";
    let (lo, hi) = window;
    if bins == 0 {
        return Err(Error::config(OP, "bins must be >= 1"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::config(OP, format!("empty window [{lo}, {hi}]")));
    }
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins)
        .map(|k| if k == bins { hi } else { lo + k as f64 * width })
        .collect();
    let mut counts = alloc::vec![0u64; bins];
    let mut dropped = 0;
    for z in zs {
        if !(z >= lo && z <= hi) {
            dropped += 1;
            continue;
        }
        let mut k = (((z - lo) / width) as usize).min(bins - 1);
        // settle rounding at the edges against the stored edge values
        while k > 0 && z < bin_edges[k] {
            k -= 1;
        }
        while k + 1 < bins && z >= bin_edges[k + 1] {
            k += 1;
        }
        counts[k] += 1;
    }
    let mut normalized: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    normalize_by_max(&mut normalized);
    Ok(Histogram {
        bin_edges,
        counts,
        normalized,
        dropped,
    })
}

/// Combines realizations: counts are summed, normalized profiles are averaged
/// bin-wise and then renormalized to a maximum of 1.
pub fn average_histograms(hists: &[Histogram]) -> Result<Histogram> {
    const OP: &str = "average_histograms";
    let first = hists
        .first()
        .ok_or_else(|| Error::config(OP, "no histograms to average"))?;
    if hists.iter().any(|h| h.bin_edges != first.bin_edges) {
        return Err(Error::config(OP, "histograms have different bin edges"));
    }
    let bins = first.bins();
    let mut counts = alloc::vec![0u64; bins];
    let mut normalized = alloc::vec![0.0; bins];
    for h in hists {
        for k in 0..bins {
            counts[k] += h.counts[k];
            normalized[k] += h.normalized[k];
        }
    }
    normalize_by_max(&mut normalized);
    Ok(Histogram {
        bin_edges: first.bin_edges.clone(),
        counts,
        normalized,
        dropped: hists.iter().map(|h| h.dropped).sum(),
    })
}

/// Generalized detection curve `p/p(0)` on `z_grid`; at `tau = 0` this is
/// the relative intensity itself.
pub fn theoretical_curve(field: &IntensityField, tau: f64, z_grid: &[f64]) -> Result<Vec<f64>> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::domain(
            "theoretical_curve",
            format!("tau must be >= 0, got {tau}"),
        ));
    }
    z_grid
        .iter()
        .map(|&z| {
            let rel = field.rel_intensity(z)?;
            Ok(if tau == 0.0 {
                rel
            } else {
                detection_ratio_unchecked(rel, tau)
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitSummary {
    pub rmse: f64,
    pub chi_square: f64,
    pub dof: usize,
}

impl FitSummary {
    pub fn reduced_chi_square(&self) -> f64 {
        if self.dof == 0 {
            f64::NAN
        } else {
            self.chi_square / self.dof as f64
        }
    }
}

/// Compares a histogram with a curve sampled at its bin centres.
///
/// `rmse` is taken between the normalized histogram and the raw curve.
/// Expected counts for the Pearson statistic scale the curve to the
/// histogram total; runs of bins expecting fewer than [`MIN_EXPECTED`]
/// events are merged with their right neighbours (a trailing remainder joins
/// the last group). `dof` is the number of groups minus one.
pub fn goodness_of_fit(hist: &Histogram, curve: &[f64]) -> Result<FitSummary> {
    const OP: &str = "goodness_of_fit";
    if curve.len() != hist.bins() {
        return Err(Error::config(
            OP,
            format!("curve has {} values for {} bins", curve.len(), hist.bins()),
        ));
    }
    let total = hist.total();
    if total == 0 {
        return Err(Error::UndefinedFit {
            op: OP,
            detail: "histogram is empty".into(),
        });
    }
    let curve_sum: f64 = curve.iter().sum();
    if !(curve_sum > 0.0) {
        return Err(Error::UndefinedFit {
            op: OP,
            detail: "curve has no weight".into(),
        });
    }

    let rmse = libm::sqrt(
        hist.normalized
            .iter()
            .zip(curve)
            .map(|(h, c)| (h - c) * (h - c))
            .sum::<f64>()
            / curve.len() as f64,
    );

    let scale = total as f64 / curve_sum;
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &v) in hist.counts.iter().zip(curve) {
        obs += c as f64;
        exp += v * scale;
        if exp >= MIN_EXPECTED {
            groups.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match groups.last_mut() {
            Some(g) => {
                g.0 += obs;
                g.1 += exp;
            }
            None => groups.push((obs, exp)),
        }
    }
    let chi_square = groups.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    Ok(FitSummary {
        rmse,
        chi_square,
        dof: groups.len().saturating_sub(1),
    })
}

/// Expected number of excited atoms, `sum_i 1 - exp(-rel(z_i) tau)`.
pub fn expected_count(field: &IntensityField, screen: &AtomScreen, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::domain("expected_count", format!("tau must be >= 0, got {tau}")));
    }
    let mut sum = 0.0;
    for &(z, _) in screen.positions() {
        sum += -libm::expm1(-field.rel_intensity(z)? * tau);
    }
    Ok(sum)
}

/// Mean of `1 - exp(-rel(z) tau)` over `[-half_width, half_width]`,
/// by composite Simpson quadrature with at most `step` between nodes.
pub fn window_mean_excitation(field: &IntensityField, tau: f64, half_width: f64, step: f64) -> Result<f64> {
    if !(half_width > 0.0 && step > 0.0) {
        return Err(Error::config(
            "window_mean_excitation",
            "half width and step must be positive",
        ));
    }
    let mut n = libm::ceil(2.0 * half_width / step) as usize;
    n += n % 2;
    let h = 2.0 * half_width / n as f64;
    let f = |k: usize| -> Result<f64> {
        let z = -half_width + k as f64 * h;
        Ok(-libm::expm1(-field.rel_intensity(z)? * tau))
    };
    let mut acc = f(0)? + f(n)?;
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k)?;
    }
    Ok(acc * h / 3.0 / (2.0 * half_width))
}

/// Screen size that reproduces two observed counts at two exposures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderCalibration {
    pub half_width: f64,
    /// Atom count on the `2 half_width x height` screen at unit density.
    pub atom_count: f64,
    pub height: f64,
}

/// Finds the half-width `W` of a centred window such that the ratio of mean
/// excitation probabilities at `tau_b` and `tau_a` equals `count_b/count_a`,
/// then the atom count that makes the expected count at `tau_a` equal
/// `count_a`. Bisection on `W` within `bracket`.
pub fn calibrate_ladder(
    field: &IntensityField,
    (tau_a, count_a): (f64, f64),
    (tau_b, count_b): (f64, f64),
    bracket: (f64, f64),
) -> Result<LadderCalibration> {
    const OP: &str = "calibrate_ladder";
    const STEP: f64 = 0.05;
    if !(tau_b > tau_a && tau_a > 0.0 && count_a > 0.0 && count_b > count_a) {
        return Err(Error::config(OP, "need 0 < tau_a < tau_b and 0 < count_a < count_b"));
    }
    let target = count_b / count_a;
    let residual = |w: f64| -> Result<f64> {
        let a = window_mean_excitation(field, tau_a, w, STEP)?;
        let b = window_mean_excitation(field, tau_b, w, STEP)?;
        Ok(b / a - target)
    };
    let (mut lo, mut hi) = bracket;
    let (mut r_lo, r_hi) = (residual(lo)?, residual(hi)?);
    if r_lo * r_hi > 0.0 {
        return Err(Error::Domain {
            op: OP,
            detail: format!("count ratio {target} not bracketed by half widths [{lo}, {hi}]"),
        });
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let r_mid = residual(mid)?;
        if r_mid * r_lo <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            r_lo = r_mid;
        }
        if hi - lo < 1e-9 * hi {
            break;
        }
    }
    let half_width = 0.5 * (lo + hi);
    let atom_count = count_a / window_mean_excitation(field, tau_a, half_width, STEP)?;
    Ok(LadderCalibration {
        half_width,
        atom_count,
        height: atom_count / (2.0 * half_width),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{generate_screen, Population, ScreenWindow};
    use crate::fields::FringeGeometry;
    use crate::rng::{CounterRng, Domain};
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn snap(points: Vec<(f64, f64)>) -> Snapshot {
        Snapshot {
            tau: 1.0,
            excited_positions: points,
        }
    }

    fn screen_field() -> IntensityField {
        IntensityField::double_slit(FringeGeometry::new(0.03, 5.0).unwrap(), -400.0, 400.0).unwrap()
    }

    #[test]
    fn empty_and_single() {
        let h = histogram(&snap(vec![]), (-1.0, 1.0), 10).unwrap();
        assert!(h.counts.iter().all(|&c| c == 0));
        assert!(h.normalized.iter().all(|&v| v == 0.0));
        let h = histogram(&snap(vec![(0.05, 3.0)]), (-1.0, 1.0), 10).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c == 1).count(), 1);
        assert_eq!(h.counts[5], 1);
        assert_eq!(h.total(), 1);
    }

    #[test]
    fn bin_edges_half_open() {
        let h = histogram_of([0.0, 0.1, 0.2, 1.0, 1.5, -0.1], (0.0, 1.0), 10).unwrap();
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[1], 1);
        assert_eq!(h.counts[2], 1);
        assert_eq!(h.counts[9], 1);
        assert_eq!(h.dropped, 2);
        assert!(histogram_of([], (0.0, 1.0), 0).is_err());
        assert!(histogram_of([], (1.0, 1.0), 3).is_err());
    }

    #[test]
    fn uniform_points_fill_bins() {
        let rng = CounterRng::new(5);
        let mut s = rng.stream(Domain::Auxiliary, 0);
        let zs: Vec<f64> = (0..100_000).map(|_| s.uniform()).collect();
        let h = histogram_of(zs, (0.0, 1.0), 10).unwrap();
        let sigma = libm::sqrt(1e5 * 0.1 * 0.9);
        for &c in &h.counts {
            assert!((c as f64 - 1e4).abs() < 3.0 * sigma, "{c}");
        }
    }

    #[test]
    fn perfect_fit() {
        let curve = vec![0.2, 0.5, 1.0, 0.5, 0.2];
        let counts: Vec<u64> = curve.iter().map(|c| (c * 100.0) as u64).collect();
        let mut normalized: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        normalize_by_max(&mut normalized);
        let h = Histogram {
            bin_edges: (0..=5).map(|k| k as f64).collect(),
            counts,
            normalized,
            dropped: 0,
        };
        let fit = goodness_of_fit(&h, &curve).unwrap();
        assert_abs_diff_eq!(fit.rmse, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fit.chi_square, 0.0, epsilon = 1e-12);
        assert_eq!(fit.dof, 4);
    }

    #[test]
    fn constant_offset_rmse() {
        let h = Histogram {
            bin_edges: (0..=4).map(|k| k as f64).collect(),
            counts: vec![8; 4],
            normalized: vec![0.8; 4],
            dropped: 0,
        };
        let fit = goodness_of_fit(&h, &[1.0; 4]).unwrap();
        assert_abs_diff_eq!(fit.rmse, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn sparse_bins_are_merged() {
        let h = Histogram {
            bin_edges: (0..=4).map(|k| k as f64).collect(),
            counts: vec![1, 2, 3, 4],
            normalized: vec![0.25, 0.5, 0.75, 1.0],
            dropped: 0,
        };
        // total 10 -> expected 2.5 per bin -> two groups of 5
        let fit = goodness_of_fit(&h, &[1.0; 4]).unwrap();
        assert_eq!(fit.dof, 1);
        assert_abs_diff_eq!(fit.chi_square, 2.0 * 4.0 / 5.0, epsilon = 1e-12);
    }

    #[test]
    fn fit_errors() {
        let h = histogram(&snap(vec![]), (0.0, 1.0), 3).unwrap();
        assert!(matches!(
            goodness_of_fit(&h, &[1.0; 3]),
            Err(Error::UndefinedFit { .. })
        ));
        let h = histogram(&snap(vec![(0.5, 0.0)]), (0.0, 1.0), 3).unwrap();
        assert!(goodness_of_fit(&h, &[1.0; 2]).is_err());
        assert!(matches!(
            goodness_of_fit(&h, &[0.0; 3]),
            Err(Error::UndefinedFit { .. })
        ));
    }

    #[test]
    fn theory_curves() {
        let field = screen_field();
        let grid: Vec<f64> = (-50..=50).map(|k| k as f64 * 3.0).collect();
        let born = theoretical_curve(&field, 0.0, &grid).unwrap();
        for (z, b) in grid.iter().zip(&born) {
            assert_eq!(*b, field.rel_intensity(*z).unwrap());
        }
        let at0 = theoretical_curve(&field, 7.0, &[0.0]).unwrap();
        assert_abs_diff_eq!(at0[0], 1.0, epsilon = 1e-15);
        let half = IntensityField::tabulated(
            crate::fields::IntensityTable::new(vec![(0.0, 0.5), (1.0, 0.5), (2.0, 1.0)]).unwrap(),
        )
        .unwrap();
        let v = theoretical_curve(&half, 5.0, &[0.5]).unwrap();
        assert_abs_diff_eq!(v[0], 0.924_141_819_978_756_4, epsilon = 1e-12);
        assert!(theoretical_curve(&field, -1.0, &grid).is_err());
    }

    #[test]
    fn born_proximity_and_visible_deviation() {
        let field = screen_field();
        let grid: Vec<f64> = (0..=6000).map(|k| -150.0 + k as f64 * 0.05).collect();
        let born = theoretical_curve(&field, 0.0, &grid).unwrap();
        let small = theoretical_curve(&field, 0.1, &grid).unwrap();
        let gap_small = born.iter().zip(&small).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap_small <= 0.1);
        let mid = theoretical_curve(&field, 1.5, &grid).unwrap();
        let gap = born.iter().zip(&mid).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        // closed-form maximum over rel in [0, 1] at tau = 1.5 is 0.18192
        assert!(gap > 0.1 && gap <= 0.181_918_538_766_456, "gap {gap}");
    }

    #[test]
    fn expected_counts() {
        let w = ScreenWindow::centered(100.0, 100.0).unwrap();
        let screen = generate_screen(w, Population::Density(1.0), 1).unwrap();
        let uniform = IntensityField::uniform(-50.0, 50.0).unwrap();
        assert_eq!(expected_count(&uniform, &screen, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            expected_count(&uniform, &screen, 1.0).unwrap(),
            6_321.205_588_285_577,
            epsilon = 1e-7
        );
        let field = screen_field();
        let mut prev = 0.0;
        for tau in [0.0, 0.02, 0.1, 1.0, 10.0, 30.0] {
            let e = expected_count(&field, &screen, tau).unwrap();
            assert!(e >= prev);
            prev = e;
        }
    }

    #[test]
    fn simpson_window_mean() {
        let uniform = IntensityField::uniform(-10.0, 10.0).unwrap();
        let m = window_mean_excitation(&uniform, 1.0, 10.0, 0.1).unwrap();
        assert_abs_diff_eq!(m, 1.0 - libm::exp(-1.0), epsilon = 1e-15);
    }

    #[test]
    fn averaging() {
        let a = histogram_of([0.1, 0.1, 0.6], (0.0, 1.0), 2).unwrap();
        let b = histogram_of([0.6, 0.6, 0.6, 0.1], (0.0, 1.0), 2).unwrap();
        let avg = average_histograms(&[a, b]).unwrap();
        assert_eq!(avg.counts, vec![3, 4]);
        // mean of (1, 0.5) and (1/3, 1) = (2/3, 3/4), renormalized
        assert_abs_diff_eq!(avg.normalized[0], (2.0 / 3.0) / 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(avg.normalized[1], 1.0);
        assert!(average_histograms(&[]).is_err());
    }
}
