//! Spectrum unfolding and spacing statistics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Raw gaps below this are treated as exact degeneracies.
pub const DEGENERACY_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct UnfoldedSpacings {
    pub spacings: Vec<f64>,
    /// Number of degenerate (zero) spacings kept in the list; a nonzero
    /// count signals residual symmetry in the sector.
    pub zero_spacings: usize,
    /// Levels remaining after the edge trim.
    pub levels_used: usize,
    /// Set when fewer than 200 levels survive the trim.
    pub low_statistics: bool,
}

/// Unfolds a spectrum: fits the cumulative staircase with a polynomial of
/// the given degree after trimming a fraction of levels at both spectral
/// edges, and returns consecutive differences of the smoothed counting
/// function (unit mean spacing by construction).
pub fn unfold(eigenvalues: &[f64], degree: usize, trim_fraction: f64) -> Result<UnfoldedSpacings> {
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(Error::Invalid(format!("trim fraction {trim_fraction} out of [0, 0.5)")));
    }
    let mut levels = eigenvalues.to_vec();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let trim = (levels.len() as f64 * trim_fraction).floor() as usize;
    let kept = &levels[trim..levels.len() - trim];
    if kept.len() < degree + 2 {
        return Err(Error::TooFewPoints { required: degree + 2, got: kept.len() });
    }
    let xs: Vec<f64> = kept.to_vec();
    let ys: Vec<f64> = (0..kept.len()).map(|i| i as f64 + 0.5).collect();
    let staircase = linalg::polynomial_fit(&xs, &ys, degree)?;
    let mut spacings = Vec::with_capacity(kept.len() - 1);
    let mut zero_spacings = 0;
    for pair in kept.windows(2) {
        if pair[1] - pair[0] < DEGENERACY_GAP {
            zero_spacings += 1;
            spacings.push(0.0);
        } else {
            spacings.push((staircase(pair[1]) - staircase(pair[0])).max(0.0));
        }
    }
    Ok(UnfoldedSpacings {
        zero_spacings,
        levels_used: kept.len(),
        low_statistics: kept.len() < 200,
        spacings,
    })
}

/// Consecutive-gap ratios `min/max` on the raw spectrum, with exact
/// degeneracies merged first (and counted).
pub fn gap_ratios(eigenvalues: &[f64]) -> (Vec<f64>, usize) {
    let mut levels = eigenvalues.to_vec();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged = 0usize;
    let mut gaps: Vec<f64> = Vec::with_capacity(levels.len());
    for pair in levels.windows(2) {
        let gap = pair[1] - pair[0];
        if gap < DEGENERACY_GAP {
            merged += 1;
        } else {
            gaps.push(gap);
        }
    }
    let ratios = gaps
        .windows(2)
        .map(|g| {
            let (a, b) = (g[0], g[1]);
            if a < b {
                a / b
            } else {
                b / a
            }
        })
        .collect();
    (ratios, merged)
}

/// Empirical spacing statistics against the Poisson (`1 - e^{-s}`) and
/// Wigner-surmise (`1 - e^{-πs²/4}`) reference distributions.
#[derive(Debug, Clone, Serialize)]
pub struct SpacingStats {
    /// Unfolded spacings, sorted ascending.
    pub spacings: Vec<f64>,
    /// Empirical CDF sample points `(s, F(s))`.
    pub cdf: Vec<(f64, f64)>,
    pub mean_spacing: f64,
    pub mean_gap_ratio: f64,
    pub gap_ratio_count: usize,
    /// Sup-distance of the spacing CDF to the Poisson reference.
    pub ks_poisson: f64,
    /// Sup-distance of the spacing CDF to the Wigner surmise.
    pub ks_wigner: f64,
    pub merged_degeneracies: usize,
}

pub fn poisson_cdf(s: f64) -> f64 {
    1.0 - (-s).exp()
}

pub fn wigner_cdf(s: f64) -> f64 {
    1.0 - (-std::f64::consts::PI * s * s / 4.0).exp()
}

fn sup_distance(sorted: &[f64], reference: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let f = reference(s);
            let lo = (f - i as f64 / n).abs();
            let hi = ((i as f64 + 1.0) / n - f).abs();
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Statistics for a single spectrum.
pub fn spacing_stats(unfolded: &UnfoldedSpacings, raw_eigenvalues: &[f64]) -> SpacingStats {
    let (ratios, merged) = gap_ratios(raw_eigenvalues);
    spacing_stats_pooled(&unfolded.spacings, &ratios, merged)
}

/// Statistics for spacings and gap ratios pooled across independent
/// symmetry blocks (each block unfolded separately).
pub fn spacing_stats_pooled(unfolded: &[f64], ratios: &[f64], merged: usize) -> SpacingStats {
    let mut spacings = unfolded.to_vec();
    spacings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = spacings.len().max(1) as f64;
    let mean_spacing = spacings.iter().sum::<f64>() / n;
    let cdf: Vec<(f64, f64)> =
        spacings.iter().enumerate().map(|(i, &s)| (s, (i as f64 + 1.0) / n)).collect();
    let mean_gap_ratio = if ratios.is_empty() {
        f64::NAN
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    SpacingStats {
        ks_poisson: sup_distance(&spacings, poisson_cdf),
        ks_wigner: sup_distance(&spacings, wigner_cdf),
        mean_spacing,
        mean_gap_ratio,
        gap_ratio_count: ratios.len(),
        merged_degeneracies: merged,
        cdf,
        spacings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equally_spaced_levels_unfold_to_unit_spacings() {
        let levels: Vec<f64> = (0..400).map(|i| 3.0 + 0.25 * i as f64).collect();
        let u = unfold(&levels, 7, 0.05).unwrap();
        assert!(!u.low_statistics);
        assert_eq!(u.zero_spacings, 0);
        for &s in &u.spacings {
            assert!((s - 1.0).abs() < 1e-8, "spacing {s}");
        }
    }

    #[test]
    fn rigid_spectrum_has_gap_ratio_one() {
        let levels: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let (ratios, merged) = gap_ratios(&levels);
        assert_eq!(merged, 0);
        assert!(ratios.iter().all(|&r| (r - 1.0).abs() < 1e-12));
    }

    #[test]
    fn degeneracies_are_merged_and_counted() {
        let levels = vec![0.0, 1.0, 1.0 + 1e-15, 2.5, 4.0];
        let (ratios, merged) = gap_ratios(&levels);
        assert_eq!(merged, 1);
        assert_eq!(ratios.len(), 2);
        let u = unfold(&vec![0.0, 0.5, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0], 3, 0.0).unwrap();
        assert_eq!(u.zero_spacings, 1);
    }

    #[test]
    fn mean_unfolded_spacing_is_one_within_two_percent() {
        // a smoothly varying density of states
        let levels: Vec<f64> = (0..1000).map(|i| (i as f64 / 1000.0).powf(1.7) * 40.0).collect();
        let u = unfold(&levels, 7, 0.05).unwrap();
        let mean = u.spacings.iter().sum::<f64>() / u.spacings.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean unfolded spacing {mean}");
    }
}
