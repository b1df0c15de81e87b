//! Synthetic-ensemble oracles for the spacing statistics: Poisson levels
//! from exponential gaps and symmetric Gaussian random matrices.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scargrow_core::spectral::{gap_ratios, spacing_stats, spacing_stats_pooled, unfold};

fn exponential_gap(rng: &mut ChaCha8Rng) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln()
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

fn poisson_levels(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut levels = Vec::with_capacity(n);
    let mut e = 0.0;
    for _ in 0..n {
        e += exponential_gap(rng);
        levels.push(e);
    }
    levels
}

fn gaussian_symmetric_spectrum(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = standard_normal(rng) * 2f64.sqrt();
        for j in 0..i {
            let x = standard_normal(rng);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[test]
fn poisson_levels_recover_the_exponential_spacing_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let levels = poisson_levels(&mut rng, 2000);
    let u = unfold(&levels, 7, 0.05).unwrap();
    let stats = spacing_stats(&u, &levels);
    assert!((stats.mean_spacing - 1.0).abs() < 0.02);
    assert!(stats.ks_poisson < 0.03, "KS to Poisson {:.4}", stats.ks_poisson);
    assert!(stats.ks_wigner > 0.1, "should be far from the surmise");
}

#[test]
fn poisson_gap_ratio_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let levels = poisson_levels(&mut rng, 100_000);
    let (ratios, _) = gap_ratios(&levels);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    // 2 ln 2 - 1
    assert!((mean - 0.3863).abs() < 0.01, "mean gap ratio {mean:.4}");
}

#[test]
fn gaussian_ensemble_matches_the_wigner_surmise() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut pooled_spacings = Vec::new();
    let mut pooled_ratios = Vec::new();
    let mut merged = 0;
    for _ in 0..10 {
        let levels = gaussian_symmetric_spectrum(&mut rng, 200);
        let u = unfold(&levels, 7, 0.05).unwrap();
        pooled_spacings.extend(u.spacings);
        let (r, m) = gap_ratios(&levels);
        pooled_ratios.extend(r);
        merged += m;
    }
    let stats = spacing_stats_pooled(&pooled_spacings, &pooled_ratios, merged);
    assert!(stats.ks_wigner < 0.03, "KS to surmise {:.4}", stats.ks_wigner);
    assert!(stats.ks_poisson > 0.1);
    assert!((stats.mean_gap_ratio - 0.5307).abs() < 0.02, "mean gap ratio {:.4}", stats.mean_gap_ratio);
}
