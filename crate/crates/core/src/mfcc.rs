//! MFCC computation: log filterbank energies, orthonormal DCT-II and
//! sinusoidal cepstral liftering.
//!
//! The coefficient count equals the filter count for the baseline
//! configurations (6 and 13), and `c0` is kept as the first coefficient.

use crate::dsp::PowerSpectrum;
use crate::error::{Error, Result};
use crate::melbank::TriangularFilterbank;

/// Floor applied to filterbank energies before the log, so silent frames
/// produce a large negative constant instead of `-inf`.
pub const LOG_ENERGY_FLOOR: f64 = 1e-10;

/// Orthonormal DCT-II.
///
/// `X[k] = s_k * sum_n x[n] cos(pi (n + 0.5) k / N)` with `s_0 = sqrt(1/N)`
/// and `s_k = sqrt(2/N)` otherwise; with this scaling the inverse transform
/// is the transpose.
pub fn dct_ii_orthonormal(input: &[f64]) -> Vec<f64> {
    let n = input.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let sum: f64 = input
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                x * (std::f64::consts::PI * (i as f64 + 0.5) * k as f64 / n as f64).cos()
            })
            .sum();
        let scale = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        out.push(scale * sum);
    }
    out
}

/// Inverse of [`dct_ii_orthonormal`].
pub fn dct_iii_orthonormal(coefs: &[f64]) -> Vec<f64> {
    let n = coefs.len();
    (0..n)
        .map(|i| {
            coefs
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    let scale = if k == 0 {
                        (1.0 / n as f64).sqrt()
                    } else {
                        (2.0 / n as f64).sqrt()
                    };
                    scale * c * (std::f64::consts::PI * (i as f64 + 0.5) * k as f64 / n as f64).cos()
                })
                .sum()
        })
        .collect()
}

/// Sinusoidal lifter weight for coefficient `k`: `1 + (L/2) sin(pi k / L)`.
pub fn lifter_weight(k: usize, lifter: usize) -> f64 {
    if lifter == 0 {
        return 1.0;
    }
    let l = lifter as f64;
    1.0 + l / 2.0 * (std::f64::consts::PI * k as f64 / l).sin()
}

/// MFCC vector of one frame: floored log filterbank energies, orthonormal
/// DCT-II truncated to `n_coefs` (including `c0`), then liftered.
pub fn mfcc(
    ps: &PowerSpectrum,
    fb: &TriangularFilterbank,
    n_coefs: usize,
    lifter: usize,
) -> Result<Vec<f64>> {
    if n_coefs > fb.n_filters() {
        return Err(Error::Config(format!(
            "{n_coefs} cepstral coefficients requested from {} filters",
            fb.n_filters()
        )));
    }
    let log_energies: Vec<f64> = fb
        .apply(ps.bins())
        .into_iter()
        .map(|e| e.max(LOG_ENERGY_FLOOR).ln())
        .collect();
    let coefs = dct_ii_orthonormal(&log_energies);
    Ok(coefs[..n_coefs]
        .iter()
        .enumerate()
        .map(|(k, &c)| lifter_weight(k, lifter) * c)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn dct_of_constant_has_only_c0() {
        let coefs = dct_ii_orthonormal(&[3.0; 13]);
        assert!(coefs[0] != 0.0);
        for &c in &coefs[1..] {
            assert!(c.abs() < 1e-12, "{c}");
        }
    }

    #[test]
    fn lifter_is_identity_at_k0() {
        assert_eq!(lifter_weight(0, 22), 1.0);
        assert!(lifter_weight(11, 22) > 1.0);
    }

    #[test]
    fn inverse_dct_recovers_log_energies() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let x: Vec<f64> = (0..13).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let back = dct_iii_orthonormal(&dct_ii_orthonormal(&x));
            for (a, b) in x.iter().zip(&back) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mfcc_matches_direct_summation_oracle() {
        let mut rng = StdRng::seed_from_u64(12);
        let bins: Vec<f64> = (0..257).map(|_| rng.gen_range(0.0..10.0)).collect();
        let ps = PowerSpectrum::from_bins(bins.clone(), 16_000.0 / 512.0).unwrap();
        let fb = TriangularFilterbank::mel(13, 0.0, 8000.0, 512, 16_000).unwrap();
        let got = mfcc(&ps, &fb, 13, 22).unwrap();

        // independent oracle: direct sums, no shared helpers
        let n = 13usize;
        let mut loge = vec![0.0f64; n];
        for (m, filt) in fb.weights().iter().enumerate() {
            let e: f64 = filt.iter().zip(&bins).map(|(w, p)| w * p).sum();
            loge[m] = e.max(1e-10).ln();
        }
        for k in 0..n {
            let mut sum = 0.0;
            for (i, &x) in loge.iter().enumerate() {
                sum += x * (std::f64::consts::PI * (i as f64 + 0.5) * k as f64 / n as f64).cos();
            }
            let scale = if k == 0 {
                (1.0 / n as f64).sqrt()
            } else {
                (2.0 / n as f64).sqrt()
            };
            let lift = 1.0 + 11.0 * (std::f64::consts::PI * k as f64 / 22.0).sin();
            let want = lift * scale * sum;
            assert!((got[k] - want).abs() < 1e-8, "k={k}: {} vs {want}", got[k]);
        }
    }

    #[test]
    fn mfcc_rejects_more_coefs_than_filters() {
        let ps = PowerSpectrum::from_bins(vec![1.0; 257], 31.25).unwrap();
        let fb = TriangularFilterbank::mel(6, 0.0, 8000.0, 512, 16_000).unwrap();
        assert!(matches!(mfcc(&ps, &fb, 7, 22), Err(Error::Config(_))));
    }

    #[test]
    fn silent_frame_stays_finite() {
        let ps = PowerSpectrum::from_bins(vec![0.0; 257], 31.25).unwrap();
        let fb = TriangularFilterbank::mel(13, 0.0, 8000.0, 512, 16_000).unwrap();
        let coefs = mfcc(&ps, &fb, 13, 22).unwrap();
        assert!(coefs.iter().all(|c| c.is_finite()));
    }
}
