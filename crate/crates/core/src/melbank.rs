//! Mel scale conversions and triangular filterbank construction.

use crate::error::{Error, Result};

/// `mel = 2595 * log10(1 + hz / 700)`.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

/// Inverse of [`hz_to_mel`].
pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10.0_f64.powf(mel / 2595.0) - 1.0)
}

/// `n + 2` frequencies equally spaced on the mel scale between `fmin` and
/// `fmax`, converted back to Hz. The endpoints are returned exactly, so
/// mel-inversion roundoff cannot push them past the requested range.
pub fn mel_spaced_edges(n: usize, fmin_hz: f64, fmax_hz: f64) -> Vec<f64> {
    let lo = hz_to_mel(fmin_hz);
    let hi = hz_to_mel(fmax_hz);
    (0..n + 2)
        .map(|i| {
            if i == 0 {
                fmin_hz
            } else if i == n + 1 {
                fmax_hz
            } else {
                mel_to_hz(lo + (hi - lo) * i as f64 / (n + 1) as f64)
            }
        })
        .collect()
}

/// Bank of triangular filters over one-sided FFT bins.
///
/// Filter edges are snapped to bin indices, which makes each filter peak
/// exactly 1 at its center bin and makes adjacent filters sum to exactly 1
/// over their 50% overlap.
#[derive(Debug, Clone)]
pub struct TriangularFilterbank {
    edges_hz: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

impl TriangularFilterbank {
    /// Builds `n_filters` triangles with centers equally spaced on the mel
    /// scale over `[fmin_hz, fmax_hz]`.
    pub fn mel(
        n_filters: usize,
        fmin_hz: f64,
        fmax_hz: f64,
        fft_size: usize,
        sample_rate_hz: u32,
    ) -> Result<Self> {
        let nyquist = sample_rate_hz as f64 / 2.0;
        if n_filters == 0 {
            return Err(Error::Config("filterbank needs at least one filter".into()));
        }
        if !(0.0 <= fmin_hz && fmin_hz < fmax_hz && fmax_hz <= nyquist) {
            return Err(Error::Config(format!(
                "filterbank edges must satisfy 0 <= fmin < fmax <= {nyquist}, got [{fmin_hz}, {fmax_hz}]"
            )));
        }
        let n_bins = fft_size / 2 + 1;
        let edges_hz = mel_spaced_edges(n_filters, fmin_hz, fmax_hz);
        let bin_of = |hz: f64| -> usize {
            (((fft_size + 1) as f64 * hz / sample_rate_hz as f64).floor() as usize)
                .min(n_bins - 1)
        };
        let points: Vec<usize> = edges_hz.iter().map(|&hz| bin_of(hz)).collect();
        for w in points.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config(format!(
                    "{n_filters} filters do not fit into {n_bins} FFT bins over [{fmin_hz}, {fmax_hz}] Hz"
                )));
            }
        }

        let mut weights = Vec::with_capacity(n_filters);
        for m in 0..n_filters {
            let (left, center, right) = (points[m], points[m + 1], points[m + 2]);
            let mut filt = vec![0.0; n_bins];
            for k in left..=center {
                filt[k] = (k - left) as f64 / (center - left) as f64;
            }
            for k in center..=right {
                filt[k] = (right - k) as f64 / (right - center) as f64;
            }
            weights.push(filt);
        }
        Ok(Self { edges_hz, weights })
    }

    pub fn n_filters(&self) -> usize {
        self.weights.len()
    }

    /// The `n_filters + 2` ascending edge frequencies in Hz.
    pub fn edges_hz(&self) -> &[f64] {
        &self.edges_hz
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Per-filter weighted sums over a power spectrum.
    pub fn apply(&self, bins: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|filt| filt.iter().zip(bins).map(|(w, p)| w * p).sum())
            .collect()
    }
}
