//! Deterministic signal conditioning: pre-emphasis, framing, Hamming
//! windowing and power-spectrum computation.
//!
//! Every function here is a pure transform of its inputs, so frames can be
//! processed from multiple threads without coordination. The chain is kept
//! minimal by design: no dithering, no DC removal, no normalization beyond
//! what the operations themselves define. The power spectrum is `|X[k]|^2`
//! of the unscaled DFT; downstream centroid features are ratios of weighted
//! sums, so a global scale factor cancels, and the convention keeps MFCC
//! log-energy offsets reproducible.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::par;
use crate::wave::Waveform;

/// Signal cut into fixed-length, hop-separated analysis windows.
#[derive(Debug, Clone)]
pub struct FrameMatrix {
    frames: Vec<Vec<f64>>,
    frame_length_samples: usize,
    hop_length_samples: usize,
    sample_rate_hz: u32,
}

impl FrameMatrix {
    pub fn frames(&self) -> &[Vec<f64>] {
        &self.frames
    }

    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame_length_samples(&self) -> usize {
        self.frame_length_samples
    }

    pub fn hop_length_samples(&self) -> usize {
        self.hop_length_samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }
}

/// One-sided power spectrum of a single frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    bins: Vec<f64>,
    bin_width_hz: f64,
}

impl PowerSpectrum {
    /// Wraps precomputed bins. Intended for tests and synthetic spectra;
    /// the pipeline produces these via [`power_spectra`].
    pub fn from_bins(bins: Vec<f64>, bin_width_hz: f64) -> Result<Self> {
        if bins.is_empty() || bin_width_hz <= 0.0 {
            return Err(Error::Contract("empty spectrum or non-positive bin width".into()));
        }
        if bins.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::Contract("power bins must be finite and nonnegative".into()));
        }
        Ok(Self { bins, bin_width_hz })
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    /// Width of one DFT bin in Hz (`sample_rate / fft_size`).
    pub fn bin_width_hz(&self) -> f64 {
        self.bin_width_hz
    }

    /// Center frequency of bin `k` in Hz.
    pub fn bin_frequency_hz(&self, k: usize) -> f64 {
        k as f64 * self.bin_width_hz
    }

    /// Returns a copy with every bin multiplied by `c` (`c > 0`).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Contract(format!("scale must be positive and finite, got {c}")));
        }
        Ok(Self {
            bins: self.bins.iter().map(|b| b * c).collect(),
            bin_width_hz: self.bin_width_hz,
        })
    }
}

/// First-order high-pass `y[n] = x[n] - coefficient * x[n-1]`, with the
/// first sample passed through unchanged.
pub fn preemphasize(w: &Waveform, coefficient: f64) -> Waveform {
    debug_assert!((0.0..1.0).contains(&coefficient));
    let x = w.samples();
    let mut out = Vec::with_capacity(x.len());
    out.push(x[0]);
    for n in 1..x.len() {
        out.push(x[n] - coefficient * x[n - 1]);
    }
    Waveform::new(out, w.sample_rate_hz()).expect("pre-emphasis preserves invariants")
}

/// Frame length in samples for a window of `ms` milliseconds.
pub fn samples_for_ms(ms: f64, sample_rate_hz: u32) -> usize {
    (ms / 1000.0 * sample_rate_hz as f64).round() as usize
}

/// Cuts the signal into `frame_ms`-long windows every `hop_ms`.
///
/// Frames are cut from the start with no padding; a trailing partial frame
/// is dropped. A signal shorter than one frame yields an empty
/// [`FrameMatrix`], which downstream stages treat as "no output", not as an
/// error.
pub fn frame(w: &Waveform, frame_ms: f64, hop_ms: f64) -> Result<FrameMatrix> {
    if !(hop_ms > 0.0) || frame_ms < hop_ms {
        return Err(Error::Config(format!(
            "frame length must be >= hop > 0, got frame {frame_ms} ms / hop {hop_ms} ms"
        )));
    }
    let frame_len = samples_for_ms(frame_ms, w.sample_rate_hz());
    let hop_len = samples_for_ms(hop_ms, w.sample_rate_hz());
    if frame_len < 2 || hop_len == 0 {
        return Err(Error::Config(format!(
            "frame/hop too short at {} Hz: {frame_len}/{hop_len} samples",
            w.sample_rate_hz()
        )));
    }
    let x = w.samples();
    let mut frames = Vec::new();
    let mut start = 0;
    while start + frame_len <= x.len() {
        frames.push(x[start..start + frame_len].to_vec());
        start += hop_len;
    }
    Ok(FrameMatrix {
        frames,
        frame_length_samples: frame_len,
        hop_length_samples: hop_len,
        sample_rate_hz: w.sample_rate_hz(),
    })
}

/// Periodic-symmetric Hamming window `0.54 - 0.46 cos(2 pi n / (N - 1))`.
pub fn hamming_window(length: usize) -> Vec<f64> {
    if length == 1 {
        return vec![1.0];
    }
    (0..length)
        .map(|n| {
            0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / (length as f64 - 1.0)).cos()
        })
        .collect()
}

/// Multiplies every frame elementwise by the Hamming window.
pub fn apply_hamming(fm: &FrameMatrix) -> FrameMatrix {
    let window = hamming_window(fm.frame_length_samples);
    let frames = par::map_slice(&fm.frames, |frame| {
        frame.iter().zip(&window).map(|(x, w)| x * w).collect()
    });
    FrameMatrix {
        frames,
        frame_length_samples: fm.frame_length_samples,
        hop_length_samples: fm.hop_length_samples,
        sample_rate_hz: fm.sample_rate_hz,
    }
}

/// Reusable forward FFT for one frame geometry.
///
/// Holds the planned transform so per-frame extraction does not replan;
/// the plan is shareable across threads.
pub struct SpectrumAnalyzer {
    fft: Arc<dyn Fft<f64>>,
    fft_size: usize,
    sample_rate_hz: u32,
}

impl SpectrumAnalyzer {
    /// Plans an FFT of `fft_size` points (power of two, at least the frame
    /// length that will be fed in).
    pub fn new(fft_size: usize, sample_rate_hz: u32) -> Result<Self> {
        if !fft_size.is_power_of_two() {
            return Err(Error::Config(format!("FFT size {fft_size} is not a power of two")));
        }
        let fft = FftPlanner::new().plan_fft_forward(fft_size);
        Ok(Self {
            fft,
            fft_size,
            sample_rate_hz,
        })
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn bin_width_hz(&self) -> f64 {
        self.sample_rate_hz as f64 / self.fft_size as f64
    }

    /// One-sided power spectrum `|X[k]|^2`, `k = 0 ..= fft_size/2`, of the
    /// frame zero-padded to the FFT size. No `1/N` scaling is applied.
    pub fn process_frame(&self, frame: &[f64]) -> Result<PowerSpectrum> {
        if frame.len() > self.fft_size {
            return Err(Error::Config(format!(
                "FFT size {} smaller than frame length {}",
                self.fft_size,
                frame.len()
            )));
        }
        let mut buf = vec![Complex::new(0.0, 0.0); self.fft_size];
        for (slot, &x) in buf.iter_mut().zip(frame) {
            slot.re = x;
        }
        self.fft.process(&mut buf);
        let bins = buf[..self.fft_size / 2 + 1]
            .iter()
            .map(|c| c.norm_sqr())
            .collect();
        PowerSpectrum::from_bins(bins, self.bin_width_hz())
    }
}

/// Per-frame power spectra for a whole frame matrix.
pub fn power_spectra(fm: &FrameMatrix, fft_size: usize) -> Result<Vec<PowerSpectrum>> {
    if fft_size < fm.frame_length_samples() {
        return Err(Error::Config(format!(
            "FFT size {fft_size} smaller than frame length {}",
            fm.frame_length_samples()
        )));
    }
    let analyzer = SpectrumAnalyzer::new(fft_size, fm.sample_rate_hz())?;
    let spectra = par::map_slice(fm.frames(), |frame| {
        analyzer
            .process_frame(frame)
            .expect("frame length checked against FFT size")
    });
    Ok(spectra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn noise(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    /// Reference DFT used to check the FFT path: direct O(N^2) summation
    /// with a precomputed twiddle table.
    fn naive_power_spectrum(frame: &[f64], fft_size: usize) -> Vec<f64> {
        let mut padded = vec![0.0; fft_size];
        padded[..frame.len()].copy_from_slice(frame);
        let twiddle: Vec<(f64, f64)> = (0..fft_size)
            .map(|i| {
                let a = -2.0 * std::f64::consts::PI * i as f64 / fft_size as f64;
                (a.cos(), a.sin())
            })
            .collect();
        (0..=fft_size / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (n, &x) in padded.iter().enumerate() {
                    let (c, s) = twiddle[(k * n) % fft_size];
                    re += x * c;
                    im += x * s;
                }
                re * re + im * im
            })
            .collect()
    }

    #[test]
    fn preemphasis_zero_coefficient_is_identity() {
        let w = Waveform::new(noise(64, 1), 16_000).unwrap();
        let out = preemphasize(&w, 0.0);
        assert_eq!(out.samples(), w.samples());
    }

    #[test]
    fn preemphasis_constant_signal() {
        let w = Waveform::new(vec![1.0; 8], 16_000).unwrap();
        let out = preemphasize(&w, 0.97);
        assert_eq!(out.samples()[0], 1.0);
        for &y in &out.samples()[1..] {
            assert!((y - 0.03).abs() < 1e-15, "{y}");
        }
    }

    #[test]
    fn preemphasis_matches_recurrence_oracle() {
        let x = noise(100, 2);
        let w = Waveform::new(x.clone(), 16_000).unwrap();
        let out = preemphasize(&w, 0.97);
        // direct recurrence, written independently of the implementation
        for n in 0..x.len() {
            let expect = if n == 0 { x[0] } else { x[n] - 0.97 * x[n - 1] };
            assert!((out.samples()[n] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn framing_one_second_at_16k() {
        let w = Waveform::new(vec![0.5; 16_000], 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        assert_eq!(fm.n_frames(), 98);
        assert_eq!(fm.frame_length_samples(), 400);
        assert_eq!(fm.hop_length_samples(), 160);
    }

    #[test]
    fn framing_exactly_one_frame() {
        let w = Waveform::new(vec![0.1; 400], 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        assert_eq!(fm.n_frames(), 1);
    }

    #[test]
    fn framing_sub_frame_input_is_empty_not_error() {
        let w = Waveform::new(vec![0.1; 399], 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        assert!(fm.is_empty());
        assert_eq!(fm.n_frames(), 0);
    }

    #[test]
    fn framing_rejects_hop_longer_than_frame() {
        let w = Waveform::new(vec![0.1; 1000], 16_000).unwrap();
        assert!(frame(&w, 10.0, 25.0).is_err());
    }

    #[test]
    fn framing_count_formula_against_loop_oracle() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..1000 {
            let rate = [8_000u32, 16_000, 22_050, 44_100][rng.gen_range(0..4)];
            let len = rng.gen_range(1..40_000usize);
            let w = Waveform::new(vec![0.0; len], rate).unwrap();
            let fm = frame(&w, 25.0, 10.0).unwrap();
            let flen = samples_for_ms(25.0, rate);
            let hop = samples_for_ms(10.0, rate);
            // loop oracle
            let mut count = 0usize;
            let mut start = 0usize;
            while start + flen <= len {
                count += 1;
                start += hop;
            }
            assert_eq!(fm.n_frames(), count, "len={len} rate={rate}");
            // closed-form check
            let formula = if len >= flen { 1 + (len - flen) / hop } else { 0 };
            assert_eq!(count, formula);
        }
    }

    #[test]
    fn hamming_of_ones_is_the_window() {
        let w = Waveform::new(vec![1.0; 400 + 160], 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        let windowed = apply_hamming(&fm);
        let window = hamming_window(400);
        assert_eq!(windowed.frames()[0], window);
    }

    #[test]
    fn hamming_endpoints_are_0_08() {
        let window = hamming_window(400);
        assert!((window[0] - 0.08).abs() < 1e-12);
        assert!((window[399] - 0.08).abs() < 1e-12);
    }

    #[test]
    fn hamming_never_increases_energy() {
        let x = noise(400, 4);
        let w = Waveform::new(x, 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        let windowed = apply_hamming(&fm);
        let energy = |f: &[f64]| f.iter().map(|v| v * v).sum::<f64>();
        assert!(energy(&windowed.frames()[0]) <= energy(&fm.frames()[0]));
    }

    #[test]
    fn spectrum_of_zero_frame_is_zero() {
        let w = Waveform::new(vec![0.0; 400], 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        let ps = power_spectra(&fm, 512).unwrap();
        assert_eq!(ps[0].bins().len(), 257);
        assert!(ps[0].bins().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn spectrum_of_unit_impulse_is_flat() {
        let mut x = vec![0.0; 400];
        x[0] = 1.0;
        let w = Waveform::new(x, 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        let ps = power_spectra(&fm, 512).unwrap();
        for &b in ps[0].bins() {
            assert!((b - 1.0).abs() < 1e-12, "{b}");
        }
    }

    #[test]
    fn spectrum_matches_naive_dft_oracle() {
        let x = noise(400, 5);
        let w = Waveform::new(x.clone(), 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        let ps = power_spectra(&fm, 512).unwrap();
        let oracle = naive_power_spectrum(&x, 512);
        let peak = oracle.iter().cloned().fold(0.0, f64::max);
        for (got, want) in ps[0].bins().iter().zip(&oracle) {
            assert!((got - want).abs() <= 1e-8 * peak.max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn spectrum_rejects_fft_smaller_than_frame() {
        let w = Waveform::new(vec![0.0; 400], 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        assert!(matches!(power_spectra(&fm, 256), Err(Error::Config(_))));
    }

    #[test]
    fn spectrum_rejects_non_power_of_two() {
        let w = Waveform::new(vec![0.0; 400], 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        assert!(matches!(power_spectra(&fm, 500), Err(Error::Config(_))));
    }

    #[test]
    fn parseval_with_symmetric_bin_doubling() {
        // sum_k |X[k]|^2 over the full DFT equals N * sum_n x[n]^2; with the
        // one-sided spectrum that is DC + Nyquist + 2x interior bins.
        let mut rng = StdRng::seed_from_u64(6);
        for _ in 0..100 {
            let x: Vec<f64> = (0..400).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w = Waveform::new(x.clone(), 16_000).unwrap();
            let fm = frame(&w, 25.0, 10.0).unwrap();
            let ps = power_spectra(&fm, 512).unwrap();
            let bins = ps[0].bins();
            let one_sided: f64 = bins[0]
                + bins[256]
                + 2.0 * bins[1..256].iter().sum::<f64>();
            let time_energy: f64 = x.iter().map(|v| v * v).sum::<f64>() * 512.0;
            assert!(
                (one_sided - time_energy).abs() <= 1e-6 * time_energy,
                "{one_sided} vs {time_energy}"
            );
        }
    }

    #[test]
    fn spectra_are_bit_identical_across_runs() {
        let x = noise(16_000, 7);
        let w = Waveform::new(x, 16_000).unwrap();
        let fm = frame(&w, 25.0, 10.0).unwrap();
        let a = power_spectra(&apply_hamming(&fm), 512).unwrap();
        let b = power_spectra(&apply_hamming(&fm), 512).unwrap();
        for (pa, pb) in a.iter().zip(&b) {
            for (x, y) in pa.bins().iter().zip(pb.bins()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }
}
