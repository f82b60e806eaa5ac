//! Spectral subband centroid frequencies.
//!
//! Each subband `m` with bounds `[l_m, h_m]`, weight shape `w_m` and
//! exponent `gamma` maps a power spectrum to
//!
//! ```text
//! SSCF_m = sum_f f * w_m(f) * P(f)^gamma / sum_f w_m(f) * P(f)^gamma
//! ```
//!
//! summed over the bins whose center frequency lies inside the band. The
//! result is a weighted mean, so it always lies inside `[l_m, h_m]`, and a
//! uniform scaling of the spectrum cancels. Six bands over `[0, Nyquist]`
//! stand in for the fundamental and the first five formants.
//!
//! The default band layout spaces the edges equally on the mel scale,
//! mirroring the MFCC frontend; weights are rectangular with `gamma = 1`.
//! All of it can be overridden per band through the config file, and the
//! layout in force is recorded in extraction metadata.

use serde::{Deserialize, Serialize};

use crate::dsp::PowerSpectrum;
use crate::error::{Error, Result};
use crate::melbank::mel_spaced_edges;
use crate::par;

/// Number of subbands in the default layout (SSCF0 through SSCF5).
pub const DEFAULT_N_BANDS: usize = 6;

/// Spectral weighting applied inside a band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightShape {
    /// Every in-band bin weighted 1.
    Rectangular,
    /// Peak-1 triangle centered on the band midpoint.
    Triangular,
}

/// One subband of the centroid analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubbandSpec {
    pub low_hz: f64,
    pub high_hz: f64,
    #[serde(default = "default_weight_shape")]
    pub weight_shape: WeightShape,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_weight_shape() -> WeightShape {
    WeightShape::Rectangular
}

fn default_gamma() -> f64 {
    1.0
}

impl SubbandSpec {
    pub fn rectangular(low_hz: f64, high_hz: f64) -> Self {
        Self {
            low_hz,
            high_hz,
            weight_shape: WeightShape::Rectangular,
            gamma: 1.0,
        }
    }

    pub fn midpoint_hz(&self) -> f64 {
        0.5 * (self.low_hz + self.high_hz)
    }

    pub fn contains(&self, hz: f64) -> bool {
        self.low_hz <= hz && hz <= self.high_hz
    }

    fn weight_at(&self, hz: f64) -> f64 {
        match self.weight_shape {
            WeightShape::Rectangular => 1.0,
            WeightShape::Triangular => {
                let mid = self.midpoint_hz();
                if hz <= mid {
                    (hz - self.low_hz) / (mid - self.low_hz)
                } else {
                    (self.high_hz - hz) / (self.high_hz - mid)
                }
            }
        }
    }

    fn validate(&self, nyquist_hz: f64) -> Result<()> {
        if !(0.0 <= self.low_hz && self.low_hz < self.high_hz && self.high_hz <= nyquist_hz) {
            return Err(Error::Config(format!(
                "subband [{}, {}] Hz must satisfy 0 <= low < high <= {nyquist_hz}",
                self.low_hz, self.high_hz
            )));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        Ok(())
    }
}

/// Validates a band list: per-band sanity plus strictly increasing lower
/// edges. Overlap between bands is allowed.
pub fn validate_bands(bands: &[SubbandSpec], nyquist_hz: f64) -> Result<()> {
    if bands.is_empty() {
        return Err(Error::Config("at least one subband required".into()));
    }
    for band in bands {
        band.validate(nyquist_hz)?;
    }
    for pair in bands.windows(2) {
        if pair[1].low_hz <= pair[0].low_hz {
            return Err(Error::Config(
                "subband lower edges must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

/// The default layout: six contiguous rectangular bands partitioning
/// `[0, Nyquist]` with edges equally spaced on the mel scale, `gamma = 1`.
pub fn default_subbands(sample_rate_hz: u32) -> Vec<SubbandSpec> {
    let nyquist = sample_rate_hz as f64 / 2.0;
    let edges = mel_spaced_edges(DEFAULT_N_BANDS - 1, 0.0, nyquist);
    edges
        .windows(2)
        .map(|e| SubbandSpec::rectangular(e[0], e[1]))
        .collect()
}

/// Centroids of one spectrum, one value per band, plus a flag marking
/// frames where any band had no usable energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SscfFrame {
    pub values: Vec<f64>,
    /// True when at least one band fell back to its midpoint.
    pub degenerate: bool,
}

/// Per-band power-weighted mean frequency of one spectrum.
///
/// Bands with in-band weighted energy at or below `energy_floor` yield the
/// band midpoint and raise the degenerate flag; tracks stay finite and
/// frame-aligned, and downstream consumers can exclude flagged frames.
pub fn sscf(ps: &PowerSpectrum, bands: &[SubbandSpec], energy_floor: f64) -> SscfFrame {
    let mut values = Vec::with_capacity(bands.len());
    let mut degenerate = false;
    for band in bands {
        let mut num = 0.0;
        let mut den = 0.0;
        for (k, &p) in ps.bins().iter().enumerate() {
            let f = ps.bin_frequency_hz(k);
            if band.contains(f) {
                let powered = if band.gamma == 1.0 { p } else { p.powf(band.gamma) };
                let w = band.weight_at(f) * powered;
                num += f * w;
                den += w;
            }
        }
        if den > energy_floor {
            values.push(num / den);
        } else {
            values.push(band.midpoint_hz());
            degenerate = true;
        }
    }
    SscfFrame { values, degenerate }
}

/// Centroid tracks for a spectrum sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SscfTrack {
    n_bands: usize,
    /// Row-major frames x bands.
    values: Vec<f64>,
    degenerate: Vec<bool>,
}

impl SscfTrack {
    /// Runs [`sscf`] over every frame.
    pub fn extract(spectra: &[PowerSpectrum], bands: &[SubbandSpec], energy_floor: f64) -> Self {
        let frames = par::map_slice(spectra, |ps| sscf(ps, bands, energy_floor));
        let mut values = Vec::with_capacity(frames.len() * bands.len());
        let mut degenerate = Vec::with_capacity(frames.len());
        for f in frames {
            values.extend_from_slice(&f.values);
            degenerate.push(f.degenerate);
        }
        Self {
            n_bands: bands.len(),
            values,
            degenerate,
        }
    }

    pub fn n_frames(&self) -> usize {
        self.degenerate.len()
    }

    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    pub fn value(&self, frame: usize, band: usize) -> f64 {
        self.values[frame * self.n_bands + band]
    }

    /// One band's trajectory over all frames.
    pub fn band_track(&self, band: usize) -> Vec<f64> {
        (0..self.n_frames()).map(|j| self.value(j, band)).collect()
    }

    pub fn degenerate_flags(&self) -> &[bool] {
        &self.degenerate
    }
}
