//! Feature-profile assembly: one shared spectral frontend feeding every
//! component stream, concatenated frame-aligned in declared order.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{AngleUnit, ExtractionConfig};
use crate::dsp;
use crate::dynamics;
use crate::error::{Error, Result};
use crate::melbank::TriangularFilterbank;
use crate::mfcc;
use crate::par;
use crate::profile::{FeatureProfile, StreamSpec};
use crate::sscf::{validate_bands, SscfTrack, SubbandSpec};
use crate::wave::Waveform;

/// Per-frame flag bits carried alongside the feature rows.
pub mod frame_flags {
    /// Some subband fell back to its midpoint (no usable in-band energy).
    pub const SSCF_DEGENERATE: u8 = 1 << 0;
    /// A polar stream saw the origin and defaulted its angle to 0.
    pub const POLAR_ORIGIN: u8 = 1 << 1;
    /// A normalized stream was constant over the utterance.
    pub const MVN_CONSTANT: u8 = 1 << 2;
}

/// Everything needed to reproduce an extraction, embedded in outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub profile: String,
    pub dims: usize,
    pub n_frames: usize,
    pub sample_rate_hz: u32,
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub preemphasis: f64,
    pub fft_size: usize,
    pub lifter: usize,
    pub delta_half_window: usize,
    pub sscf_energy_floor: f64,
    pub angle_unit: AngleUnit,
    pub sscf0_log_hz: bool,
    pub subbands: Vec<SubbandSpec>,
    /// SHA-256 over the resolved configuration and stream composition.
    pub config_hash: String,
    /// Indices of frames with any flag bit set.
    pub flagged_frames: Vec<usize>,
}

/// Assembled feature matrix: `n_frames x dims`, row-major, with per-frame
/// flags and reproducibility metadata. Frames are never dropped; degenerate
/// frames are flagged instead so streams stay aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    n_frames: usize,
    dims: usize,
    flags: Vec<u8>,
    metadata: Metadata,
}

impl FeatureMatrix {
    /// Assembles a matrix from raw parts, checking the shape invariants.
    pub fn new(
        data: Vec<f64>,
        n_frames: usize,
        dims: usize,
        flags: Vec<u8>,
        metadata: Metadata,
    ) -> Result<Self> {
        if data.len() != n_frames * dims || flags.len() != n_frames {
            return Err(Error::Contract(format!(
                "matrix shape mismatch: {} values, {} flags for {n_frames} x {dims}",
                data.len(),
                flags.len()
            )));
        }
        Ok(Self { data, n_frames, dims, flags, metadata })
    }

    pub(crate) fn from_parts(
        data: Vec<f64>,
        n_frames: usize,
        dims: usize,
        flags: Vec<u8>,
        metadata: Metadata,
    ) -> Self {
        debug_assert_eq!(data.len(), n_frames * dims);
        debug_assert_eq!(flags.len(), n_frames);
        Self { data, n_frames, dims, flags, metadata }
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.n_frames == 0
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, frame: usize) -> &[f64] {
        &self.data[frame * self.dims..(frame + 1) * self.dims]
    }

    pub fn flags(&self) -> &[u8] {
        &self.flags
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }
}

/// Hex SHA-256 over the canonical JSON of config plus stream composition.
pub fn config_hash(config: &ExtractionConfig, streams: &[StreamSpec]) -> String {
    let payload = serde_json::json!({
        "config": config,
        "streams": streams,
    });
    let digest = Sha256::digest(payload.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Shared spectral frontend: pre-emphasis, framing, Hamming window, power
/// spectra. Every profile stream consumes this one spectrum sequence.
pub fn frontend(w: &Waveform, config: &ExtractionConfig) -> Result<Vec<dsp::PowerSpectrum>> {
    let emphasized = dsp::preemphasize(w, config.preemphasis);
    let frames = dsp::frame(&emphasized, config.frame_ms, config.hop_ms)?;
    if frames.is_empty() {
        return Ok(Vec::new());
    }
    dsp::power_spectra(&dsp::apply_hamming(&frames), config.fft_size)
}

/// Subband centroid track of a waveform under this config.
pub fn sscf_track(w: &Waveform, config: &ExtractionConfig) -> Result<SscfTrack> {
    let bands = config.subbands_for(w.sample_rate_hz());
    validate_bands(&bands, w.sample_rate_hz() as f64 / 2.0)?;
    let spectra = frontend(w, config)?;
    Ok(SscfTrack::extract(&spectra, &bands, config.sscf_energy_floor))
}

struct StreamOutput {
    /// Rows: `n_frames x stream_dims`.
    rows: Vec<Vec<f64>>,
    flags: Vec<u8>,
}

fn with_derivatives(rows: Vec<Vec<f64>>, enabled: bool, half_window: usize) -> Vec<Vec<f64>> {
    if !enabled {
        return rows;
    }
    let d = dynamics::deltas(&rows, half_window);
    let dd = dynamics::deltas(&d, half_window);
    rows.into_iter()
        .zip(d)
        .zip(dd)
        .map(|((mut row, drow), ddrow)| {
            row.extend(drow);
            row.extend(ddrow);
            row
        })
        .collect()
}

fn polar_rows(
    track_a: &[f64],
    track_b: &[f64],
    config: &ExtractionConfig,
    derivatives: bool,
) -> Result<StreamOutput> {
    let polar = dynamics::polar(track_a, track_b)?;
    let angle_factor = config.angle_unit.from_degrees_factor();
    let rows: Vec<Vec<f64>> = polar
        .radius
        .iter()
        .zip(&polar.angle_deg)
        .map(|(&r, &a)| vec![r, a * angle_factor])
        .collect();
    let flags = polar
        .at_origin
        .iter()
        .map(|&o| if o { frame_flags::POLAR_ORIGIN } else { 0 })
        .collect();
    Ok(StreamOutput {
        rows: with_derivatives(rows, derivatives, config.delta_half_window),
        flags,
    })
}

fn compute_stream(
    stream: &StreamSpec,
    spectra: &[dsp::PowerSpectrum],
    track: Option<&SscfTrack>,
    config: &ExtractionConfig,
    sample_rate_hz: u32,
) -> Result<StreamOutput> {
    let n = spectra.len();
    match stream {
        StreamSpec::Mfcc { n_coefs, derivatives } => {
            let fb = TriangularFilterbank::mel(
                *n_coefs,
                0.0,
                sample_rate_hz as f64 / 2.0,
                config.fft_size,
                sample_rate_hz,
            )?;
            let rows: Vec<Vec<f64>> = par::map_slice(spectra, |ps| {
                mfcc::mfcc(ps, &fb, *n_coefs, config.lifter)
            })
            .into_iter()
            .collect::<Result<_>>()?;
            Ok(StreamOutput {
                rows: with_derivatives(rows, *derivatives, config.delta_half_window),
                flags: vec![0; n],
            })
        }
        StreamSpec::Polar { plane, derivatives } => {
            let track = track.expect("sscf track computed for polar stream");
            if plane.iter().any(|&b| b >= track.n_bands()) {
                return Err(Error::Config(format!(
                    "polar plane {plane:?} out of range for {} bands",
                    track.n_bands()
                )));
            }
            polar_rows(
                &track.band_track(plane[0]),
                &track.band_track(plane[1]),
                config,
                *derivatives,
            )
        }
        StreamSpec::PolarRatio { derivatives } => {
            let track = track.expect("sscf track computed for ratio stream");
            let points = dynamics::ratio_plane(track)?;
            let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
            polar_rows(&xs, &ys, config, *derivatives)
        }
        StreamSpec::Sscf0 { mvn, derivatives } => {
            let track = track.expect("sscf track computed for sscf0 stream");
            let mut col = track.band_track(0);
            if config.sscf0_log_hz {
                for v in &mut col {
                    *v = v.max(1.0).ln();
                }
            }
            let mut flags = vec![0u8; n];
            if *mvn {
                let normalized = dynamics::mvn(&col);
                if normalized.constant {
                    for f in &mut flags {
                        *f |= frame_flags::MVN_CONSTANT;
                    }
                }
                col = normalized.values;
            }
            let rows: Vec<Vec<f64>> = col.into_iter().map(|v| vec![v]).collect();
            Ok(StreamOutput {
                rows: with_derivatives(rows, *derivatives, config.delta_half_window),
                flags,
            })
        }
    }
}

/// Extracts one utterance into the profile's feature matrix.
///
/// All streams are computed from a single shared power-spectrum sequence
/// and concatenated in declared order; the frame count of every stream
/// equals the frontend's frame count. An input shorter than one frame
/// yields an empty matrix with metadata rather than an error.
pub fn extract(
    w: &Waveform,
    profile: &FeatureProfile,
    config: &ExtractionConfig,
) -> Result<FeatureMatrix> {
    config.validate()?;
    profile.validate()?;
    let sample_rate_hz = w.sample_rate_hz();
    let bands = config.subbands_for(sample_rate_hz);
    validate_bands(&bands, sample_rate_hz as f64 / 2.0)?;

    let dims = profile.expected_dim();
    let metadata = |n_frames: usize, flagged: Vec<usize>| Metadata {
        profile: profile.name.clone(),
        dims,
        n_frames,
        sample_rate_hz,
        frame_ms: config.frame_ms,
        hop_ms: config.hop_ms,
        preemphasis: config.preemphasis,
        fft_size: config.fft_size,
        lifter: config.lifter,
        delta_half_window: config.delta_half_window,
        sscf_energy_floor: config.sscf_energy_floor,
        angle_unit: config.angle_unit,
        sscf0_log_hz: config.sscf0_log_hz,
        subbands: bands.clone(),
        config_hash: config_hash(config, &profile.streams),
        flagged_frames: flagged,
    };

    let spectra = frontend(w, config)?;
    if spectra.is_empty() {
        return Ok(FeatureMatrix::from_parts(
            Vec::new(),
            0,
            dims,
            Vec::new(),
            metadata(0, Vec::new()),
        ));
    }
    let n_frames = spectra.len();

    let track = if profile.streams.iter().any(StreamSpec::needs_sscf) {
        Some(SscfTrack::extract(&spectra, &bands, config.sscf_energy_floor))
    } else {
        None
    };

    let mut outputs = Vec::with_capacity(profile.streams.len());
    for stream in &profile.streams {
        let out = compute_stream(stream, &spectra, track.as_ref(), config, sample_rate_hz)?;
        if out.rows.len() != n_frames {
            return Err(Error::Contract(format!(
                "stream produced {} frames, frontend produced {n_frames}",
                out.rows.len()
            )));
        }
        outputs.push(out);
    }

    let mut flags = vec![0u8; n_frames];
    if let Some(track) = &track {
        for (j, &degenerate) in track.degenerate_flags().iter().enumerate() {
            if degenerate {
                flags[j] |= frame_flags::SSCF_DEGENERATE;
            }
        }
    }
    for out in &outputs {
        for (j, &f) in out.flags.iter().enumerate() {
            flags[j] |= f;
        }
    }

    let mut data = Vec::with_capacity(n_frames * dims);
    for j in 0..n_frames {
        for out in &outputs {
            data.extend_from_slice(&out.rows[j]);
        }
    }
    if data.len() != n_frames * dims {
        return Err(Error::Contract(format!(
            "assembled {} values, expected {n_frames} x {dims}",
            data.len()
        )));
    }
    if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::Contract(format!(
            "non-finite feature value at frame {}, dim {}",
            bad / dims,
            bad % dims
        )));
    }

    let flagged: Vec<usize> = flags
        .iter()
        .enumerate()
        .filter(|(_, &f)| f != 0)
        .map(|(j, _)| j)
        .collect();
    Ok(FeatureMatrix::from_parts(
        data,
        n_frames,
        dims,
        flags,
        metadata(n_frames, flagged),
    ))
}
