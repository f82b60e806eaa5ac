//! Waveform container and RIFF/WAVE I/O.
//!
//! Input files must be mono, PCM 16-bit or IEEE float 32-bit, with a sample
//! rate of at least 8 kHz. Multi-channel audio is rejected rather than
//! downmixed so that callers never feed the pipeline something it did not
//! ask for.

use std::path::Path;

use crate::error::{Error, Result};

/// Minimum sample rate the pipeline accepts; the subband layout assumes
/// speech-band audio.
pub const MIN_SAMPLE_RATE_HZ: u32 = 8_000;

/// Mono audio signal with samples nominally in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl Waveform {
    /// Wraps raw samples, enforcing the container invariants: non-empty,
    /// all samples finite, sample rate at least [`MIN_SAMPLE_RATE_HZ`].
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Audio("empty signal".into()));
        }
        if sample_rate_hz < MIN_SAMPLE_RATE_HZ {
            return Err(Error::Audio(format!(
                "sample rate {sample_rate_hz} Hz below the {MIN_SAMPLE_RATE_HZ} Hz minimum"
            )));
        }
        if let Some(idx) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Audio(format!("non-finite sample at index {idx}")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Reads a mono RIFF/WAVE file (PCM 16-bit or IEEE float 32-bit).
    pub fn from_wav_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let reader = hound::WavReader::open(path)
            .map_err(|e| Error::Audio(format!("{}: {e}", path.display())))?;
        let spec = reader.spec();
        if spec.channels != 1 {
            return Err(Error::Audio(format!(
                "{}: {} channels, only mono input is supported",
                path.display(),
                spec.channels
            )));
        }
        let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
            (hound::SampleFormat::Int, 16) => reader
                .into_samples::<i16>()
                .map(|s| s.map(|v| f64::from(v) / 32768.0))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Audio(format!("{}: {e}", path.display())))?,
            (hound::SampleFormat::Float, 32) => reader
                .into_samples::<f32>()
                .map(|s| s.map(f64::from))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Audio(format!("{}: {e}", path.display())))?,
            (fmt, bits) => {
                return Err(Error::Audio(format!(
                    "{}: unsupported sample format {fmt:?}/{bits} bit (PCM 16 or float 32 only)",
                    path.display()
                )))
            }
        };
        Self::new(samples, spec.sample_rate)
    }

    /// Writes the waveform as 16-bit PCM, clamping samples to `[-1, 1]`.
    pub fn to_wav_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate_hz,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(path.as_ref(), spec)
            .map_err(|e| Error::Audio(e.to_string()))?;
        for &s in &self.samples {
            let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
            writer
                .write_sample(v)
                .map_err(|e| Error::Audio(e.to_string()))?;
        }
        writer.finalize().map_err(|e| Error::Audio(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_signal() {
        assert!(Waveform::new(vec![], 16_000).is_err());
    }

    #[test]
    fn rejects_low_sample_rate() {
        assert!(Waveform::new(vec![0.0; 10], 7_999).is_err());
        assert!(Waveform::new(vec![0.0; 10], 8_000).is_ok());
    }

    #[test]
    fn rejects_non_finite_samples() {
        assert!(Waveform::new(vec![0.0, f64::NAN], 16_000).is_err());
        assert!(Waveform::new(vec![0.0, f64::INFINITY], 16_000).is_err());
    }

    #[test]
    fn wav_round_trip_pcm16() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        let samples: Vec<f64> = (0..1600)
            .map(|i| (2.0 * std::f64::consts::PI * 440.0 * i as f64 / 16_000.0).sin() * 0.5)
            .collect();
        let w = Waveform::new(samples.clone(), 16_000).unwrap();
        w.to_wav_file(&path).unwrap();
        let r = Waveform::from_wav_file(&path).unwrap();
        assert_eq!(r.sample_rate_hz(), 16_000);
        assert_eq!(r.len(), 1600);
        for (a, b) in samples.iter().zip(r.samples()) {
            assert!((a - b).abs() < 1.0 / 32000.0, "{a} vs {b}");
        }
    }

    #[test]
    fn rejects_stereo_wav() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 16_000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(&path, spec).unwrap();
        for _ in 0..100 {
            writer.write_sample(0i16).unwrap();
            writer.write_sample(0i16).unwrap();
        }
        writer.finalize().unwrap();
        let err = Waveform::from_wav_file(&path).unwrap_err();
        assert!(matches!(err, Error::Audio(_)), "{err}");
    }

    #[test]
    fn reads_float32_wav() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 16_000,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut writer = hound::WavWriter::create(&path, spec).unwrap();
        for i in 0..64 {
            writer.write_sample(i as f32 / 64.0).unwrap();
        }
        writer.finalize().unwrap();
        let w = Waveform::from_wav_file(&path).unwrap();
        assert_eq!(w.len(), 64);
        assert!((w.samples()[32] - 0.5).abs() < 1e-7);
    }
}
