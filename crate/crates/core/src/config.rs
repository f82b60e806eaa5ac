//! Extraction configuration: frontend constants, subband overrides and
//! custom feature profiles, loadable from a TOML file.
//!
//! Every constant of the chain is surfaced here so an extraction is fully
//! described by (audio, profile, config); the pipeline embeds a hash of the
//! resolved configuration in output metadata to make runs reproducible.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::StreamSpec;
use crate::sscf::SubbandSpec;

/// Unit for emitted angle features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    Degrees,
    Radians,
}

impl AngleUnit {
    /// Factor converting degrees to this unit.
    pub fn from_degrees_factor(self) -> f64 {
        match self {
            AngleUnit::Degrees => 1.0,
            AngleUnit::Radians => std::f64::consts::PI / 180.0,
        }
    }
}

/// Full extraction configuration with the defaults used throughout:
/// 25 ms / 10 ms frames, 0.97 pre-emphasis, Hamming window, FFT 512,
/// lifter 22, delta half-window 2, six mel-spaced rectangular subbands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub preemphasis: f64,
    pub fft_size: usize,
    pub lifter: usize,
    pub delta_half_window: usize,
    /// In-band weighted energy at or below this triggers the band-midpoint
    /// fallback with a degenerate-frame flag.
    pub sscf_energy_floor: f64,
    pub angle_unit: AngleUnit,
    /// Emit SSCF0 as log-Hz (floored at 1 Hz) instead of raw Hz.
    pub sscf0_log_hz: bool,
    /// Subband layout override; `None` selects the six mel-spaced bands for
    /// the input's sample rate.
    pub subbands: Option<Vec<SubbandSpec>>,
    /// Custom profile compositions, addressable by name next to the
    /// built-in presets.
    pub profiles: BTreeMap<String, Vec<StreamSpec>>,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            hop_ms: 10.0,
            preemphasis: 0.97,
            fft_size: 512,
            lifter: 22,
            delta_half_window: 2,
            sscf_energy_floor: 0.0,
            angle_unit: AngleUnit::Degrees,
            sscf0_log_hz: false,
            subbands: None,
            profiles: BTreeMap::new(),
        }
    }
}

impl ExtractionConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    /// Static checks that do not need the input sample rate; subband edges
    /// are checked against Nyquist when extraction sees the audio.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.preemphasis) {
            return Err(Error::Config(format!(
                "pre-emphasis must be in [0, 1), got {}",
                self.preemphasis
            )));
        }
        if !(self.hop_ms > 0.0) || self.frame_ms < self.hop_ms {
            return Err(Error::Config(format!(
                "frame {} ms / hop {} ms must satisfy frame >= hop > 0",
                self.frame_ms, self.hop_ms
            )));
        }
        if !self.fft_size.is_power_of_two() {
            return Err(Error::Config(format!(
                "FFT size {} is not a power of two",
                self.fft_size
            )));
        }
        if self.sscf_energy_floor < 0.0 {
            return Err(Error::Config("sscf_energy_floor must be >= 0".into()));
        }
        if let Some(bands) = &self.subbands {
            if bands.len() < 4 {
                return Err(Error::Config(
                    "subband override needs at least 4 bands (SSCF0..SSCF3)".into(),
                ));
            }
        }
        Ok(())
    }

    /// Subbands in force for a given sample rate.
    pub fn subbands_for(&self, sample_rate_hz: u32) -> Vec<SubbandSpec> {
        self.subbands
            .clone()
            .unwrap_or_else(|| crate::sscf::default_subbands(sample_rate_hz))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ExtractionConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_round_trip_and_overrides() {
        let text = r#"
            preemphasis = 0.95
            fft_size = 1024
            angle_unit = "radians"

            [[subbands]]
            low_hz = 0.0
            high_hz = 400.0

            [[subbands]]
            low_hz = 400.0
            high_hz = 1000.0
            weight_shape = "triangular"
            gamma = 2.0

            [[subbands]]
            low_hz = 1000.0
            high_hz = 2000.0

            [[subbands]]
            low_hz = 2000.0
            high_hz = 4000.0
        "#;
        let config = ExtractionConfig::from_toml_str(text).unwrap();
        assert_eq!(config.fft_size, 1024);
        assert_eq!(config.angle_unit, AngleUnit::Radians);
        let bands = config.subbands.as_ref().unwrap();
        assert_eq!(bands.len(), 4);
        assert_eq!(bands[1].gamma, 2.0);
        assert_eq!(bands[0].gamma, 1.0); // default
        // defaults survive
        assert_eq!(config.frame_ms, 25.0);
    }

    #[test]
    fn bad_values_are_rejected() {
        assert!(ExtractionConfig::from_toml_str("preemphasis = 1.0").is_err());
        assert!(ExtractionConfig::from_toml_str("fft_size = 500").is_err());
        assert!(ExtractionConfig::from_toml_str("hop_ms = 30.0").is_err());
        assert!(ExtractionConfig::from_toml_str("not_a_field = 1").is_err());
    }

    #[test]
    fn custom_profiles_parse() {
        let text = r#"
            [profiles]
            custom = [
                { kind = "mfcc", n_coefs = 6, derivatives = true },
                { kind = "polar", plane = [2, 3] },
                { kind = "sscf0", mvn = true },
            ]
        "#;
        let config = ExtractionConfig::from_toml_str(text).unwrap();
        assert_eq!(config.profiles["custom"].len(), 3);
    }
}
