//! Feature profiles: ordered stream compositions and their dimensions.
//!
//! The six built-in presets pair a 6- or 13-coefficient MFCC stream (with
//! first- and second-order derivatives) with optional dynamic streams:
//! polar parameters of the SSCF1-SSCF2 plane, polar parameters of the
//! SSCF1/SSCF3-SSCF2/SSCF3 ratio plane, and SSCF0 with or without
//! mean-variance normalization. Dynamic streams enter as static dimensions
//! by default; per-stream `derivatives = true` appends their deltas too.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::config::ExtractionConfig;

/// One component stream of a profile, in emission order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StreamSpec {
    /// `n_coefs` cepstral coefficients from an `n_coefs`-filter mel bank.
    Mfcc {
        n_coefs: usize,
        #[serde(default)]
        derivatives: bool,
    },
    /// Polar radius and angle of a subband pair plane.
    Polar {
        #[serde(default = "default_plane")]
        plane: [usize; 2],
        #[serde(default)]
        derivatives: bool,
    },
    /// Polar radius and angle of the SSCF1/SSCF3-SSCF2/SSCF3 ratio plane.
    PolarRatio {
        #[serde(default)]
        derivatives: bool,
    },
    /// The SSCF0 pseudo-F0 track.
    Sscf0 {
        #[serde(default)]
        mvn: bool,
        #[serde(default)]
        derivatives: bool,
    },
}

fn default_plane() -> [usize; 2] {
    [1, 2]
}

impl StreamSpec {
    /// Dimensions this stream contributes (deltas triple the base width).
    pub fn dims(&self) -> usize {
        let (base, derivatives) = match self {
            StreamSpec::Mfcc { n_coefs, derivatives } => (*n_coefs, *derivatives),
            StreamSpec::Polar { derivatives, .. } => (2, *derivatives),
            StreamSpec::PolarRatio { derivatives } => (2, *derivatives),
            StreamSpec::Sscf0 { derivatives, .. } => (1, *derivatives),
        };
        if derivatives {
            base * 3
        } else {
            base
        }
    }

    /// Whether this stream needs the subband centroid track.
    pub fn needs_sscf(&self) -> bool {
        !matches!(self, StreamSpec::Mfcc { .. })
    }
}

/// A named, ordered stream composition.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureProfile {
    pub name: String,
    pub streams: Vec<StreamSpec>,
}

/// Names of the built-in presets.
pub const PRESET_NAMES: [&str; 6] = [
    "mfcc6_dd",
    "mfcc13_dd",
    "mfcc6_dd_polar",
    "mfcc6_dd_polar_ratio",
    "mfcc6_dd_polar_ratio_sscf0",
    "mfcc6_dd_polar_ratio_sscf0_mvn",
];

impl FeatureProfile {
    /// Resolves a profile by name: built-in presets first, then custom
    /// profiles defined in the config.
    pub fn resolve(name: &str, config: &ExtractionConfig) -> Result<Self> {
        let mfcc6 = StreamSpec::Mfcc { n_coefs: 6, derivatives: true };
        let streams = match name {
            "mfcc6_dd" => vec![mfcc6],
            "mfcc13_dd" => vec![StreamSpec::Mfcc { n_coefs: 13, derivatives: true }],
            "mfcc6_dd_polar" => vec![
                mfcc6,
                StreamSpec::Polar { plane: [1, 2], derivatives: false },
            ],
            "mfcc6_dd_polar_ratio" => vec![mfcc6, StreamSpec::PolarRatio { derivatives: false }],
            "mfcc6_dd_polar_ratio_sscf0" => vec![
                mfcc6,
                StreamSpec::PolarRatio { derivatives: false },
                StreamSpec::Sscf0 { mvn: false, derivatives: false },
            ],
            "mfcc6_dd_polar_ratio_sscf0_mvn" => vec![
                mfcc6,
                StreamSpec::PolarRatio { derivatives: false },
                StreamSpec::Sscf0 { mvn: true, derivatives: false },
            ],
            other => config
                .profiles
                .get(other)
                .cloned()
                .ok_or_else(|| {
                    Error::Config(format!(
                        "unknown profile '{other}' (presets: {}, or define it in the config)",
                        PRESET_NAMES.join(", ")
                    ))
                })?,
        };
        let profile = Self { name: name.to_string(), streams };
        profile.validate()?;
        Ok(profile)
    }

    pub fn expected_dim(&self) -> usize {
        self.streams.iter().map(StreamSpec::dims).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.streams.is_empty() {
            return Err(Error::Config(format!("profile '{}' has no streams", self.name)));
        }
        for stream in &self.streams {
            match stream {
                StreamSpec::Mfcc { n_coefs, .. } if *n_coefs == 0 => {
                    return Err(Error::Config("mfcc stream needs n_coefs >= 1".into()));
                }
                StreamSpec::Polar { plane, .. } if plane[0] == plane[1] => {
                    return Err(Error::Config("polar plane needs two distinct bands".into()));
                }
                _ => {}
            }
        }
        Ok(())
    }
}
