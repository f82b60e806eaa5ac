//! Speech feature extraction built around spectral subband centroid
//! frequencies (SSCFs) and their polar transition dynamics.
//!
//! The crate covers the full chain from PCM audio to assembled feature
//! matrices:
//!
//! 1. signal conditioning: pre-emphasis, framing, Hamming window, power
//!    spectrum ([`dsp`]),
//! 2. per-frame spectral features: mel-filterbank MFCCs and subband
//!    centroids ([`melbank`], [`mfcc`], [`sscf`]),
//! 3. dynamic parameters: transition angles, polar radius/angle, the
//!    SSCF1/SSCF3-SSCF2/SSCF3 ratio plane, mean-variance normalization and
//!    regression deltas ([`dynamics`]),
//! 4. feature-profile assembly, batch extraction over corpus manifests and
//!    transition-angle analysis ([`pipeline`], [`batch`], [`analysis`]),
//! 5. a deterministic formant-transition synthesizer used as the ground
//!    truth for the dynamic-parameter tests ([`synth`]),
//! 6. CSV / HTK / raw binary feature writers and readers ([`formats`]).
//!
//! Batch and per-frame loops run on rayon when the `parallel` feature
//! (default) is enabled; without it the same code paths run sequentially.

pub mod analysis;
pub mod batch;
pub mod config;
pub mod dsp;
pub mod dynamics;
pub mod error;
pub mod formats;
pub mod melbank;
pub mod mfcc;
pub mod pipeline;
pub mod profile;
pub mod sscf;
pub mod synth;
pub mod wave;

pub(crate) mod par;

pub use error::{Error, Result};
pub use wave::Waveform;
