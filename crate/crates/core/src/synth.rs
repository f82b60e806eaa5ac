//! Deterministic formant-transition synthesizer.
//!
//! Source-filter synthesis: a glottal impulse train at an interpolated
//! fundamental drives a cascade of second-order resonators whose center
//! frequencies and bandwidths interpolate between two vowel targets. The
//! output is not meant to sound natural; it exists to produce controlled
//! stimuli whose centroid trajectories are known by construction, serving
//! as the ground truth for the dynamic-parameter tests.
//!
//! Vowel presets use textbook male formant values, with female variants
//! derived by scaling formants by 1.18 and the fundamental by 1.7:
//!
//! | vowel | F0  | F1  | F2   | F3   |
//! |-------|-----|-----|------|------|
//! | a     | 120 | 700 | 1200 | 2600 |
//! | e     | 120 | 530 | 1840 | 2480 |
//! | i     | 120 | 300 | 2300 | 3010 |
//! | o     | 120 | 500 | 900  | 2400 |
//! | u     | 120 | 320 | 800  | 2500 |

use crate::error::{Error, Result};
use crate::wave::Waveform;

/// Scale factor from male to female formant frequencies.
pub const FEMALE_FORMANT_SCALE: f64 = 1.18;
/// Scale factor from male to female fundamental frequency.
pub const FEMALE_F0_SCALE: f64 = 1.7;

/// Allowed transition duration range in seconds.
pub const DURATION_RANGE_S: (f64, f64) = (0.05, 5.0);

/// A static vowel target: fundamental plus three formants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VowelSpec {
    pub f0_hz: f64,
    pub formants_hz: [f64; 3],
    pub bandwidths_hz: [f64; 3],
}

impl VowelSpec {
    /// Checks `0 < f0 < F1 < F2 < F3` and positive bandwidths. The Nyquist
    /// bound is checked at synthesis time, when the rate is known.
    pub fn validate(&self) -> Result<()> {
        let [f1, f2, f3] = self.formants_hz;
        if !(self.f0_hz > 0.0 && self.f0_hz < f1 && f1 < f2 && f2 < f3) {
            return Err(Error::Synth(format!(
                "vowel must satisfy 0 < f0 < F1 < F2 < F3, got f0={} F=[{f1}, {f2}, {f3}]",
                self.f0_hz
            )));
        }
        if self.bandwidths_hz.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::Synth("formant bandwidths must be positive".into()));
        }
        Ok(())
    }

    /// Female variant: formants scaled by 1.18, fundamental by 1.7.
    pub fn to_female(&self) -> Self {
        Self {
            f0_hz: self.f0_hz * FEMALE_F0_SCALE,
            formants_hz: self.formants_hz.map(|f| f * FEMALE_FORMANT_SCALE),
            bandwidths_hz: self.bandwidths_hz,
        }
    }

    /// Uniform frequency scaling of fundamental and formants.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            f0_hz: self.f0_hz * factor,
            formants_hz: self.formants_hz.map(|f| f * factor),
            bandwidths_hz: self.bandwidths_hz,
        }
    }
}

/// Trajectory shape between the two vowel targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    /// Raised-cosine ease-in/ease-out; zero slope at both endpoints.
    Cosine,
}

/// A vowel-to-vowel stimulus description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSpec {
    pub start: VowelSpec,
    pub end: VowelSpec,
    pub duration_s: f64,
    pub interpolation: Interpolation,
}

impl TransitionSpec {
    pub fn validate(&self) -> Result<()> {
        self.start.validate()?;
        self.end.validate()?;
        let (lo, hi) = DURATION_RANGE_S;
        if !(self.duration_s >= lo && self.duration_s <= hi) {
            return Err(Error::Synth(format!(
                "duration {} s outside [{lo}, {hi}] s",
                self.duration_s
            )));
        }
        Ok(())
    }

    fn mix(&self, t: f64) -> f64 {
        match self.interpolation {
            Interpolation::Linear => t,
            Interpolation::Cosine => 0.5 - 0.5 * (std::f64::consts::PI * t).cos(),
        }
    }

    /// Interpolated vowel at normalized time `t` in `[0, 1]`.
    pub fn at(&self, t: f64) -> VowelSpec {
        let m = self.mix(t);
        let lerp = |a: f64, b: f64| a + (b - a) * m;
        VowelSpec {
            f0_hz: lerp(self.start.f0_hz, self.end.f0_hz),
            formants_hz: [
                lerp(self.start.formants_hz[0], self.end.formants_hz[0]),
                lerp(self.start.formants_hz[1], self.end.formants_hz[1]),
                lerp(self.start.formants_hz[2], self.end.formants_hz[2]),
            ],
            bandwidths_hz: [
                lerp(self.start.bandwidths_hz[0], self.end.bandwidths_hz[0]),
                lerp(self.start.bandwidths_hz[1], self.end.bandwidths_hz[1]),
                lerp(self.start.bandwidths_hz[2], self.end.bandwidths_hz[2]),
            ],
        }
    }
}

/// Two-pole resonator `y[n] = A x[n] + B y[n-1] + C y[n-2]` with unit DC
/// gain. Pole radius is `exp(-pi bw / rate)`, strictly inside the unit
/// circle for positive bandwidths.
struct Resonator {
    b: f64,
    c: f64,
    a: f64,
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new() -> Self {
        Self { b: 0.0, c: 0.0, a: 1.0, y1: 0.0, y2: 0.0 }
    }

    fn set(&mut self, freq_hz: f64, bw_hz: f64, sample_rate_hz: f64) -> Result<()> {
        let nyquist = sample_rate_hz / 2.0;
        if !(freq_hz > 0.0 && freq_hz < nyquist) {
            return Err(Error::Synth(format!(
                "resonator frequency {freq_hz} Hz outside (0, {nyquist})"
            )));
        }
        let r = (-std::f64::consts::PI * bw_hz / sample_rate_hz).exp();
        if !(r < 1.0) {
            return Err(Error::Synth(format!(
                "unstable resonator: pole radius {r} >= 1 (bandwidth {bw_hz} Hz)"
            )));
        }
        self.c = -r * r;
        self.b = 2.0 * r * (2.0 * std::f64::consts::PI * freq_hz / sample_rate_hz).cos();
        self.a = 1.0 - self.b - self.c;
        Ok(())
    }

    fn step(&mut self, x: f64) -> f64 {
        let y = self.a * x + self.b * self.y1 + self.c * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Synthesizes the transition, normalized to a peak amplitude of 0.9.
///
/// Fully deterministic: the same spec and rate produce bit-identical
/// samples.
pub fn synth_transition(spec: &TransitionSpec, sample_rate_hz: u32) -> Result<Waveform> {
    spec.validate()?;
    let rate = sample_rate_hz as f64;
    let nyquist = rate / 2.0;
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let v = spec.at(t);
        v.validate()?;
        if v.formants_hz[2] >= nyquist {
            return Err(Error::Synth(format!(
                "F3 = {} Hz reaches Nyquist at {} Hz",
                v.formants_hz[2], nyquist
            )));
        }
    }

    let n = (spec.duration_s * rate).round() as usize;
    let mut resonators = [Resonator::new(), Resonator::new(), Resonator::new()];
    let mut out = Vec::with_capacity(n);
    let mut phase = 1.0; // start with an impulse at n = 0
    for i in 0..n {
        let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
        let v = spec.at(t);
        for (res, (f, bw)) in resonators
            .iter_mut()
            .zip(v.formants_hz.iter().zip(v.bandwidths_hz.iter()))
        {
            res.set(*f, *bw, rate)?;
        }
        phase += v.f0_hz / rate;
        let mut x = 0.0;
        if phase >= 1.0 {
            phase -= 1.0;
            x = 1.0;
        }
        for res in &mut resonators {
            x = res.step(x);
        }
        out.push(x);
    }

    let peak = out.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if peak > 0.0 {
        let g = 0.9 / peak;
        for v in &mut out {
            *v *= g;
        }
    }
    Waveform::new(out, sample_rate_hz)
}

/// Steady-vowel convenience: start and end at the same target.
pub fn synth_steady(vowel: &VowelSpec, duration_s: f64, sample_rate_hz: u32) -> Result<Waveform> {
    synth_transition(
        &TransitionSpec {
            start: *vowel,
            end: *vowel,
            duration_s,
            interpolation: Interpolation::Linear,
        },
        sample_rate_hz,
    )
}

/// Canonical vowel targets (male). Values are standard phonetics-reference
/// formants, not measurements from any particular corpus.
pub fn vowel_presets() -> Vec<(&'static str, VowelSpec)> {
    let v = |f0, f1, f2, f3| VowelSpec {
        f0_hz: f0,
        formants_hz: [f1, f2, f3],
        bandwidths_hz: [80.0, 100.0, 140.0],
    };
    vec![
        ("a", v(120.0, 700.0, 1200.0, 2600.0)),
        ("e", v(120.0, 530.0, 1840.0, 2480.0)),
        ("i", v(120.0, 300.0, 2300.0, 3010.0)),
        ("o", v(120.0, 500.0, 900.0, 2400.0)),
        ("u", v(120.0, 320.0, 800.0, 2500.0)),
    ]
}

/// Looks up a preset by name, optionally the female variant.
pub fn vowel_preset(name: &str, female: bool) -> Result<VowelSpec> {
    let spec = vowel_presets()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, v)| v)
        .ok_or_else(|| {
            Error::Synth(format!(
                "unknown vowel preset '{name}' (available: a, e, i, o, u)"
            ))
        })?;
    Ok(if female { spec.to_female() } else { spec })
}
