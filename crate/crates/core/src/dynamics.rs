//! Dynamic parameters derived from coordinate tracks: frame-to-frame
//! transition angles, polar radius/angle, the SSCF1/SSCF3-SSCF2/SSCF3 ratio
//! plane, per-utterance mean-variance normalization and regression deltas.
//!
//! The transition angle is the two-quadrant arctangent of the ratio of
//! frame deltas, so it lives in `(-90, 90]` degrees and inverts sign when
//! the denominator delta crosses zero — the discontinuity that makes it
//! noisy as a frame-level feature. The polar parameters of the same plane
//! use the raw coordinates instead of deltas; with nonnegative coordinates
//! the angle stays inside `[0, 90]` degrees and the trajectory is smooth.

use crate::error::{Error, Result};
use crate::sscf::SscfTrack;

/// Deltas below this magnitude count as "no movement" for angle purposes.
pub const MOVEMENT_EPSILON: f64 = 1e-9;

/// Minimum SSCF3 accepted by the ratio plane; values this small mean the
/// third band is misconfigured rather than quiet.
pub const MIN_RATIO_DENOMINATOR_HZ: f64 = 1e-6;

const DEG_PER_RAD: f64 = 180.0 / std::f64::consts::PI;

/// Frame-synchronous transition angles in degrees, range `(-90, 90]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTrack {
    pub angles_deg: Vec<f64>,
    /// True where both deltas were below [`MOVEMENT_EPSILON`] and the angle
    /// was held from the previous frame.
    pub held: Vec<bool>,
}

/// Per-frame polar parameters of a plane with nonnegative coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarTrack {
    pub radius: Vec<f64>,
    /// Degrees in `[0, 90]`.
    pub angle_deg: Vec<f64>,
    /// True where both coordinates were zero and the angle defaulted to 0.
    pub at_origin: Vec<bool>,
}

/// One frame of the dimensionless ratio plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPlanePoint {
    /// SSCF1 / SSCF3.
    pub x: f64,
    /// SSCF2 / SSCF3.
    pub y: f64,
}

/// Zero-mean, unit-variance track (population statistics).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTrack {
    pub values: Vec<f64>,
    /// True when the input was constant and the output is all zeros.
    pub constant: bool,
}

/// Angle of the per-frame movement `(delta a, delta b)` via the
/// two-quadrant arctangent of `delta b / delta a`, in degrees.
///
/// Frame 0 copies frame 1. When both deltas are below
/// [`MOVEMENT_EPSILON`] the previous angle is held and the frame flagged.
pub fn transition_angle(track_a: &[f64], track_b: &[f64]) -> Result<AngleTrack> {
    if track_a.len() != track_b.len() {
        return Err(Error::Contract(format!(
            "track lengths differ: {} vs {}",
            track_a.len(),
            track_b.len()
        )));
    }
    if track_a.len() < 2 {
        return Err(Error::Contract("transition angles need at least 2 frames".into()));
    }
    let n = track_a.len();
    let mut angles = vec![0.0; n];
    let mut held = vec![false; n];
    let mut previous = 0.0;
    for j in 1..n {
        let da = track_a[j] - track_a[j - 1];
        let db = track_b[j] - track_b[j - 1];
        if da.abs() < MOVEMENT_EPSILON && db.abs() < MOVEMENT_EPSILON {
            angles[j] = previous;
            held[j] = true;
        } else {
            angles[j] = (db / da).atan() * DEG_PER_RAD;
            previous = angles[j];
        }
    }
    angles[0] = angles[1];
    held[0] = held[1];
    Ok(AngleTrack { angles_deg: angles, held })
}

/// Net angle of a whole segment: four-quadrant arctangent of
/// `(last - first)` deltas, degrees in `(-180, 180]`.
///
/// Used by analysis mode, where a transition and its reverse must map to
/// angles that differ by 180 degrees. Returns `None` when the segment shows
/// no net movement.
pub fn net_transition_angle(track_a: &[f64], track_b: &[f64]) -> Option<f64> {
    let (first_a, last_a) = (*track_a.first()?, *track_a.last()?);
    let (first_b, last_b) = (*track_b.first()?, *track_b.last()?);
    let da = last_a - first_a;
    let db = last_b - first_b;
    if da.abs() < MOVEMENT_EPSILON && db.abs() < MOVEMENT_EPSILON {
        return None;
    }
    Some(db.atan2(da) * DEG_PER_RAD)
}

/// Polar radius and angle of per-frame points `(a[j], b[j])`.
///
/// Inputs must be nonnegative (subband centroids and their ratios are);
/// the angle then lies in `[0, 90]` degrees. The origin maps to angle 0
/// with the frame flagged.
pub fn polar(track_a: &[f64], track_b: &[f64]) -> Result<PolarTrack> {
    if track_a.len() != track_b.len() {
        return Err(Error::Contract(format!(
            "track lengths differ: {} vs {}",
            track_a.len(),
            track_b.len()
        )));
    }
    if track_a.is_empty() {
        return Err(Error::Contract("polar parameters need at least 1 frame".into()));
    }
    let n = track_a.len();
    let mut radius = Vec::with_capacity(n);
    let mut angle = Vec::with_capacity(n);
    let mut at_origin = vec![false; n];
    for j in 0..n {
        let (a, b) = (track_a[j], track_b[j]);
        if a < 0.0 || b < 0.0 {
            return Err(Error::Contract(format!(
                "polar plane coordinates must be nonnegative, got ({a}, {b}) at frame {j}"
            )));
        }
        radius.push((a * a + b * b).sqrt());
        if a == 0.0 && b == 0.0 {
            angle.push(0.0);
            at_origin[j] = true;
        } else {
            angle.push(b.atan2(a) * DEG_PER_RAD);
        }
    }
    Ok(PolarTrack { radius, angle_deg: angle, at_origin })
}

/// Per-frame `(SSCF1/SSCF3, SSCF2/SSCF3)` points.
pub fn ratio_plane(track: &SscfTrack) -> Result<Vec<RatioPlanePoint>> {
    if track.n_bands() < 4 {
        return Err(Error::Contract(format!(
            "ratio plane needs bands 1..3, track has {}",
            track.n_bands()
        )));
    }
    (0..track.n_frames())
        .map(|j| {
            let s3 = track.value(j, 3);
            if s3 < MIN_RATIO_DENOMINATOR_HZ {
                return Err(Error::Contract(format!(
                    "SSCF3 = {s3} Hz at frame {j}; band 3 appears misconfigured"
                )));
            }
            Ok(RatioPlanePoint {
                x: track.value(j, 1) / s3,
                y: track.value(j, 2) / s3,
            })
        })
        .collect()
}

/// Per-utterance mean-variance normalization with population variance.
///
/// A constant input (or a single frame) yields all zeros with the flag set.
pub fn mvn(track: &[f64]) -> NormalizedTrack {
    // exact constancy check; mean subtraction alone can leave ulp residue
    if track.iter().all(|x| *x == track[0]) {
        return NormalizedTrack {
            values: vec![0.0; track.len()],
            constant: true,
        };
    }
    let n = track.len() as f64;
    let mean = track.iter().sum::<f64>() / n;
    let var = track.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std <= 0.0 || !std.is_finite() {
        return NormalizedTrack {
            values: vec![0.0; track.len()],
            constant: true,
        };
    }
    NormalizedTrack {
        values: track.iter().map(|x| (x - mean) / std).collect(),
        constant: false,
    }
}

/// First-order regression deltas over a window of `half_window` frames on
/// each side, with edges replicated:
///
/// ```text
/// d[t] = sum_{n=1..N} n * (x[t+n] - x[t-n]) / (2 * sum_{n=1..N} n^2)
/// ```
///
/// Apply twice for delta-deltas.
pub fn deltas(rows: &[Vec<f64>], half_window: usize) -> Vec<Vec<f64>> {
    let n_frames = rows.len();
    if n_frames == 0 {
        return Vec::new();
    }
    let dims = rows[0].len();
    let denom: f64 = 2.0 * (1..=half_window).map(|n| (n * n) as f64).sum::<f64>();
    (0..n_frames)
        .map(|t| {
            let mut out = vec![0.0; dims];
            for n in 1..=half_window {
                let fwd = &rows[(t + n).min(n_frames - 1)];
                let bwd = &rows[t.saturating_sub(n)];
                for d in 0..dims {
                    out[d] += n as f64 * (fwd[d] - bwd[d]);
                }
            }
            if denom > 0.0 {
                for v in &mut out {
                    *v /= denom;
                }
            }
            out
        })
        .collect()
}
