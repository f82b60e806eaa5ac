//! Transition-angle analysis over labeled segments.
//!
//! Feature extraction uses the per-frame two-quadrant angle; analysis mode
//! instead characterizes each whole segment by its net angle, the
//! four-quadrant arctangent of the end-minus-beginning deltas. With the
//! four-quadrant form a transition and its reverse land 180 degrees apart,
//! so the absolute angles of a forward/reverse pair sum to about 180.

use std::collections::BTreeMap;

use crate::config::ExtractionConfig;
use crate::dynamics::{net_transition_angle, polar, ratio_plane, transition_angle};
use crate::error::Result;
use crate::pipeline::sscf_track;
use crate::wave::Waveform;

/// Which coordinate plane the analysis runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    /// SSCF1 against SSCF2, in Hz.
    Sscf12,
    /// SSCF1/SSCF3 against SSCF2/SSCF3, dimensionless.
    Ratio,
}

impl std::str::FromStr for Plane {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sscf12" => Ok(Plane::Sscf12),
            "ratio" => Ok(Plane::Ratio),
            other => Err(crate::error::Error::Config(format!(
                "unknown plane '{other}' (expected sscf12 or ratio)"
            ))),
        }
    }
}

/// A labeled stretch of audio to analyze.
#[derive(Debug, Clone)]
pub struct Segment {
    pub label: String,
    pub waveform: Waveform,
    pub start_s: f64,
    pub end_s: f64,
}

/// Per-frame trajectories of one segment, for plotting.
#[derive(Debug, Clone)]
pub struct SegmentTrajectory {
    pub label: String,
    pub segment_index: usize,
    pub times_s: Vec<f64>,
    /// Two-quadrant per-frame transition angle, degrees.
    pub transition_angle_deg: Vec<f64>,
    /// Polar angle of the raw plane point, degrees.
    pub polar_angle_deg: Vec<f64>,
    /// Net whole-segment angle, degrees; `None` when the segment shows no
    /// movement.
    pub net_angle_deg: Option<f64>,
}

/// Aggregate over all segments sharing a label.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionStats {
    pub label: String,
    pub mean_angle_deg: f64,
    pub std_angle_deg: f64,
    pub n: usize,
    /// `|mean(label)| + |mean(reversed label)|` when both are present.
    pub pair_sum_deg: Option<f64>,
}

/// Full analysis output.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub stats: Vec<TransitionStats>,
    pub trajectories: Vec<SegmentTrajectory>,
    /// Segments excluded for showing no net movement (or too few frames).
    pub excluded: usize,
}

/// Computes per-label net-angle statistics and per-segment trajectories.
///
/// Degenerate segments (fewer than two frames, or no net movement) are
/// excluded from the statistics and counted in the report.
pub fn analyze_transitions(
    segments: &[Segment],
    plane: Plane,
    config: &ExtractionConfig,
) -> Result<AnalysisReport> {
    let hop_s = config.hop_ms / 1000.0;
    let mut trajectories = Vec::new();
    let mut net_by_label: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut excluded = 0usize;

    for (index, segment) in segments.iter().enumerate() {
        let track = sscf_track(&segment.waveform, config)?;
        let n = track.n_frames();
        let j0 = ((segment.start_s / hop_s).round() as usize).min(n);
        let j1 = ((segment.end_s / hop_s).round() as usize).clamp(j0, n);
        if j1 - j0 < 2 {
            excluded += 1;
            continue;
        }
        let (a, b) = match plane {
            Plane::Sscf12 => (
                track.band_track(1)[j0..j1].to_vec(),
                track.band_track(2)[j0..j1].to_vec(),
            ),
            Plane::Ratio => {
                let points = ratio_plane(&track)?;
                (
                    points[j0..j1].iter().map(|p| p.x).collect(),
                    points[j0..j1].iter().map(|p| p.y).collect(),
                )
            }
        };
        let frame_angles = transition_angle(&a, &b)?;
        let polar_track = polar(&a, &b)?;
        let net = net_transition_angle(&a, &b);
        match net {
            Some(angle) => net_by_label
                .entry(segment.label.clone())
                .or_default()
                .push(angle),
            None => excluded += 1,
        }
        trajectories.push(SegmentTrajectory {
            label: segment.label.clone(),
            segment_index: index,
            times_s: (j0..j1).map(|j| j as f64 * hop_s).collect(),
            transition_angle_deg: frame_angles.angles_deg,
            polar_angle_deg: polar_track.angle_deg,
            net_angle_deg: net,
        });
    }

    let means: BTreeMap<&String, f64> = net_by_label
        .iter()
        .map(|(label, angles)| (label, angles.iter().sum::<f64>() / angles.len() as f64))
        .collect();
    let stats = net_by_label
        .iter()
        .map(|(label, angles)| {
            let mean = means[label];
            let var = angles.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>()
                / angles.len() as f64;
            let reversed: String = label.chars().rev().collect();
            let pair_sum_deg = if reversed != *label {
                means.get(&reversed).map(|rev| mean.abs() + rev.abs())
            } else {
                None
            };
            TransitionStats {
                label: label.clone(),
                mean_angle_deg: mean,
                std_angle_deg: var.sqrt(),
                n: angles.len(),
                pair_sum_deg,
            }
        })
        .collect();

    Ok(AnalysisReport { stats, trajectories, excluded })
}
