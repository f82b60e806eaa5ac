//! Batch feature-extraction CLI: `extract`, `synth` and `analyze`
//! subcommands over the sscf library.
//!
//! Exit codes: 0 on success, 1 on runtime failure (including partial batch
//! failure), 2 on usage errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{ArgGroup, Parser, Subcommand};

use sscf::analysis::{analyze_transitions, Plane, Segment};
use sscf::batch::{batch_extract, extract_file, read_manifest};
use sscf::config::ExtractionConfig;
use sscf::formats::OutputFormat;
use sscf::profile::FeatureProfile;
use sscf::synth::{synth_transition, vowel_preset, Interpolation, TransitionSpec};
use sscf::wave::Waveform;

#[derive(Parser)]
#[command(name = "sscf", version, about = "Subband centroid and MFCC feature extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract features from a WAV file or a manifest of files.
    #[command(group(ArgGroup::new("source").required(true).args(["input", "manifest"])))]
    Extract {
        /// Single input WAV file.
        #[arg(long)]
        input: Option<PathBuf>,
        /// UTF-8 TSV manifest: `utterance_id TAB path`, no header.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Feature profile name (preset or defined in the config file).
        #[arg(long)]
        profile: String,
        /// Output format: csv, htk or raw.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// TOML configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Synthesize a vowel-to-vowel transition stimulus as 16-bit PCM WAV.
    Synth {
        /// Start vowel preset (a, e, i, o, u).
        #[arg(long)]
        from: String,
        /// End vowel preset.
        #[arg(long)]
        to: String,
        /// Duration in seconds, within [0.05, 5].
        #[arg(long, default_value_t = 0.3)]
        dur: f64,
        /// Sample rate in Hz.
        #[arg(long, default_value_t = 16_000)]
        rate: u32,
        /// Speaker variant.
        #[arg(long, default_value = "male")]
        speaker: String,
        /// Formant trajectory shape: linear or cosine.
        #[arg(long, default_value = "cosine")]
        interp: String,
        /// Output WAV path; defaults to `<from>_<to>.wav`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute per-label transition-angle statistics over labeled segments.
    Analyze {
        /// UTF-8 TSV: `label TAB path TAB start_s TAB end_s`, no header.
        #[arg(long)]
        segments: PathBuf,
        /// Plane: sscf12 or ratio.
        #[arg(long, default_value = "sscf12")]
        plane: String,
        /// Output CSV with per-label statistics.
        #[arg(long, default_value = "transition_stats.csv")]
        out_stats: PathBuf,
        /// Output CSV with per-segment angle trajectories for plotting.
        #[arg(long, default_value = "transition_trajectories.csv")]
        out_trajectories: PathBuf,
        /// TOML configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Argument-level problem: print and exit 2, like clap's own errors.
fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn load_config(path: &Option<PathBuf>) -> Result<ExtractionConfig, String> {
    match path {
        None => Ok(ExtractionConfig::default()),
        Some(p) => ExtractionConfig::from_toml_file(p).map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Extract { input, manifest, profile, format, out, config } => {
            cmd_extract(input, manifest, &profile, &format, &out, &config)
        }
        Command::Synth { from, to, dur, rate, speaker, interp, out } => {
            cmd_synth(&from, &to, dur, rate, &speaker, &interp, out)
        }
        Command::Analyze { segments, plane, out_stats, out_trajectories, config } => {
            cmd_analyze(&segments, &plane, &out_stats, &out_trajectories, &config)
        }
    }
}

fn cmd_extract(
    input: Option<PathBuf>,
    manifest: Option<PathBuf>,
    profile_name: &str,
    format: &str,
    out: &PathBuf,
    config_path: &Option<PathBuf>,
) -> ExitCode {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let format: OutputFormat = match format.parse() {
        Ok(f) => f,
        Err(e) => return usage_error(&format!("{e}")),
    };
    let profile = match FeatureProfile::resolve(profile_name, &config) {
        Ok(p) => p,
        Err(e) => return usage_error(&format!("{e}")),
    };

    if let Some(input) = input {
        match extract_file(&input, &profile, &config, out, format) {
            Ok((path, matrix)) => {
                println!(
                    "{}: {} frames x {} dims -> {}",
                    input.display(),
                    matrix.n_frames(),
                    matrix.dims(),
                    path.display()
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        }
    } else {
        let manifest = manifest.expect("clap guarantees one source");
        let (entries, malformed) = match read_manifest(&manifest) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        };
        let summary = match batch_extract(&entries, &profile, &config, out, format) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        };
        for (id, frames) in &summary.successes {
            println!("{id}: {frames} frames");
        }
        for (id, message) in malformed.iter().chain(&summary.failures) {
            eprintln!("{id}: FAILED: {message}");
        }
        println!(
            "{} ok, {} failed",
            summary.successes.len(),
            summary.failures.len() + malformed.len()
        );
        if summary.all_succeeded() && malformed.is_empty() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        }
    }
}

fn cmd_synth(
    from: &str,
    to: &str,
    dur: f64,
    rate: u32,
    speaker: &str,
    interp: &str,
    out: Option<PathBuf>,
) -> ExitCode {
    let female = match speaker {
        "male" => false,
        "female" => true,
        other => return usage_error(&format!("unknown speaker '{other}' (male or female)")),
    };
    let interpolation = match interp {
        "linear" => Interpolation::Linear,
        "cosine" => Interpolation::Cosine,
        other => return usage_error(&format!("unknown interpolation '{other}'")),
    };
    let start = match vowel_preset(from, female) {
        Ok(v) => v,
        Err(e) => return usage_error(&format!("{e}")),
    };
    let end = match vowel_preset(to, female) {
        Ok(v) => v,
        Err(e) => return usage_error(&format!("{e}")),
    };
    let spec = TransitionSpec { start, end, duration_s: dur, interpolation };
    if let Err(e) = spec.validate() {
        return usage_error(&format!("{e}"));
    }
    let path = out.unwrap_or_else(|| PathBuf::from(format!("{from}_{to}.wav")));
    match synth_transition(&spec, rate).and_then(|w| w.to_wav_file(&path).map(|_| w)) {
        Ok(w) => {
            println!("{}: {:.3} s at {} Hz", path.display(), w.duration_s(), rate);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

struct SegmentRow {
    label: String,
    path: PathBuf,
    start_s: f64,
    end_s: f64,
}

fn parse_segments(text: &str) -> (Vec<SegmentRow>, Vec<String>) {
    let mut rows = Vec::new();
    let mut problems = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let parsed = (|| -> Result<SegmentRow, String> {
            if fields.len() != 4 {
                return Err(format!("expected 4 tab-separated fields, got {}", fields.len()));
            }
            let start_s: f64 = fields[2].parse().map_err(|e| format!("start_s: {e}"))?;
            let end_s: f64 = fields[3].parse().map_err(|e| format!("end_s: {e}"))?;
            if !(start_s >= 0.0 && end_s > start_s) {
                return Err(format!("bad segment bounds [{start_s}, {end_s}]"));
            }
            Ok(SegmentRow {
                label: fields[0].to_string(),
                path: PathBuf::from(fields[1]),
                start_s,
                end_s,
            })
        })();
        match parsed {
            Ok(row) => rows.push(row),
            Err(message) => problems.push(format!("segments line {}: {message}", idx + 1)),
        }
    }
    (rows, problems)
}

fn cmd_analyze(
    segments_path: &PathBuf,
    plane: &str,
    out_stats: &PathBuf,
    out_trajectories: &PathBuf,
    config_path: &Option<PathBuf>,
) -> ExitCode {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let plane: Plane = match plane.parse() {
        Ok(p) => p,
        Err(e) => return usage_error(&format!("{e}")),
    };
    let text = match std::fs::read_to_string(segments_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", segments_path.display());
            return ExitCode::from(1);
        }
    };
    let (rows, problems) = parse_segments(&text);
    for problem in &problems {
        eprintln!("warning: {problem} (row skipped)");
    }

    let mut segments = Vec::new();
    let mut load_failures = 0usize;
    for row in rows {
        match Waveform::from_wav_file(&row.path) {
            Ok(waveform) => segments.push(Segment {
                label: row.label,
                waveform,
                start_s: row.start_s,
                end_s: row.end_s,
            }),
            Err(e) => {
                eprintln!("warning: {e} (segment skipped)");
                load_failures += 1;
            }
        }
    }

    let report = match analyze_transitions(&segments, plane, &config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    if let Err(e) = write_stats_csv(out_stats, &report) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if let Err(e) = write_trajectories_csv(out_trajectories, &report) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    println!(
        "{} labels, {} segments analyzed, {} excluded -> {}, {}",
        report.stats.len(),
        report.trajectories.len(),
        report.excluded,
        out_stats.display(),
        out_trajectories.display()
    );
    if load_failures > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn write_stats_csv(path: &PathBuf, report: &sscf::analysis::AnalysisReport) -> anyhow::Result<()> {
    let mut f = std::io::BufWriter::new(
        std::fs::File::create(path).with_context(|| path.display().to_string())?,
    );
    writeln!(f, "label,mean_angle_deg,std_angle_deg,n,pair_sum_deg")?;
    for s in &report.stats {
        let pair = s
            .pair_sum_deg
            .map(|v| format!("{v:.5e}"))
            .unwrap_or_default();
        writeln!(
            f,
            "{},{:.5e},{:.5e},{},{pair}",
            s.label, s.mean_angle_deg, s.std_angle_deg, s.n
        )?;
    }
    Ok(())
}

fn write_trajectories_csv(
    path: &PathBuf,
    report: &sscf::analysis::AnalysisReport,
) -> anyhow::Result<()> {
    let mut f = std::io::BufWriter::new(
        std::fs::File::create(path).with_context(|| path.display().to_string())?,
    );
    writeln!(
        f,
        "label,segment,frame,time_s,transition_angle_deg,polar_angle_deg"
    )?;
    for t in &report.trajectories {
        for (j, time) in t.times_s.iter().enumerate() {
            writeln!(
                f,
                "{},{},{},{:.5e},{:.5e},{:.5e}",
                t.label, t.segment_index, j, time, t.transition_angle_deg[j], t.polar_angle_deg[j]
            )?;
        }
    }
    Ok(())
}
