//! Batch corpus extraction driven by a TSV manifest.
//!
//! Manifest format: UTF-8, two tab-separated columns per line,
//! `utterance_id TAB path`, no header. Utterances are processed
//! independently (in parallel with the `parallel` feature), per-utterance
//! failures are recorded without aborting the batch, and the summary is
//! sorted by utterance id so reruns are byte-reproducible.

use std::path::{Path, PathBuf};

use crate::config::ExtractionConfig;
use crate::error::{Error, Result};
use crate::formats::{write_feature_file, OutputFormat};
use crate::par;
use crate::pipeline::{extract, FeatureMatrix};
use crate::profile::FeatureProfile;
use crate::wave::Waveform;

/// One manifest row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub utterance_id: String,
    pub path: PathBuf,
}

/// `(key, message)` pairs for rows that could not be used.
pub type RowFailures = Vec<(String, String)>;

/// Parses a manifest file. Malformed rows become per-utterance failures
/// (keyed by line number) rather than aborting the batch.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<(Vec<ManifestEntry>, RowFailures)> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut entries: Vec<ManifestEntry> = Vec::new();
    let mut malformed = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        match line.split_once('\t') {
            Some((id, path)) if !id.is_empty() && !path.is_empty() => {
                // duplicate ids would race on the same output path
                if !seen.insert(id.to_string()) {
                    malformed.push((
                        format!("line_{}", idx + 1),
                        format!("duplicate utterance id '{id}'"),
                    ));
                    continue;
                }
                entries.push(ManifestEntry {
                    utterance_id: id.to_string(),
                    path: PathBuf::from(path),
                });
            }
            _ => malformed.push((
                format!("line_{}", idx + 1),
                format!("malformed manifest row (expected 'id\\tpath'): {line:?}"),
            )),
        }
    }
    Ok((entries, malformed))
}

/// Outcome of a batch run, sorted by utterance id.
#[derive(Debug, Clone, Default)]
pub struct BatchSummary {
    /// `(utterance_id, frame_count)` per successful extraction.
    pub successes: Vec<(String, usize)>,
    /// `(utterance_id, error)` per failed utterance.
    pub failures: Vec<(String, String)>,
}

impl BatchSummary {
    pub fn all_succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Extracts every manifest entry into `out_dir/<id>.<ext>`.
pub fn batch_extract(
    entries: &[ManifestEntry],
    profile: &FeatureProfile,
    config: &ExtractionConfig,
    out_dir: impl AsRef<Path>,
    format: OutputFormat,
) -> Result<BatchSummary> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;

    let results: Vec<(String, std::result::Result<usize, String>)> =
        par::map_slice(entries, |entry| {
            let outcome = extract_one(entry, profile, config, out_dir, format);
            (
                entry.utterance_id.clone(),
                outcome.map_err(|e| e.to_string()),
            )
        });

    let mut summary = BatchSummary::default();
    for (id, result) in results {
        match result {
            Ok(frames) => summary.successes.push((id, frames)),
            Err(message) => summary.failures.push((id, message)),
        }
    }
    summary.successes.sort();
    summary.failures.sort();
    Ok(summary)
}

fn extract_one(
    entry: &ManifestEntry,
    profile: &FeatureProfile,
    config: &ExtractionConfig,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<usize> {
    let waveform = Waveform::from_wav_file(&entry.path)?;
    let matrix = extract(&waveform, profile, config)?;
    let out_path = feature_path(out_dir, &entry.utterance_id, format);
    write_feature_file(&out_path, format, &matrix)?;
    Ok(matrix.n_frames())
}

/// Output path for one utterance.
pub fn feature_path(out_dir: &Path, utterance_id: &str, format: OutputFormat) -> PathBuf {
    out_dir.join(format!("{utterance_id}.{}", format.extension()))
}

/// Extracts a single file, deriving the utterance id from the file stem.
pub fn extract_file(
    input: &Path,
    profile: &FeatureProfile,
    config: &ExtractionConfig,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<(PathBuf, FeatureMatrix)> {
    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Audio(format!("cannot derive utterance id from {input:?}")))?;
    let waveform = Waveform::from_wav_file(input)?;
    let matrix = extract(&waveform, profile, config)?;
    std::fs::create_dir_all(out_dir)?;
    let out_path = feature_path(out_dir, stem, format);
    write_feature_file(&out_path, format, &matrix)?;
    Ok((out_path, matrix))
}
