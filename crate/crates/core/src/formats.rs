//! Feature file writers and readers.
//!
//! Three layouts are supported:
//!
//! * **csv** — `frame,dim_000,...` header, one row per frame, values with
//!   6 significant digits, locale-independent decimal point.
//! * **htk** — the standard 12-byte HTK header (`nSamples: u32`,
//!   `sampPeriod: u32` in 100 ns units, `sampSize: u16` = 4 bytes per
//!   dimension, `parmKind: u16` = 9, i.e. USER), all big-endian, followed
//!   by row-major 32-bit float samples. USER is deliberate: the assembled
//!   vectors mix feature families, so advertising an MFCC kind would
//!   mislead downstream toolkits.
//! * **raw** — little-endian: magic `b"SSCF"`, `version: u32` (currently 1),
//!   `dims: u32`, `frames: u32`, row-major 64-bit floats, then a
//!   `u32`-length-prefixed JSON block holding extraction metadata and the
//!   per-frame flag bytes. The only format that round-trips a
//!   [`FeatureMatrix`] losslessly.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{FeatureMatrix, Metadata};

/// HTK parameter kind written by [`write_htk`].
pub const HTK_PARM_KIND_USER: u16 = 9;

const RAW_MAGIC: [u8; 4] = *b"SSCF";
const RAW_VERSION: u32 = 1;

/// Supported output layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Htk,
    Raw,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Htk => "htk",
            OutputFormat::Raw => "feat",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "htk" => Ok(OutputFormat::Htk),
            "raw" | "raw-binary" => Ok(OutputFormat::Raw),
            other => Err(Error::Config(format!(
                "unknown output format '{other}' (expected csv, htk or raw)"
            ))),
        }
    }
}

/// Writes `matrix` to `path` in the chosen format.
pub fn write_feature_file(
    path: impl AsRef<Path>,
    format: OutputFormat,
    matrix: &FeatureMatrix,
) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(&mut w, matrix)?,
        OutputFormat::Htk => write_htk(&mut w, matrix)?,
        OutputFormat::Raw => write_raw(&mut w, matrix)?,
    }
    w.flush()?;
    Ok(())
}

// --- CSV ---------------------------------------------------------------

pub fn write_csv<W: Write>(w: &mut W, matrix: &FeatureMatrix) -> Result<()> {
    write!(w, "frame")?;
    for d in 0..matrix.dims() {
        write!(w, ",dim_{d:03}")?;
    }
    writeln!(w)?;
    for j in 0..matrix.n_frames() {
        write!(w, "{j}")?;
        for v in matrix.row(j) {
            // 6 significant digits
            write!(w, ",{v:.5e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Parses a CSV feature file back into `(n_frames, dims, row-major data)`.
pub fn read_csv<R: Read>(r: R) -> Result<(usize, usize, Vec<f64>)> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty CSV".into()))??;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.first() != Some(&"frame") {
        return Err(Error::Format("CSV header must start with 'frame'".into()));
    }
    let dims = columns.len() - 1;
    let mut data = Vec::new();
    let mut n_frames = 0usize;
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let frame: usize = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|e| Error::Format(format!("row {}: bad frame index: {e}", idx + 1)))?;
        if frame != n_frames {
            return Err(Error::Format(format!(
                "row {}: frame index {frame}, expected {n_frames}",
                idx + 1
            )));
        }
        let mut count = 0usize;
        for field in fields {
            let v: f64 = field
                .parse()
                .map_err(|e| Error::Format(format!("row {}: bad value: {e}", idx + 1)))?;
            data.push(v);
            count += 1;
        }
        if count != dims {
            return Err(Error::Format(format!(
                "row {}: {count} values, header declares {dims}",
                idx + 1
            )));
        }
        n_frames += 1;
    }
    Ok((n_frames, dims, data))
}

// --- HTK ---------------------------------------------------------------

/// HTK sample period in 100 ns units for a hop in milliseconds.
pub fn htk_sample_period(hop_ms: f64) -> u32 {
    (hop_ms * 10_000.0).round() as u32
}

pub fn write_htk<W: Write>(w: &mut W, matrix: &FeatureMatrix) -> Result<()> {
    let dims = matrix.dims();
    let samp_size = 4 * dims;
    if samp_size > u16::MAX as usize {
        return Err(Error::Format(format!("{dims} dims exceed the HTK sample size field")));
    }
    w.write_all(&(matrix.n_frames() as u32).to_be_bytes())?;
    w.write_all(&htk_sample_period(matrix.metadata().hop_ms).to_be_bytes())?;
    w.write_all(&(samp_size as u16).to_be_bytes())?;
    w.write_all(&HTK_PARM_KIND_USER.to_be_bytes())?;
    for j in 0..matrix.n_frames() {
        for &v in matrix.row(j) {
            w.write_all(&(v as f32).to_be_bytes())?;
        }
    }
    Ok(())
}

/// Parsed HTK file: header fields plus row-major data widened to `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct HtkFile {
    pub n_samples: u32,
    pub samp_period: u32,
    pub samp_size: u16,
    pub parm_kind: u16,
    pub data: Vec<f32>,
}

pub fn read_htk<R: Read>(mut r: R) -> Result<HtkFile> {
    let mut header = [0u8; 12];
    r.read_exact(&mut header)
        .map_err(|e| Error::Format(format!("HTK header: {e}")))?;
    let n_samples = u32::from_be_bytes(header[0..4].try_into().unwrap());
    let samp_period = u32::from_be_bytes(header[4..8].try_into().unwrap());
    let samp_size = u16::from_be_bytes(header[8..10].try_into().unwrap());
    let parm_kind = u16::from_be_bytes(header[10..12].try_into().unwrap());
    if !samp_size.is_multiple_of(4) {
        return Err(Error::Format(format!(
            "HTK sample size {samp_size} not a multiple of 4 (expected float samples)"
        )));
    }
    let total = n_samples as usize * (samp_size as usize / 4);
    let mut data = Vec::with_capacity(total);
    let mut buf = [0u8; 4];
    for _ in 0..total {
        r.read_exact(&mut buf)
            .map_err(|e| Error::Format(format!("HTK data truncated: {e}")))?;
        data.push(f32::from_be_bytes(buf));
    }
    Ok(HtkFile { n_samples, samp_period, samp_size, parm_kind, data })
}

// --- raw binary ---------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RawTrailer {
    metadata: Metadata,
    flags: Vec<u8>,
}

pub fn write_raw<W: Write>(w: &mut W, matrix: &FeatureMatrix) -> Result<()> {
    w.write_all(&RAW_MAGIC)?;
    w.write_all(&RAW_VERSION.to_le_bytes())?;
    w.write_all(&(matrix.dims() as u32).to_le_bytes())?;
    w.write_all(&(matrix.n_frames() as u32).to_le_bytes())?;
    for &v in matrix.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    let trailer = RawTrailer {
        metadata: matrix.metadata().clone(),
        flags: matrix.flags().to_vec(),
    };
    let json = serde_json::to_vec(&trailer).map_err(|e| Error::Format(e.to_string()))?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    Ok(())
}

pub fn read_raw<R: Read>(mut r: R) -> Result<FeatureMatrix> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|e| Error::Format(format!("raw header: {e}")))?;
    if magic != RAW_MAGIC {
        return Err(Error::Format("bad magic, not a raw feature file".into()));
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |r: &mut R| -> Result<u32> {
        r.read_exact(&mut u32buf)
            .map_err(|e| Error::Format(format!("raw header: {e}")))?;
        Ok(u32::from_le_bytes(u32buf))
    };
    let version = read_u32(&mut r)?;
    if version != RAW_VERSION {
        return Err(Error::Format(format!("unsupported raw version {version}")));
    }
    let dims = read_u32(&mut r)? as usize;
    let n_frames = read_u32(&mut r)? as usize;
    let mut data = Vec::with_capacity(n_frames * dims);
    let mut f64buf = [0u8; 8];
    for _ in 0..n_frames * dims {
        r.read_exact(&mut f64buf)
            .map_err(|e| Error::Format(format!("raw data truncated: {e}")))?;
        data.push(f64::from_le_bytes(f64buf));
    }
    let json_len = read_u32(&mut r)? as usize;
    let mut json = vec![0u8; json_len];
    r.read_exact(&mut json)
        .map_err(|e| Error::Format(format!("raw metadata truncated: {e}")))?;
    let trailer: RawTrailer =
        serde_json::from_slice(&json).map_err(|e| Error::Format(format!("raw metadata: {e}")))?;
    if trailer.flags.len() != n_frames {
        return Err(Error::Format(format!(
            "flag count {} does not match {n_frames} frames",
            trailer.flags.len()
        )));
    }
    Ok(FeatureMatrix::from_parts(
        data,
        n_frames,
        dims,
        trailer.flags,
        trailer.metadata,
    ))
}

/// Convenience wrapper reading a raw feature file from disk.
pub fn read_raw_file(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    read_raw(BufReader::new(std::fs::File::open(path.as_ref())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExtractionConfig;
    use crate::pipeline::extract;
    use crate::profile::FeatureProfile;
    use crate::wave::Waveform;

    fn small_matrix() -> FeatureMatrix {
        let samples: Vec<f64> = (0..8000)
            .map(|i| (2.0 * std::f64::consts::PI * 700.0 * i as f64 / 16_000.0).sin() * 0.7)
            .collect();
        let w = Waveform::new(samples, 16_000).unwrap();
        let config = ExtractionConfig::default();
        let profile = FeatureProfile::resolve("mfcc6_dd_polar_ratio_sscf0_mvn", &config).unwrap();
        extract(&w, &profile, &config).unwrap()
    }

    fn empty_matrix() -> FeatureMatrix {
        let w = Waveform::new(vec![0.1; 100], 16_000).unwrap();
        let config = ExtractionConfig::default();
        let profile = FeatureProfile::resolve("mfcc6_dd", &config).unwrap();
        extract(&w, &profile, &config).unwrap()
    }

    #[test]
    fn csv_round_trip_to_printed_precision() {
        let m = small_matrix();
        let mut bytes = Vec::new();
        write_csv(&mut bytes, &m).unwrap();
        let (frames, dims, data) = read_csv(&bytes[..]).unwrap();
        assert_eq!(frames, m.n_frames());
        assert_eq!(dims, m.dims());
        for (got, want) in data.iter().zip(m.data()) {
            if *want == 0.0 {
                assert_eq!(*got, 0.0);
            } else {
                assert!(
                    ((got - want) / want).abs() < 1e-5,
                    "{got} vs {want} beyond 6 significant digits"
                );
            }
        }
    }

    #[test]
    fn csv_header_shape() {
        let m = empty_matrix();
        let mut bytes = Vec::new();
        write_csv(&mut bytes, &m).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("frame,dim_000,dim_001"));
        assert_eq!(header.split(',').count(), 19);
        assert_eq!(lines.count(), 0);
    }

    #[test]
    fn htk_round_trip_exact_in_f32() {
        let m = small_matrix();
        let mut bytes = Vec::new();
        write_htk(&mut bytes, &m).unwrap();
        let htk = read_htk(&bytes[..]).unwrap();
        assert_eq!(htk.n_samples as usize, m.n_frames());
        assert_eq!(htk.samp_period, 100_000);
        assert_eq!(htk.samp_size as usize, 4 * m.dims());
        assert_eq!(htk.parm_kind, HTK_PARM_KIND_USER);
        for (got, want) in htk.data.iter().zip(m.data()) {
            assert_eq!(got.to_bits(), (*want as f32).to_bits());
        }
    }

    #[test]
    fn htk_header_matches_golden_bytes() {
        // 2 frames x 3 dims, hop 10 ms, values 1..6
        let meta = small_matrix().metadata().clone();
        let mut meta = meta;
        meta.dims = 3;
        meta.n_frames = 2;
        let m = FeatureMatrix::from_parts(
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            2,
            3,
            vec![0, 0],
            meta,
        );
        let mut bytes = Vec::new();
        write_htk(&mut bytes, &m).unwrap();
        let golden: Vec<u8> = [
            0x00, 0x00, 0x00, 0x02, // nSamples = 2
            0x00, 0x01, 0x86, 0xA0, // sampPeriod = 100000 (10 ms)
            0x00, 0x0C, // sampSize = 12
            0x00, 0x09, // parmKind = USER
            0x3F, 0x80, 0x00, 0x00, // 1.0f
            0x40, 0x00, 0x00, 0x00, // 2.0f
            0x40, 0x40, 0x00, 0x00, // 3.0f
            0x40, 0x80, 0x00, 0x00, // 4.0f
            0x40, 0xA0, 0x00, 0x00, // 5.0f
            0x40, 0xC0, 0x00, 0x00, // 6.0f
        ]
        .to_vec();
        assert_eq!(bytes, golden);
    }

    #[test]
    fn raw_round_trip_is_lossless() {
        let m = small_matrix();
        let mut bytes = Vec::new();
        write_raw(&mut bytes, &m).unwrap();
        let back = read_raw(&bytes[..]).unwrap();
        assert_eq!(back.n_frames(), m.n_frames());
        assert_eq!(back.dims(), m.dims());
        for (a, b) in back.data().iter().zip(m.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.flags(), m.flags());
        assert_eq!(back.metadata(), m.metadata());
    }

    #[test]
    fn raw_rejects_foreign_bytes() {
        assert!(read_raw(&b"RIFFxxxx"[..]).is_err());
        let mut bytes = Vec::new();
        write_raw(&mut bytes, &empty_matrix()).unwrap();
        bytes[4] = 9; // version
        assert!(read_raw(&bytes[..]).is_err());
    }

    #[test]
    fn empty_matrix_round_trips_in_all_formats() {
        let m = empty_matrix();
        let mut csv = Vec::new();
        write_csv(&mut csv, &m).unwrap();
        let (frames, dims, _) = read_csv(&csv[..]).unwrap();
        assert_eq!((frames, dims), (0, 18));

        let mut htk = Vec::new();
        write_htk(&mut htk, &m).unwrap();
        assert_eq!(read_htk(&htk[..]).unwrap().n_samples, 0);

        let mut raw = Vec::new();
        write_raw(&mut raw, &m).unwrap();
        let back = read_raw(&raw[..]).unwrap();
        assert_eq!(back.n_frames(), 0);
        assert_eq!(back.metadata(), m.metadata());
    }
}
