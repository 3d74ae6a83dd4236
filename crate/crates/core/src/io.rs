//! Signal, manifest and feature-table I/O.
//!
//! Signals are held as `f64` regardless of the on-disk format. Headerless
//! formats (raw little-endian `f64`, single-column CSV) take their sample rate
//! from a JSON sidecar `<file>.json` (`{"sample_rate": 73529}`) or from an
//! explicit fallback.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{ConfigRecord, FeatureVector, LabelVector, Signal, FEATURE_NAMES};
use crate::{wav, PressureSignal};

/// On-disk signal encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalFormat {
    /// Mono IEEE float32 WAV.
    WavFloat,
    /// Headerless little-endian float64.
    RawFloat64,
    /// One sample per line.
    Csv,
}

impl SignalFormat {
    /// Infers the format from a file extension (`wav`, `f64`/`raw`/`bin`, `csv`/`txt`).
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "wav" => Ok(Self::WavFloat),
            "f64" | "raw" | "bin" => Ok(Self::RawFloat64),
            "csv" | "txt" => Ok(Self::Csv),
            _ => Err(Error::malformed(
                "signal",
                path,
                "cannot infer format from extension",
            )),
        }
    }
}

impl FromStr for SignalFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wav" | "wav_float" => Ok(Self::WavFloat),
            "raw" | "raw_float64" | "f64" => Ok(Self::RawFloat64),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidParameter(format!(
                "unknown signal format {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    sample_rate: f64,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn read_sidecar_rate(path: &Path) -> Result<Option<f64>> {
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let meta: Sidecar = serde_json::from_str(&text)
        .map_err(|e| Error::malformed("sidecar", &side, e.to_string()))?;
    Ok(Some(meta.sample_rate))
}

/// Loads a signal. `sample_rate` is the fallback for headerless formats when
/// no sidecar is present; it is ignored for WAV.
pub fn load_signal(
    path: &Path,
    format: SignalFormat,
    sample_rate: Option<f64>,
) -> Result<PressureSignal> {
    match format {
        SignalFormat::WavFloat => load_wav(path),
        SignalFormat::RawFloat64 | SignalFormat::Csv => {
            let rate = match read_sidecar_rate(path)? {
                Some(r) => r,
                None => sample_rate.ok_or_else(|| Error::MissingSampleRate(path.to_owned()))?,
            };
            let samples = if format == SignalFormat::RawFloat64 {
                read_raw_f64(path)?
            } else {
                read_csv_column(path)?
            };
            Signal::new(samples, rate)
        }
    }
}

fn load_wav(path: &Path) -> Result<PressureSignal> {
    let wav = wav::read(path)?;
    Signal::new(
        wav.samples.into_iter().map(f64::from).collect(),
        f64::from(wav.sample_rate),
    )
}

fn read_raw_f64(path: &Path) -> Result<Vec<f64>> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::malformed(
            "raw float64 payload",
            path,
            format!("length {} is not a multiple of 8", bytes.len()),
        ));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

fn read_csv_column(path: &Path) -> Result<Vec<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| {
            Error::malformed("csv sample", path, format!("line {}: {t:?}", lineno + 1))
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Writes a signal. Headerless formats get a JSON sidecar carrying the sample rate.
pub fn save_signal(signal: &PressureSignal, path: &Path, format: SignalFormat) -> Result<()> {
    match format {
        SignalFormat::WavFloat => {
            let rate = signal.sample_rate();
            if rate.fract() != 0.0 || rate > f64::from(u32::MAX) {
                return Err(Error::InvalidParameter(format!(
                    "WAV needs an integral sample rate, got {rate}"
                )));
            }
            let samples: Vec<f32> = signal.samples().iter().map(|&s| s as f32).collect();
            wav::write(path, &samples, rate as u32)?;
        }
        SignalFormat::RawFloat64 => {
            let mut w = create(path)?;
            for &s in signal.samples() {
                w.write_all(&s.to_le_bytes())
                    .map_err(|e| Error::io(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
            write_sidecar(path, signal.sample_rate())?;
        }
        SignalFormat::Csv => {
            let mut w = create(path)?;
            for &s in signal.samples() {
                // shortest round-trip representation
                writeln!(w, "{s:?}").map_err(|e| Error::io(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
            write_sidecar(path, signal.sample_rate())?;
        }
    }
    Ok(())
}

fn write_sidecar(path: &Path, sample_rate: f64) -> Result<()> {
    let side = sidecar_path(path);
    let text = serde_json::to_string(&Sidecar { sample_rate }).expect("sidecar serializes");
    std::fs::write(&side, text + "\n").map_err(|e| Error::io(&side, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub const MANIFEST_HEADER: [&str; 5] = ["id", "signal_path", "pressure_pa", "gc_type", "symmetry"];

/// Reads a manifest CSV. Relative signal paths are resolved against the
/// manifest's directory; the files themselves are not opened here.
pub fn load_manifest(path: &Path) -> Result<Vec<ConfigRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_error(path, "manifest", e))?;
    let headers = rdr
        .headers()
        .map_err(|e| csv_error(path, "manifest", e))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::malformed("manifest", path, format!("missing column {name:?}")))
    };
    let (c_id, c_path, c_p, c_gc, c_sym) = (
        col("id")?,
        col("signal_path")?,
        col("pressure_pa")?,
        col("gc_type")?,
        col("symmetry")?,
    );
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, "manifest", e))?;
        let field = |c: usize| row.get(c).unwrap_or("");
        let int = |c: usize, name: &'static str| -> Result<i64> {
            field(c).parse::<i64>().map_err(|_| Error::LabelOutOfRange {
                field: name,
                value: field(c).to_owned(),
            })
        };
        let id = field(c_id).to_owned();
        if id.is_empty() {
            return Err(Error::malformed(
                "manifest",
                path,
                format!("row {} has an empty id", i + 1),
            ));
        }
        let label = LabelVector::from_raw(
            int(c_p, "pressure_pa")?,
            int(c_gc, "gc_type")?,
            int(c_sym, "symmetry")?,
        )?;
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        let sp = PathBuf::from(field(c_path));
        let signal_path = if sp.is_absolute() { sp } else { base.join(sp) };
        out.push(ConfigRecord {
            id,
            signal_path,
            label,
        });
    }
    if out.is_empty() {
        log::warn!("manifest {} contains no configurations", path.display());
    }
    Ok(out)
}

/// Writes a manifest. Signal paths are written as given.
pub fn save_manifest(records: &[ConfigRecord], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_error(path, "manifest", e))?;
    w.write_record(MANIFEST_HEADER)
        .map_err(|e| csv_error(path, "manifest", e))?;
    for r in records {
        w.write_record([
            r.id.clone(),
            r.signal_path.to_string_lossy().into_owned(),
            r.label.pressure.pascal().to_string(),
            r.label.gc.index().to_string(),
            r.label.symmetry.code().to_string(),
        ])
        .map_err(|e| csv_error(path, "manifest", e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, what: &'static str, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!("checked io kind"),
        }
    } else {
        Error::malformed(what, path, e.to_string())
    }
}

/// One extracted configuration: id, labels and the nine features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub id: String,
    pub label: LabelVector,
    pub features: FeatureVector<f64>,
}

/// Formats like C's `%.{digits}g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed. Independent of locale.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Significant digits used for every numeric CSV cell.
pub const CSV_DIGITS: usize = 9;

pub const FEATURE_TABLE_LABEL_COLUMNS: [&str; 4] = ["id", "pressure_pa", "gc_type", "symmetry"];

pub fn feature_table_header() -> Vec<&'static str> {
    FEATURE_TABLE_LABEL_COLUMNS
        .iter()
        .chain(FEATURE_NAMES.iter())
        .copied()
        .collect()
}

/// Writes feature rows as CSV (13 columns, LF endings, 9 significant digits).
pub fn write_feature_csv<W: Write>(rows: &[FeatureRow], out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(feature_table_header())?;
    for r in rows {
        let mut rec = vec![
            r.id.clone(),
            r.label.pressure.pascal().to_string(),
            r.label.gc.index().to_string(),
            r.label.symmetry.code().to_string(),
        ];
        rec.extend(
            r.features
                .to_array()
                .iter()
                .map(|&v| format_sig(v, CSV_DIGITS)),
        );
        w.write_record(&rec)?;
    }
    w.flush()
}

pub fn save_feature_csv(rows: &[FeatureRow], path: &Path) -> Result<()> {
    let f = create(path)?;
    write_feature_csv(rows, f).map_err(|e| Error::io(path, e))
}

pub fn load_feature_csv(path: &Path) -> Result<Vec<FeatureRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, "feature table", e))?;
    let headers = rdr
        .headers()
        .map_err(|e| csv_error(path, "feature table", e))?
        .clone();
    let expected = feature_table_header();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::malformed(
            "feature table",
            path,
            format!("expected header {}", expected.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, "feature table", e))?;
        let int = |i: usize| -> Result<i64> {
            rec[i].parse().map_err(|_| Error::LabelOutOfRange {
                field: FEATURE_TABLE_LABEL_COLUMNS[i],
                value: rec[i].to_owned(),
            })
        };
        let label = LabelVector::from_raw(int(1)?, int(2)?, int(3)?)?;
        let mut vals = [0.0; 9];
        for (k, v) in vals.iter_mut().enumerate() {
            let cell = &rec[4 + k];
            *v = cell.parse().map_err(|_| {
                Error::malformed(
                    "feature table",
                    path,
                    format!("bad {} value {cell:?}", FEATURE_NAMES[k]),
                )
            })?;
        }
        rows.push(FeatureRow {
            id: rec[0].to_owned(),
            label,
            features: FeatureVector::from_array(vals),
        });
    }
    Ok(rows)
}

pub fn save_feature_json(rows: &[FeatureRow], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, rows)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
