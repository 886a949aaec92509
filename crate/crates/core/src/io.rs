//! On-disk formats.
//!
//! Records travel as CSV with a key=value header block:
//!
//! ```text
//! # sample_rate_hz=3000
//! # axes=x,y,z
//! # label=Class1
//! # source_id=rig-run-07
//! # units=g
//! 0.01,0.02,0.03
//! ...
//! ```
//!
//! Header lines start with `#`; `axes` names the column order (any
//! permutation of x,y,z; default x,y,z), `label`, `source_id` and `units`
//! are optional, unknown keys are ignored. Samples print with Rust's
//! shortest-round-trip float formatting, so write/read is bit-exact.
//!
//! Bulk window stores use the packed binary `PALN1` layout: the 5 magic
//! bytes, a mode tag (u8: 0 none / 1 independent / 2 reference), reference
//! axis (u8, 0xFF when not applicable), sample rate (f64 LE), window length
//! (u32 LE) and window count (u32 LE), then per window a label byte (0xFF =
//! unlabeled), a split byte (0 train / 1 val / 2 test / 0xFF unassigned),
//! the origin index (u64 LE), and the x, y, z samples as f64 LE.
//!
//! Manifests and evaluation reports are serde JSON.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::EvalReport;
use crate::types::{AlignmentMode, AxisId, ClassLabel, SamplingSpec, Segment, TriAxialRecord};
use crate::window::{DatasetManifest, Split};

pub const STORE_MAGIC: &[u8; 5] = b"PALN1";

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

// ---------------------------------------------------------------------------
// Record CSV
// ---------------------------------------------------------------------------

fn write_header_block<W: Write>(
    w: &mut W,
    spec: &SamplingSpec,
    axes: &str,
    label: Option<ClassLabel>,
    source_id: &str,
    units: Option<&str>,
    origin_index: Option<usize>,
) -> std::io::Result<()> {
    writeln!(w, "# sample_rate_hz={}", spec.sample_rate_hz)?;
    writeln!(w, "# axes={axes}")?;
    if let Some(label) = label {
        writeln!(w, "# label={label}")?;
    }
    if !source_id.is_empty() {
        writeln!(w, "# source_id={source_id}")?;
    }
    if let Some(units) = units {
        writeln!(w, "# units={units}")?;
    }
    if let Some(origin) = origin_index {
        writeln!(w, "# origin_index={origin}")?;
    }
    Ok(())
}

fn write_rows<W: Write>(w: &mut W, x: &[f64], y: &[f64], z: &[f64]) -> std::io::Result<()> {
    for i in 0..x.len() {
        writeln!(w, "{},{},{}", x[i], y[i], z[i])?;
    }
    Ok(())
}

pub fn write_record_csv(path: &Path, record: &TriAxialRecord) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path_str(path), e))?;
    let mut w = BufWriter::new(file);
    write_header_block(
        &mut w,
        &record.spec,
        "x,y,z",
        record.label,
        &record.source_id,
        record.units.as_deref(),
        None,
    )
    .and_then(|_| write_rows(&mut w, &record.x, &record.y, &record.z))
    .and_then(|_| w.flush())
    .map_err(|e| Error::io(path_str(path), e))
}

pub fn write_segment_csv(path: &Path, segment: &Segment) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path_str(path), e))?;
    let mut w = BufWriter::new(file);
    write_header_block(
        &mut w,
        &segment.spec,
        "x,y,z",
        segment.label,
        "",
        None,
        Some(segment.origin_index),
    )
    .and_then(|_| write_rows(&mut w, &segment.x, &segment.y, &segment.z))
    .and_then(|_| w.flush())
    .map_err(|e| Error::io(path_str(path), e))
}

struct ParsedCsv {
    sample_rate_hz: Option<f64>,
    axes: [AxisId; 3],
    label: Option<ClassLabel>,
    source_id: Option<String>,
    units: Option<String>,
    origin_index: Option<usize>,
    columns: [Vec<f64>; 3],
}

fn parse_csv(path: &Path) -> Result<ParsedCsv> {
    let file = fs::File::open(path).map_err(|e| Error::io(path_str(path), e))?;
    let reader = BufReader::new(file);
    let p = path_str(path);

    let mut out = ParsedCsv {
        sample_rate_hz: None,
        axes: AxisId::ALL,
        label: None,
        source_id: None,
        units: None,
        origin_index: None,
        columns: [Vec::new(), Vec::new(), Vec::new()],
    };

    let bad_header = |key: &str, value: &str| Error::CsvBadHeader {
        path: p.clone(),
        key: key.into(),
        value: value.into(),
    };

    for (line_idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(p.clone(), e))?;
        let line_no = line_idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('#') {
            let Some((key, value)) = header.split_once('=') else {
                continue; // plain comment
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "sample_rate_hz" => {
                    let rate: f64 = value.parse().map_err(|_| bad_header(key, value))?;
                    if !(rate > 0.0) || !rate.is_finite() {
                        return Err(bad_header(key, value));
                    }
                    out.sample_rate_hz = Some(rate);
                }
                "axes" => {
                    let names: Vec<&str> = value.split(',').map(str::trim).collect();
                    if names.len() != 3 {
                        return Err(bad_header(key, value));
                    }
                    let mut axes = [AxisId::X; 3];
                    for (slot, name) in axes.iter_mut().zip(&names) {
                        *slot = name.parse().map_err(|_| bad_header(key, value))?;
                    }
                    let mut sorted = axes;
                    sorted.sort();
                    if sorted != AxisId::ALL {
                        return Err(bad_header(key, value));
                    }
                    out.axes = axes;
                }
                "label" => {
                    out.label = Some(value.parse().map_err(|_| bad_header(key, value))?);
                }
                "source_id" => out.source_id = Some(value.to_string()),
                "units" => out.units = Some(value.to_string()),
                "origin_index" => {
                    out.origin_index = Some(value.parse().map_err(|_| bad_header(key, value))?);
                }
                _ => {} // unknown keys are ignored
            }
            continue;
        }

        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::CsvMissingColumns {
                path: p,
                line: line_no,
                found: fields.len(),
            });
        }
        for (col, field) in fields.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| Error::CsvBadNumber {
                path: p.clone(),
                line: line_no,
                column: col + 1,
                value: field.trim().to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvBadNumber {
                    path: p.clone(),
                    line: line_no,
                    column: col + 1,
                    value: field.trim().to_string(),
                });
            }
            out.columns[out.axes[col].index()].push(value);
        }
    }

    if out.columns[0].is_empty() {
        return Err(Error::CsvEmpty { path: p });
    }
    Ok(out)
}

/// Read a record CSV. The sample rate comes from the header or, failing
/// that, from `sample_rate_override`.
pub fn read_record_csv(path: &Path, sample_rate_override: Option<f64>) -> Result<TriAxialRecord> {
    let parsed = parse_csv(path)?;
    let rate = parsed
        .sample_rate_hz
        .or(sample_rate_override)
        .ok_or_else(|| Error::UnknownSampleRate {
            path: path_str(path),
        })?;
    let [x, y, z] = parsed.columns;
    let spec = SamplingSpec::new(rate, x.len())?;
    let source_id = parsed
        .source_id
        .unwrap_or_else(|| path_str(path));
    let mut record = TriAxialRecord::new(spec, x, y, z, parsed.label, source_id)?;
    record.units = parsed.units;
    Ok(record)
}

/// Read a single window CSV (a record CSV with an `origin_index` key).
pub fn read_segment_csv(path: &Path, sample_rate_override: Option<f64>) -> Result<Segment> {
    let parsed = parse_csv(path)?;
    let rate = parsed
        .sample_rate_hz
        .or(sample_rate_override)
        .ok_or_else(|| Error::UnknownSampleRate {
            path: path_str(path),
        })?;
    let [x, y, z] = parsed.columns;
    let spec = SamplingSpec::new(rate, x.len())?;
    Segment::new(
        spec,
        x,
        y,
        z,
        parsed.origin_index.unwrap_or(0),
        parsed.label,
    )
}

// ---------------------------------------------------------------------------
// PALN1 window store
// ---------------------------------------------------------------------------

/// A bulk store of aligned (or raw) windows.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowStore {
    pub mode: AlignmentMode,
    pub sample_rate_hz: f64,
    pub window_len: usize,
    pub windows: Vec<StoredWindow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredWindow {
    pub segment: Segment,
    pub split: Option<Split>,
}

fn mode_tags(mode: AlignmentMode) -> (u8, u8) {
    match mode {
        AlignmentMode::None => (0, 0xFF),
        AlignmentMode::ThreeAxisIndependent => (1, 0xFF),
        AlignmentMode::SingleAxisReference(axis) => (2, axis.index() as u8),
    }
}

fn split_tag(split: Option<Split>) -> u8 {
    match split {
        Some(Split::Train) => 0,
        Some(Split::Val) => 1,
        Some(Split::Test) => 2,
        None => 0xFF,
    }
}

pub fn write_store(path: &Path, store: &WindowStore) -> Result<()> {
    let p = path_str(path);
    let bad = |reason: &str| Error::BadStore {
        path: p.clone(),
        reason: reason.into(),
    };
    for w in &store.windows {
        if w.segment.len() != store.window_len {
            return Err(bad("window length mismatch"));
        }
        if w.segment.spec.sample_rate_hz != store.sample_rate_hz {
            return Err(bad("sample rate mismatch"));
        }
    }

    let file = fs::File::create(path).map_err(|e| Error::io(p.clone(), e))?;
    let mut w = BufWriter::new(file);
    let (mode_tag, axis_tag) = mode_tags(store.mode);
    let result: std::io::Result<()> = (|| {
        w.write_all(STORE_MAGIC)?;
        w.write_all(&[mode_tag, axis_tag])?;
        w.write_all(&store.sample_rate_hz.to_le_bytes())?;
        w.write_all(&(store.window_len as u32).to_le_bytes())?;
        w.write_all(&(store.windows.len() as u32).to_le_bytes())?;
        for window in &store.windows {
            let label = window
                .segment
                .label
                .map(|l| l.index() as u8)
                .unwrap_or(0xFF);
            w.write_all(&[label, split_tag(window.split)])?;
            w.write_all(&(window.segment.origin_index as u64).to_le_bytes())?;
            for axis in AxisId::ALL {
                for &v in window.segment.axis(axis) {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
        w.flush()
    })();
    result.map_err(|e| Error::io(p, e))
}

pub fn read_store(path: &Path) -> Result<WindowStore> {
    let p = path_str(path);
    let bad = |reason: String| Error::BadStore {
        path: p.clone(),
        reason,
    };
    let file = fs::File::open(path).map_err(|e| Error::io(p.clone(), e))?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)
        .map_err(|e| Error::io(p.clone(), e))?;
    if &magic != STORE_MAGIC {
        return Err(bad(format!("bad magic {magic:?}")));
    }
    let mut head = [0u8; 2];
    r.read_exact(&mut head).map_err(|e| Error::io(p.clone(), e))?;
    let mut f64_buf = [0u8; 8];
    r.read_exact(&mut f64_buf)
        .map_err(|e| Error::io(p.clone(), e))?;
    let sample_rate_hz = f64::from_le_bytes(f64_buf);
    let mut u32_buf = [0u8; 4];
    r.read_exact(&mut u32_buf)
        .map_err(|e| Error::io(p.clone(), e))?;
    let window_len = u32::from_le_bytes(u32_buf) as usize;
    r.read_exact(&mut u32_buf)
        .map_err(|e| Error::io(p.clone(), e))?;
    let n_windows = u32::from_le_bytes(u32_buf) as usize;

    let mode = match head[0] {
        0 => AlignmentMode::None,
        1 => AlignmentMode::ThreeAxisIndependent,
        2 => {
            let axis = match head[1] {
                0 => AxisId::X,
                1 => AxisId::Y,
                2 => AxisId::Z,
                other => return Err(bad(format!("bad reference axis {other}"))),
            };
            AlignmentMode::SingleAxisReference(axis)
        }
        other => return Err(bad(format!("bad mode tag {other}"))),
    };
    if window_len < 2 {
        return Err(bad(format!("window length {window_len}")));
    }
    let spec = SamplingSpec::new(sample_rate_hz, window_len)
        .map_err(|_| bad(format!("bad sample rate {sample_rate_hz}")))?;

    let mut windows = Vec::with_capacity(n_windows);
    for _ in 0..n_windows {
        let mut tags = [0u8; 2];
        r.read_exact(&mut tags).map_err(|e| Error::io(p.clone(), e))?;
        let label = match tags[0] {
            0xFF => None,
            i => Some(
                ClassLabel::from_index(i as usize)
                    .ok_or_else(|| bad(format!("bad label tag {i}")))?,
            ),
        };
        let split = match tags[1] {
            0 => Some(Split::Train),
            1 => Some(Split::Val),
            2 => Some(Split::Test),
            0xFF => None,
            other => return Err(bad(format!("bad split tag {other}"))),
        };
        let mut u64_buf = [0u8; 8];
        r.read_exact(&mut u64_buf)
            .map_err(|e| Error::io(p.clone(), e))?;
        let origin_index = u64::from_le_bytes(u64_buf) as usize;

        let mut axes: [Vec<f64>; 3] = [
            Vec::with_capacity(window_len),
            Vec::with_capacity(window_len),
            Vec::with_capacity(window_len),
        ];
        for axis in axes.iter_mut() {
            for _ in 0..window_len {
                r.read_exact(&mut f64_buf)
                    .map_err(|e| Error::io(p.clone(), e))?;
                axis.push(f64::from_le_bytes(f64_buf));
            }
        }
        let [x, y, z] = axes;
        windows.push(StoredWindow {
            segment: Segment::new(spec, x, y, z, origin_index, label)?,
            split,
        });
    }
    Ok(WindowStore {
        mode,
        sample_rate_hz,
        window_len,
        windows,
    })
}

// ---------------------------------------------------------------------------
// Manifest, report, audit
// ---------------------------------------------------------------------------

pub fn save_manifest(path: &Path, manifest: &DatasetManifest) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest).map_err(|e| Error::BadManifest {
        path: path_str(path),
        reason: e.to_string(),
    })?;
    fs::write(path, json + "\n").map_err(|e| Error::io(path_str(path), e))
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path_str(path), e))?;
    serde_json::from_str(&text).map_err(|e| Error::BadManifest {
        path: path_str(path),
        reason: e.to_string(),
    })
}

pub fn save_report(path: &Path, report: &EvalReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::BadManifest {
        path: path_str(path),
        reason: e.to_string(),
    })?;
    fs::write(path, json + "\n").map_err(|e| Error::io(path_str(path), e))
}

pub fn load_report(path: &Path) -> Result<EvalReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path_str(path), e))?;
    serde_json::from_str(&text).map_err(|e| Error::BadManifest {
        path: path_str(path),
        reason: e.to_string(),
    })
}

/// One row of the per-window phase audit: pre- and post-alignment phases at
/// the dominant frequency for all three axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAuditRow {
    pub source_id: String,
    pub window_index: usize,
    pub origin_index: usize,
    pub freq_hz: f64,
    pub pre: [f64; 3],
    pub post: [f64; 3],
}

pub fn write_phase_audit(path: &Path, rows: &[PhaseAuditRow]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path_str(path), e))?;
    let mut w = BufWriter::new(file);
    let result: std::io::Result<()> = (|| {
        writeln!(
            w,
            "source_id,window_index,origin_index,freq_hz,pre_x,pre_y,pre_z,post_x,post_y,post_z"
        )?;
        for row in rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                row.source_id,
                row.window_index,
                row.origin_index,
                row.freq_hz,
                row.pre[0],
                row.pre[1],
                row.pre[2],
                row.post[0],
                row.post[1],
                row.post[2]
            )?;
        }
        w.flush()
    })();
    result.map_err(|e| Error::io(path_str(path), e))
}

pub fn read_phase_audit(path: &Path) -> Result<Vec<PhaseAuditRow>> {
    let p = path_str(path);
    let text = fs::read_to_string(path).map_err(|e| Error::io(p.clone(), e))?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Error::CsvMissingColumns {
                path: p,
                line: idx + 1,
                found: fields.len(),
            });
        }
        let num = |i: usize| -> Result<f64> {
            fields[i].parse().map_err(|_| Error::CsvBadNumber {
                path: p.clone(),
                line: idx + 1,
                column: i + 1,
                value: fields[i].into(),
            })
        };
        let int = |i: usize| -> Result<usize> {
            fields[i].parse().map_err(|_| Error::CsvBadNumber {
                path: p.clone(),
                line: idx + 1,
                column: i + 1,
                value: fields[i].into(),
            })
        };
        rows.push(PhaseAuditRow {
            source_id: fields[0].to_string(),
            window_index: int(1)?,
            origin_index: int(2)?,
            freq_hz: num(3)?,
            pre: [num(4)?, num(5)?, num(6)?],
            post: [num(7)?, num(8)?, num(9)?],
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_record, RotorModel};
    use crate::window::{OnsetMode, SplitSpec, WindowingSpec};
    use std::io::Write as _;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn small_csv_reads_three_rows() {
        let dir = tmp();
        let path = dir.path().join("tiny.csv");
        fs::write(&path, "# sample_rate_hz=100\n1,2,3\n4,5,6\n7,8,9\n").unwrap();
        let rec = read_record_csv(&path, None).unwrap();
        assert_eq!(rec.len(), 3);
        assert_eq!(rec.x, vec![1.0, 4.0, 7.0]);
        assert_eq!(rec.z, vec![3.0, 6.0, 9.0]);
    }

    #[test]
    fn nan_cell_names_row_and_column() {
        let dir = tmp();
        let path = dir.path().join("nan.csv");
        fs::write(&path, "# sample_rate_hz=100\n1,2,3\n4,NaN,6\n").unwrap();
        match read_record_csv(&path, None) {
            Err(Error::CsvBadNumber { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 2);
            }
            other => panic!("expected CsvBadNumber, got {other:?}"),
        }
    }

    #[test]
    fn missing_column_and_unknown_rate_are_distinct() {
        let dir = tmp();
        let two_cols = dir.path().join("two.csv");
        fs::write(&two_cols, "# sample_rate_hz=100\n1,2\n").unwrap();
        assert!(matches!(
            read_record_csv(&two_cols, None),
            Err(Error::CsvMissingColumns { found: 2, .. })
        ));

        let no_rate = dir.path().join("norate.csv");
        fs::write(&no_rate, "1,2,3\n").unwrap();
        assert!(matches!(
            read_record_csv(&no_rate, None),
            Err(Error::UnknownSampleRate { .. })
        ));
        // override rescues it
        assert!(read_record_csv(&no_rate, Some(100.0)).is_ok());

        let empty = dir.path().join("empty.csv");
        fs::write(&empty, "# sample_rate_hz=100\n").unwrap();
        assert!(matches!(
            read_record_csv(&empty, None),
            Err(Error::CsvEmpty { .. })
        ));
    }

    #[test]
    fn axes_header_permutes_columns() {
        let dir = tmp();
        let path = dir.path().join("perm.csv");
        fs::write(&path, "# sample_rate_hz=100\n# axes=z,x,y\n1,2,3\n").unwrap();
        let rec = read_record_csv(&path, None).unwrap();
        assert_eq!(rec.x, vec![2.0]);
        assert_eq!(rec.y, vec![3.0]);
        assert_eq!(rec.z, vec![1.0]);

        let bad = dir.path().join("badaxes.csv");
        fs::write(&bad, "# sample_rate_hz=100\n# axes=x,x,y\n1,2,3\n").unwrap();
        assert!(matches!(
            read_record_csv(&bad, None),
            Err(Error::CsvBadHeader { .. })
        ));
    }

    #[test]
    fn record_csv_round_trip_is_bit_exact() {
        let dir = tmp();
        let mut model = RotorModel::mixed();
        model.n_samples = 700;
        let mut rec = generate_record(&model, ClassLabel::Class3, 99).unwrap();
        rec.units = Some("arb".into());
        let path = dir.path().join("rec.csv");
        write_record_csv(&path, &rec).unwrap();
        let back = read_record_csv(&path, None).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn segment_csv_round_trip_keeps_origin() {
        let dir = tmp();
        let spec = SamplingSpec::new(3000.0, 8).unwrap();
        let seg = Segment::new(
            spec,
            vec![0.125; 8],
            vec![-1.5; 8],
            vec![3.0e-7; 8],
            4321,
            Some(ClassLabel::Class5),
        )
        .unwrap();
        let path = dir.path().join("seg.csv");
        write_segment_csv(&path, &seg).unwrap();
        let back = read_segment_csv(&path, None).unwrap();
        assert_eq!(back, seg);
    }

    #[test]
    fn store_round_trip() {
        let dir = tmp();
        let spec = SamplingSpec::new(3000.0, 16).unwrap();
        let make = |seed: f64, origin: usize, label, split| StoredWindow {
            segment: Segment::new(
                spec,
                (0..16).map(|i| seed + i as f64).collect(),
                (0..16).map(|i| seed - i as f64).collect(),
                (0..16).map(|i| seed * i as f64).collect(),
                origin,
                label,
            )
            .unwrap(),
            split,
        };
        let store = WindowStore {
            mode: AlignmentMode::SingleAxisReference(AxisId::Y),
            sample_rate_hz: 3000.0,
            window_len: 16,
            windows: vec![
                make(0.5, 0, Some(ClassLabel::Class0), Some(Split::Train)),
                make(-2.25, 32, Some(ClassLabel::Class4), Some(Split::Test)),
                make(1.0e-9, 64, None, None),
            ],
        };
        let path = dir.path().join("windows.paln");
        write_store(&path, &store).unwrap();
        let back = read_store(&path).unwrap();
        assert_eq!(back, store);
    }

    #[test]
    fn store_rejects_bad_magic() {
        let dir = tmp();
        let path = dir.path().join("bad.paln");
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(b"NOPE!rest of file").unwrap();
        assert!(matches!(read_store(&path), Err(Error::BadStore { .. })));
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tmp();
        let files: Vec<(String, ClassLabel)> = ClassLabel::ALL
            .iter()
            .flat_map(|&l| (0..4).map(move |i| (format!("{l}_{i}.csv"), l)))
            .collect();
        let manifest = crate::window::split_files(
            &files,
            &SplitSpec::new((2, 1, 1), 5).unwrap(),
            &WindowingSpec::new(512, 32, OnsetMode::Arbitrary).unwrap(),
            "round trip test",
        )
        .unwrap();
        let path = dir.path().join("manifest.json");
        save_manifest(&path, &manifest).unwrap();
        assert_eq!(load_manifest(&path).unwrap(), manifest);
    }

    #[test]
    fn phase_audit_round_trip() {
        let dir = tmp();
        let rows = vec![
            PhaseAuditRow {
                source_id: "a".into(),
                window_index: 0,
                origin_index: 0,
                freq_hz: 20.0,
                pre: [0.1, -0.2, 0.3],
                post: [0.0, 1.0e-7, -1.0e-7],
            },
            PhaseAuditRow {
                source_id: "b".into(),
                window_index: 3,
                origin_index: 96,
                freq_hz: 20.0,
                pre: [3.1, -3.1, 0.0],
                post: [0.0, 0.0, 0.0],
            },
        ];
        let path = dir.path().join("audit.csv");
        write_phase_audit(&path, &rows).unwrap();
        assert_eq!(read_phase_audit(&path).unwrap(), rows);
    }
}
