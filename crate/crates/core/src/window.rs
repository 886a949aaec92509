//! Windowed segmentation and file-level dataset splitting.
//!
//! Segmentation follows the measurement protocol: trim the transient head of
//! each record, extract a fixed-length analysis stretch, and cut overlapping
//! windows of `window_len` samples every `skip_len` samples. In
//! phase-consistent mode the first window onset is placed where the reference
//! axis hits the target phase, so the window set no longer depends on when
//! monitoring happened to start.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::align::{determine_onset, fractional_shift};
use crate::error::{Error, Result};
use crate::seeds::mix2;
use crate::types::{AxisId, ClassLabel, SamplingSpec, Segment, TriAxialRecord};

/// How the first window onset is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnsetMode {
    /// Windows start at sample 0 and stride by the skip length.
    Arbitrary,
    /// The first onset is placed where `reference`'s phase at the dominant
    /// frequency equals `target_phi`; later windows stride by the skip
    /// length from there.
    PhaseConsistent { reference: AxisId, target_phi: f64 },
}

/// Window length, hop, and onset policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowingSpec {
    pub window_len: usize,
    pub skip_len: usize,
    pub onset_mode: OnsetMode,
}

impl WindowingSpec {
    pub fn new(window_len: usize, skip_len: usize, onset_mode: OnsetMode) -> Result<Self> {
        if window_len < 2 {
            return Err(Error::InvalidWindowing(format!(
                "window_len {window_len} < 2"
            )));
        }
        if skip_len < 1 {
            return Err(Error::InvalidWindowing("skip_len must be >= 1".into()));
        }
        Ok(WindowingSpec {
            window_len,
            skip_len,
            onset_mode,
        })
    }
}

/// Drop `trim` leading samples, keep the next `keep`.
pub fn trim_and_extract(record: &TriAxialRecord, trim: usize, keep: usize) -> Result<TriAxialRecord> {
    let end = trim
        .checked_add(keep)
        .filter(|&e| e <= record.len())
        .ok_or(Error::OutOfRange(format!(
            "trim {trim} + keep {keep} exceeds record length {}",
            record.len()
        )))?;
    if keep == 0 {
        return Err(Error::OutOfRange("keep must be positive".into()));
    }
    let spec = SamplingSpec::new(record.spec.sample_rate_hz, keep)?;
    let mut out = TriAxialRecord::new(
        spec,
        record.x[trim..end].to_vec(),
        record.y[trim..end].to_vec(),
        record.z[trim..end].to_vec(),
        record.label,
        format!("{}[{}..{}]", record.source_id, trim, end),
    )?;
    out.units = record.units.clone();
    Ok(out)
}

/// Number of windows a record of `n` samples yields.
pub fn window_count(n: usize, window_len: usize, skip_len: usize) -> usize {
    if n < window_len {
        0
    } else {
        (n - window_len) / skip_len + 1
    }
}

fn slice_segment(record: &TriAxialRecord, start: usize, len: usize) -> Result<Segment> {
    let spec = SamplingSpec::new(record.spec.sample_rate_hz, len)?;
    Segment::new(
        spec,
        record.x[start..start + len].to_vec(),
        record.y[start..start + len].to_vec(),
        record.z[start..start + len].to_vec(),
        start,
        record.label,
    )
}

/// Cut a record into windows. `f_d` is only consulted in phase-consistent
/// mode, where it locates the first onset; the sub-sample onset residual is
/// corrected on every extracted window.
pub fn segment_record(
    record: &TriAxialRecord,
    w: &WindowingSpec,
    f_d: f64,
) -> Result<Vec<Segment>> {
    let n = record.len();
    let len = w.window_len;
    if n < len {
        return Err(Error::InsufficientSamples {
            needed: len,
            available: n,
        });
    }

    let (base, residual_s) = match w.onset_mode {
        OnsetMode::Arbitrary => (0usize, 0.0),
        OnsetMode::PhaseConsistent {
            reference,
            target_phi,
        } => {
            let onset = determine_onset(record, f_d, reference, target_phi, 0, len)?;
            (onset.index, onset.residual_s)
        }
    };

    let mut segments = Vec::with_capacity(window_count(n - base, len, w.skip_len));
    let mut start = base;
    let window_spec = SamplingSpec::new(record.spec.sample_rate_hz, len)?;
    while start + len <= n {
        let mut seg = slice_segment(record, start, len)?;
        if residual_s != 0.0 {
            seg = Segment::new(
                window_spec,
                fractional_shift(&seg.x, residual_s, &window_spec)?,
                fractional_shift(&seg.y, residual_s, &window_spec)?,
                fractional_shift(&seg.z, residual_s, &window_spec)?,
                seg.origin_index,
                seg.label,
            )?;
        }
        segments.push(seg);
        start += w.skip_len;
    }
    Ok(segments)
}

/// Which split a file belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Val => write!(f, "val"),
            Split::Test => write!(f, "test"),
        }
    }
}

/// Train/validation/test ratio plus the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub ratio: (u32, u32, u32),
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(ratio: (u32, u32, u32), seed: u64) -> Result<Self> {
        if ratio.0 == 0 || ratio.1 == 0 || ratio.2 == 0 {
            return Err(Error::InvalidRatio(format!(
                "all ratio components must be positive, got {}:{}:{}",
                ratio.0, ratio.1, ratio.2
            )));
        }
        Ok(SplitSpec { ratio, seed })
    }
}

/// One file of a dataset: where it lives, what condition it captures, which
/// split it landed in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub label: ClassLabel,
    pub split: Split,
}

/// The dataset description an experiment runs from. Stored as JSON with keys
/// `entries` (path/label/split triples), `windowing`, `split` (ratio + seed),
/// and free-text `provenance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    pub windowing: WindowingSpec,
    pub split: SplitSpec,
    pub provenance: String,
}

impl DatasetManifest {
    pub fn count(&self, split: Split) -> usize {
        self.entries.iter().filter(|e| e.split == split).count()
    }
}

/// Per-class stratified file-level split.
///
/// Splitting is by file, never by window, so no window of one recording can
/// leak across splits. Counts follow largest-remainder apportionment per
/// class (exact when the class size divides the ratio total), and the
/// assignment is a deterministic function of the seed.
pub fn split_files(
    files: &[(String, ClassLabel)],
    s: &SplitSpec,
    windowing: &WindowingSpec,
    provenance: impl Into<String>,
) -> Result<DatasetManifest> {
    if files.is_empty() {
        return Err(Error::EmptyFileSet);
    }
    let total = (s.ratio.0 + s.ratio.1 + s.ratio.2) as f64;

    let mut by_class: Vec<Vec<&(String, ClassLabel)>> = vec![Vec::new(); ClassLabel::ALL.len()];
    for entry in files {
        by_class[entry.1.index()].push(entry);
    }

    let mut entries = Vec::with_capacity(files.len());
    for (class_idx, class_files) in by_class.iter_mut().enumerate() {
        if class_files.is_empty() {
            continue;
        }
        class_files.sort_by(|a, b| a.0.cmp(&b.0));
        let mut rng = ChaCha8Rng::seed_from_u64(mix2(s.seed, class_idx as u64));
        class_files.shuffle(&mut rng);

        let n = class_files.len();
        let ratios = [s.ratio.0 as f64, s.ratio.1 as f64, s.ratio.2 as f64];
        let quotas: Vec<f64> = ratios.iter().map(|r| n as f64 * r / total).collect();
        let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let mut leftover = n - counts.iter().sum::<usize>();
        // Largest remainder first; ties go to the earlier split.
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
        });
        for idx in order {
            if leftover == 0 {
                break;
            }
            counts[idx] += 1;
            leftover -= 1;
        }

        let mut cursor = 0usize;
        for (split, &count) in Split::ALL.iter().zip(&counts) {
            for file in &class_files[cursor..cursor + count] {
                entries.push(ManifestEntry {
                    path: file.0.clone(),
                    label: file.1,
                    split: *split,
                });
            }
            cursor += count;
        }
    }

    entries.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(DatasetManifest {
        entries,
        windowing: *windowing,
        split: *s,
        provenance: provenance.into(),
    })
}
