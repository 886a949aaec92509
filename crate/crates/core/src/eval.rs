//! End-to-end evaluation harness: segment, align, extract features, classify,
//! and compare alignment modes.
//!
//! Each repetition re-randomizes the per-file extraction offset, which is the
//! same nuisance a real deployment faces: the monitoring stream starts at an
//! arbitrary rotation angle. Reported accuracy is the mean and standard
//! deviation over repetitions, one row per alignment mode.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::align::{apply_plan, plan_segment_refined, RefineOpts};
use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureSchema, FeatureVector};
use crate::knn::{accuracy, select_k, train_classifier};
use crate::seeds::mix2;
use crate::spectral::detect_dominant_frequency;
use crate::types::{AlignmentMode, AxisId, ClassLabel, SamplingSpec, Segment, TriAxialRecord};
use crate::window::{segment_record, trim_and_extract, Split, WindowingSpec};

/// Where the dominant frequency comes from: known machine speed, or FFT
/// detection on an initial segment of the first record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreqSpec {
    Fixed { hz: f64 },
    Detect { band: (f64, f64), axis: AxisId },
}

/// One record plus its split assignment.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub record: TriAxialRecord,
    pub split: Split,
}

/// Harness configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub modes: Vec<AlignmentMode>,
    pub schema: FeatureSchema,
    pub k_grid: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub freq: FreqSpec,
    pub target_phi: f64,
    pub refine: RefineOpts,
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::InvalidConfig("no alignment modes".into()));
        }
        if self.k_grid.is_empty() || self.k_grid.iter().any(|&k| k == 0 || k % 2 == 0) {
            return Err(Error::InvalidConfig(format!(
                "k grid {:?} must be nonempty odd values",
                self.k_grid
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be >= 1".into()));
        }
        if !self.target_phi.is_finite() {
            return Err(Error::NonFiniteInput("target phase"));
        }
        Ok(())
    }
}

/// Accuracy summary for one alignment mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeResult {
    pub mode: AlignmentMode,
    pub accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub chosen_ks: Vec<usize>,
    /// Pooled test-split confusion counts over all repetitions,
    /// `confusion[truth][predicted]`.
    pub confusion: [[u64; 6]; 6],
}

/// Full evaluation output: configuration echo plus one result per mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: String,
    pub f_d_hz: f64,
    pub windowing: WindowingSpec,
    pub config: EvalConfig,
    pub n_files: (usize, usize, usize),
    pub modes: Vec<ModeResult>,
}

impl EvalReport {
    /// Text table, one row per mode, with improvement relative to the
    /// no-adjustment baseline when present.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "classifier: {}\nfeatures: {}\ndominant frequency: {} Hz | window {} skip {} | \
             repetitions {} | seed {}\nfiles train/val/test: {}/{}/{}\n\n",
            self.classifier,
            self.config.schema,
            self.f_d_hz,
            self.windowing.window_len,
            self.windowing.skip_len,
            self.config.repetitions,
            self.config.seed,
            self.n_files.0,
            self.n_files.1,
            self.n_files.2,
        ));
        let baseline = self
            .modes
            .iter()
            .find(|m| m.mode == AlignmentMode::None)
            .map(|m| m.mean_accuracy);
        out.push_str(&format!(
            "{:<28}{:<22}{}\n",
            "preprocessing method", "accuracy(%) ± std", "improvement"
        ));
        for mode in &self.modes {
            let improvement = match baseline {
                Some(b) if mode.mode == AlignmentMode::None => {
                    let _ = b;
                    "baseline".to_string()
                }
                Some(b) => format!("{:+.1}pp", 100.0 * (mode.mean_accuracy - b)),
                None => "-".to_string(),
            };
            out.push_str(&format!(
                "{:<28}{:<22}{}\n",
                table_name(mode.mode),
                format!(
                    "{:.1} ± {:.1}",
                    100.0 * mode.mean_accuracy,
                    100.0 * mode.std_accuracy
                ),
                improvement
            ));
        }
        out
    }
}

fn table_name(mode: AlignmentMode) -> String {
    match mode {
        AlignmentMode::None => "No Adjustment".into(),
        AlignmentMode::ThreeAxisIndependent => "Three-axis Independent".into(),
        AlignmentMode::SingleAxisReference(axis) => {
            format!("{}-axis Reference", axis.to_string().to_uppercase())
        }
    }
}

fn resolve_freq(entries: &[CorpusEntry], windowing: &WindowingSpec, freq: &FreqSpec) -> Result<f64> {
    match *freq {
        FreqSpec::Fixed { hz } => {
            if !hz.is_finite() || hz <= 0.0 {
                return Err(Error::FrequencyOutOfRange {
                    freq_hz: hz,
                    nyquist_hz: f64::NAN,
                });
            }
            Ok(hz)
        }
        FreqSpec::Detect { band, axis } => {
            let record = &entries[0].record;
            let len = windowing.window_len.min(record.len());
            let spec = SamplingSpec::new(record.spec.sample_rate_hz, len)?;
            let probe = Segment::new(
                spec,
                record.x[..len].to_vec(),
                record.y[..len].to_vec(),
                record.z[..len].to_vec(),
                0,
                record.label,
            )?;
            detect_dominant_frequency(&probe, band, axis)
        }
    }
}

fn align_and_extract(
    windows: &[(Segment, Split)],
    mode: AlignmentMode,
    f_d: f64,
    cfg: &EvalConfig,
) -> Result<Vec<(FeatureVector, ClassLabel, Split)>> {
    windows
        .par_iter()
        .map(|(seg, split)| {
            let label = seg
                .label
                .ok_or_else(|| Error::InvalidConfig(format!("unlabeled window in {split} split")))?;
            let fv = match mode {
                AlignmentMode::None => extract_features(seg, &cfg.schema)?,
                _ => {
                    let plan = plan_segment_refined(seg, f_d, mode, cfg.target_phi, cfg.refine)?;
                    extract_features(&apply_plan(seg, &plan)?, &cfg.schema)?
                }
            };
            Ok((fv, label, *split))
        })
        .collect()
}

/// Run the full comparison. Deterministic: the same corpus and config
/// produce a bit-identical report.
pub fn evaluate_corpus(
    entries: &[CorpusEntry],
    windowing: &WindowingSpec,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    cfg.validate()?;
    if entries.is_empty() {
        return Err(Error::EmptyFileSet);
    }
    for entry in entries {
        if entry.record.label.is_none() {
            return Err(Error::InvalidConfig(format!(
                "record {} has no class label",
                entry.record.source_id
            )));
        }
    }
    let count = |split: Split| entries.iter().filter(|e| e.split == split).count();
    let n_files = (count(Split::Train), count(Split::Val), count(Split::Test));
    if n_files.0 == 0 || n_files.2 == 0 {
        return Err(Error::InvalidConfig(
            "train and test splits must both be nonempty".into(),
        ));
    }
    if n_files.1 == 0 && cfg.k_grid.len() > 1 {
        return Err(Error::InvalidConfig(
            "validation split is empty but the k grid needs selection".into(),
        ));
    }
    // Every class seen anywhere must be trainable.
    for class in ClassLabel::ALL {
        let anywhere = entries.iter().any(|e| e.record.label == Some(class));
        let in_train = entries
            .iter()
            .any(|e| e.split == Split::Train && e.record.label == Some(class));
        if anywhere && !in_train {
            return Err(Error::EmptyClass(class.to_string()));
        }
    }

    let f_d = resolve_freq(entries, windowing, &cfg.freq)?;
    let mut results: Vec<ModeResult> = cfg
        .modes
        .iter()
        .map(|&mode| ModeResult {
            mode,
            accuracies: Vec::new(),
            mean_accuracy: 0.0,
            std_accuracy: 0.0,
            chosen_ks: Vec::new(),
            confusion: [[0; 6]; 6],
        })
        .collect();

    for rep in 0..cfg.repetitions {
        let mut rng = ChaCha8Rng::seed_from_u64(mix2(cfg.seed, rep as u64));
        let mut windows: Vec<(Segment, Split)> = Vec::new();
        for entry in entries {
            let margin = (entry.record.spec.sample_rate_hz / f_d).ceil() as usize;
            let needed = margin + windowing.window_len;
            if entry.record.len() < needed {
                return Err(Error::InsufficientSamples {
                    needed,
                    available: entry.record.len(),
                });
            }
            let offset = rng.random_range(0..margin as u64) as usize;
            let keep = entry.record.len() - margin;
            let working = trim_and_extract(&entry.record, offset, keep)?;
            for seg in segment_record(&working, windowing, f_d)? {
                windows.push((seg, entry.split));
            }
        }

        for (mode_idx, &mode) in cfg.modes.iter().enumerate() {
            let data = align_and_extract(&windows, mode, f_d, cfg)?;
            let pick = |split: Split| -> (Vec<FeatureVector>, Vec<ClassLabel>) {
                let mut f = Vec::new();
                let mut l = Vec::new();
                for (fv, label, s) in &data {
                    if *s == split {
                        f.push(fv.clone());
                        l.push(*label);
                    }
                }
                (f, l)
            };
            let (train_f, train_l) = pick(Split::Train);
            let (val_f, val_l) = pick(Split::Val);
            let (test_f, test_l) = pick(Split::Test);

            let k = if cfg.k_grid.len() == 1 {
                cfg.k_grid[0]
            } else {
                select_k(&train_f, &train_l, &val_f, &val_l, &cfg.k_grid)?.0
            };
            let model = train_classifier(&train_f, &train_l, k)?;
            let predictions = model.predict_batch(&test_f)?;
            let acc = accuracy(&predictions, &test_l);

            let result = &mut results[mode_idx];
            result.accuracies.push(acc);
            result.chosen_ks.push(k);
            for (pred, truth) in predictions.iter().zip(&test_l) {
                result.confusion[truth.index()][pred.index()] += 1;
            }
        }
    }

    for result in &mut results {
        let n = result.accuracies.len() as f64;
        let mean = result.accuracies.iter().sum::<f64>() / n;
        let std = if result.accuracies.len() > 1 {
            let var = result
                .accuracies
                .iter()
                .map(|a| (a - mean).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            var.sqrt()
        } else {
            0.0
        };
        result.mean_accuracy = mean;
        result.std_accuracy = std;
    }

    Ok(EvalReport {
        classifier: "standardized k-nearest-neighbor, k selected on the validation split \
                     (deterministic substitute for a learned classifier stage)"
            .into(),
        f_d_hz: f_d,
        windowing: *windowing,
        config: cfg.clone(),
        n_files,
        modes: results,
    })
}
