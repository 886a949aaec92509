//! Deterministic spectral feature extraction for the classification harness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::dft_axis;
use crate::types::{AxisId, Segment};

/// Feature extractor selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSchema {
    /// The raw samples of all three axes concatenated (X, then Y, then Z).
    RawConcat,
    /// Per-axis magnitude and phase (phase encoded as cos/sin to avoid the
    /// +-pi wrap discontinuity) at the first `n_bins` DFT frequencies.
    SpectralMagPhase { n_bins: usize },
}

impl std::fmt::Display for FeatureSchema {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FeatureSchema::RawConcat => write!(f, "raw_concat"),
            FeatureSchema::SpectralMagPhase { n_bins } => {
                write!(f, "spectral_mag_phase(n_bins={n_bins})")
            }
        }
    }
}

/// A fixed-dimension feature vector tagged with the extractor that built it.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema: String,
}

/// Extract features from one segment.
///
/// `RawConcat` yields `3 * L` values. `SpectralMagPhase { n_bins }` yields
/// `3 * n_bins * 3` values ordered axis-major as (magnitude, cos, sin) per
/// bin; a zero-magnitude bin encodes its undefined phase as (1, 0).
pub fn extract_features(segment: &Segment, schema: &FeatureSchema) -> Result<FeatureVector> {
    let values = match schema {
        FeatureSchema::RawConcat => {
            let mut v = Vec::with_capacity(3 * segment.len());
            for axis in AxisId::ALL {
                v.extend_from_slice(segment.axis(axis));
            }
            v
        }
        FeatureSchema::SpectralMagPhase { n_bins } => {
            let n_bins = *n_bins;
            if n_bins == 0 || n_bins > segment.len() / 2 {
                return Err(Error::InvalidSchema(format!(
                    "n_bins {n_bins} outside [1, L/2 = {}]",
                    segment.len() / 2
                )));
            }
            let mut v = Vec::with_capacity(9 * n_bins);
            for axis in AxisId::ALL {
                let bins = dft_axis(segment.axis(axis))?;
                for bin in &bins[..n_bins] {
                    let mag = bin.norm();
                    if mag == 0.0 {
                        v.extend_from_slice(&[0.0, 1.0, 0.0]);
                    } else {
                        v.extend_from_slice(&[mag, bin.re / mag, bin.im / mag]);
                    }
                }
            }
            v
        }
    };
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidSchema(format!("non-finite feature {bad}")));
    }
    Ok(FeatureVector {
        values,
        schema: format!("{schema}(len={})", segment.len()),
    })
}
