//! Core data model: axes, sampling metadata, synchronized records and
//! segments, per-axis phase sets, alignment plans, and condition labels.
//!
//! Everything here is immutable after construction and safe to share across
//! threads. Constructors validate the structural invariants (equal axis
//! lengths, finite samples, wrapped phases) so downstream code can rely on
//! them.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the three sensor axes. Ordered X < Y < Z for deterministic
/// iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisId {
    X,
    Y,
    Z,
}

impl AxisId {
    pub const ALL: [AxisId; 3] = [AxisId::X, AxisId::Y, AxisId::Z];

    /// Position in the canonical X, Y, Z ordering.
    pub fn index(self) -> usize {
        match self {
            AxisId::X => 0,
            AxisId::Y => 1,
            AxisId::Z => 2,
        }
    }
}

impl fmt::Display for AxisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisId::X => write!(f, "x"),
            AxisId::Y => write!(f, "y"),
            AxisId::Z => write!(f, "z"),
        }
    }
}

impl FromStr for AxisId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(AxisId::X),
            "y" => Ok(AxisId::Y),
            "z" => Ok(AxisId::Z),
            other => Err(Error::OutOfRange(format!("unknown axis {other:?}"))),
        }
    }
}

/// Sampling metadata: rate and sample count. The sample period is always
/// derived from the rate, never stored separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub sample_rate_hz: f64,
    pub n_samples: usize,
}

impl SamplingSpec {
    pub fn new(sample_rate_hz: f64, n_samples: usize) -> Result<Self> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() || n_samples < 1 {
            return Err(Error::InvalidSamplingSpec {
                sample_rate_hz,
                n_samples,
            });
        }
        Ok(SamplingSpec {
            sample_rate_hz,
            n_samples,
        })
    }

    /// Sample period T_s in seconds.
    pub fn period_s(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples as f64 / self.sample_rate_hz
    }

    pub fn nyquist_hz(&self) -> f64 {
        self.sample_rate_hz / 2.0
    }
}

/// Washer mounted at one shaft position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Washer {
    None,
    Thin,
    Thick,
}

/// The six washer-configuration conditions of the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    Class0,
    Class1,
    Class2,
    Class3,
    Class4,
    Class5,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 6] = [
        ClassLabel::Class0,
        ClassLabel::Class1,
        ClassLabel::Class2,
        ClassLabel::Class3,
        ClassLabel::Class4,
        ClassLabel::Class5,
    ];

    pub fn index(self) -> usize {
        match self {
            ClassLabel::Class0 => 0,
            ClassLabel::Class1 => 1,
            ClassLabel::Class2 => 2,
            ClassLabel::Class3 => 3,
            ClassLabel::Class4 => 4,
            ClassLabel::Class5 => 5,
        }
    }

    pub fn from_index(i: usize) -> Option<ClassLabel> {
        ClassLabel::ALL.get(i).copied()
    }

    /// Washer configuration (left position, right position) for this class.
    pub fn washers(self) -> (Washer, Washer) {
        match self {
            ClassLabel::Class0 => (Washer::None, Washer::None),
            ClassLabel::Class1 => (Washer::Thick, Washer::None),
            ClassLabel::Class2 => (Washer::None, Washer::Thick),
            ClassLabel::Class3 => (Washer::Thin, Washer::None),
            ClassLabel::Class4 => (Washer::None, Washer::Thin),
            ClassLabel::Class5 => (Washer::Thin, Washer::Thin),
        }
    }

    /// True for every class except the unweighted baseline.
    pub fn is_anomaly(self) -> bool {
        self != ClassLabel::Class0
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Class{}", self.index())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let digit = t
            .strip_prefix("Class")
            .or_else(|| t.strip_prefix("class"))
            .unwrap_or(t);
        digit
            .parse::<usize>()
            .ok()
            .and_then(ClassLabel::from_index)
            .ok_or_else(|| Error::OutOfRange(format!("unknown class label {s:?}")))
    }
}

fn check_axes(spec: &SamplingSpec, x: &[f64], y: &[f64], z: &[f64]) -> Result<()> {
    if x.len() != spec.n_samples || y.len() != spec.n_samples || z.len() != spec.n_samples {
        return Err(Error::AxisLengthMismatch {
            x: x.len(),
            y: y.len(),
            z: z.len(),
            expected: spec.n_samples,
        });
    }
    for axis in AxisId::ALL {
        let samples = [x, y, z][axis.index()];
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { axis, index });
        }
    }
    Ok(())
}

/// A synchronized three-axis time series: the continuous stream a sensor
/// produces, or a trimmed slice of one. All three axes share one time base.
#[derive(Debug, Clone, PartialEq)]
pub struct TriAxialRecord {
    pub spec: SamplingSpec,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub label: Option<ClassLabel>,
    pub source_id: String,
    /// Free-text unit tag; the algorithms are unit-invariant.
    pub units: Option<String>,
}

impl TriAxialRecord {
    pub fn new(
        spec: SamplingSpec,
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
        label: Option<ClassLabel>,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        check_axes(&spec, &x, &y, &z)?;
        Ok(TriAxialRecord {
            spec,
            x,
            y,
            z,
            label,
            source_id: source_id.into(),
            units: None,
        })
    }

    pub fn axis(&self, axis: AxisId) -> &[f64] {
        match axis {
            AxisId::X => &self.x,
            AxisId::Y => &self.y,
            AxisId::Z => &self.z,
        }
    }

    pub fn len(&self) -> usize {
        self.spec.n_samples
    }

    pub fn is_empty(&self) -> bool {
        self.spec.n_samples == 0
    }
}

/// A length-L window sliced out of a record, tagged with its origin index in
/// the source stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub spec: SamplingSpec,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub origin_index: usize,
    pub label: Option<ClassLabel>,
}

impl Segment {
    pub fn new(
        spec: SamplingSpec,
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
        origin_index: usize,
        label: Option<ClassLabel>,
    ) -> Result<Self> {
        if spec.n_samples < 2 {
            return Err(Error::TooShort {
                len: spec.n_samples,
                min: 2,
            });
        }
        check_axes(&spec, &x, &y, &z)?;
        Ok(Segment {
            spec,
            x,
            y,
            z,
            origin_index,
            label,
        })
    }

    pub fn axis(&self, axis: AxisId) -> &[f64] {
        match axis {
            AxisId::X => &self.x,
            AxisId::Y => &self.y,
            AxisId::Z => &self.z,
        }
    }

    pub fn len(&self) -> usize {
        self.spec.n_samples
    }

    pub fn is_empty(&self) -> bool {
        self.spec.n_samples == 0
    }

    pub fn duration_s(&self) -> f64 {
        self.spec.duration_s()
    }
}

/// Wrap an angle to the principal interval (-pi, pi].
///
/// The boundary maps -pi to +pi so every angle has exactly one
/// representative.
pub fn wrap_phase(phi: f64) -> Result<f64> {
    if !phi.is_finite() {
        return Err(Error::NonFiniteInput("phase"));
    }
    Ok(wrap(phi))
}

/// Internal unchecked wrap; callers guarantee a finite input.
pub(crate) fn wrap(phi: f64) -> f64 {
    debug_assert!(phi.is_finite());
    let r = phi.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Per-axis phase and magnitude at one frequency. Phases are stored wrapped
/// to (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSet {
    pub freq_hz: f64,
    phases: [f64; 3],
    mags: [f64; 3],
}

impl PhaseSet {
    pub fn new(freq_hz: f64, phases: [f64; 3], mags: [f64; 3]) -> Result<Self> {
        if !(freq_hz > 0.0) || !freq_hz.is_finite() {
            return Err(Error::FrequencyOutOfRange {
                freq_hz,
                nyquist_hz: f64::INFINITY,
            });
        }
        let mut wrapped = [0.0; 3];
        for (out, &phi) in wrapped.iter_mut().zip(&phases) {
            *out = wrap_phase(phi)?;
        }
        for &m in &mags {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::NonFiniteInput("magnitude"));
            }
        }
        Ok(PhaseSet {
            freq_hz,
            phases: wrapped,
            mags,
        })
    }

    pub fn phase(&self, axis: AxisId) -> f64 {
        self.phases[axis.index()]
    }

    pub fn magnitude(&self, axis: AxisId) -> f64 {
        self.mags[axis.index()]
    }

    pub fn phases(&self) -> [f64; 3] {
        self.phases
    }
}

/// Relative phase between two distinct axes, wrapped to (-pi, pi].
pub fn relative_phase(p: &PhaseSet, j: AxisId, k: AxisId) -> Result<f64> {
    if j == k {
        return Err(Error::SameAxis(j));
    }
    Ok(wrap(p.phase(j) - p.phase(k)))
}

/// How segment phases are adjusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentMode {
    /// Leave segments untouched.
    None,
    /// Shift each axis independently so its own phase hits the target.
    /// Destroys inter-axis relative phase.
    ThreeAxisIndependent,
    /// One shift computed from the reference axis, applied identically to
    /// all three axes. Preserves inter-axis relative phase.
    SingleAxisReference(AxisId),
}

impl fmt::Display for AlignmentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlignmentMode::None => write!(f, "none"),
            AlignmentMode::ThreeAxisIndependent => write!(f, "independent"),
            AlignmentMode::SingleAxisReference(axis) => write!(f, "reference:{axis}"),
        }
    }
}

impl FromStr for AlignmentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "none" => Ok(AlignmentMode::None),
            "independent" => Ok(AlignmentMode::ThreeAxisIndependent),
            other => {
                if let Some(axis) = other.strip_prefix("reference:") {
                    Ok(AlignmentMode::SingleAxisReference(axis.parse()?))
                } else {
                    Err(Error::OutOfRange(format!("unknown alignment mode {s:?}")))
                }
            }
        }
    }
}

/// Per-axis time shifts (seconds) realizing one alignment decision.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentPlan {
    pub mode: AlignmentMode,
    dts: [f64; 3],
    pub freq_hz: f64,
    /// Axes whose dominant-frequency magnitude was negligible; their shift
    /// was forced to zero because the measured phase is meaningless.
    pub degenerate_axes: Vec<AxisId>,
}

impl AlignmentPlan {
    pub fn new(mode: AlignmentMode, dts: [f64; 3], freq_hz: f64) -> Result<Self> {
        if !(freq_hz > 0.0) || !freq_hz.is_finite() {
            return Err(Error::FrequencyOutOfRange {
                freq_hz,
                nyquist_hz: f64::INFINITY,
            });
        }
        for &dt in &dts {
            if !dt.is_finite() {
                return Err(Error::NonFiniteInput("time shift"));
            }
        }
        match mode {
            AlignmentMode::None => {
                if dts != [0.0; 3] {
                    return Err(Error::OutOfRange(
                        "mode none requires all shifts zero".into(),
                    ));
                }
            }
            AlignmentMode::SingleAxisReference(_) => {
                if dts[0] != dts[1] || dts[1] != dts[2] {
                    return Err(Error::OutOfRange(
                        "single-axis reference requires one uniform shift".into(),
                    ));
                }
            }
            AlignmentMode::ThreeAxisIndependent => {}
        }
        Ok(AlignmentPlan {
            mode,
            dts,
            freq_hz,
            degenerate_axes: Vec::new(),
        })
    }

    pub fn dt(&self, axis: AxisId) -> f64 {
        self.dts[axis.index()]
    }

    pub fn dts(&self) -> [f64; 3] {
        self.dts
    }

    pub(crate) fn mark_degenerate(&mut self, axis: AxisId) {
        self.dts[axis.index()] = 0.0;
        if !self.degenerate_axes.contains(&axis) {
            self.degenerate_axes.push(axis);
        }
    }

    /// Force the uniform-shift invariant after degenerate-axis zeroing.
    pub(crate) fn set_uniform(&mut self, dt: f64) {
        self.dts = [dt; 3];
    }
}
