//! Phase alignment: onset determination, the two per-segment adjustment
//! methods (three-axis independent and single-axis reference), and the
//! fractional time-shift engine they share.
//!
//! A shift of `dt` advances the signal: the output approximates
//! `s(t + dt)` realized as a circular shift, so the measured phase at a
//! frequency `f` moves by `+2 pi f dt`. Shifts decompose into an exact
//! integer-sample rotation plus a sub-sample spectral phase ramp; the ramp's
//! fractional part never exceeds half a sample, which keeps the Nyquist bin
//! multiplier real and the amplitude spectrum bit-preserved at every bin.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{fft_forward, fft_inverse, measure_phase_set, phase_at_frequency};
use crate::types::{
    wrap, AlignmentMode, AlignmentPlan, AxisId, PhaseSet, SamplingSpec, Segment, TriAxialRecord,
};

use std::f64::consts::TAU;

/// Magnitude below `DEGENERATE_REL * rms * L` means the phase at the dominant
/// frequency is noise; shifting by it would inject randomness.
const DEGENERATE_REL: f64 = 1e-12;

/// Per-axis time shifts from measured phases.
///
/// Three-axis independent: `dt_a = -(phase_a - target) / (2 pi f)` for each
/// axis. Single-axis reference: the same formula on the reference axis only,
/// applied uniformly. Phase deficits are taken as principal values, so no
/// shift exceeds half a period.
pub fn compute_plan(
    phases: &PhaseSet,
    mode: AlignmentMode,
    target_phi: f64,
) -> Result<AlignmentPlan> {
    if !target_phi.is_finite() {
        return Err(Error::NonFiniteInput("target phase"));
    }
    let f = phases.freq_hz;
    let dt_for = |axis: AxisId| -wrap(phases.phase(axis) - target_phi) / (TAU * f);
    let dts = match mode {
        AlignmentMode::None => [0.0; 3],
        AlignmentMode::ThreeAxisIndependent => {
            [dt_for(AxisId::X), dt_for(AxisId::Y), dt_for(AxisId::Z)]
        }
        AlignmentMode::SingleAxisReference(reference) => {
            let dt = dt_for(reference);
            [dt; 3]
        }
    };
    AlignmentPlan::new(mode, dts, f)
}

fn rms(samples: &[f64]) -> f64 {
    (samples.iter().map(|v| v * v).sum::<f64>() / samples.len() as f64).sqrt()
}

fn degenerate(seg: &Segment, phases: &PhaseSet, axis: AxisId) -> bool {
    let scale = rms(seg.axis(axis)) * seg.len() as f64;
    phases.magnitude(axis) <= DEGENERATE_REL * scale
}

/// Measure a segment's phases at `f_d` and build a plan, zeroing the shift
/// for any axis whose magnitude at `f_d` is negligible.
pub fn plan_segment(
    seg: &Segment,
    f_d: f64,
    mode: AlignmentMode,
    target_phi: f64,
) -> Result<AlignmentPlan> {
    let phases = measure_phase_set(seg, f_d)?;
    let mut plan = compute_plan(&phases, mode, target_phi)?;
    match mode {
        AlignmentMode::None => {}
        AlignmentMode::ThreeAxisIndependent => {
            for axis in AxisId::ALL {
                if degenerate(seg, &phases, axis) {
                    plan.mark_degenerate(axis);
                }
            }
        }
        AlignmentMode::SingleAxisReference(reference) => {
            if degenerate(seg, &phases, reference) {
                for axis in AxisId::ALL {
                    plan.mark_degenerate(axis);
                }
                plan.set_uniform(0.0);
            }
        }
    }
    Ok(plan)
}

/// Iteration control for the refined planner and onset search.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RefineOpts {
    pub tol_rad: f64,
    pub max_iters: usize,
}

impl Default for RefineOpts {
    fn default() -> Self {
        RefineOpts {
            tol_rad: 1e-6,
            max_iters: 10,
        }
    }
}

fn refine_axis_shift(
    samples: &[f64],
    spec: &SamplingSpec,
    f_d: f64,
    target_phi: f64,
    first_dt: f64,
    opts: RefineOpts,
) -> Result<f64> {
    let mut dt = first_dt;
    for _ in 0..opts.max_iters {
        let shifted = fractional_shift(samples, dt, spec)?;
        let (phase, _) = phase_at_frequency(&shifted, spec, f_d)?;
        let err = wrap(phase - target_phi);
        if err.abs() <= opts.tol_rad {
            break;
        }
        dt -= err / (TAU * f_d);
    }
    Ok(dt)
}

/// Like [`plan_segment`], but iterates shift-and-remeasure until the adjusted
/// phase lands on the target.
///
/// When `f_d` is an exact DFT bin frequency one pass already lands exactly
/// and no iteration happens. Off-bin, spectral leakage makes the measured
/// phase respond slightly nonlinearly to a circular shift, so the closed-form
/// shift alone leaves a residual of up to ~0.2 rad; a few corrections
/// converge it below `tol_rad`. The result is still a single time shift per
/// axis, just a better-solved one.
pub fn plan_segment_refined(
    seg: &Segment,
    f_d: f64,
    mode: AlignmentMode,
    target_phi: f64,
    opts: RefineOpts,
) -> Result<AlignmentPlan> {
    let plan = plan_segment(seg, f_d, mode, target_phi)?;
    match mode {
        AlignmentMode::None => Ok(plan),
        AlignmentMode::ThreeAxisIndependent => {
            let mut dts = [0.0; 3];
            for axis in AxisId::ALL {
                dts[axis.index()] = if plan.degenerate_axes.contains(&axis) {
                    0.0
                } else {
                    refine_axis_shift(
                        seg.axis(axis),
                        &seg.spec,
                        f_d,
                        target_phi,
                        plan.dt(axis),
                        opts,
                    )?
                };
            }
            let mut refined = AlignmentPlan::new(mode, dts, f_d)?;
            for axis in &plan.degenerate_axes {
                refined.mark_degenerate(*axis);
            }
            Ok(refined)
        }
        AlignmentMode::SingleAxisReference(reference) => {
            if plan.degenerate_axes.is_empty() {
                let dt = refine_axis_shift(
                    seg.axis(reference),
                    &seg.spec,
                    f_d,
                    target_phi,
                    plan.dt(reference),
                    opts,
                )?;
                AlignmentPlan::new(mode, [dt; 3], f_d)
            } else {
                Ok(plan)
            }
        }
    }
}

/// Time-shift every axis of a segment by its planned amount.
pub fn apply_plan(seg: &Segment, plan: &AlignmentPlan) -> Result<Segment> {
    let duration_s = seg.duration_s();
    for axis in AxisId::ALL {
        let dt_s = plan.dt(axis);
        if dt_s.abs() >= duration_s {
            return Err(Error::ShiftTooLarge { dt_s, duration_s });
        }
    }
    Segment::new(
        seg.spec,
        fractional_shift(&seg.x, plan.dt(AxisId::X), &seg.spec)?,
        fractional_shift(&seg.y, plan.dt(AxisId::Y), &seg.spec)?,
        fractional_shift(&seg.z, plan.dt(AxisId::Z), &seg.spec)?,
        seg.origin_index,
        seg.label,
    )
}

/// Circular time shift by `dt` seconds: output[n] ~ input(n*T_s + dt).
///
/// The integer-sample part is an exact rotation; the remaining sub-sample
/// part multiplies bin k by `exp(+j 2 pi k dt / (L T_s))` with
/// conjugate-symmetric negative frequencies. Bin magnitudes are preserved
/// exactly: the mirrored ramp has unit modulus everywhere, and the Nyquist
/// bin of an even-length signal only ever sees the sub-half-sample part,
/// whose multiplier stays +1 to keep the output real.
pub fn fractional_shift(samples: &[f64], dt: f64, spec: &SamplingSpec) -> Result<Vec<f64>> {
    if !dt.is_finite() {
        return Err(Error::NonFiniteInput("time shift"));
    }
    let len = samples.len();
    if len < 2 {
        return Err(Error::TooShort { len, min: 2 });
    }
    if len != spec.n_samples {
        return Err(Error::AxisLengthMismatch {
            x: len,
            y: len,
            z: len,
            expected: spec.n_samples,
        });
    }

    let shift_samples = dt / spec.period_s();
    let whole = shift_samples.round();
    let frac = shift_samples - whole; // in [-0.5, 0.5]

    // Integer rotation: advance by `whole` samples (left rotation for
    // positive shifts), exactly.
    let rot = (whole as i64).rem_euclid(len as i64) as usize;
    let mut rotated = Vec::with_capacity(len);
    rotated.extend_from_slice(&samples[rot..]);
    rotated.extend_from_slice(&samples[..rot]);
    if frac == 0.0 {
        return Ok(rotated);
    }

    let mut buf: Vec<Complex64> = rotated.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    // Mirrored ramp so conjugate symmetry is exact in floating point.
    for k in 1..len.div_ceil(2) {
        let theta = TAU * k as f64 * frac / len as f64;
        let (sin, cos) = theta.sin_cos();
        let ramp = Complex64::new(cos, sin);
        buf[k] *= ramp;
        buf[len - k] *= ramp.conj();
    }
    // |frac| <= 0.5 so cos(pi * frac) >= 0: the Nyquist multiplier is +1.
    fft_inverse(&mut buf);
    Ok(buf.into_iter().map(|c| c.re / len as f64).collect())
}

/// A segmentation onset: integer sample index plus the sub-sample residual
/// (seconds) that [`fractional_shift`] must apply to windows cut there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Onset {
    pub index: usize,
    pub residual_s: f64,
}

/// Find the earliest timing at or after `search_start` where the reference
/// axis phase at `f_d` equals `target_phi`.
///
/// Probes a `probe_len` window, converts the phase deficit to a forward
/// offset within one period, and iterates probe-and-correct until the
/// re-probed phase lands on the target. Ties resolve to the smallest
/// nonnegative offset.
pub fn determine_onset(
    record: &TriAxialRecord,
    f_d: f64,
    reference: AxisId,
    target_phi: f64,
    search_start: usize,
    probe_len: usize,
) -> Result<Onset> {
    if !target_phi.is_finite() {
        return Err(Error::NonFiniteInput("target phase"));
    }
    if probe_len < 2 {
        return Err(Error::TooShort {
            len: probe_len,
            min: 2,
        });
    }
    let nyquist = record.spec.nyquist_hz();
    if !f_d.is_finite() || f_d <= 0.0 || f_d >= nyquist {
        return Err(Error::FrequencyOutOfRange {
            freq_hz: f_d,
            nyquist_hz: nyquist,
        });
    }
    let fs = record.spec.sample_rate_hz;
    let period_s = 1.0 / f_d;
    let period_samples = (fs / f_d).ceil() as usize;
    let needed = search_start + probe_len + period_samples;
    if needed > record.len() {
        return Err(Error::InsufficientSamples {
            needed,
            available: record.len(),
        });
    }

    let axis = record.axis(reference);
    let probe_spec = SamplingSpec::new(fs, probe_len)?;
    let probe = |offset_s: f64| -> Result<(usize, f64, f64)> {
        let pos = search_start as f64 + offset_s * fs;
        let index = pos.floor() as usize;
        let residual_s = (pos - index as f64) / fs;
        let window = &axis[index..index + probe_len];
        let corrected = fractional_shift(window, residual_s, &probe_spec)?;
        let (phase, _) = phase_at_frequency(&corrected, &probe_spec, f_d)?;
        Ok((index, residual_s, wrap(phase - target_phi)))
    };

    let (phase0, _) = phase_at_frequency(&axis[search_start..search_start + probe_len], &probe_spec, f_d)?;
    // Forward offset within one period; deficits within rounding of a full
    // period snap to zero so an already-aligned record keeps its onset.
    let mut turns = wrap(target_phi - phase0).rem_euclid(TAU) / TAU;
    if turns > 1.0 - 1e-9 {
        turns = 0.0;
    }
    let mut offset_s = turns * period_s;

    let opts = RefineOpts::default();
    let (mut index, mut residual_s, mut err) = probe(offset_s)?;
    for _ in 0..opts.max_iters {
        if err.abs() <= opts.tol_rad {
            break;
        }
        offset_s = (offset_s - err / (TAU * f_d)).rem_euclid(period_s);
        (index, residual_s, err) = probe(offset_s)?;
    }
    Ok(Onset { index, residual_s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dft_axis;
    use std::f64::consts::PI;

    fn spec(fs: f64, n: usize) -> SamplingSpec {
        SamplingSpec::new(fs, n).unwrap()
    }

    fn cosine(freq: f64, phase: f64, s: &SamplingSpec) -> Vec<f64> {
        (0..s.n_samples)
            .map(|n| (TAU * freq * n as f64 * s.period_s() + phase).cos())
            .collect()
    }

    fn tri_segment(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>, fs: f64) -> Segment {
        let s = spec(fs, x.len());
        Segment::new(s, x, y, z, 0, None).unwrap()
    }

    #[test]
    fn compute_plan_zero_phases_give_zero_shifts() {
        let p = PhaseSet::new(20.0, [0.0; 3], [1.0; 3]).unwrap();
        for mode in [
            AlignmentMode::None,
            AlignmentMode::ThreeAxisIndependent,
            AlignmentMode::SingleAxisReference(AxisId::X),
        ] {
            let plan = compute_plan(&p, mode, 0.0).unwrap();
            assert_eq!(plan.dts(), [0.0; 3], "{mode}");
        }
    }

    #[test]
    fn compute_plan_reference_quarter_turn() {
        // phase pi/2 at 20 Hz is a quarter period = 0.0125 s, shifted backward.
        let p = PhaseSet::new(20.0, [PI / 2.0, 1.0, -1.0], [1.0; 3]).unwrap();
        let plan = compute_plan(&p, AlignmentMode::SingleAxisReference(AxisId::X), 0.0).unwrap();
        for axis in AxisId::ALL {
            assert!((plan.dt(axis) + 0.0125).abs() < 1e-12);
        }
    }

    #[test]
    fn compute_plan_independent_per_axis() {
        let p = PhaseSet::new(20.0, [PI / 2.0, PI, -PI / 2.0], [1.0; 3]).unwrap();
        let plan = compute_plan(&p, AlignmentMode::ThreeAxisIndependent, 0.0).unwrap();
        assert!((plan.dt(AxisId::X) + 0.0125).abs() < 1e-12);
        assert!((plan.dt(AxisId::Y) + 0.025).abs() < 1e-12);
        assert!((plan.dt(AxisId::Z) - 0.0125).abs() < 1e-12);
    }

    #[test]
    fn compute_plan_formula_verified_by_remeasurement() {
        // On-bin case so the re-measured phase must land exactly on target.
        let s = spec(1024.0, 512);
        let f = 20.0;
        for (mode, target) in [
            (AlignmentMode::SingleAxisReference(AxisId::X), 0.0),
            (AlignmentMode::ThreeAxisIndependent, 0.0),
            (AlignmentMode::ThreeAxisIndependent, 0.8),
        ] {
            let seg = tri_segment(
                cosine(f, PI / 2.0, &s),
                cosine(f, PI, &s),
                cosine(f, -PI / 2.0, &s),
                1024.0,
            );
            let plan = plan_segment(&seg, f, mode, target).unwrap();
            let adjusted = apply_plan(&seg, &plan).unwrap();
            let post = measure_phase_set(&adjusted, f).unwrap();
            match mode {
                AlignmentMode::SingleAxisReference(r) => {
                    assert!(wrap(post.phase(r) - target).abs() < 1e-6);
                }
                AlignmentMode::ThreeAxisIndependent => {
                    for axis in AxisId::ALL {
                        assert!(wrap(post.phase(axis) - target).abs() < 1e-6, "{axis}");
                    }
                }
                AlignmentMode::None => {}
            }
        }
    }

    #[test]
    fn apply_zero_plan_is_identity() {
        let s = spec(3000.0, 512);
        let seg = tri_segment(
            cosine(20.0, 0.3, &s),
            cosine(20.0, 0.9, &s),
            cosine(20.0, -0.4, &s),
            3000.0,
        );
        let plan = AlignmentPlan::new(AlignmentMode::None, [0.0; 3], 20.0).unwrap();
        let out = apply_plan(&seg, &plan).unwrap();
        assert_eq!(out, seg);
    }

    #[test]
    fn apply_plan_rejects_oversized_shift() {
        let s = spec(3000.0, 64);
        let seg = tri_segment(
            cosine(100.0, 0.0, &s),
            cosine(100.0, 0.0, &s),
            cosine(100.0, 0.0, &s),
            3000.0,
        );
        let plan =
            AlignmentPlan::new(AlignmentMode::SingleAxisReference(AxisId::X), [0.5; 3], 100.0)
                .unwrap();
        assert!(matches!(
            apply_plan(&seg, &plan),
            Err(Error::ShiftTooLarge { .. })
        ));
    }

    #[test]
    fn apply_plan_preserves_amplitude_spectrum() {
        let s = spec(3000.0, 512);
        let seg = tri_segment(
            cosine(20.0, 1.2, &s),
            cosine(20.0, -0.7, &s),
            cosine(20.0, 2.9, &s),
            3000.0,
        );
        let plan = plan_segment(&seg, 20.0, AlignmentMode::ThreeAxisIndependent, 0.0).unwrap();
        let out = apply_plan(&seg, &plan).unwrap();
        for axis in AxisId::ALL {
            let before = dft_axis(seg.axis(axis)).unwrap();
            let after = dft_axis(out.axis(axis)).unwrap();
            let scale: f64 = before.iter().map(|c| c.norm()).fold(0.0, f64::max);
            for (a, b) in before.iter().zip(&after) {
                assert!((a.norm() - b.norm()).abs() <= 1e-9 * scale, "{axis}");
            }
        }
    }

    #[test]
    fn degenerate_axis_keeps_zero_shift_and_flags() {
        let s = spec(1024.0, 512);
        let zeros = vec![0.0; 512];
        let seg = tri_segment(cosine(20.0, 1.0, &s), zeros.clone(), cosine(20.0, -1.0, &s), 1024.0);
        let plan = plan_segment(&seg, 20.0, AlignmentMode::ThreeAxisIndependent, 0.0).unwrap();
        assert_eq!(plan.degenerate_axes, vec![AxisId::Y]);
        assert_eq!(plan.dt(AxisId::Y), 0.0);
        assert!(plan.dt(AxisId::X).abs() > 0.0);

        // Degenerate reference axis zeroes the whole uniform shift.
        let seg2 = tri_segment(zeros.clone(), cosine(20.0, 1.0, &s), cosine(20.0, 2.0, &s), 1024.0);
        let plan2 =
            plan_segment(&seg2, 20.0, AlignmentMode::SingleAxisReference(AxisId::X), 0.0).unwrap();
        assert_eq!(plan2.dts(), [0.0; 3]);
        assert_eq!(plan2.degenerate_axes.len(), 3);
    }

    #[test]
    fn fractional_shift_zero_is_identity() {
        let s = spec(3000.0, 100);
        let samples = cosine(30.0, 0.4, &s);
        let out = fractional_shift(&samples, 0.0, &s).unwrap();
        assert_eq!(out, samples);
    }

    #[test]
    fn fractional_shift_one_sample_matches_rotation() {
        let s = spec(1024.0, 512);
        let samples = cosine(32.0, 0.77, &s); // on-bin (bin 16), circularly periodic
        let shifted = fractional_shift(&samples, s.period_s(), &s).unwrap();
        let rotated: Vec<f64> = (0..512).map(|n| samples[(n + 1) % 512]).collect();
        for (a, b) in shifted.iter().zip(&rotated) {
            assert!((a - b).abs() < 1e-9);
        }
        // Integer shifts take the exact-rotation path: bit-identical.
        assert_eq!(shifted, rotated);

        // Two half-sample spectral shifts compose to the same rotation.
        let half = fractional_shift(&samples, 0.5 * s.period_s(), &s).unwrap();
        let full = fractional_shift(&half, 0.5 * s.period_s(), &s).unwrap();
        for (a, b) in full.iter().zip(&rotated) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn fractional_half_sample_advances_phase() {
        let s = spec(1024.0, 512);
        let f = 20.0;
        let samples = cosine(f, 0.31, &s);
        let dt = 0.5 * s.period_s();
        let shifted = fractional_shift(&samples, dt, &s).unwrap();
        let (p0, _) = phase_at_frequency(&samples, &s, f).unwrap();
        let (p1, _) = phase_at_frequency(&shifted, &s, f).unwrap();
        assert!(wrap(p1 - p0 - TAU * f * dt).abs() < 1e-9);
    }

    #[test]
    fn fractional_shift_rejects_non_finite() {
        let s = spec(3000.0, 8);
        assert!(fractional_shift(&[0.0; 8], f64::NAN, &s).is_err());
    }

    #[test]
    fn shifts_compose_additively() {
        let s = spec(1024.0, 512);
        let samples = cosine(40.0, 1.9, &s);
        let once = fractional_shift(&samples, 0.0017, &s).unwrap();
        let twice = fractional_shift(&once, 0.0008, &s).unwrap();
        let direct = fractional_shift(&samples, 0.0025, &s).unwrap();
        for (a, b) in twice.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn onset_already_aligned() {
        let fs = 1024.0;
        let n = 2048;
        let s = spec(fs, n);
        let f = 32.0; // on-bin for a 512 window at fs=1024: bin 16
        let rec = TriAxialRecord::new(
            s,
            cosine(f, 0.0, &s),
            cosine(f, 1.0, &s),
            cosine(f, 2.0, &s),
            None,
            "t",
        )
        .unwrap();
        let onset = determine_onset(&rec, f, AxisId::X, 0.0, 0, 512).unwrap();
        assert_eq!(onset.index, 0);
        assert!(onset.residual_s.abs() < 1e-9);
    }

    #[test]
    fn onset_quarter_period_delay() {
        let fs = 3000.0;
        let n = 4096;
        let s = spec(fs, n);
        let f = 20.0;
        // Record delayed by a quarter period (start phase -pi/2): zero phase
        // next occurs a quarter period in, 0.0125 s = 37.5 samples.
        let make = |phase: f64| {
            TriAxialRecord::new(
                s,
                cosine(f, phase, &s),
                cosine(f, phase - 0.5, &s),
                cosine(f, phase + 0.5, &s),
                None,
                "t",
            )
            .unwrap()
        };
        let rec = make(-PI / 2.0);
        let onset = determine_onset(&rec, f, AxisId::X, 0.0, 0, 512).unwrap();
        assert!(onset.index == 37 || onset.index == 38, "index {}", onset.index);
        let pos = onset.index as f64 + onset.residual_s * fs;
        assert!(
            (pos - 37.5).abs() < 0.5,
            "onset position {pos}, expected near 37.5"
        );

        // Re-probe oracle: the window at the onset has the target phase.
        let probe_spec = spec(fs, 512);
        let window = &rec.x[onset.index..onset.index + 512];
        let corrected = fractional_shift(window, onset.residual_s, &probe_spec).unwrap();
        let (phase, _) = phase_at_frequency(&corrected, &probe_spec, f).unwrap();
        assert!(phase.abs() < 0.02, "re-probed phase {phase}");
    }

    #[test]
    fn onset_noisy_stays_near_clean_answer() {
        let fs = 3000.0;
        let n = 4096;
        let s = spec(fs, n);
        let f = 20.0;
        let clean: Vec<f64> = cosine(f, -PI / 2.0, &s);
        let rec_clean = TriAxialRecord::new(
            s,
            clean.clone(),
            clean.clone(),
            clean.clone(),
            None,
            "clean",
        )
        .unwrap();
        let clean_onset = determine_onset(&rec_clean, f, AxisId::X, 0.0, 0, 512).unwrap();
        let clean_pos = clean_onset.index as f64 + clean_onset.residual_s * fs;

        // SNR 20 dB on a unit-amplitude tone: sigma = 1/sqrt(2)/10.
        let sigma = (0.5f64).sqrt() / 10.0;
        let mut state = 0x1234_5678_9ABC_DEF0u64;
        let mut uniform = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..100 {
            let _ = trial;
            let noisy: Vec<f64> = clean
                .iter()
                .map(|&v| {
                    // Box-Muller
                    let u1 = uniform().max(1e-12);
                    let u2 = uniform();
                    v + sigma * (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
                })
                .collect();
            let rec = TriAxialRecord::new(s, noisy.clone(), noisy.clone(), noisy, None, "noisy")
                .unwrap();
            let onset = determine_onset(&rec, f, AxisId::X, 0.0, 0, 512).unwrap();
            let pos = onset.index as f64 + onset.residual_s * fs;
            assert!(
                (pos - clean_pos).abs() <= 2.0,
                "noisy onset {pos} vs clean {clean_pos}"
            );
        }
    }

    #[test]
    fn onset_rejects_short_records() {
        let fs = 3000.0;
        let s = spec(fs, 600);
        let rec = TriAxialRecord::new(
            s,
            cosine(20.0, 0.0, &s),
            cosine(20.0, 0.0, &s),
            cosine(20.0, 0.0, &s),
            None,
            "t",
        )
        .unwrap();
        // 512 + ceil(150) = 662 > 600
        assert!(matches!(
            determine_onset(&rec, 20.0, AxisId::X, 0.0, 0, 512),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn refined_plan_zeroes_off_bin_phase() {
        let s = spec(3000.0, 512);
        let seg = tri_segment(
            cosine(20.0, 2.8, &s),
            cosine(20.0, -1.3, &s),
            cosine(20.0, 0.6, &s),
            3000.0,
        );
        let plan = plan_segment_refined(
            &seg,
            20.0,
            AlignmentMode::ThreeAxisIndependent,
            0.0,
            RefineOpts::default(),
        )
        .unwrap();
        let out = apply_plan(&seg, &plan).unwrap();
        let post = measure_phase_set(&out, 20.0).unwrap();
        for axis in AxisId::ALL {
            assert!(post.phase(axis).abs() < 1e-5, "{axis}: {}", post.phase(axis));
        }
    }

    #[test]
    fn plan_is_idempotent_on_aligned_segment() {
        let s = spec(1024.0, 512);
        let f = 20.0;
        let seg = tri_segment(
            cosine(f, 1.0, &s),
            cosine(f, -0.5, &s),
            cosine(f, 2.2, &s),
            1024.0,
        );
        let plan = plan_segment(&seg, f, AlignmentMode::ThreeAxisIndependent, 0.0).unwrap();
        let aligned = apply_plan(&seg, &plan).unwrap();
        let second = plan_segment(&aligned, f, AlignmentMode::ThreeAxisIndependent, 0.0).unwrap();
        for axis in AxisId::ALL {
            assert!(second.dt(axis).abs() < 1e-9, "{axis}");
        }
        let twice = apply_plan(&aligned, &second).unwrap();
        for axis in AxisId::ALL {
            for (a, b) in aligned.axis(axis).iter().zip(twice.axis(axis)) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }
}
