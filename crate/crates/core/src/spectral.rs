//! Spectral estimation: DFT, exact-frequency phase/magnitude extraction, and
//! dominant-frequency detection.
//!
//! Phase extraction evaluates the single-frequency DTFT at the exact
//! requested frequency rather than snapping to the nearest FFT bin. At the
//! usual operating point (3 kHz sampling, 512-sample windows) the rotational
//! fundamental falls between bins, so bin-quantized phases would carry an
//! avoidable error.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::types::{wrap, AxisId, SamplingSpec, Segment};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
}

fn check_samples(samples: &[f64]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::TooShort {
            len: samples.len(),
            min: 2,
        });
    }
    if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample {
            axis: AxisId::X,
            index,
        });
    }
    Ok(())
}

/// Forward DFT of one axis, negative-exponent convention:
/// `X[k] = sum_n x[n] exp(-j 2 pi k n / L)`.
pub fn dft_axis(samples: &[f64]) -> Result<Vec<Complex64>> {
    check_samples(samples)?;
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    Ok(buf)
}

/// Inverse of [`dft_axis`] for a real signal: scales by 1/L and drops the
/// round-off imaginary part.
pub fn idft_axis(bins: &[Complex64]) -> Result<Vec<f64>> {
    if bins.len() < 2 {
        return Err(Error::TooShort {
            len: bins.len(),
            min: 2,
        });
    }
    let len = bins.len() as f64;
    let mut buf = bins.to_vec();
    fft_inverse(&mut buf);
    Ok(buf.into_iter().map(|c| c.re / len).collect())
}

/// Complex spectra of all three axes of a segment, with bin center
/// frequencies `k * sample_rate / L`.
#[derive(Debug, Clone)]
pub struct SpectrumFrame {
    pub freqs_hz: Vec<f64>,
    bins: [Vec<Complex64>; 3],
}

impl SpectrumFrame {
    pub fn from_segment(segment: &Segment) -> Result<Self> {
        let len = segment.len();
        let df = segment.spec.sample_rate_hz / len as f64;
        let freqs_hz = (0..len).map(|k| k as f64 * df).collect();
        Ok(SpectrumFrame {
            freqs_hz,
            bins: [
                dft_axis(&segment.x)?,
                dft_axis(&segment.y)?,
                dft_axis(&segment.z)?,
            ],
        })
    }

    pub fn bins(&self, axis: AxisId) -> &[Complex64] {
        &self.bins[axis.index()]
    }

    pub fn magnitudes(&self, axis: AxisId) -> Vec<f64> {
        self.bins[axis.index()].iter().map(|c| c.norm()).collect()
    }
}

fn check_freq(f: f64, spec: &SamplingSpec) -> Result<()> {
    let nyquist_hz = spec.nyquist_hz();
    if !f.is_finite() || f <= 0.0 || f >= nyquist_hz {
        return Err(Error::FrequencyOutOfRange {
            freq_hz: f,
            nyquist_hz,
        });
    }
    Ok(())
}

/// Phase and magnitude of the single-frequency DTFT
/// `sum_n s[n] exp(-j 2 pi f n T_s)` evaluated at the exact frequency `f`.
///
/// Phase is wrapped to (-pi, pi]. The magnitude of an all-zero input is zero
/// with phase zero.
pub fn phase_at_frequency(samples: &[f64], spec: &SamplingSpec, f: f64) -> Result<(f64, f64)> {
    check_samples(samples)?;
    if samples.len() != spec.n_samples {
        return Err(Error::AxisLengthMismatch {
            x: samples.len(),
            y: samples.len(),
            z: samples.len(),
            expected: spec.n_samples,
        });
    }
    check_freq(f, spec)?;
    let omega = -std::f64::consts::TAU * f * spec.period_s();
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, &v) in samples.iter().enumerate() {
        let (sin, cos) = (omega * n as f64).sin_cos();
        acc += Complex64::new(v * cos, v * sin);
    }
    let mag = acc.norm();
    let phase = if mag == 0.0 {
        0.0
    } else {
        wrap(acc.im.atan2(acc.re))
    };
    Ok((phase, mag))
}

/// Measure all three axis phases/magnitudes of a segment at one frequency.
pub fn measure_phase_set(segment: &Segment, f: f64) -> Result<crate::types::PhaseSet> {
    let mut phases = [0.0; 3];
    let mut mags = [0.0; 3];
    for axis in AxisId::ALL {
        let (phase, mag) = phase_at_frequency(segment.axis(axis), &segment.spec, f)?;
        phases[axis.index()] = phase;
        mags[axis.index()] = mag;
    }
    crate::types::PhaseSet::new(f, phases, mags)
}

/// DTFT magnitude at an arbitrary frequency; helper for peak refinement.
fn dtft_mag(samples: &[f64], spec: &SamplingSpec, f: f64) -> f64 {
    let omega = -std::f64::consts::TAU * f * spec.period_s();
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, &v) in samples.iter().enumerate() {
        let (sin, cos) = (omega * n as f64).sin_cos();
        acc += Complex64::new(v * cos, v * sin);
    }
    acc.norm()
}

/// Frequency of maximum magnitude within a band, on the detection axis.
///
/// The coarse FFT peak (deterministic tie-break: lowest frequency) is refined
/// by quadratic interpolation over the log-magnitudes of the peak bin and its
/// neighbors, then polished by a golden-section maximization of the exact
/// DTFT magnitude within one bin of the interpolated estimate. The polish
/// step is needed because with a rectangular window the interpolated peak of
/// an off-bin tone can sit a sizable fraction of a bin away from the true
/// spectral maximum.
pub fn detect_dominant_frequency(
    segment: &Segment,
    search_band_hz: (f64, f64),
    detection_axis: AxisId,
) -> Result<f64> {
    let (low, high) = search_band_hz;
    let spec = segment.spec;
    let nyquist_hz = spec.nyquist_hz();
    if !low.is_finite() || !high.is_finite() || low <= 0.0 || low >= high || high >= nyquist_hz {
        return Err(Error::InvalidBand {
            low,
            high,
            nyquist_hz,
        });
    }

    let samples = segment.axis(detection_axis);
    let len = samples.len();
    let df = spec.sample_rate_hz / len as f64;
    let bins = dft_axis(samples)?;

    // Candidate bins: everything whose center could cover the band, excluding
    // DC and anything past Nyquist.
    let k_low = ((low / df).floor() as usize).max(1);
    let k_high = ((high / df).ceil() as usize).min(len / 2);
    if k_low > k_high {
        return Err(Error::InvalidBand {
            low,
            high,
            nyquist_hz,
        });
    }

    let mut peak_k = k_low;
    let mut peak_mag = bins[k_low].norm();
    for k in (k_low + 1)..=k_high {
        let mag = bins[k].norm();
        if mag > peak_mag {
            peak_mag = mag;
            peak_k = k;
        }
    }

    // 3-point quadratic interpolation over log-magnitudes.
    let mut delta = 0.0;
    if peak_k >= 1 && peak_k + 1 <= len / 2 {
        let m0 = bins[peak_k - 1].norm();
        let m1 = bins[peak_k].norm();
        let m2 = bins[peak_k + 1].norm();
        if m0 > 0.0 && m1 > 0.0 && m2 > 0.0 {
            let (a, b, c) = (m0.ln(), m1.ln(), m2.ln());
            let denom = a - 2.0 * b + c;
            if denom.abs() > 1e-300 {
                delta = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
            }
        }
    }
    let coarse = (peak_k as f64 + delta) * df;

    // Golden-section polish on the exact DTFT magnitude, within one bin of
    // the interpolated estimate, clamped to the band.
    let mut lo = (coarse - df).max(low);
    let mut hi = (coarse + df).min(high);
    if lo >= hi {
        return Ok(coarse.clamp(low, high));
    }
    const INV_GOLD: f64 = 0.618_033_988_749_894_9;
    let mut c_ = hi - INV_GOLD * (hi - lo);
    let mut d_ = lo + INV_GOLD * (hi - lo);
    let mut fc = dtft_mag(samples, &spec, c_);
    let mut fd = dtft_mag(samples, &spec, d_);
    for _ in 0..48 {
        if fc > fd {
            hi = d_;
            d_ = c_;
            fd = fc;
            c_ = hi - INV_GOLD * (hi - lo);
            fc = dtft_mag(samples, &spec, c_);
        } else {
            lo = c_;
            c_ = d_;
            fc = fd;
            d_ = lo + INV_GOLD * (hi - lo);
            fd = dtft_mag(samples, &spec, d_);
        }
    }
    Ok(0.5 * (lo + hi))
}
