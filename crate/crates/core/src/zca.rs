//! Zero-crossing analysis: recovering picosecond-scale sampling-point
//! fluctuations from a recorded carrier.
//!
//! The recorded tone is windowed, band-limited around the carrier, and
//! resampled onto a grid tens of times finer by FFT interpolation.
//! Zero crossings located on that grid are compared against the ideal
//! equispaced crossing times of a fitted constant-frequency carrier;
//! the differences form the zero-crossing fluctuation (ZCF) series,
//! which samples the player's jitter and additive noise once per half
//! carrier cycle.

use crate::buffer::SampleBuffer;
use crate::dsp::{blackman_edge_window, fft_interpolate, AnalysisConfig};
use crate::error::{Error, Result};

/// Zero crossings located on the interpolated fine grid.
#[derive(Debug, Clone, Default)]
pub struct Crossings {
    /// Crossing times, strictly increasing, seconds.
    pub times: Vec<f64>,
    /// Slope direction at each crossing; `true` means rising.
    pub rising: Vec<bool>,
}

/// The fitted ideal crossing grid `s'_k = first + k * half_period`.
#[derive(Debug, Clone, Copy)]
pub struct GridFit {
    /// Spacing between neighboring crossings, `1 / (2 f_c)`, seconds.
    pub half_period: f64,
    /// Fitted time of crossing 0, seconds.
    pub first: f64,
    /// False when the input times were not strictly increasing, which
    /// marks the fit as untrustworthy without discarding it.
    pub monotonic: bool,
}

impl GridFit {
    /// Carrier frequency implied by the fitted spacing, Hz.
    pub fn carrier(&self) -> f64 {
        1.0 / (2.0 * self.half_period)
    }
}

/// One analysis window's zero-crossing fluctuation series.
#[derive(Debug, Clone)]
pub struct ZeroCrossingSeries {
    /// Time of the span's local zero in the recording's clock, seconds.
    pub span_start: f64,
    /// Span length T, seconds.
    pub span_seconds: f64,
    /// Measured crossing times `s_k`, span-local seconds.
    pub crossings: Vec<f64>,
    /// Ideal crossing times `s'_k` from the grid fit, span-local.
    pub ideal: Vec<f64>,
    /// Fluctuations `s'_k - s_k`, seconds.
    pub delta: Vec<f64>,
    /// Slope direction of each crossing; `true` means rising.
    pub rising: Vec<bool>,
    /// Fitted carrier frequency, Hz.
    pub carrier_estimate: f64,
    /// Measured carrier amplitude over the span, full-scale units.
    pub amplitude: f64,
}

impl ZeroCrossingSeries {
    /// Number of crossings in the span.
    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    /// True when the series holds no crossings.
    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    /// Mean-removed RMS of the fluctuation series, seconds.
    pub fn rms(&self) -> f64 {
        deviation(&self.delta)
    }

    /// Angular carrier frequency, rad/s.
    pub fn omega(&self) -> f64 {
        std::f64::consts::TAU * self.carrier_estimate
    }

    /// Ideal crossing time `s'_k` in the recording's clock, seconds.
    pub fn ideal_abs(&self, k: usize) -> f64 {
        self.span_start + self.ideal[k]
    }

    /// Additive noise sampled at the crossings, full-scale units:
    /// the fluctuation scaled by the crossing slope `+/- w A0`, with
    /// the sign positive at rising crossings. For phase-incoherent
    /// noise this reconstructs `n_PI(s'_k)`.
    pub fn pi_noise_estimate(&self) -> Vec<f64> {
        let scale = self.omega() * self.amplitude;
        self.delta
            .iter()
            .zip(&self.rising)
            .map(|(&d, &up)| if up { d * scale } else { -d * scale })
            .collect()
    }
}

/// Mean-removed population RMS of a series.
pub fn deviation(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / x.len() as f64).sqrt()
}

/// Locates zero crossings of `samples` by linear interpolation.
///
/// Sample `m` sits at `start_time + m / sample_rate`; crossings whose
/// interpolated time falls inside `window` (inclusive) are kept. A
/// sample exactly at zero counts as a crossing at its own time, with
/// the following sample deciding the slope direction.
pub fn find_zero_crossings(
    samples: &[f64],
    sample_rate: f64,
    start_time: f64,
    window: (f64, f64),
) -> Crossings {
    let mut out = Crossings::default();
    let step = 1.0 / sample_rate;
    for m in 0..samples.len().saturating_sub(1) {
        let (a, b) = (samples[m], samples[m + 1]);
        let (t, up) = if a == 0.0 {
            if b == 0.0 {
                continue;
            }
            (start_time + m as f64 * step, b > 0.0)
        } else if a * b < 0.0 {
            (start_time + (m as f64 + a / (a - b)) * step, b > 0.0)
        } else {
            continue;
        };
        if t >= window.0 && t <= window.1 {
            out.times.push(t);
            out.rising.push(up);
        }
    }
    out
}

/// Least-squares fit of an equispaced grid to the crossing times.
pub fn fit_crossing_grid(times: &[f64]) -> Result<GridFit> {
    let m = times.len();
    if m < 2 {
        return Err(Error::InsufficientSignal { found: m, needed: 2 });
    }
    let mean_k = (m as f64 - 1.0) / 2.0;
    let mean_t = times.iter().sum::<f64>() / m as f64;
    let mut skt = 0.0;
    for (k, &t) in times.iter().enumerate() {
        skt += (k as f64 - mean_k) * (t - mean_t);
    }
    let skk = m as f64 * (m as f64 * m as f64 - 1.0) / 12.0;
    let half_period = skt / skk;
    if !(half_period > 0.0) {
        return Err(Error::InsufficientSignal { found: m, needed: 2 });
    }
    let monotonic = times.windows(2).all(|w| w[1] > w[0]);
    Ok(GridFit { half_period, first: mean_t - half_period * mean_k, monotonic })
}

/// Runs the full zero-crossing analysis on normalized samples.
///
/// `samples` must hold exactly `6 * block_len` values in full-scale
/// units; `start_time` is the time of `samples[0]` in the recording's
/// clock. The analysis span covers local time `[0, T]`, which starts
/// `block_len` samples in.
pub fn compute_zcf_normalized(
    samples: &[f64],
    sample_rate: f64,
    start_time: f64,
    cfg: &AnalysisConfig,
) -> Result<ZeroCrossingSeries> {
    cfg.validate(sample_rate)?;
    let n = cfg.block_len;
    if samples.len() != 6 * n {
        return Err(Error::Config(format!(
            "analysis window needs exactly {} samples, got {}",
            6 * n,
            samples.len()
        )));
    }
    check_coverage(samples)?;

    let window = blackman_edge_window(n);
    let windowed: Vec<f64> = samples.iter().zip(&window).map(|(&x, &w)| x * w).collect();
    let fine = fft_interpolate(&windowed, sample_rate, cfg.n_over, cfg.band())?;
    drop(windowed);

    let span = cfg.span_seconds(sample_rate);
    let fine_rate = sample_rate * cfg.n_over as f64;
    let local_first = -(n as f64) / sample_rate;
    let crossings = find_zero_crossings(&fine, fine_rate, local_first, (0.0, span));
    if crossings.times.len() < 2 {
        return Err(Error::InsufficientSignal { found: crossings.times.len(), needed: 2 });
    }

    // Carrier amplitude from the band-limited span, where the window
    // is exactly one.
    let span_lo = n * cfg.n_over;
    let span_hi = 5 * n * cfg.n_over;
    let mean_sq =
        fine[span_lo..=span_hi].iter().map(|v| v * v).sum::<f64>() / (span_hi - span_lo + 1) as f64;
    let amplitude = (2.0 * mean_sq).sqrt();
    drop(fine);

    let fit = fit_crossing_grid(&crossings.times)?;
    let ideal: Vec<f64> =
        (0..crossings.times.len()).map(|k| fit.first + k as f64 * fit.half_period).collect();
    let delta: Vec<f64> = ideal.iter().zip(&crossings.times).map(|(i, t)| i - t).collect();

    Ok(ZeroCrossingSeries {
        span_start: start_time + n as f64 / sample_rate,
        span_seconds: span,
        crossings: crossings.times,
        ideal,
        delta,
        rising: crossings.rising,
        carrier_estimate: fit.carrier(),
        amplitude,
    })
}

/// Zero-crossing analysis of the first `6 * block_len` samples of a
/// buffer. See [`compute_zcf_at`] for picking a different window.
pub fn compute_zcf(buffer: &SampleBuffer, cfg: &AnalysisConfig) -> Result<ZeroCrossingSeries> {
    compute_zcf_at(buffer, cfg, 0)
}

/// Zero-crossing analysis of the window starting at sample
/// `window_start`; the analysis span begins `block_len` samples later.
pub fn compute_zcf_at(
    buffer: &SampleBuffer,
    cfg: &AnalysisConfig,
    window_start: usize,
) -> Result<ZeroCrossingSeries> {
    let n6 = cfg.window_len();
    if window_start + n6 > buffer.len() {
        return Err(Error::Coverage(format!(
            "window [{window_start}, {}) runs past the {}-sample recording",
            window_start + n6,
            buffer.len()
        )));
    }
    let fs = buffer.full_scale();
    let samples: Vec<f64> =
        buffer.samples[window_start..window_start + n6].iter().map(|&v| v as f64 / fs).collect();
    compute_zcf_normalized(&samples, buffer.sample_rate, buffer.time_of(window_start), cfg)
}

/// Rejects windows that reach into silence or deep fades: every
/// thirty-second of the window must hold signal within a factor twenty
/// of the loudest thirty-second's peak.
fn check_coverage(samples: &[f64]) -> Result<()> {
    let seg = (samples.len() / 32).max(1);
    let peaks: Vec<f64> = samples
        .chunks(seg)
        .map(|c| c.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .collect();
    let top = peaks.iter().fold(0.0f64, |m, &v| m.max(v));
    if top < 1e-6 {
        return Err(Error::Coverage("window is silent".into()));
    }
    if let Some(pos) = peaks.iter().position(|&p| p < 0.05 * top) {
        return Err(Error::Coverage(format!(
            "window segment {pos} holds no signal (peak {:.2e} against {top:.2e})",
            peaks[pos]
        )));
    }
    Ok(())
}

/// Start indices of `count` consecutive non-overlapping analysis
/// windows whose first span begins at `first_span_sample`.
pub fn window_starts(
    buffer_len: usize,
    cfg: &AnalysisConfig,
    first_span_sample: usize,
    count: usize,
) -> Result<Vec<usize>> {
    let n = cfg.block_len;
    if first_span_sample < n {
        return Err(Error::Coverage(format!(
            "first span at {first_span_sample} leaves no room for the {n}-sample taper"
        )));
    }
    let starts: Vec<usize> =
        (0..count).map(|w| first_span_sample - n + w * cfg.span_len()).collect();
    if let Some(&last) = starts.last() {
        if last + cfg.window_len() > buffer_len {
            return Err(Error::Coverage(format!(
                "{count} windows need {} samples, recording has {buffer_len}",
                last + cfg.window_len()
            )));
        }
    }
    Ok(starts)
}

/// Detects the tone onset: the first sample where the trailing RMS
/// over about four carrier cycles exceeds half the carrier amplitude.
/// Both recorders of a double-recorder setup see this at the same
/// instant of the playback, so it anchors their cycle counting.
///
/// The carrier amplitude is referenced to the largest trailing window
/// rather than the largest sample: the sampled peak of a tone depends
/// on where the sampling grid lands on the carrier phase, which would
/// bias two recorders' thresholds against each other, while a
/// several-cycle mean square does not.
pub fn detect_onset(buffer: &SampleBuffer, cfg: &AnalysisConfig) -> Option<usize> {
    let x = buffer.to_normalized();
    let w = (4.0 * buffer.sample_rate / cfg.carrier_hint).round() as usize;
    if x.len() <= w || w == 0 {
        return None;
    }
    let initial = x[..w].iter().map(|v| v * v).sum::<f64>();
    let mut sum_sq = initial;
    let mut max_sq = sum_sq;
    for i in w..x.len() {
        sum_sq += x[i] * x[i] - x[i - w] * x[i - w];
        max_sq = max_sq.max(sum_sq);
    }
    if max_sq <= 0.0 {
        return None;
    }
    // Half the carrier amplitude is a quarter of its mean square.
    let threshold = max_sq / 4.0;
    if initial >= threshold {
        return Some(w - 1);
    }
    let mut sum_sq = initial;
    for i in w..x.len() {
        sum_sq += x[i] * x[i] - x[i - w] * x[i - w];
        if sum_sq >= threshold {
            return Some(i);
        }
    }
    None
}

/// Aligns two fluctuation series onto a common crossing index by
/// counting carrier cycles from each recording's onset.
///
/// `onset_a` and `onset_b` are the onset times in each recording's own
/// clock. Returns the two series trimmed so equal indices refer to the
/// same physical crossing.
pub fn align_crossings(
    a: &ZeroCrossingSeries,
    b: &ZeroCrossingSeries,
    onset_a: f64,
    onset_b: f64,
) -> Result<(ZeroCrossingSeries, ZeroCrossingSeries)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Synchronization("cannot align an empty series".into()));
    }
    let elapsed_a = a.span_start + a.crossings[0] - onset_a;
    let elapsed_b = b.span_start + b.crossings[0] - onset_b;
    let carrier = (a.carrier_estimate + b.carrier_estimate) / 2.0;
    let offset = (elapsed_a - elapsed_b) * 2.0 * carrier;

    // Candidate integer offsets nearest the measured one; the slope
    // direction of the paired crossings resolves a half-cycle
    // ambiguity, since the same physical crossing rises in both
    // recordings.
    let base = offset.round() as i64;
    let mut chosen = None;
    let mut candidates = [base, base - 1, base + 1];
    candidates.sort_by(|x, y| {
        (*x as f64 - offset).abs().total_cmp(&(*y as f64 - offset).abs())
    });
    for d in candidates {
        let (ia, ib) = if d >= 0 { (0i64, d) } else { (-d, 0) };
        let (ia, ib) = (ia as usize, ib as usize);
        if ia < a.len() && ib < b.len() && a.rising[ia] == b.rising[ib] {
            chosen = Some(d);
            break;
        }
    }
    let d = chosen.ok_or_else(|| {
        Error::Synchronization(format!("no consistent cycle pairing near offset {offset:.2}"))
    })?;
    if (d as f64 - offset).abs() > 0.75 {
        return Err(Error::Synchronization(format!(
            "cycle count ambiguous: measured offset {offset:.2} is {:.2} crossings from the nearest consistent pairing",
            (d as f64 - offset).abs()
        )));
    }

    let (skip_a, skip_b) = if d >= 0 { (0usize, d as usize) } else { ((-d) as usize, 0) };
    if skip_a >= a.len() || skip_b >= b.len() {
        return Err(Error::Synchronization("recordings do not overlap".into()));
    }
    let common = (a.len() - skip_a).min(b.len() - skip_b);
    if common < 2 {
        return Err(Error::Synchronization(format!("only {common} shared crossings")));
    }
    Ok((trim(a, skip_a, common), trim(b, skip_b, common)))
}

fn trim(s: &ZeroCrossingSeries, skip: usize, count: usize) -> ZeroCrossingSeries {
    ZeroCrossingSeries {
        span_start: s.span_start,
        span_seconds: s.span_seconds,
        crossings: s.crossings[skip..skip + count].to_vec(),
        ideal: s.ideal[skip..skip + count].to_vec(),
        delta: s.delta[skip..skip + count].to_vec(),
        rising: s.rising[skip..skip + count].to_vec(),
        carrier_estimate: s.carrier_estimate,
        amplitude: s.amplitude,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::AnalysisConfig;
    use crate::synth::{synthesize_dummy, DummySpec};

    const TAU: f64 = std::f64::consts::TAU;

    #[test]
    fn crossing_between_two_samples_lands_at_the_interpolated_point() {
        let c = find_zero_crossings(&[1.0, -1.0], 1.0, 0.0, (0.0, 1.0));
        assert_eq!(c.times, vec![0.5]);
        assert_eq!(c.rising, vec![false]);
        let c = find_zero_crossings(&[-1.0, 3.0], 1.0, 0.0, (0.0, 1.0));
        assert_eq!(c.times, vec![0.25]);
        assert_eq!(c.rising, vec![true]);
    }

    #[test]
    fn exact_zero_sample_counts_once_at_its_own_time() {
        let c = find_zero_crossings(&[0.5, 0.0, -0.5], 1.0, 0.0, (0.0, 2.0));
        assert_eq!(c.times, vec![1.0]);
        assert_eq!(c.rising, vec![false]);
        let c = find_zero_crossings(&[-0.5, 0.0, 0.5], 1.0, 0.0, (0.0, 2.0));
        assert_eq!(c.times, vec![1.0]);
        assert_eq!(c.rising, vec![true]);
    }

    #[test]
    fn sine_crossings_alternate_and_sit_near_the_true_zeros() {
        let rate = 10_000.0;
        let f0 = 100.0;
        let x: Vec<f64> = (0..10_000).map(|i| (TAU * f0 * i as f64 / rate).sin()).collect();
        let c = find_zero_crossings(&x, rate, 0.0, (0.0, 1.0));
        assert_eq!(c.times.len(), 200);
        for (k, (&t, &up)) in c.times.iter().zip(&c.rising).enumerate() {
            let want = k as f64 / (2.0 * f0);
            assert!((t - want).abs() < 2e-6, "crossing {k} at {t}, expected {want}");
            assert_eq!(up, k % 2 == 0, "parity at {k}");
        }
    }

    #[test]
    fn grid_fit_recovers_an_exact_grid() {
        let times: Vec<f64> = (0..100).map(|k| 0.001 + k as f64 * 0.0005).collect();
        let fit = fit_crossing_grid(&times).unwrap();
        assert!((fit.half_period - 0.0005).abs() < 1e-15);
        assert!((fit.first - 0.001).abs() < 1e-15);
        assert!((fit.carrier() - 1_000.0).abs() < 1e-9);
        assert!(fit.monotonic);
    }

    #[test]
    fn out_of_order_times_mark_the_fit_untrustworthy() {
        let mut times: Vec<f64> = (0..50).map(|k| k as f64 * 0.0005).collect();
        times.swap(10, 11);
        let fit = fit_crossing_grid(&times).unwrap();
        assert!(!fit.monotonic);
    }

    #[test]
    fn grid_fit_needs_two_crossings() {
        let err = fit_crossing_grid(&[0.5]).unwrap_err();
        assert_eq!(err.category(), "insufficient-signal");
    }

    fn short_dummy(carrier: f64) -> (DummySpec, AnalysisConfig) {
        let spec = DummySpec { carrier, duration: 0.4, ..DummySpec::default() };
        let cfg = AnalysisConfig { block_len: 12_000, ..AnalysisConfig::default() };
        (spec, cfg)
    }

    #[test]
    fn noise_free_tone_crossings_match_the_analytic_grid() {
        let (spec, cfg) = short_dummy(11_884.877);
        let out = synthesize_dummy(&spec).unwrap();
        let series = compute_zcf(&out.buffer, &cfg).unwrap();
        let span = cfg.span_seconds(192_000.0);
        assert!((series.span_seconds - span).abs() < 1e-12);

        // Crossing k of cos(w t) sits where w t = k pi - pi/2; local
        // span time runs block_len samples behind buffer time.
        let omega = spec.omega();
        let t0 = cfg.block_len as f64 / 192_000.0;
        let k_first = (omega * t0 / std::f64::consts::PI + 0.5).ceil() as i64;
        let mut worst: f64 = 0.0;
        for (i, &t) in series.crossings.iter().enumerate() {
            let k = k_first + i as i64;
            let want = (k as f64 - 0.5) * std::f64::consts::PI / omega - t0;
            worst = worst.max((t - want).abs());
            // Even k of cos is a rising crossing.
            assert_eq!(series.rising[i], k % 2 == 0, "parity at crossing {i}");
        }
        assert!(worst < 1e-12, "worst crossing offset {worst} s");
        assert!(series.rms() < 1e-12, "noise-free ZCF RMS {}", series.rms());
        assert!((series.amplitude - 0.9).abs() < 1e-3);
        let expected = 2.0 * spec.carrier * span;
        assert!((series.len() as f64 - expected).abs() <= 1.0, "crossing count {}", series.len());
    }

    #[test]
    fn carrier_estimate_tracks_a_ppm_offset() {
        let (spec_a, cfg) = short_dummy(11_884.877);
        let (spec_b, _) = short_dummy(11_884.877 * (1.0 + 1e-6));
        let a = compute_zcf(&synthesize_dummy(&spec_a).unwrap().buffer, &cfg).unwrap();
        let b = compute_zcf(&synthesize_dummy(&spec_b).unwrap().buffer, &cfg).unwrap();
        let measured_ppm = (b.carrier_estimate / a.carrier_estimate - 1.0) * 1e6;
        assert!(
            (measured_ppm - 1.0).abs() < 0.01,
            "frequency offset measured as {measured_ppm} ppm"
        );
    }

    #[test]
    fn silent_window_is_a_coverage_error() {
        let buf = SampleBuffer::new(vec![0; 72_000], 192_000.0, 24, 0.0).unwrap();
        let cfg = AnalysisConfig { block_len: 12_000, ..AnalysisConfig::default() };
        let err = compute_zcf(&buf, &cfg).unwrap_err();
        assert_eq!(err.category(), "coverage");
    }

    #[test]
    fn window_reaching_into_silence_is_a_coverage_error() {
        let (spec, cfg) = short_dummy(11_884.877);
        let mut out = synthesize_dummy(&spec).unwrap();
        let n = out.buffer.len();
        for v in &mut out.buffer.samples[n - 30_000..] {
            *v = 0;
        }
        let err = compute_zcf(&out.buffer, &cfg).unwrap_err();
        assert_eq!(err.category(), "coverage");
    }

    #[test]
    fn short_buffer_is_a_coverage_error() {
        let buf = SampleBuffer::new(vec![0; 1_000], 192_000.0, 24, 0.0).unwrap();
        let err = compute_zcf(&buf, &AnalysisConfig::default()).unwrap_err();
        assert_eq!(err.category(), "coverage");
    }

    #[test]
    fn window_starts_partition_the_recording() {
        let cfg = AnalysisConfig { block_len: 100, ..AnalysisConfig::default() };
        let starts = window_starts(10_000, &cfg, 200, 3).unwrap();
        assert_eq!(starts, vec![100, 500, 900]);
        assert!(window_starts(1_499, &cfg, 200, 3).is_err(), "runs past the end");
        assert!(window_starts(10_000, &cfg, 50, 1).is_err(), "no room for the taper");
    }

    fn synthetic_series(first_k: usize, count: usize, span_start: f64) -> ZeroCrossingSeries {
        let half = 1.0 / (2.0 * 12_000.0);
        let crossings: Vec<f64> = (0..count).map(|k| (first_k + k) as f64 * half).collect();
        ZeroCrossingSeries {
            span_start,
            span_seconds: 1.0,
            crossings: crossings.clone(),
            ideal: crossings.clone(),
            delta: (0..count).map(|k| (first_k + k) as f64 * 1e-12).collect(),
            rising: (0..count).map(|k| (first_k + k) % 2 == 0).collect(),
            carrier_estimate: 12_000.0,
            amplitude: 0.9,
        }
    }

    #[test]
    fn alignment_pairs_series_offset_by_whole_crossings() {
        // Recorder B started its span five crossings earlier in the
        // playback than recorder A.
        let a = synthetic_series(5, 95, 10.0);
        let b = synthetic_series(0, 100, 10.0);
        let (aa, bb) = align_crossings(&a, &b, 0.0, 0.0).unwrap();
        assert_eq!(aa.len(), 95);
        assert_eq!(bb.len(), 95);
        for i in 0..aa.len() {
            assert_eq!(aa.delta[i], bb.delta[i], "paired crossings must carry the same truth");
            assert_eq!(aa.rising[i], bb.rising[i]);
        }
    }

    #[test]
    fn alignment_uses_slope_direction_to_break_near_half_cycle_ties() {
        let a = synthetic_series(4, 90, 10.0);
        let b = synthetic_series(0, 100, 10.0);
        // Skew one onset by 0.45 crossings: rounding alone would pick
        // an off-by-one pairing with mismatched slopes.
        let skew = 0.45 / (2.0 * 12_000.0);
        let (aa, bb) = align_crossings(&a, &b, skew, 0.0).unwrap();
        assert_eq!(aa.rising[0], bb.rising[0]);
        assert_eq!(aa.delta[0], bb.delta[0]);
    }

    #[test]
    fn gross_onset_mismatch_is_a_synchronization_error() {
        let a = synthetic_series(0, 50, 10.0);
        let mut b = synthetic_series(0, 50, 10.0);
        // Pretend recorder B's clock drifted mid-span: shift every
        // crossing by 0.8 of a spacing so no integer pairing fits.
        let half = 1.0 / (2.0 * 12_000.0);
        for t in &mut b.crossings {
            *t += 0.8 * half;
        }
        let err = align_crossings(&a, &b, 0.0, 0.0).unwrap_err();
        assert_eq!(err.category(), "synchronization");
    }

    #[test]
    fn detect_onset_finds_the_fade_midpoint() {
        // A tone whose amplitude ramps linearly over the first half.
        let rate = 192_000.0;
        let len = 96_000;
        let samples: Vec<i32> = (0..len)
            .map(|i| {
                let t = i as f64 / rate;
                let env = (2.0 * t).min(1.0);
                (8_000_000.0 * env * (TAU * 12_000.0 * t).cos()).round() as i32
            })
            .collect();
        let buf = SampleBuffer::new(samples, rate, 24, 0.0).unwrap();
        let cfg = AnalysisConfig { carrier_hint: 12_000.0, ..AnalysisConfig::default() };
        let onset = detect_onset(&buf, &cfg).unwrap();
        // Half amplitude is reached at t = 0.25 s.
        let t = buf.time_of(onset);
        assert!((t - 0.25).abs() < 0.002, "onset at {t} s");
    }
}
