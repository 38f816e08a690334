//! Variance decomposition of zero-crossing fluctuations.
//!
//! A single recorder only ever sees the quadrature sum of player and
//! recorder noise. Feeding one player into two recorders at once makes
//! the player's contribution common to both fluctuation series, so
//! sum and difference statistics separate the shared part from the two
//! independent parts. Further splits use a bundled-input variant (which
//! halves phase-incoherent noise power) and the two channels of one
//! stereo recorder (which share the recorder's clock).

use serde::Serialize;

use crate::buffer::SampleBuffer;
use crate::dsp::AnalysisConfig;
use crate::error::{Error, Result};
use crate::zca::{compute_zcf, deviation, ZeroCrossingSeries};

/// An RMS value derived from a variance that may come out negative on
/// non-physical inputs (misalignment, correlated noise). The raw
/// variance is kept so a flagged result still shows its inputs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RmsEstimate {
    /// RMS in seconds; zero when the radicand was negative.
    pub value: f64,
    /// The signed radicand, seconds squared.
    pub variance: f64,
    /// False when the radicand was negative.
    pub valid: bool,
}

impl RmsEstimate {
    /// Builds the estimate from a signed variance.
    pub fn from_variance(variance: f64) -> Self {
        RmsEstimate { value: variance.max(0.0).sqrt(), variance, valid: variance >= 0.0 }
    }
}

/// Double-recorder decomposition: the four sum/difference statistics
/// and the player/recorder deviations they imply.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceBudget {
    /// Deviation of recorder A's fluctuation series, seconds.
    pub e1: f64,
    /// Deviation of recorder B's fluctuation series, seconds.
    pub e2: f64,
    /// Deviation of the difference series, where the player cancels.
    pub e3: f64,
    /// Deviation of the sum series, used as a consistency check.
    pub e4: f64,
    /// Player noise common to both recorders.
    pub sigma_n: RmsEstimate,
    /// Recorder A's own noise.
    pub sigma_a: RmsEstimate,
    /// Recorder B's own noise.
    pub sigma_b: RmsEstimate,
    /// `E4^2 - (4 sigma_n^2 + sigma_a^2 + sigma_b^2)`, seconds
    /// squared. Near zero when the three noise sources really are
    /// uncorrelated.
    pub consistency_residual: f64,
    /// Frequency band the jitter estimate covers, Hz.
    pub jitter_band: Option<(f64, f64)>,
    /// Frequency band the phase-incoherent estimate covers, Hz.
    pub pi_band: Option<(f64, f64)>,
}

impl VarianceBudget {
    /// Decomposes the four deviations.
    ///
    /// Solves `sigma_n^2 = (E1^2 + E2^2 - E3^2) / 2`, then
    /// `sigma_a^2 = E1^2 - sigma_n^2` and `sigma_b^2 = E2^2 -
    /// sigma_n^2`.
    pub fn from_devs(e1: f64, e2: f64, e3: f64, e4: f64) -> Self {
        let vn = (e1 * e1 + e2 * e2 - e3 * e3) / 2.0;
        let va = e1 * e1 - vn;
        let vb = e2 * e2 - vn;
        VarianceBudget {
            e1,
            e2,
            e3,
            e4,
            sigma_n: RmsEstimate::from_variance(vn),
            sigma_a: RmsEstimate::from_variance(va),
            sigma_b: RmsEstimate::from_variance(vb),
            consistency_residual: e4 * e4 - (4.0 * vn + va + vb),
            jitter_band: None,
            pi_band: None,
        }
    }

    /// Consistency residual relative to the sum statistic's variance.
    pub fn consistency_relative(&self) -> f64 {
        if self.e4 > 0.0 { self.consistency_residual / (self.e4 * self.e4) } else { 0.0 }
    }

    /// Annotates the budget with the frequency bands the analysis
    /// configuration makes visible: jitter from the window's
    /// resolution limit up to the band half-width, phase-incoherent
    /// noise across the full carrier-centered band.
    pub fn with_bands(mut self, cfg: &AnalysisConfig, sample_rate: f64) -> Self {
        self.jitter_band = Some((1.0 / cfg.span_seconds(sample_rate), cfg.bandwidth));
        self.pi_band = Some(cfg.band());
        self
    }
}

/// Combined player-plus-recorder RMS of a single-recorder measurement.
/// One series cannot be split further; see [`drs_decompose`].
pub fn srs_budget(series: &ZeroCrossingSeries) -> f64 {
    series.rms()
}

/// Decomposes two aligned fluctuation series from recorders that
/// captured the same playback.
pub fn drs_decompose(a: &ZeroCrossingSeries, b: &ZeroCrossingSeries) -> Result<VarianceBudget> {
    let (da, db) = paired(a, b)?;
    let diff: Vec<f64> = da.iter().zip(db).map(|(x, y)| x - y).collect();
    let sum: Vec<f64> = da.iter().zip(db).map(|(x, y)| x + y).collect();
    Ok(VarianceBudget::from_devs(deviation(da), deviation(db), deviation(&diff), deviation(&sum)))
}

fn paired<'a>(a: &'a ZeroCrossingSeries, b: &'a ZeroCrossingSeries) -> Result<(&'a [f64], &'a [f64])> {
    if a.len() != b.len() {
        return Err(Error::Synchronization(format!(
            "series must be aligned first: {} vs {} crossings",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InsufficientSignal { found: a.len(), needed: 2 });
    }
    Ok((&a.delta, &b.delta))
}

/// Player jitter and phase-incoherent noise separated by comparing
/// the standard double-recorder player deviation (`sigma_n2`) with
/// the deviation from a bundled-input run (`sigma_n3`), where wiring
/// both recorders to one output halves the phase-incoherent power.
#[derive(Debug, Clone, Serialize)]
pub struct PlayerSplit {
    /// Player deviation from the standard setup, seconds.
    pub sigma_n2: f64,
    /// Player deviation from the bundled setup, seconds.
    pub sigma_n3: f64,
    /// Sampling jitter RMS, `sqrt(2 sigma_n3^2 - sigma_n2^2)`.
    pub dev_j: RmsEstimate,
    /// Phase-incoherent RMS in equivalent time,
    /// `sqrt(2 (sigma_n2^2 - sigma_n3^2))`.
    pub dev_npi_scaled: RmsEstimate,
}

/// Splits the player's deviation into jitter and phase-incoherent
/// parts. See [`PlayerSplit`].
pub fn split_player_jitter_pi(sigma_n2: f64, sigma_n3: f64) -> PlayerSplit {
    PlayerSplit {
        sigma_n2,
        sigma_n3,
        dev_j: RmsEstimate::from_variance(2.0 * sigma_n3 * sigma_n3 - sigma_n2 * sigma_n2),
        dev_npi_scaled: RmsEstimate::from_variance(
            2.0 * (sigma_n2 * sigma_n2 - sigma_n3 * sigma_n3),
        ),
    }
}

/// Recorder-side split from the two channels of one stereo recorder,
/// which share a sampling clock but digitize independently.
#[derive(Debug, Clone, Serialize)]
pub struct RecorderSplit {
    /// Deviation of the left channel's fluctuations, seconds.
    pub e5: f64,
    /// Deviation of the right channel's fluctuations, seconds.
    pub e6: f64,
    /// Deviation of the difference, where player and clock cancel.
    pub e7: f64,
    /// Deviation of the sum, the consistency statistic.
    pub e8: f64,
    /// Player deviation subtracted out of the common part, seconds.
    pub sigma_n2: f64,
    /// Recorder sampling jitter in equivalent time.
    pub dev_ajitter_scaled: RmsEstimate,
    /// Left-channel phase-incoherent noise in equivalent time.
    pub dev_api_l_scaled: RmsEstimate,
    /// Right-channel phase-incoherent noise in equivalent time.
    pub dev_api_r_scaled: RmsEstimate,
    /// `E8^2` minus the value the other statistics predict, seconds
    /// squared.
    pub consistency_residual: f64,
}

/// Solves the recorder split from the four channel statistics and the
/// player deviation measured separately.
pub fn split_recorder_jitter_pi_devs(
    e5: f64,
    e6: f64,
    e7: f64,
    e8: f64,
    sigma_n2: f64,
) -> RecorderSplit {
    let v_l = (e7 * e7 + e5 * e5 - e6 * e6) / 2.0;
    let v_r = (e7 * e7 - e5 * e5 + e6 * e6) / 2.0;
    // Common part of each channel: player noise plus the shared
    // sampling clock's jitter.
    let common = e5 * e5 - v_l;
    let v_jitter = common - sigma_n2 * sigma_n2;
    let predicted_sum_sq = 4.0 * common + v_l + v_r;
    RecorderSplit {
        e5,
        e6,
        e7,
        e8,
        sigma_n2,
        dev_ajitter_scaled: RmsEstimate::from_variance(v_jitter),
        dev_api_l_scaled: RmsEstimate::from_variance(v_l),
        dev_api_r_scaled: RmsEstimate::from_variance(v_r),
        consistency_residual: e8 * e8 - predicted_sum_sq,
    }
}

/// Recorder split straight from two aligned channel series.
pub fn split_recorder_jitter_pi(
    left: &ZeroCrossingSeries,
    right: &ZeroCrossingSeries,
    sigma_n2: f64,
) -> Result<RecorderSplit> {
    let (dl, dr) = paired(left, right)?;
    let diff: Vec<f64> = dl.iter().zip(dr).map(|(x, y)| x - y).collect();
    let sum: Vec<f64> = dl.iter().zip(dr).map(|(x, y)| x + y).collect();
    Ok(split_recorder_jitter_pi_devs(
        deviation(dl),
        deviation(dr),
        deviation(&diff),
        deviation(&sum),
        sigma_n2,
    ))
}

/// Quantization detection floor: the jitter whose carrier-slope
/// excursion equals one code step, `1 / (x_max * ratio * 2 pi f_c)`.
pub fn detection_limit(bit_depth: u32, amplitude_ratio: f64, f_c: f64) -> f64 {
    let x_max = ((1i64 << (bit_depth - 1)) - 1) as f64;
    1.0 / (x_max * amplitude_ratio * std::f64::consts::TAU * f_c)
}

/// Per-phase variance of the carrier-model residual, with the
/// two-parameter fit `V(theta) = A cos(2 theta) + B`.
///
/// Negative `A` with `B` near `|A|` marks jitter-dominated noise,
/// positive `A` marks amplitude modulation, and `A` near zero with
/// `B` large marks phase-incoherent noise (or jitter and AM in equal
/// measure).
#[derive(Debug, Clone, Serialize)]
pub struct PhaseFit {
    /// Coefficient of `cos(2 theta)`, full-scale units squared.
    pub a: f64,
    /// Phase-independent variance level, full-scale units squared.
    pub b: f64,
    /// Bin-center phases, radians in `[0, 2 pi)`.
    pub theta_grid: Vec<f64>,
    /// Residual variance per phase bin, full-scale units squared.
    pub variance_by_phase: Vec<f64>,
    /// RMS misfit of the two-parameter model across bins.
    pub fit_residual_rms: f64,
    /// Carrier cycles folded into the statistics.
    pub cycles: usize,
}

const PHASE_BINS: usize = 64;

/// Folds the residual noise of one analysis window by carrier phase
/// and fits the phase dependence of its variance.
///
/// The carrier model (frequency, phase, amplitude) comes from the
/// zero-crossing fit of the same window, so the residual is exactly
/// what the crossing analysis rides on.
pub fn phase_variance_fit(buffer: &SampleBuffer, cfg: &AnalysisConfig) -> Result<PhaseFit> {
    let series = compute_zcf(buffer, cfg)?;
    let n = cfg.block_len;
    let rate = buffer.sample_rate;
    let fs = buffer.full_scale();

    // Phase model: crossing 0 sits at -pi/2 (mod 2 pi) when rising,
    // +pi/2 when falling; phase advances by pi per half period.
    let first = series.crossings.is_empty();
    debug_assert!(!first);
    let t0 = series.ideal[0];
    let phase0 =
        if series.rising[0] { -std::f64::consts::FRAC_PI_2 } else { std::f64::consts::FRAC_PI_2 };
    let omega = series.omega();
    let amp = series.amplitude;

    let mut count = [0usize; PHASE_BINS];
    let mut sum = [0.0f64; PHASE_BINS];
    let mut sum_sq = [0.0f64; PHASE_BINS];
    for i in n..=5 * n {
        let local = (i - n) as f64 / rate;
        let theta = phase0 + omega * (local - t0);
        let x = buffer.samples[i] as f64 / fs;
        let resid = x - amp * theta.cos();
        let wrapped = theta.rem_euclid(std::f64::consts::TAU);
        let bin =
            ((wrapped / std::f64::consts::TAU * PHASE_BINS as f64) as usize).min(PHASE_BINS - 1);
        count[bin] += 1;
        sum[bin] += resid;
        sum_sq[bin] += resid * resid;
    }

    let min_count = count.iter().copied().min().unwrap_or(0);
    if min_count < 8 {
        return Err(Error::InsufficientSignal { found: min_count, needed: 8 });
    }

    let theta_grid: Vec<f64> = (0..PHASE_BINS)
        .map(|b| (b as f64 + 0.5) * std::f64::consts::TAU / PHASE_BINS as f64)
        .collect();
    // Per-bin mean removal keeps small systematic model errors (for
    // example an amplitude misfit, whose residual mean varies with
    // phase) out of the variance.
    let variance_by_phase: Vec<f64> = (0..PHASE_BINS)
        .map(|b| {
            let m = sum[b] / count[b] as f64;
            sum_sq[b] / count[b] as f64 - m * m
        })
        .collect();

    // Least squares against cos(2 theta); the regressor sums to zero
    // over the uniform grid, so the intercept is the plain mean.
    let mut num = 0.0;
    let mut den = 0.0;
    for (v, th) in variance_by_phase.iter().zip(&theta_grid) {
        let c = (2.0 * th).cos();
        num += v * c;
        den += c * c;
    }
    let a = num / den;
    let b = variance_by_phase.iter().sum::<f64>() / PHASE_BINS as f64;
    let fit_residual_rms = (variance_by_phase
        .iter()
        .zip(&theta_grid)
        .map(|(v, th)| {
            let e = v - (a * (2.0 * th).cos() + b);
            e * e
        })
        .sum::<f64>()
        / PHASE_BINS as f64)
        .sqrt();

    let cycles = (series.span_seconds * series.carrier_estimate).floor() as usize;
    Ok(PhaseFit { a, b, theta_grid, variance_by_phase, fit_residual_rms, cycles })
}

/// Pearson correlation of two equal-length series.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "correlation needs equal-length series");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Mean and standard error of per-window statistics.
#[derive(Debug, Clone, Serialize)]
pub struct WindowStats {
    /// Mean across windows.
    pub mean: f64,
    /// Standard deviation of the mean.
    pub std_error: f64,
    /// The individual window values.
    pub per_window: Vec<f64>,
}

/// Aggregates one statistic over analysis windows.
pub fn window_stats(values: &[f64]) -> WindowStats {
    let n = values.len();
    let mean = if n == 0 { 0.0 } else { values.iter().sum::<f64>() / n as f64 };
    let std_error = if n < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    WindowStats { mean, std_error, per_window: values.to_vec() }
}
