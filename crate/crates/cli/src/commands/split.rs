//! The `split` subcommands: separating sampling jitter from additive
//! noise, either arithmetically from two session deviations or from a
//! stereo recording whose channels share one conversion clock.

use serde::Serialize;
use zca_core::decompose::{
    split_recorder_jitter_pi, split_recorder_jitter_pi_devs, split_player_jitter_pi, window_stats,
};
use zca_core::zca::{align_crossings, deviation};

use crate::args::{SplitPlayerArgs, SplitRecorderArgs};
use crate::config::PS;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::outputs::{ps1, to_ps, write_json};

use super::common::{
    anchor_windows, analyze_windows, resolve_config, resolve_windows, settings, windows_that_fit,
};

#[derive(Debug, Serialize)]
struct PlayerSplitReport {
    sigma_n2_ps: f64,
    sigma_n3_ps: f64,
    jitter_ps: f64,
    jitter_valid: bool,
    pi_equivalent_ps: f64,
    pi_valid: bool,
}

/// `split player`: from the standard-session deviation and the
/// bundled-session deviation, where bundling halves the additive power.
pub fn run_player(args: &SplitPlayerArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    if !(args.sigma_n2_ps >= 0.0) || !(args.sigma_n3_ps >= 0.0) {
        return Err(CliError::Config("deviations must be non-negative".into()));
    }
    let split = split_player_jitter_pi(args.sigma_n2_ps * PS, args.sigma_n3_ps * PS);
    let report = PlayerSplitReport {
        sigma_n2_ps: to_ps(split.sigma_n2),
        sigma_n3_ps: to_ps(split.sigma_n3),
        jitter_ps: to_ps(split.dev_j.value),
        jitter_valid: split.dev_j.valid,
        pi_equivalent_ps: to_ps(split.dev_npi_scaled.value),
        pi_valid: split.dev_npi_scaled.valid,
    };
    write_json(&args.out.join("report.json"), &report)?;

    let mut manifest = RunManifest::new("split player", &args.out);
    manifest.parameters = Some(serde_json::json!({
        "sigma_n2_ps": args.sigma_n2_ps,
        "sigma_n3_ps": args.sigma_n3_ps,
    }));
    manifest.write()?;

    println!(
        "player split: sampling jitter {} ps, additive noise {} ps equivalent",
        ps1(split.dev_j.value),
        ps1(split.dev_npi_scaled.value)
    );
    if !split.dev_j.valid || !split.dev_npi_scaled.valid {
        println!("warning: a radicand came out negative; the two deviations are inconsistent");
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RecorderSplitValues {
    e5_ps: f64,
    e6_ps: f64,
    e7_ps: f64,
    e8_ps: f64,
    clock_jitter_ps: f64,
    clock_jitter_valid: bool,
    channel_noise_l_ps: f64,
    channel_noise_l_valid: bool,
    channel_noise_r_ps: f64,
    channel_noise_r_valid: bool,
    consistency_residual_ps2: f64,
}

impl From<&zca_core::decompose::RecorderSplit> for RecorderSplitValues {
    fn from(s: &zca_core::decompose::RecorderSplit) -> Self {
        RecorderSplitValues {
            e5_ps: to_ps(s.e5),
            e6_ps: to_ps(s.e6),
            e7_ps: to_ps(s.e7),
            e8_ps: to_ps(s.e8),
            clock_jitter_ps: to_ps(s.dev_ajitter_scaled.value),
            clock_jitter_valid: s.dev_ajitter_scaled.valid,
            channel_noise_l_ps: to_ps(s.dev_api_l_scaled.value),
            channel_noise_l_valid: s.dev_api_l_scaled.valid,
            channel_noise_r_ps: to_ps(s.dev_api_r_scaled.value),
            channel_noise_r_valid: s.dev_api_r_scaled.valid,
            consistency_residual_ps2: s.consistency_residual / (PS * PS),
        }
    }
}

#[derive(Debug, Serialize)]
struct WindowSplit {
    index: usize,
    span_start_s: f64,
    shared_crossings: usize,
    #[serde(flatten)]
    values: RecorderSplitValues,
}

#[derive(Debug, Serialize)]
struct StatsReport {
    mean_ps: f64,
    std_error_ps: f64,
}

#[derive(Debug, Serialize)]
struct RecorderSplitReport {
    input: String,
    sample_rate_hz: f64,
    sigma_n2_ps: f64,
    windows: Vec<WindowSplit>,
    pooled: RecorderSplitValues,
    clock_jitter_stats: Option<StatsReport>,
}

/// `split recorder`: per-channel analysis of one stereo recording; the
/// common part beyond the separately measured player deviation is the
/// shared conversion clock's jitter.
pub fn run_recorder(args: &SplitRecorderArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    if !(args.sigma_n2_ps >= 0.0) {
        return Err(CliError::Config("the player deviation must be non-negative".into()));
    }
    let wav = zca_core::wav::read_wav(&args.input)?;
    if wav.channels.len() < 2 {
        return Err(CliError::Config(format!(
            "a stereo recording is required, {} has {} channel(s)",
            args.input.display(),
            wav.channels.len()
        )));
    }
    let left = wav.channel_buffer(0, 0.0)?;
    let right = wav.channel_buffer(1, 0.0)?;
    let cfg = resolve_config(&args.analysis, left.sample_rate)?;
    // One clock, one onset: anchor both channels off the left one.
    let anchor = anchor_windows(&left, &cfg)?;
    let available = windows_that_fit(left.len(), &cfg, anchor.first_span);
    let count = resolve_windows(args.windows, available)?;
    let series_l = analyze_windows(&left, &cfg, anchor.first_span, count)?;
    let series_r = analyze_windows(&right, &cfg, anchor.first_span, count)?;

    let sigma_n2 = args.sigma_n2_ps * PS;
    let mut windows = Vec::with_capacity(count);
    let mut dl = Vec::new();
    let mut dr = Vec::new();
    for (w, (sl, sr)) in series_l.iter().zip(&series_r).enumerate() {
        let (pl, pr) = align_crossings(sl, sr, 0.0, 0.0)?;
        let split = split_recorder_jitter_pi(&pl, &pr, sigma_n2)?;
        windows.push(WindowSplit {
            index: w,
            span_start_s: pl.span_start,
            shared_crossings: pl.len(),
            values: RecorderSplitValues::from(&split),
        });
        dl.extend(pl.delta);
        dr.extend(pr.delta);
    }
    let diff: Vec<f64> = dl.iter().zip(&dr).map(|(x, y)| x - y).collect();
    let sum: Vec<f64> = dl.iter().zip(&dr).map(|(x, y)| x + y).collect();
    let pooled = split_recorder_jitter_pi_devs(
        deviation(&dl),
        deviation(&dr),
        deviation(&diff),
        deviation(&sum),
        sigma_n2,
    );

    let clock_jitter_stats = (count > 1).then(|| {
        let values: Vec<f64> = windows.iter().map(|w| w.values.clock_jitter_ps).collect();
        let stats = window_stats(&values);
        StatsReport { mean_ps: stats.mean, std_error_ps: stats.std_error }
    });
    let report = RecorderSplitReport {
        input: args.input.display().to_string(),
        sample_rate_hz: left.sample_rate,
        sigma_n2_ps: args.sigma_n2_ps,
        windows,
        pooled: RecorderSplitValues::from(&pooled),
        clock_jitter_stats,
    };
    write_json(&args.out.join("report.json"), &report)?;

    let mut manifest = RunManifest::new("split recorder", &args.out);
    manifest.inputs.push(args.input.clone());
    manifest.analysis = Some(settings(&cfg, left.sample_rate, count, "stereo"));
    manifest.parameters = Some(serde_json::json!({ "sigma_n2_ps": args.sigma_n2_ps }));
    manifest.write()?;

    println!(
        "recorder split over {count} windows: shared clock jitter {} ps, channel noise {} / {} ps",
        ps1(pooled.dev_ajitter_scaled.value),
        ps1(pooled.dev_api_l_scaled.value),
        ps1(pooled.dev_api_r_scaled.value)
    );
    if !pooled.dev_ajitter_scaled.valid {
        println!("warning: the clock-jitter radicand came out negative; sigma-n2 may be too large");
    }
    Ok(())
}
