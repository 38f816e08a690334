//! The `analyze` subcommand: zero-crossing fluctuation measurement of
//! one recording, with an optional ground-truth validation mode.

use serde::Serialize;
use zca_core::decompose::{correlation, detection_limit, window_stats};
use zca_core::zca::ZeroCrossingSeries;
use zca_core::NoiseTraces;

use crate::args::AnalyzeArgs;
use crate::config::PS;
use crate::error::Result;
use crate::manifest::RunManifest;
use crate::outputs::{histogram_ps, ps1, read_traces, to_ps, write_csv, write_histogram, write_json};

use super::common::{
    anchor_windows, analyze_windows, load_buffer, pooled_rms, resolve_config, resolve_windows,
    settings, windows_that_fit,
};

#[derive(Debug, Serialize)]
struct WindowReport {
    index: usize,
    span_start_s: f64,
    crossings: usize,
    rms_ps: f64,
    carrier_hz: f64,
    amplitude_fs: f64,
}

#[derive(Debug, Serialize)]
struct StatsReport {
    mean_ps: f64,
    std_error_ps: f64,
}

#[derive(Debug, Serialize)]
struct ValidationReport {
    jitter_correlation: f64,
    truth_jitter_rms_ps: f64,
    pi_correlation: f64,
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    input: String,
    channel: String,
    sample_rate_hz: f64,
    bit_depth: u32,
    frames: usize,
    onset_s: f64,
    windows: Vec<WindowReport>,
    pooled_crossings: usize,
    pooled_rms_ps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    window_rms_stats: Option<StatsReport>,
    detection_limit_ps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    validation: Option<ValidationReport>,
}

fn validate_against(traces: &NoiseTraces, series: &[ZeroCrossingSeries]) -> ValidationReport {
    let mut deltas = Vec::new();
    let mut truth_j = Vec::new();
    let mut estimates = Vec::new();
    let mut truth_pi = Vec::new();
    for s in series {
        let est = s.pi_noise_estimate();
        for k in 0..s.len() {
            let t = s.span_start + s.crossings[k];
            deltas.push(s.delta[k]);
            truth_j.push(traces.j_at(t));
            estimates.push(est[k]);
            truth_pi.push(traces.n_pi_at(t));
        }
    }
    ValidationReport {
        jitter_correlation: correlation(&deltas, &truth_j),
        truth_jitter_rms_ps: to_ps(pooled_rms(&truth_j)),
        pi_correlation: correlation(&estimates, &truth_pi),
    }
}

pub fn run(args: &AnalyzeArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let (wav, buffer, channel_label) = load_buffer(&args.input, &args.channel)?;
    let cfg = resolve_config(&args.analysis, buffer.sample_rate)?;
    let anchor = anchor_windows(&buffer, &cfg)?;
    let available = windows_that_fit(buffer.len(), &cfg, anchor.first_span);
    let count = resolve_windows(args.windows, available)?;
    let series = analyze_windows(&buffer, &cfg, anchor.first_span, count)?;

    let mut rows = Vec::new();
    let mut all_deltas = Vec::new();
    let mut windows = Vec::new();
    for (w, s) in series.iter().enumerate() {
        for k in 0..s.len() {
            rows.push(format!(
                "{w},{k},{:.12},{:.12},{:.4}",
                s.span_start + s.ideal[k],
                s.span_start + s.crossings[k],
                s.delta[k] / PS
            ));
        }
        all_deltas.extend_from_slice(&s.delta);
        windows.push(WindowReport {
            index: w,
            span_start_s: s.span_start,
            crossings: s.len(),
            rms_ps: to_ps(s.rms()),
            carrier_hz: s.carrier_estimate,
            amplitude_fs: s.amplitude,
        });
    }
    write_csv(&args.out.join("zcf.csv"), "window,k,ideal_s,measured_s,delta_ps", rows)?;
    write_histogram(&args.out.join("histogram.csv"), &histogram_ps(&all_deltas))?;

    let window_rms_stats = (count > 1).then(|| {
        let stats = window_stats(&windows.iter().map(|w| w.rms_ps).collect::<Vec<_>>());
        StatsReport { mean_ps: stats.mean, std_error_ps: stats.std_error }
    });
    let mean_amplitude = windows.iter().map(|w| w.amplitude_fs).sum::<f64>() / count as f64;
    let mean_carrier = windows.iter().map(|w| w.carrier_hz).sum::<f64>() / count as f64;
    let validation = match &args.traces {
        Some(path) => Some(validate_against(&read_traces(path)?, &series)),
        None => None,
    };

    let report = AnalyzeReport {
        input: args.input.display().to_string(),
        channel: channel_label.clone(),
        sample_rate_hz: buffer.sample_rate,
        bit_depth: buffer.bit_depth,
        frames: wav.frames(),
        onset_s: anchor.onset_time,
        windows,
        pooled_crossings: all_deltas.len(),
        pooled_rms_ps: to_ps(pooled_rms(&all_deltas)),
        window_rms_stats,
        detection_limit_ps: to_ps(detection_limit(
            buffer.bit_depth,
            mean_amplitude,
            mean_carrier,
        )),
        validation,
    };
    write_json(&args.out.join("report.json"), &report)?;

    let mut manifest = RunManifest::new("analyze", &args.out);
    manifest.inputs.push(args.input.clone());
    if let Some(path) = &args.traces {
        manifest.inputs.push(path.clone());
    }
    manifest.analysis = Some(settings(&cfg, buffer.sample_rate, count, &channel_label));
    manifest.write()?;

    print!(
        "analyzed channel {channel_label}: {count} windows, {} crossings, fluctuation RMS {} ps",
        report.pooled_crossings,
        ps1(pooled_rms(&all_deltas))
    );
    match &report.window_rms_stats {
        Some(stats) => println!(" (per window {:.1} +/- {:.1} ps)", stats.mean_ps, stats.std_error_ps),
        None => println!(),
    }
    if let Some(v) = &report.validation {
        println!(
            "validation: jitter correlation {:.4}, additive-noise correlation {:.4}",
            v.jitter_correlation, v.pi_correlation
        );
    }
    Ok(())
}
