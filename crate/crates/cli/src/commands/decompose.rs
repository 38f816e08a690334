//! The `decompose` subcommand: the double-recorder variance split over
//! two parallel recordings of one playback.

use serde::Serialize;
use zca_core::decompose::{drs_decompose, window_stats, VarianceBudget};
use zca_core::zca::{align_crossings, deviation};

use crate::args::DecomposeArgs;
use crate::config::PS;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::outputs::{ps1, to_ps, write_json};

use super::common::{
    anchor_windows, analyze_windows, load_buffer, resolve_config, resolve_windows, settings,
    windows_that_fit,
};

/// A variance budget with every value in reporting units.
#[derive(Debug, Serialize)]
pub struct BudgetReport {
    pub e1_ps: f64,
    pub e2_ps: f64,
    pub e3_ps: f64,
    pub e4_ps: f64,
    pub sigma_n_ps: f64,
    pub sigma_n_valid: bool,
    pub sigma_a_ps: f64,
    pub sigma_a_valid: bool,
    pub sigma_b_ps: f64,
    pub sigma_b_valid: bool,
    pub consistency_residual_ps2: f64,
    pub jitter_band_hz: Option<(f64, f64)>,
    pub pi_band_hz: Option<(f64, f64)>,
}

impl From<&VarianceBudget> for BudgetReport {
    fn from(b: &VarianceBudget) -> Self {
        BudgetReport {
            e1_ps: to_ps(b.e1),
            e2_ps: to_ps(b.e2),
            e3_ps: to_ps(b.e3),
            e4_ps: to_ps(b.e4),
            sigma_n_ps: to_ps(b.sigma_n.value),
            sigma_n_valid: b.sigma_n.valid,
            sigma_a_ps: to_ps(b.sigma_a.value),
            sigma_a_valid: b.sigma_a.valid,
            sigma_b_ps: to_ps(b.sigma_b.value),
            sigma_b_valid: b.sigma_b.valid,
            consistency_residual_ps2: b.consistency_residual / (PS * PS),
            jitter_band_hz: b.jitter_band,
            pi_band_hz: b.pi_band,
        }
    }
}

#[derive(Debug, Serialize)]
struct WindowBudget {
    index: usize,
    span_start_a_s: f64,
    shared_crossings: usize,
    #[serde(flatten)]
    budget: BudgetReport,
}

#[derive(Debug, Serialize)]
struct StatsReport {
    mean_ps: f64,
    std_error_ps: f64,
}

#[derive(Debug, Serialize)]
struct DecomposeReport {
    input_a: String,
    input_b: String,
    channel: String,
    sample_rate_hz: f64,
    onset_a_s: f64,
    onset_b_s: f64,
    windows: Vec<WindowBudget>,
    pooled: BudgetReport,
    sigma_n_stats: Option<StatsReport>,
    sigma_a_stats: Option<StatsReport>,
    sigma_b_stats: Option<StatsReport>,
    /// True when the difference statistic vanished: the two inputs are
    /// the same recording, so the recorder terms are not separable.
    degenerate: bool,
}

fn stats_over(values: &[f64]) -> Option<StatsReport> {
    (values.len() > 1).then(|| {
        let stats = window_stats(values);
        StatsReport { mean_ps: stats.mean, std_error_ps: stats.std_error }
    })
}

pub fn run(args: &DecomposeArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let (_wav_a, buf_a, channel_label) = load_buffer(&args.input_a, &args.channel)?;
    let (_wav_b, buf_b, _) = load_buffer(&args.input_b, &args.channel)?;
    if buf_a.sample_rate != buf_b.sample_rate {
        return Err(CliError::Config(format!(
            "recordings must share one sample rate, got {} and {} Hz",
            buf_a.sample_rate, buf_b.sample_rate
        )));
    }
    let cfg = resolve_config(&args.analysis, buf_a.sample_rate)?;
    let anchor_a = anchor_windows(&buf_a, &cfg)?;
    let anchor_b = anchor_windows(&buf_b, &cfg)?;
    let available = windows_that_fit(buf_a.len(), &cfg, anchor_a.first_span)
        .min(windows_that_fit(buf_b.len(), &cfg, anchor_b.first_span));
    let count = resolve_windows(args.windows, available)?;
    let series_a = analyze_windows(&buf_a, &cfg, anchor_a.first_span, count)?;
    let series_b = analyze_windows(&buf_b, &cfg, anchor_b.first_span, count)?;

    let mut windows = Vec::with_capacity(count);
    let mut da = Vec::new();
    let mut db = Vec::new();
    for (w, (sa, sb)) in series_a.iter().zip(&series_b).enumerate() {
        let (pa, pb) = align_crossings(sa, sb, anchor_a.onset_time, anchor_b.onset_time)?;
        let budget = drs_decompose(&pa, &pb)?.with_bands(&cfg, buf_a.sample_rate);
        windows.push(WindowBudget {
            index: w,
            span_start_a_s: pa.span_start,
            shared_crossings: pa.len(),
            budget: BudgetReport::from(&budget),
        });
        da.extend(pa.delta);
        db.extend(pb.delta);
    }

    let diff: Vec<f64> = da.iter().zip(&db).map(|(x, y)| x - y).collect();
    let sum: Vec<f64> = da.iter().zip(&db).map(|(x, y)| x + y).collect();
    let pooled = VarianceBudget::from_devs(
        deviation(&da),
        deviation(&db),
        deviation(&diff),
        deviation(&sum),
    )
    .with_bands(&cfg, buf_a.sample_rate);
    let degenerate = pooled.e3 == 0.0;

    let report = DecomposeReport {
        input_a: args.input_a.display().to_string(),
        input_b: args.input_b.display().to_string(),
        channel: channel_label.clone(),
        sample_rate_hz: buf_a.sample_rate,
        onset_a_s: anchor_a.onset_time,
        onset_b_s: anchor_b.onset_time,
        sigma_n_stats: stats_over(
            &windows.iter().map(|w| w.budget.sigma_n_ps).collect::<Vec<_>>(),
        ),
        sigma_a_stats: stats_over(
            &windows.iter().map(|w| w.budget.sigma_a_ps).collect::<Vec<_>>(),
        ),
        sigma_b_stats: stats_over(
            &windows.iter().map(|w| w.budget.sigma_b_ps).collect::<Vec<_>>(),
        ),
        windows,
        pooled: BudgetReport::from(&pooled),
        degenerate,
    };
    write_json(&args.out.join("report.json"), &report)?;

    let mut manifest = RunManifest::new("decompose", &args.out);
    manifest.inputs.push(args.input_a.clone());
    manifest.inputs.push(args.input_b.clone());
    manifest.analysis = Some(settings(&cfg, buf_a.sample_rate, count, &channel_label));
    manifest.write()?;

    println!(
        "decomposed {count} windows: player {} ps, recorder A {} ps, recorder B {} ps",
        ps1(pooled.sigma_n.value),
        ps1(pooled.sigma_a.value),
        ps1(pooled.sigma_b.value)
    );
    if degenerate {
        println!("warning: the difference statistic is zero; the inputs look like one recording");
    }
    if !pooled.sigma_n.valid || !pooled.sigma_a.valid || !pooled.sigma_b.valid {
        println!("warning: a variance radicand came out negative; check alignment and levels");
    }
    Ok(())
}
