//! The `baseline` subcommand: the two reference analyses next to the
//! crossing method. Frequency-domain band-power accounting shows what
//! a spectrum alone can and cannot attribute; the envelope-and-phase
//! method recovers jitter but not carrier-band additive noise.

use serde::Serialize;
use zca_core::baseline::{fda_band_power, hta_extract};
use zca_core::dsp::{psd, PsdWindow};
use zca_core::SampleBuffer;

use crate::args::BaselineArgs;
use crate::config::PS;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::outputs::{to_ps, write_csv, write_json};

use super::common::{anchor_windows, load_buffer, resolve_config, resolve_windows, settings, windows_that_fit};

#[derive(Debug, Serialize)]
struct FdaReport {
    band_hz: (f64, f64),
    resolution_hz: f64,
    carrier_frequency_hz: f64,
    carrier_dbfs2: f64,
    noise_band_dbfs2: f64,
    noise_carrier_db: f64,
    floor_power_fs2: f64,
    conservation_error_db: f64,
}

#[derive(Debug, Serialize)]
struct HtaReport {
    carrier_estimate_hz: f64,
    jitter_rms_ps: f64,
    samples: usize,
    min_envelope_fs: f64,
    mean_envelope_fs: f64,
    quality_warning: bool,
}

#[derive(Debug, Serialize)]
struct BaselineReport {
    input: String,
    channel: String,
    sample_rate_hz: f64,
    window_start_s: f64,
    window_seconds: f64,
    fda: FdaReport,
    hta: HtaReport,
}

pub fn run(args: &BaselineArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let (_wav, buffer, channel_label) = load_buffer(&args.input, &args.channel)?;
    let cfg = resolve_config(&args.analysis, buffer.sample_rate)?;
    let anchor = anchor_windows(&buffer, &cfg)?;
    resolve_windows(None, windows_that_fit(buffer.len(), &cfg, anchor.first_span))?;

    // Both baselines run on the one analysis window the crossing
    // method would use, so the three reports describe the same signal.
    let start = anchor.first_span - cfg.block_len;
    let slice = SampleBuffer::new(
        buffer.samples[start..start + cfg.window_len()].to_vec(),
        buffer.sample_rate,
        buffer.bit_depth,
        buffer.time_of(start),
    )?;

    let default_band = cfg.band();
    let band = (
        args.band_lo_hz.unwrap_or(default_band.0),
        args.band_hi_hz.unwrap_or(default_band.1),
    );
    if !(band.0 < band.1) {
        return Err(CliError::Config(format!(
            "noise band is empty: {:.0}..{:.0} Hz",
            band.0, band.1
        )));
    }
    let fda = fda_band_power(&slice, band)?;

    let spectrum = psd(&slice.to_normalized(), slice.sample_rate, PsdWindow::Blackman)?;
    write_csv(
        &args.out.join("psd.csv"),
        "frequency_hz,density_dbfs2_per_hz",
        (0..spectrum.density.len())
            .map(|k| format!("{:.3},{:.3}", spectrum.frequency(k), spectrum.density_dbfs(k))),
    )?;

    let hta = hta_extract(&slice, &cfg)?;
    write_csv(
        &args.out.join("hta.csv"),
        "time_s,jitter_ps",
        hta.jitter
            .iter()
            .enumerate()
            .map(|(k, &j)| format!("{:.6},{:.4}", hta.time_of(k), j / PS)),
    )?;

    let report = BaselineReport {
        input: args.input.display().to_string(),
        channel: channel_label.clone(),
        sample_rate_hz: buffer.sample_rate,
        window_start_s: slice.start_time,
        window_seconds: cfg.span_seconds(buffer.sample_rate),
        fda: FdaReport {
            band_hz: fda.band,
            resolution_hz: fda.resolution,
            carrier_frequency_hz: fda.carrier_frequency,
            carrier_dbfs2: fda.carrier_dbfs(),
            noise_band_dbfs2: fda.noise_band_dbfs(),
            noise_carrier_db: fda.noise_carrier_db,
            floor_power_fs2: fda.floor_power,
            conservation_error_db: fda.conservation_error_db(),
        },
        hta: HtaReport {
            carrier_estimate_hz: hta.carrier_estimate,
            jitter_rms_ps: to_ps(hta.rms()),
            samples: hta.jitter.len(),
            min_envelope_fs: hta.min_envelope,
            mean_envelope_fs: hta.mean_envelope,
            quality_warning: hta.quality_warning,
        },
    };
    write_json(&args.out.join("report.json"), &report)?;

    let mut manifest = RunManifest::new("baseline", &args.out);
    manifest.inputs.push(args.input.clone());
    manifest.analysis = Some(settings(&cfg, buffer.sample_rate, 1, &channel_label));
    manifest.write()?;

    println!(
        "spectrum: carrier {:.3} dBFS^2 at {:.1} Hz, noise band {:.2} dBFS^2, conservation error {:.3} dB",
        report.fda.carrier_dbfs2, report.fda.carrier_frequency_hz, report.fda.noise_band_dbfs2,
        report.fda.conservation_error_db
    );
    println!(
        "envelope method: jitter RMS {:.1} ps at carrier {:.1} Hz{}",
        report.hta.jitter_rms_ps,
        report.hta.carrier_estimate_hz,
        if report.hta.quality_warning { " (low envelope, estimate unreliable)" } else { "" }
    );
    Ok(())
}
