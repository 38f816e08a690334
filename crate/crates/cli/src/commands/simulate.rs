//! The `simulate` subcommands: synthesized recordings with exactly
//! known injected noise, for exercising the measurement pipeline.

use std::f64::consts::TAU;
use std::path::Path;

use zca_core::synth::{
    bandlimited_noise_stream, generate_playback_waveform, simulate_recording, synthesize_dummy,
};
use zca_core::wav::{write_wav, WavFile};
use zca_core::{NoiseTraces, SampleBuffer};

use crate::args::{SimulateDrsArgs, SimulateDummyArgs, SimulateStereoArgs};
use crate::config::{
    bandpass_white, load_toml, lowpass_white, DrsConfig, DummyConfig, StereoConfig, PS,
};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::outputs::write_traces;

use super::common::integral_rate;

fn config_value<T: serde::Serialize>(cfg: &T) -> Result<serde_json::Value> {
    serde_json::to_value(cfg).map_err(|err| CliError::Config(format!("recording config: {err}")))
}

fn write_buffer_wav(path: &Path, buffer: &SampleBuffer) -> Result<()> {
    let rate = integral_rate(buffer.sample_rate)?;
    let wav = WavFile::new(rate, buffer.bit_depth as u16, vec![buffer.samples.clone()])?;
    write_wav(path, &wav)?;
    Ok(())
}

/// `simulate dummy`: one tone with selectable noise kinds plus its
/// ground-truth traces.
pub fn run_dummy(args: &SimulateDummyArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let mut cfg: DummyConfig = match &args.config {
        Some(path) => load_toml(path)?,
        None => DummyConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(duration) = args.duration {
        cfg.duration_s = duration;
    }
    cfg.jitter |= args.jitter;
    cfg.am |= args.am;
    cfg.pi |= args.pi;
    cfg.recorder_noise |= args.recorder_noise;

    let spec = cfg.to_spec()?;
    let output = synthesize_dummy(&spec)?;
    write_buffer_wav(&args.out.join("dummy.wav"), &output.buffer)?;
    write_traces(&args.out.join("traces.csv"), &output.traces)?;

    let mut manifest = RunManifest::new("simulate dummy", &args.out);
    manifest.seed = Some(cfg.seed);
    manifest.config = Some(config_value(&cfg)?);
    manifest.write()?;

    println!(
        "wrote dummy.wav: {:.3} s at {} Hz, {} bit, {} clipped samples",
        cfg.duration_s, cfg.sample_rate_hz, cfg.bit_depth, output.clipped
    );
    println!("ground truth in traces.csv, run settings in manifest.json");
    Ok(())
}

/// Checks that a carrier-centered noise band fits the recorder rate.
fn check_band(band: (f64, f64), rate: f64) -> Result<()> {
    if !(band.0 > 0.0) || band.1 >= rate / 2.0 {
        return Err(CliError::Config(format!(
            "noise band {:.0}..{:.0} Hz does not fit under the Nyquist frequency of a {rate} Hz recording",
            band.0, band.1
        )));
    }
    Ok(())
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `simulate drs`: one playback, two recorders with independent noise,
/// the second starting a non-integer number of sample periods later.
pub fn run_drs(args: &SimulateDrsArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let mut cfg: DrsConfig = match &args.config {
        Some(path) => load_toml(path)?,
        None => DrsConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    let seed = cfg.seed();

    let playback = generate_playback_waveform(&cfg.playback.to_spec())?;
    write_buffer_wav(&args.out.join("playback.wav"), &playback)?;

    let carrier = cfg.playback.carrier_hz();
    let omega = TAU * carrier;
    let rate = cfg.recorders.sample_rate_hz;
    let to_amp = cfg.recorders.gain * omega;
    let band = (carrier - cfg.noise_band_half_hz, carrier + cfg.noise_band_half_hz);
    check_band(band, rate)?;

    let horizon =
        cfg.recorders.duration_s + cfg.recorders.offset_a_s.max(cfg.recorders.offset_b_s) + 1.0;
    let len = (horizon * rate).ceil() as usize;

    // One ChaCha stream per noise kind, so the bundled variant keeps
    // the same player realization while its recorder noise is fresh.
    let j_white = lowpass_white(cfg.player.jitter_ps * PS, rate, cfg.player.jitter_band_hz)?;
    let j = bandlimited_noise_stream(len, rate, j_white, (0.0, cfg.player.jitter_band_hz), seed, 1)?;
    let pi_white = bandpass_white(cfg.player.pi_ps * PS * to_amp, rate, cfg.noise_band_half_hz)?;
    let pi_one = bandlimited_noise_stream(len, rate, pi_white, band, seed, 2)?;
    let n_pi = if cfg.bundled {
        let pi_two = bandlimited_noise_stream(len, rate, pi_white, band, seed, 3)?;
        pi_one.iter().zip(&pi_two).map(|(x, y)| (x + y) / 2.0).collect()
    } else {
        pi_one
    };
    let rec_stream = |target_ps: f64, stream: u64| -> Result<Vec<f64>> {
        let white = bandpass_white(target_ps * PS * to_amp, rate, cfg.noise_band_half_hz)?;
        bandlimited_noise_stream(len, rate, white, band, seed, stream).map_err(CliError::from)
    };
    let (stream_a, stream_b) = if cfg.bundled { (6, 7) } else { (4, 5) };
    let noise_a = rec_stream(cfg.recorders.noise_a_ps, stream_a)?;
    let noise_b = rec_stream(cfg.recorders.noise_b_ps, stream_b)?;

    let traces_for = |a_total: Vec<f64>| NoiseTraces {
        sample_rate: rate,
        start_time: 0.0,
        j: j.clone(),
        a_m: vec![0.0; len],
        n_pi: n_pi.clone(),
        a_total,
    };
    let traces_a = traces_for(noise_a);
    let traces_b = traces_for(noise_b);

    let spec_a = cfg.recorders.to_spec(cfg.recorders.offset_a_s);
    let spec_b = cfg.recorders.to_spec(cfg.recorders.offset_b_s);
    let (rec_a, clipped_a) = simulate_recording(&playback, &traces_a, &spec_a)?;
    let (rec_b, clipped_b) = simulate_recording(&playback, &traces_b, &spec_b)?;
    write_buffer_wav(&args.out.join("recorder-a.wav"), &rec_a)?;
    write_buffer_wav(&args.out.join("recorder-b.wav"), &rec_b)?;
    write_traces(&args.out.join("traces-a.csv"), &traces_a)?;
    write_traces(&args.out.join("traces-b.csv"), &traces_b)?;

    let pi_effective = if cfg.bundled {
        cfg.player.pi_ps / 2f64.sqrt()
    } else {
        cfg.player.pi_ps
    };
    let expected_player =
        (cfg.player.jitter_ps * cfg.player.jitter_ps + pi_effective * pi_effective).sqrt();

    let mut manifest = RunManifest::new("simulate drs", &args.out);
    manifest.seed = Some(seed);
    manifest.config = Some(config_value(&cfg)?);
    manifest.parameters = Some(serde_json::json!({
        "carrier_hz": carrier,
        "expected_player_deviation_ps": expected_player,
    }));
    manifest.write()?;

    println!(
        "wrote playback.wav and recorder-a/b.wav ({:.3} s at {rate} Hz, {clipped_a} / {clipped_b} clipped)",
        cfg.recorders.duration_s
    );
    println!(
        "injected: player jitter {:.1} ps + additive {:.1} ps{} => expected player deviation {:.1} ps; recorder noise {:.1} / {:.1} ps",
        cfg.player.jitter_ps,
        cfg.player.pi_ps,
        if cfg.bundled { " (bundled, additive power halved)" } else { "" },
        expected_player,
        cfg.recorders.noise_a_ps,
        cfg.recorders.noise_b_ps
    );
    Ok(())
}

/// `simulate stereo`: one playback recorded on two channels that share
/// a sampling clock but carry independent additive noise.
pub fn run_stereo(args: &SimulateStereoArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let mut cfg: StereoConfig = match &args.config {
        Some(path) => load_toml(path)?,
        None => StereoConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    let seed = cfg.seed();

    let playback = generate_playback_waveform(&cfg.playback.to_spec())?;
    write_buffer_wav(&args.out.join("playback.wav"), &playback)?;

    let carrier = cfg.playback.carrier_hz();
    let omega = TAU * carrier;
    let rate = cfg.recorder.sample_rate_hz;
    let to_amp = cfg.recorder.gain * omega;
    let band = (carrier - cfg.noise_band_half_hz, carrier + cfg.noise_band_half_hz);
    check_band(band, rate)?;

    let len = ((cfg.recorder.start_s + cfg.recorder.duration_s + 1.0) * rate).ceil() as usize;
    let jitter_band = (0.0, cfg.player.jitter_band_hz);
    let j_white = lowpass_white(cfg.player.jitter_ps * PS, rate, cfg.player.jitter_band_hz)?;
    let j_player = bandlimited_noise_stream(len, rate, j_white, jitter_band, seed, 1)?;
    let pi_white = bandpass_white(cfg.player.pi_ps * PS * to_amp, rate, cfg.noise_band_half_hz)?;
    let pi_player = bandlimited_noise_stream(len, rate, pi_white, band, seed, 2)?;
    let clock_white =
        lowpass_white(cfg.recorder.clock_jitter_ps * PS, rate, cfg.player.jitter_band_hz)?;
    let j_clock = bandlimited_noise_stream(len, rate, clock_white, jitter_band, seed, 3)?;
    let channel_noise = |target_ps: f64, stream: u64| -> Result<Vec<f64>> {
        let white = bandpass_white(target_ps * PS * to_amp, rate, cfg.noise_band_half_hz)?;
        bandlimited_noise_stream(len, rate, white, band, seed, stream).map_err(CliError::from)
    };
    let noise_l = channel_noise(cfg.recorder.noise_l_ps, 4)?;
    let noise_r = channel_noise(cfg.recorder.noise_r_ps, 5)?;

    // The conversion clock is shared, so its jitter rides on top of the
    // player's in both channels; the additive noise does not.
    let j_total = add(&j_player, &j_clock);
    let traces_for = |a_total: Vec<f64>| NoiseTraces {
        sample_rate: rate,
        start_time: 0.0,
        j: j_total.clone(),
        a_m: vec![0.0; len],
        n_pi: pi_player.clone(),
        a_total,
    };
    let traces_l = traces_for(noise_l);
    let traces_r = traces_for(noise_r);

    let spec = cfg.recorder.to_spec();
    let (left, clipped_l) = simulate_recording(&playback, &traces_l, &spec)?;
    let (right, clipped_r) = simulate_recording(&playback, &traces_r, &spec)?;
    let wav = WavFile::new(
        integral_rate(rate)?,
        cfg.recorder.bit_depth as u16,
        vec![left.samples, right.samples],
    )?;
    write_wav(args.out.join("stereo.wav"), &wav)?;
    write_traces(&args.out.join("traces-l.csv"), &traces_l)?;
    write_traces(&args.out.join("traces-r.csv"), &traces_r)?;

    let sigma_n2 = cfg.player.sigma_n2_ps();
    let mut manifest = RunManifest::new("simulate stereo", &args.out);
    manifest.seed = Some(seed);
    manifest.config = Some(config_value(&cfg)?);
    manifest.parameters = Some(serde_json::json!({
        "carrier_hz": carrier,
        "player_deviation_ps": sigma_n2,
    }));
    manifest.write()?;

    println!(
        "wrote stereo.wav ({:.3} s at {rate} Hz, {clipped_l} / {clipped_r} clipped) and per-channel traces",
        cfg.recorder.duration_s
    );
    println!(
        "injected: shared clock jitter {:.1} ps, channel noise {:.1} / {:.1} ps; player deviation for `split recorder --sigma-n2-ps`: {:.1} ps",
        cfg.recorder.clock_jitter_ps, cfg.recorder.noise_l_ps, cfg.recorder.noise_r_ps, sigma_n2
    );
    Ok(())
}
