//! End-to-end tests of the `zca` binary: every subcommand runs against
//! synthesized fixtures and the reports are checked against the levels
//! the fixtures injected.

use std::path::{Path, PathBuf};
use std::process::Command;

fn zca() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zca"))
}

/// Runs the binary, asserting success, and returns captured stdout.
fn run_ok(args: &[&str]) -> String {
    let out = zca().args(args).output().expect("spawning the binary");
    assert!(
        out.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Runs the binary expecting failure; returns captured stderr.
fn run_err(args: &[&str]) -> String {
    let out = zca().args(args).output().expect("spawning the binary");
    assert!(!out.status.success(), "command {:?} unexpectedly succeeded", args);
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A fresh scratch directory for one test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("zca-cli-tests").join(name);
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("parsing {}: {e}", path.display()))
}

fn field(value: &serde_json::Value, pointer: &str) -> f64 {
    value
        .pointer(pointer)
        .and_then(|v| v.as_f64())
        .unwrap_or_else(|| panic!("missing numeric field {pointer} in {value}"))
}

fn s(path: &Path) -> String {
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_then_analyze_recovers_the_injected_jitter() {
    let dir = scratch("dummy-roundtrip");
    let sim = dir.join("sim");
    let an = dir.join("an");
    run_ok(&["simulate", "dummy", "--out", &s(&sim), "--jitter"]);
    for name in ["dummy.wav", "traces.csv", "manifest.json"] {
        assert!(sim.join(name).is_file(), "simulate must write {name}");
    }
    run_ok(&[
        "analyze",
        &s(&sim.join("dummy.wav")),
        "--out",
        &s(&an),
        "--traces",
        &s(&sim.join("traces.csv")),
    ]);
    let report = read_json(&an.join("report.json"));
    let rms = field(&report, "/pooled_rms_ps");
    assert!(
        (rms - 40.0).abs() <= 2.0,
        "injected 40 ps of jitter, measured {rms:.2} ps"
    );
    let corr = field(&report, "/validation/jitter_correlation");
    assert!(corr >= 0.99, "measured fluctuations must track the injected jitter, got {corr:.4}");
    let crossings = field(&report, "/pooled_crossings");
    assert!(crossings > 20_000.0, "a one-second span should give >20k crossings, got {crossings}");
    assert!(an.join("zcf.csv").is_file() && an.join("histogram.csv").is_file());
}

#[test]
fn equal_seeds_make_byte_identical_outputs() {
    let dir = scratch("determinism");
    let sim_a = dir.join("a");
    let sim_b = dir.join("b");
    for sim in [&sim_a, &sim_b] {
        run_ok(&[
            "simulate", "dummy", "--out", &s(sim), "--jitter", "--pi", "--seed", "9",
            "--duration", "0.9",
        ]);
    }
    for name in ["dummy.wav", "traces.csv"] {
        let a = std::fs::read(sim_a.join(name)).unwrap();
        let b = std::fs::read(sim_b.join(name)).unwrap();
        assert!(a == b, "{name} must be byte-identical across equal-seed runs");
    }

    // The same recording analyzed twice gives byte-identical reports.
    let an_a = dir.join("an-a");
    let an_b = dir.join("an-b");
    let wav = s(&sim_a.join("dummy.wav"));
    for an in [&an_a, &an_b] {
        run_ok(&["analyze", &wav, "--out", &s(an), "--window-seconds", "0.5"]);
    }
    for name in ["report.json", "zcf.csv", "histogram.csv"] {
        let a = std::fs::read(an_a.join(name)).unwrap();
        let b = std::fs::read(an_b.join(name)).unwrap();
        assert!(a == b, "{name} must be byte-identical across repeated analyses");
    }
}

#[test]
fn decompose_of_one_recording_against_itself_is_degenerate() {
    let dir = scratch("degenerate");
    let sim = dir.join("sim");
    run_ok(&[
        "simulate", "dummy", "--out", &s(&sim), "--jitter", "--duration", "0.9",
    ]);
    let wav = s(&sim.join("dummy.wav"));
    let dec = dir.join("dec");
    run_ok(&["decompose", &wav, &wav, "--out", &s(&dec), "--window-seconds", "0.5"]);
    let report = read_json(&dec.join("report.json"));
    assert_eq!(report["degenerate"], serde_json::Value::Bool(true));
    let sigma_a = field(&report, "/pooled/sigma_a_ps");
    let sigma_b = field(&report, "/pooled/sigma_b_ps");
    assert!(sigma_a.abs() < 1e-9 && sigma_b.abs() < 1e-9, "recorder terms must vanish");
    let sigma_n = field(&report, "/pooled/sigma_n_ps");
    assert!(sigma_n > 10.0, "the common term keeps the whole fluctuation, got {sigma_n:.1} ps");
}

const SESSION_PLAYBACK: &str = "
[playback]
main_start = 36000
fade_len = 12000
main_len = 216000
";

#[test]
fn drs_session_reports_the_injected_noise_budget() {
    let dir = scratch("drs-session");
    let config = dir.join("session.toml");
    std::fs::write(&config, format!("seed = 11\n{SESSION_PLAYBACK}\n[recorders]\nduration_s = 4.2\n"))
        .unwrap();

    let sim = dir.join("sim");
    run_ok(&["simulate", "drs", "--out", &s(&sim), "--config", &s(&config)]);
    let manifest = read_json(&sim.join("manifest.json"));
    let expected_n2 = field(&manifest, "/parameters/expected_player_deviation_ps");
    assert!((expected_n2 - 44.72).abs() < 0.01);

    let dec = dir.join("dec");
    run_ok(&[
        "decompose",
        &s(&sim.join("recorder-a.wav")),
        &s(&sim.join("recorder-b.wav")),
        "--out",
        &s(&dec),
    ]);
    let report = read_json(&dec.join("report.json"));
    let sigma_n2 = field(&report, "/pooled/sigma_n_ps");
    let sigma_a = field(&report, "/pooled/sigma_a_ps");
    let sigma_b = field(&report, "/pooled/sigma_b_ps");
    assert!(
        (sigma_n2 / expected_n2 - 1.0).abs() < 0.10,
        "player deviation {sigma_n2:.2} ps, injected {expected_n2:.2} ps"
    );
    assert!((sigma_a / 35.0 - 1.0).abs() < 0.10, "recorder A {sigma_a:.2} ps, injected 35 ps");
    assert!((sigma_b / 35.0 - 1.0).abs() < 0.10, "recorder B {sigma_b:.2} ps, injected 35 ps");
    assert_eq!(report["degenerate"], serde_json::Value::Bool(false));

    // The bundled variant of the same session halves the additive
    // power; comparing the two player deviations splits it from jitter.
    let config3 = dir.join("bundled.toml");
    std::fs::write(
        &config3,
        format!("seed = 11\nbundled = true\n{SESSION_PLAYBACK}\n[recorders]\nduration_s = 4.2\n"),
    )
    .unwrap();
    let sim3 = dir.join("sim3");
    run_ok(&["simulate", "drs", "--out", &s(&sim3), "--config", &s(&config3)]);
    let dec3 = dir.join("dec3");
    run_ok(&[
        "decompose",
        &s(&sim3.join("recorder-a.wav")),
        &s(&sim3.join("recorder-b.wav")),
        "--out",
        &s(&dec3),
    ]);
    let sigma_n3 = field(&read_json(&dec3.join("report.json")), "/pooled/sigma_n_ps");
    assert!(sigma_n3 < sigma_n2, "bundling must lower the player deviation");

    let sp = dir.join("split");
    run_ok(&[
        "split", "player",
        "--sigma-n2-ps", &format!("{sigma_n2}"),
        "--sigma-n3-ps", &format!("{sigma_n3}"),
        "--out", &s(&sp),
    ]);
    let split = read_json(&sp.join("report.json"));
    let jitter = field(&split, "/jitter_ps");
    let pi = field(&split, "/pi_equivalent_ps");
    // Two windows of statistics: looser bounds than the ten-window runs.
    assert!((jitter - 20.0).abs() <= 4.0, "player jitter {jitter:.2} ps, injected 20 ps");
    assert!((pi - 40.0).abs() <= 4.0, "player additive noise {pi:.2} ps, injected 40 ps");
}

#[test]
fn stereo_session_separates_clock_jitter_from_channel_noise() {
    let dir = scratch("stereo-session");
    let config = dir.join("session.toml");
    std::fs::write(&config, format!("seed = 5\n{SESSION_PLAYBACK}\n[recorder]\nduration_s = 4.2\n"))
        .unwrap();
    let sim = dir.join("sim");
    run_ok(&["simulate", "stereo", "--out", &s(&sim), "--config", &s(&config)]);
    let manifest = read_json(&sim.join("manifest.json"));
    let sigma_n2 = field(&manifest, "/parameters/player_deviation_ps");

    let sp = dir.join("split");
    run_ok(&[
        "split", "recorder",
        &s(&sim.join("stereo.wav")),
        "--sigma-n2-ps", &format!("{sigma_n2}"),
        "--out", &s(&sp),
    ]);
    let report = read_json(&sp.join("report.json"));
    let clock = field(&report, "/pooled/clock_jitter_ps");
    let l = field(&report, "/pooled/channel_noise_l_ps");
    let r = field(&report, "/pooled/channel_noise_r_ps");
    assert!((l / 44.0 - 1.0).abs() < 0.10, "left channel noise {l:.2} ps, injected 44 ps");
    assert!((r / 43.0 - 1.0).abs() < 0.10, "right channel noise {r:.2} ps, injected 43 ps");
    // The clock term is a small difference of large variances, so its
    // statistical spread at two windows is wide.
    assert!(
        (10.0..=22.0).contains(&clock),
        "shared clock jitter {clock:.2} ps, injected 16 ps"
    );

    // The pseudo-mono flag averages the channels before analysis.
    let an = dir.join("an");
    let out = run_ok(&[
        "analyze",
        &s(&sim.join("stereo.wav")),
        "--out",
        &s(&an),
        "--pseudo-mono",
        "--windows",
        "1",
    ]);
    assert!(out.contains("pseudo-mono"), "console output should name the channel mode: {out}");
    let report = read_json(&an.join("report.json"));
    assert_eq!(report["channel"], serde_json::Value::String("pseudo-mono".into()));
}

#[test]
fn baseline_accounts_for_band_powers_and_extracts_jitter() {
    let dir = scratch("baseline");
    let sim = dir.join("sim");
    run_ok(&["simulate", "dummy", "--out", &s(&sim), "--jitter"]);
    let bl = dir.join("bl");
    run_ok(&["baseline", &s(&sim.join("dummy.wav")), "--out", &s(&bl)]);
    assert!(bl.join("psd.csv").is_file() && bl.join("hta.csv").is_file());
    let report = read_json(&bl.join("report.json"));
    let carrier = field(&report, "/fda/carrier_dbfs2");
    assert!((carrier + 4.0).abs() <= 0.3, "0.9 full scale is -3.9 dBFS^2, got {carrier:.2}");
    let band = field(&report, "/fda/noise_band_dbfs2");
    assert!(
        (band + 114.5).abs() <= 1.5,
        "40 ps of jitter puts about -114.5 dBFS^2 in the band, got {band:.2}"
    );
    let conservation = field(&report, "/fda/conservation_error_db");
    assert!(conservation.abs() < 0.2, "power accounting must close, error {conservation:.3} dB");
    let hta_rms = field(&report, "/hta/jitter_rms_ps");
    assert!(
        (hta_rms - 40.0).abs() <= 6.0,
        "the envelope method sees the same 40 ps of jitter, got {hta_rms:.2} ps"
    );
}

#[test]
fn failures_carry_machine_readable_categories() {
    let dir = scratch("errors");
    let out = s(&dir.join("out"));

    let stderr = run_err(&["analyze", &s(&dir.join("missing.wav")), "--out", &out]);
    assert!(stderr.contains("error[io]"), "missing file: {stderr}");

    let bad = dir.join("bad.wav");
    std::fs::write(&bad, b"RIFFbadfile").unwrap();
    let stderr = run_err(&["analyze", &s(&bad), "--out", &out]);
    assert!(stderr.contains("error[wav-format]"), "truncated container: {stderr}");

    let stderr = run_err(&[
        "split", "player", "--sigma-n2-ps=-1", "--sigma-n3-ps", "2", "--out", &out,
    ]);
    assert!(stderr.contains("error[config]"), "negative deviation: {stderr}");
}
