//! Command-line argument definitions.
//!
//! The binary exposes five subcommands: `simulate` builds test recordings
//! with known injected noise, `analyze` runs the zero-crossing engine over
//! one recording, `decompose` runs the double-recorder variance split over
//! two recordings, `split` separates jitter from additive noise (either
//! arithmetically from two measured deviations or from a stereo recording),
//! and `baseline` runs the frequency-domain and envelope reference analyses.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Zero-crossing analysis toolkit for picosecond-scale sampling jitter.
#[derive(Debug, Parser)]
#[command(name = "zca", version, about, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Top-level subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize test recordings with known injected noise.
    Simulate {
        #[command(subcommand)]
        what: SimulateWhat,
    },
    /// Measure zero-crossing fluctuation on one recording.
    Analyze(AnalyzeArgs),
    /// Decompose player and recorder noise from two parallel recordings.
    Decompose(DecomposeArgs),
    /// Split a measured deviation into jitter and additive parts.
    Split {
        #[command(subcommand)]
        what: SplitWhat,
    },
    /// Run the frequency-domain and envelope baseline analyses.
    Baseline(BaselineArgs),
}

/// Analysis settings shared by every measurement subcommand.
#[derive(Debug, Args)]
pub struct AnalysisFlags {
    /// Analysis span length in seconds (default 1.0).
    #[arg(long)]
    pub window_seconds: Option<f64>,
    /// Spectral interpolation factor, a power of two (default 64).
    #[arg(long)]
    pub oversample: Option<usize>,
    /// Pass-band half-width around the carrier in Hz (default 6000).
    #[arg(long)]
    pub bandwidth_hz: Option<f64>,
    /// Nominal carrier frequency in Hz (default 11884.877).
    #[arg(long)]
    pub carrier_hz: Option<f64>,
}

/// Channel selection shared by commands that read WAV files.
#[derive(Debug, Args)]
pub struct ChannelFlags {
    /// Channel index to analyze (default 0).
    #[arg(long, default_value_t = 0)]
    pub channel: usize,
    /// Average all channels into a pseudo-mono signal instead.
    #[arg(long)]
    pub pseudo_mono: bool,
}

/// Kinds of simulated sessions.
#[derive(Debug, Subcommand)]
pub enum SimulateWhat {
    /// One test recording plus its ground-truth noise traces.
    Dummy(SimulateDummyArgs),
    /// A playback waveform and two parallel recordings of it.
    Drs(SimulateDrsArgs),
    /// One stereo recording whose channels share a sampling clock.
    Stereo(SimulateStereoArgs),
}

/// Arguments for `simulate dummy`.
#[derive(Debug, Args)]
pub struct SimulateDummyArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// TOML configuration file overriding the defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Noise seed override.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Enable sampling jitter.
    #[arg(long)]
    pub jitter: bool,
    /// Enable amplitude modulation.
    #[arg(long)]
    pub am: bool,
    /// Enable additive noise in the carrier band.
    #[arg(long)]
    pub pi: bool,
    /// Enable recorder-side additive noise.
    #[arg(long)]
    pub recorder_noise: bool,
    /// Recording length override in seconds.
    #[arg(long)]
    pub duration: Option<f64>,
}

/// Arguments for `simulate drs`.
#[derive(Debug, Args)]
pub struct SimulateDrsArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// TOML configuration file overriding the defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Noise seed override.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Arguments for `simulate stereo`.
#[derive(Debug, Args)]
pub struct SimulateStereoArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// TOML configuration file overriding the defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Noise seed override.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Arguments for `analyze`.
#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Input WAV file.
    pub input: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub analysis: AnalysisFlags,
    #[command(flatten)]
    pub channel: ChannelFlags,
    /// Number of analysis windows (default: as many as fit).
    #[arg(long)]
    pub windows: Option<usize>,
    /// Ground-truth traces CSV for validating the measurement.
    #[arg(long)]
    pub traces: Option<PathBuf>,
}

/// Arguments for `decompose`.
#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// First recording of the same playback.
    pub input_a: PathBuf,
    /// Second recording of the same playback.
    pub input_b: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub analysis: AnalysisFlags,
    #[command(flatten)]
    pub channel: ChannelFlags,
    /// Number of analysis windows (default: as many as fit in both files).
    #[arg(long)]
    pub windows: Option<usize>,
}

/// Kinds of jitter/additive splits.
#[derive(Debug, Subcommand)]
pub enum SplitWhat {
    /// Split the player deviation using a bundled-setup measurement.
    Player(SplitPlayerArgs),
    /// Split a recorder deviation using a stereo recording.
    Recorder(SplitRecorderArgs),
}

/// Arguments for `split player`.
#[derive(Debug, Args)]
pub struct SplitPlayerArgs {
    /// Player deviation from the standard setup, in ps.
    #[arg(long)]
    pub sigma_n2_ps: f64,
    /// Player deviation from the bundled setup, in ps.
    #[arg(long)]
    pub sigma_n3_ps: f64,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

/// Arguments for `split recorder`.
#[derive(Debug, Args)]
pub struct SplitRecorderArgs {
    /// Stereo recording whose channels share a sampling clock.
    pub input: PathBuf,
    /// Player deviation measured separately, in ps.
    #[arg(long)]
    pub sigma_n2_ps: f64,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub analysis: AnalysisFlags,
    /// Number of analysis windows (default: as many as fit).
    #[arg(long)]
    pub windows: Option<usize>,
}

/// Arguments for `baseline`.
#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Input WAV file.
    pub input: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub analysis: AnalysisFlags,
    #[command(flatten)]
    pub channel: ChannelFlags,
    /// Lower edge of the noise accounting band in Hz (default: carrier minus bandwidth).
    #[arg(long)]
    pub band_lo_hz: Option<f64>,
    /// Upper edge of the noise accounting band in Hz (default: carrier plus bandwidth).
    #[arg(long)]
    pub band_hi_hz: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn analyze_parses_shared_flags() {
        let cli = Cli::try_parse_from([
            "zca",
            "analyze",
            "in.wav",
            "--out",
            "outdir",
            "--window-seconds",
            "0.5",
            "--oversample",
            "128",
            "--channel",
            "1",
        ])
        .unwrap();
        match cli.command {
            Command::Analyze(args) => {
                assert_eq!(args.input, PathBuf::from("in.wav"));
                assert_eq!(args.analysis.window_seconds, Some(0.5));
                assert_eq!(args.analysis.oversample, Some(128));
                assert_eq!(args.channel.channel, 1);
                assert!(!args.channel.pseudo_mono);
            }
            other => panic!("parsed the wrong command: {other:?}"),
        }
    }

    #[test]
    fn split_player_requires_both_deviations() {
        let result = Cli::try_parse_from(["zca", "split", "player", "--sigma-n2-ps", "43.1"]);
        assert!(result.is_err());
    }
}
