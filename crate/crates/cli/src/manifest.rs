//! Run manifests: one JSON file per command invocation, written next
//! to the outputs, recording everything needed to reproduce the run.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::outputs::write_json;

/// Resolved analysis settings as they were actually used.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisSettings {
    pub window_seconds: f64,
    pub block_len: usize,
    pub oversample: usize,
    pub bandwidth_hz: f64,
    pub carrier_hz: f64,
    pub windows: usize,
    pub channel: String,
}

/// Everything that determines one command invocation.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    /// Which subcommand ran.
    pub command: String,
    /// Input files, in argument order.
    pub inputs: Vec<PathBuf>,
    /// Directory the outputs were written to.
    pub output_dir: PathBuf,
    /// Seed for synthesis commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Resolved analysis settings for measurement commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisSettings>,
    /// Resolved configuration for synthesis commands, after file and
    /// flag overrides.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    /// Extra scalar inputs, such as externally measured deviations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameters: Option<serde_json::Value>,
    /// Tool version that produced the outputs.
    pub version: String,
}

impl RunManifest {
    /// A manifest skeleton for `command` writing into `output_dir`.
    pub fn new(command: &str, output_dir: &Path) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            output_dir: output_dir.to_path_buf(),
            seed: None,
            analysis: None,
            config: None,
            parameters: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Writes the manifest as `manifest.json` in the output directory.
    pub fn write(&self) -> Result<()> {
        write_json(&self.output_dir.join("manifest.json"), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optional_sections_stay_out_of_the_serialization() {
        let manifest = RunManifest::new("analyze", Path::new("out"));
        let text = serde_json::to_string(&manifest).unwrap();
        assert!(text.contains("\"command\":\"analyze\""));
        assert!(!text.contains("seed"));
        assert!(!text.contains("config"));
    }
}
