//! Subcommand implementations.

pub mod analyze;
pub mod baseline;
mod common;
pub mod decompose;
pub mod simulate;
pub mod split;

use crate::args::{Command, SimulateWhat, SplitWhat};
use crate::error::Result;

/// Dispatches one parsed command.
pub fn run(command: &Command) -> Result<()> {
    match command {
        Command::Simulate { what } => match what {
            SimulateWhat::Dummy(args) => simulate::run_dummy(args),
            SimulateWhat::Drs(args) => simulate::run_drs(args),
            SimulateWhat::Stereo(args) => simulate::run_stereo(args),
        },
        Command::Analyze(args) => analyze::run(args),
        Command::Decompose(args) => decompose::run(args),
        Command::Split { what } => match what {
            SplitWhat::Player(args) => split::run_player(args),
            SplitWhat::Recorder(args) => split::run_recorder(args),
        },
        Command::Baseline(args) => baseline::run(args),
    }
}
