//! `zca`: command-line front end for the zero-crossing jitter
//! analysis toolkit. See each subcommand's `--help` for its flags.

mod args;
mod commands;
mod config;
mod error;
mod manifest;
mod outputs;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    if let Err(err) = commands::run(&cli.command) {
        eprintln!("error[{}]: {err}", err.category());
        std::process::exit(1);
    }
}
