use std::process::ExitCode;

use clap::Parser;
use qcurves::cli::{exit_code, run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qcurves: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
