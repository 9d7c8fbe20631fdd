use std::process::ExitCode;

use clap::Parser;
use pwquant::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("pwquant: some checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("pwquant: {e:#}");
            ExitCode::FAILURE
        }
    }
}
