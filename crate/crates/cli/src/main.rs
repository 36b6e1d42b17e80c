use std::process::ExitCode;

use clap::Parser;
use tempocent::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match tempocent::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
