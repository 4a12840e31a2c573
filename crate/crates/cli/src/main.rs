mod args;
mod error;
mod report;
mod run;

use args::{Cli, Command};
use clap::Parser;
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate(a) => run::validate(a),
        Command::Check(a) => run::check(a),
        Command::Compute(a) => run::compute(a),
        Command::Simulate(a) => run::simulate(a),
    };
    match outcome {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.output.as_bytes());
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
