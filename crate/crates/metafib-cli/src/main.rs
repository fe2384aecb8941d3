//! Command-line front end: evaluate rules, sweep mortality, compute
//! generation statistics, and render scatterplots.
//!
//! Exit codes: 0 on success (a rule dying is a result, not a failure),
//! 1 for unusable arguments or inputs, 2 when the analysis itself fails
//! (budget exhausted, overflow, range not available, empty plot).

use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;

use commands::CliError;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap treats --help/--version as errors; keep them successes
            // and route genuine argument problems to exit code 1.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
