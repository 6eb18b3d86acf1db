use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use latticestop::cli::{dispatch, exit_code, out_path, Cli, THREADS_ENV};
use latticestop::exec::configure_threads;

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(raw) = std::env::var(THREADS_ENV) {
        match raw.parse::<usize>() {
            Ok(n) if n > 0 => {
                configure_threads(n);
            }
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got {raw:?}");
                return ExitCode::from(2);
            }
        }
    }

    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(exit_code(&err) as u8);
        }
    };

    let written = match out_path(&cli.command) {
        Some(path) => std::fs::write(path, &outcome.output),
        None => std::io::stdout().write_all(outcome.output.as_bytes()),
    };
    if let Err(err) = written {
        eprintln!("error: {err}");
        return ExitCode::from(5);
    }

    if outcome.assert && !outcome.passed {
        eprintln!("verdict: FAIL");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
