//! `gcos` command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 internal error.

mod args;
mod commands;
mod failure;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use failure::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            let f = Failure::Internal(e.to_string());
            eprintln!("error: {f}");
            return f.exit_code();
        }
    }
    match catch_unwind(AssertUnwindSafe(|| commands::run(cli.command))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
        Err(_) => ExitCode::from(3),
    }
}
