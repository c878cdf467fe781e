use std::process::ExitCode;

use clap::Parser;

use hqea_bench::cli::{execute, Cli};
use hqea_bench::UsageError;

fn main() -> ExitCode {
    // Clap handles its own parse failures (usage text, exit code 2), so
    // anything arriving here is already syntactically valid.
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
