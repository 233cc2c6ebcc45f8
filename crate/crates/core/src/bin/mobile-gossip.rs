use std::process::ExitCode;

use clap::Parser;
use mobile_gossip::harness::cli::{execute, Cli};
use mobile_gossip::harness::HarnessError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result: anyhow::Result<()> =
        execute(cli, &mut std::io::stdout().lock()).map_err(anyhow::Error::from);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .downcast_ref::<HarnessError>()
                .map_or(2, HarnessError::exit_code);
            ExitCode::from(code)
        }
    }
}
