use std::process::ExitCode;

use clap::Parser;
use dirac_feedback::cli::{execute, invocation, Cli};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&args);
    match run(&cli, &invocation(&args)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<dirac_feedback::Error>().map_or(5, |e| e.exit_code());
            ExitCode::from(code as u8)
        }
    }
}

fn run(cli: &Cli, invocation: &str) -> anyhow::Result<()> {
    execute(cli, invocation)?;
    Ok(())
}
