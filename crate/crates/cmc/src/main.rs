use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = cmc::cli::Cli::parse();
    ExitCode::from(cmc::cli::exit_code(&cli))
}
