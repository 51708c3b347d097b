use std::process::ExitCode;

use clap::Parser;
use invdecomp::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(&cli.command);
    println!("{}", report.to_json());
    ExitCode::from(report.exit_code() as u8)
}
