use std::process::ExitCode;

use clap::Parser;
use repad::cli::{self, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match cli::run(cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("repad: {e}");
            ExitCode::from(cli::exit_code(&e))
        }
    }
}
