use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use tierlab::cli::Cli;
use tierlab::commands::dispatch;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(&cli, &mut out) {
        Ok(code) => {
            let _ = out.flush();
            ExitCode::from(code as u8)
        }
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
