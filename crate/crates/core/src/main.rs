use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use pfiber::cli::{run, Cli, EXIT_ERROR, THREADS_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a global pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let mut text = outcome.output;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let written = match &cli.config.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    ExitCode::from(outcome.code as u8)
}
