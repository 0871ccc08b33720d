mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, MomentsCommand, PptCommand};
use commands::Run;
use error::CliError;

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let run = Run {
        start: Instant::now(),
        argv: std::env::args().skip(1).collect(),
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
    };
    match &cli.command {
        Command::Moments(MomentsCommand::Exact(a)) => commands::moments_exact(&run, a),
        Command::Moments(MomentsCommand::Limit(a)) => commands::moments_limit(&run, a),
        Command::Verify(a) => commands::verify(&run, a),
        Command::Simulate(a) => commands::simulate(&run, a),
        Command::Spectrum(a) => commands::spectrum(&run, a),
        Command::Ppt(PptCommand::Scan(a)) => commands::ppt(&run, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
