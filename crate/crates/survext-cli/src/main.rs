//! `survext`: survival-extropy measures, plug-in estimators, uniformity
//! testing, image classification, and lifetime divergence analysis.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use error::CliError;

fn default_format(command: &Command) -> Format {
    match command {
        Command::Measure(_) | Command::Estimate(_) | Command::Test(_) | Command::ClassifyImages(_) => {
            Format::Json
        }
        Command::CriticalValues(_)
        | Command::Power(_)
        | Command::AnalyzeLifetimes(_)
        | Command::Report(_) => Format::Csv,
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.resolve(default_format(&cli.command))?;
    if let Some(threads) = cfg.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // Ignored if a global pool already exists; results never depend
        // on the worker count.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let text = match &cli.command {
        Command::Measure(a) => commands::measure(a, &cfg)?,
        Command::Estimate(a) => commands::estimate(a, &cfg)?,
        Command::CriticalValues(a) => commands::critical_values_cmd(a, &cfg)?,
        Command::Power(a) => commands::power(a, &cfg)?,
        Command::Test(a) => commands::test(a, &cfg)?,
        Command::ClassifyImages(a) => commands::classify_images(a, &cfg)?,
        Command::AnalyzeLifetimes(a) => commands::analyze_lifetimes(a, &cfg)?,
        Command::Report(a) => commands::report_curves(a, &cfg)?,
    };
    output::emit(cli.output.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code: u8 = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
