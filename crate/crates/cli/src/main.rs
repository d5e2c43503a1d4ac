#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::error::{CliError, CliResult};

fn out_dir(cmd: &Command) -> &std::path::Path {
    match cmd {
        Command::Diagram(a) => &a.out,
        Command::Summarize(a) => &a.out,
        Command::Test(a) => &a.out,
        Command::Band(a) => &a.out,
        Command::Predict(a) => &a.out,
        Command::Classify(a) => &a.out,
        Command::Mds(a) => &a.out,
        Command::SimulateStix(a) => &a.out,
        Command::SimulateGland(a) => &a.out,
        Command::Experiment(a) => &a.out,
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let start = Instant::now();
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => n,
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    let outcome = pool.install(|| commands::execute(&cli.command))?;
    let args: Vec<String> = std::env::args().skip(1).collect();
    output::write_all(
        out_dir(&cli.command),
        cli.command.name(),
        &args,
        pool.current_num_threads(),
        &outcome,
        start.elapsed().as_secs_f64(),
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
