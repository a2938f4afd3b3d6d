mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use relnodes::io::ReportDocument;
use relnodes::Error;

use args::{Cli, Command};

/// Input problems exit with 2, everything else with 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SelfCheck(_) | Error::Io(_) => 1,
        _ => 2,
    }
}

fn write_report(report: &ReportDocument, out: Option<&std::path::Path>) -> relnodes::Result<()> {
    let text = report.to_json();
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (result, out) = match &cli.command {
        Command::Relevant(a) => (commands::relevant(a), &a.output.out),
        Command::Purge(a) => (commands::purge(a), &a.output.out),
        Command::Ug(a) => (commands::ug(a), &a.output.out),
        Command::Oracle(a) => (commands::oracle(a), &a.output.out),
        Command::Synth(a) => (commands::synth(a), &a.output.out),
        Command::Axioms(a) => (commands::axioms(a), &a.output.out),
    };
    match result.and_then(|r| write_report(&r, out.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
