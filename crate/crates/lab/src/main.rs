use std::fs;
use std::process::ExitCode;

use bergman_lab::cli::{Cli, Format};
use bergman_lab::report::write_csv;
use bergman_lab::{run, Outcome, Result, EXIT_ERROR};
use clap::Parser;

fn emit(cli: &Cli) -> Result<i32> {
    let Outcome { report, exit } = run(&cli.command)?;
    let common = cli.command.common();
    match common.format {
        Format::Json => {
            let text = report.to_json()?;
            match &common.out {
                Some(p) => fs::write(p, text).map_err(|source| bergman_lab::LabError::Io { path: p.clone(), source })?,
                None => print!("{text}"),
            }
        }
        Format::Csv => {
            write_csv(&report.result.tables(), common.out.as_deref())?;
        }
    }
    for e in &report.errors {
        eprintln!("warning: {e}");
    }
    Ok(exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    match emit(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
