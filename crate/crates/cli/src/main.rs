//! `commgram`: command-line front end. Every analysis ends with one
//! `VERDICT <result> WITNESS <monomial|->` line on standard output.
//!
//! Exit codes: 0 true, 1 false, 2 unknown or truncated, 64 usage error,
//! 65 input error.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::CliError;

const EXIT_USAGE: u8 = 64;
const EXIT_INPUT: u8 = 65;

fn verdict_line(result: &str, witness: Option<&str>) -> String {
    format!("VERDICT {result} WITNESS {}\n", witness.unwrap_or("-"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            print!("{}", verdict_line("error", None));
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut out = std::io::stdout().lock();
    match commands::run(cli.command) {
        Ok(o) => {
            let _ = out.write_all(o.body.as_bytes());
            let _ = out.write_all(verdict_line(o.truth.word(), o.witness.as_deref()).as_bytes());
            ExitCode::from(o.truth.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            let _ = out.write_all(verdict_line("error", None).as_bytes());
            ExitCode::from(match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Input(_) => EXIT_INPUT,
            })
        }
    }
}
