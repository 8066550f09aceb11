use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use zjet_cli::{render, run, Format, Options};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

/// Runs a zjet script and prints one report per statement.
#[derive(Parser, Debug)]
#[command(name = "zjet", version)]
struct Args {
    /// Script file; standard input when omitted.
    file: Option<PathBuf>,
    /// Output format: human-readable text or JSON Lines.
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Replace the cap of every declared ring.
    #[arg(long)]
    cap_override: Option<u32>,
    /// Seed for `check all`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let src = match &args.file {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display())),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map(|_| s).map_err(|e| format!("cannot read standard input: {e}"))
        }
    };
    let src = match src {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("zjet: {msg}");
            return ExitCode::from(1);
        }
    };
    let outcome = run(&src, &Options { cap_override: args.cap_override, seed: args.seed });
    let format = match args.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Json => Format::Json,
    };
    print!("{}", render(&outcome.reports, format));
    if let Some(zjet_cli::report::Status::Error(e)) = outcome.reports.last().map(|r| &r.status) {
        eprintln!("zjet: {e}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
