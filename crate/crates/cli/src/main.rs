use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hardy_cli::{render, run, Args, CliError, Format, RunConfig, EXIT_FAIL, EXIT_PASS};

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match execute(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hardy: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn execute(args: Args) -> Result<i32, CliError> {
    let cfg = RunConfig::from_args(args)?;
    let outcome = run(&cfg)?;
    let text = render(&cfg, &outcome)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(CliError::io)?,
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(CliError::io)?,
    }
    if cfg.format == Format::Csv {
        for (k, v) in &outcome.table.summary {
            eprintln!("{k}: {v}");
        }
    }
    if outcome.pass {
        Ok(EXIT_PASS)
    } else {
        eprintln!("hardy: {}: assertion failed", cfg.command.as_str());
        Ok(EXIT_FAIL)
    }
}
