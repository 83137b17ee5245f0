mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use nearres::TorusGeometry;

use args::{Cli, Command};

enum Failure {
    Invalid(String),
    Numeric(String),
}

impl From<nearres::Error> for Failure {
    fn from(e: nearres::Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let cmd = &cli.command;
    let common = cmd.common();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Failure::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Invalid(e.to_string()))?;
    }
    let geom = TorusGeometry::parse(&common.l1, &common.l2)?;
    let table = match cmd {
        Command::Triads(a) => commands::triads(a, &geom)?,
        Command::CountLower(a) => commands::count_lower(a)?,
        Command::Volume(a) => commands::volume(a, &geom)?,
        Command::EllipticCheck(a) => commands::elliptic_check(a)?,
        Command::JordanCheck(a) => commands::jordan_check(a)?,
        Command::Simulate(a) => {
            let (table, last) = commands::simulate(a, &geom)?;
            if let Some(p) = &a.snapshot {
                std::fs::write(p, last)?;
            }
            table
        }
        Command::ErrorScan(a) => commands::error_scan_cmd(a, &geom)?,
        Command::PlanarCheck(a) => commands::planar_check(a, &geom)?,
    };
    let flags = serde_json::to_value(cmd).map_err(|e| Failure::Invalid(e.to_string()))?;
    let out = common.out.as_deref();
    let manifest = output::manifest(cmd.name(), flags, cmd.seed(), &common.l1, &common.l2, out);
    output::emit(&table, &manifest, out, common.manifest.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    let argv = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
