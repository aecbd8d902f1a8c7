mod config;
mod experiments;

use std::process::ExitCode;

use clap::Parser;

use config::{Args, Config};

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) | Failure::Numeric(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<mspec_core::Error> for Failure {
    fn from(e: mspec_core::Error) -> Self {
        use mspec_core::Error::*;
        match e {
            Parameter(_) | Domain(_) | Validity(_) | Size(_) | Parse(_) => Failure::Config(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = Config::from_args(args).and_then(|cfg| experiments::run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mspec: {f}");
            ExitCode::from(f.code())
        }
    }
}
