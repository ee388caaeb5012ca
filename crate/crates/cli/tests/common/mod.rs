#![allow(dead_code)]

use clap::Parser;
use toprec_cli::{run, Cli, CliError};

/// Runs the command line in-process, returning stdout or the failure.
pub fn toprec(args: &[&str]) -> Result<String, (CliError, String)> {
    let cli = Cli::try_parse_from(std::iter::once("toprec").chain(args.iter().copied())).expect("valid arguments");
    let mut out = Vec::new();
    let result = run(&cli, &mut out);
    let text = String::from_utf8(out).expect("utf-8 output");
    match result {
        Ok(()) => Ok(text),
        Err(e) => Err((e, text)),
    }
}

pub fn ok(args: &[&str]) -> String {
    toprec(args).unwrap_or_else(|(e, _)| panic!("{args:?} failed with exit {}: {}", e.code, e.message))
}

pub fn exit_code(args: &[&str]) -> i32 {
    match toprec(args) {
        Ok(_) => 0,
        Err((e, _)) => e.code,
    }
}
