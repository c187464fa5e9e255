mod args;
mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use compwb_core::par;

use crate::args::Cli;
use crate::commands::{execute, Outcome, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use crate::config::{validate_config, RunConfig};
use crate::output::{to_json, write_atomic};

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()) as u8)
}

/// Parses, validates, computes and emits; returns the exit status.
fn run<I: IntoIterator<Item = OsString>>(argv: I) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let cfg = RunConfig {
        global: cli.global,
        command: cli.command,
    };
    let diags = validate_config(&cfg);
    if !diags.is_empty() {
        for d in &diags {
            eprintln!("error: {d}");
        }
        eprintln!("run `compwb --help` for usage");
        return EXIT_USAGE;
    }
    if let Some(t) = cfg.global.threads {
        if let Err(e) = par::init_threads(t) {
            eprintln!("error: --threads: {e}");
            return EXIT_USAGE;
        }
    }
    let outcome = match execute(&cfg) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    if let Err(e) = emit(&cfg, &outcome) {
        eprintln!("error: writing output: {e}");
        return EXIT_FAIL;
    }
    if outcome.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn emit(cfg: &RunConfig, o: &Outcome) -> std::io::Result<()> {
    let fmt = cfg.global.format;
    let json = to_json(&o.summary);
    let csv = || o.table.to_csv().map_err(std::io::Error::other);
    match &cfg.global.out {
        Some(out) => {
            if fmt.csv() {
                write_atomic(&with_ext(out, "csv"), &csv()?)?;
            }
            if fmt.json() {
                write_atomic(&with_ext(out, "json"), &json)?;
            }
        }
        None => {
            if fmt.csv() && !fmt.json() {
                print!("{}", csv()?);
            } else {
                print!("{json}");
            }
        }
    }
    Ok(())
}

/// `chain.csv` -> `chain.<ext>`; a bare `chain` gains the extension.
fn with_ext(out: &Path, ext: &str) -> std::path::PathBuf {
    out.with_extension(ext)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        run(std::iter::once("compwb")
            .chain(args.iter().copied())
            .map(OsString::from))
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["identities", "--jmax", "5"]), EXIT_PASS);
        assert_eq!(run_args(&["bogus"]), EXIT_USAGE);
        assert_eq!(run_args(&["conjugate", "--s", "1"]), EXIT_USAGE);
        assert_eq!(
            run_args(&[
                "--threshold",
                "1e300",
                "experiment",
                "bounded",
                "--mmax",
                "3"
            ]),
            EXIT_FAIL
        );
    }

    #[test]
    fn writes_both_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("chain.csv");
        let code = run_args(&[
            "--out",
            out.to_str().unwrap(),
            "experiment",
            "nuclear",
            "--jmax",
            "10",
        ]);
        assert_eq!(code, EXIT_PASS);
        let csv = std::fs::read_to_string(&out).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("chain.json")).unwrap())
                .unwrap();
        let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
        let manifest: Vec<&str> = json["columns"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_str().unwrap())
            .collect();
        assert_eq!(header, manifest);
        assert_eq!(csv.lines().count(), 11);
    }
}
