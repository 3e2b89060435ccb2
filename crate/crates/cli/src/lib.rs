//! Command-line front end: template files, reports and graph export.

pub mod format;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use origami_core::template::validate_template;

use crate::format::{parse_template_file, ParseError};
use crate::report::{betti_report, cutpieces_report, export_dot, invariants_report, validate_report};

#[derive(Parser, Debug)]
#[command(name = "origami", version, about = "Topology of toric origami manifolds from their templates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a template file and summarize its graph.
    Validate(Target),
    /// Fundamental group, first homology, prismatic structure and Euler characteristic.
    Invariants(Target),
    /// Betti numbers of the manifold.
    Betti(Target),
    /// Cohomology of the symplectic cut pieces and the fold components.
    Cutpieces(Target),
    /// The template graph in DOT format.
    ExportDot(Target),
}

#[derive(clap::Args, Debug)]
struct Target {
    file: PathBuf,
    /// Machine-readable JSON output.
    #[arg(long)]
    json: bool,
    /// Write the report to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Exit status and the text destined for standard output and error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    command: &'a str,
    error: &'a str,
    message: String,
}

fn render<T: Serialize>(json: bool, value: &T, text: impl FnOnce(&T) -> String) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
        s.push('\n');
        s
    } else {
        text(value)
    }
}

pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    let (name, target) = match &cli.command {
        Command::Validate(t) => ("validate", t),
        Command::Invariants(t) => ("invariants", t),
        Command::Betti(t) => ("betti", t),
        Command::Cutpieces(t) => ("cutpieces", t),
        Command::ExportDot(t) => ("export-dot", t),
    };
    let (code, body) = execute(&cli.command, name, target);
    let mut outcome = match code {
        EXIT_USAGE if !target.json => Outcome {
            code,
            stdout: String::new(),
            stderr: body,
        },
        _ => Outcome {
            code,
            stdout: body,
            stderr: String::new(),
        },
    };
    if let Some(path) = &target.out {
        if let Err(e) = std::fs::write(path, &outcome.stdout) {
            return Outcome {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: format!("cannot write {}: {e}\n", path.display()),
            };
        }
        outcome.stdout.clear();
    }
    outcome
}

fn parse_failure(name: &str, json: bool, e: &ParseError) -> String {
    if json {
        render(
            true,
            &ErrorJson {
                command: name,
                error: e.kind(),
                message: e.to_string(),
            },
            |_| String::new(),
        )
    } else {
        format!("error: {e}\n")
    }
}

fn execute(command: &Command, name: &str, target: &Target) -> (i32, String) {
    let json = target.json;
    let parsed = match parse_template_file(&target.file) {
        Ok(p) => p,
        Err(e) => return (EXIT_USAGE, parse_failure(name, json, &e)),
    };
    let note = parsed.note.clone();
    let validated = validate_template(&parsed.raw);
    let t = match (&validated, command) {
        (_, Command::Validate(_)) | (Err(_), _) => {
            let r = validate_report(&parsed.raw, &validated, note);
            let code = if validated.is_ok() { EXIT_OK } else { EXIT_INVALID };
            return (code, render(json, &r, |r| r.text()));
        }
        (Ok(t), _) => t,
    };
    let body = match command {
        Command::Validate(_) => unreachable!("handled above"),
        Command::Invariants(_) => render(json, &invariants_report(t, note), |r| r.text()),
        Command::Betti(_) => render(json, &betti_report(t, note), |r| r.text()),
        Command::Cutpieces(_) => render(json, &cutpieces_report(t, note), |r| r.text()),
        Command::ExportDot(_) => {
            let dot = export_dot(t);
            if json {
                render(true, &serde_json::json!({ "command": "export-dot", "dot": dot }), |_| String::new())
            } else {
                dot
            }
        }
    };
    (EXIT_OK, body)
}
