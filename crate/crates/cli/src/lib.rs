//! Command-line front end: argument parsing, dispatch and deterministic
//! JSON or text reports.
//!
//! Exit codes: 0 when no check fails, 1 when a check fails, 2 for usage and
//! input errors. Recorded checks never fail a run.

mod args;
mod commands;

use std::fmt::Write as _;

use clap::error::ErrorKind;
use clap::Parser;
use mpqg_core::{Report, Status};
use serde_json::{json, Value};

pub use args::{Cli, Format};

/// Everything a command produces: an optional result and a check report.
#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Option<Value>,
    /// Human-readable lines for the text format.
    pub text: Vec<String>,
    pub report: Report,
}

impl Outcome {
    pub fn result(result: Value, text: Vec<String>) -> Self {
        Outcome { result: Some(result), text, report: Report::new() }
    }

    pub fn report(report: Report) -> Self {
        Outcome { report, ..Default::default() }
    }
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl RunOutput {
    fn usage(msg: impl Into<String>) -> Self {
        RunOutput { stdout: String::new(), stderr: msg.into(), code: 2 }
    }
}

/// Runs the command line `argv` (program name first).
pub fn run<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    RunOutput { stdout: rendered, stderr: String::new(), code: 0 }
                }
                _ => RunOutput::usage(rendered),
            };
        }
    };
    let outcome = match commands::dispatch(&cli.command) {
        Ok(o) => o,
        Err(msg) => return RunOutput::usage(format!("error: {msg}\n")),
    };
    let code = i32::from(outcome.report.has_failures());
    let echo: Vec<&str> = argv.iter().skip(1).map(String::as_str).collect();
    let stdout = match cli.format {
        Format::Json => render_json(&echo, &outcome),
        Format::Text => render_text(&echo, &outcome),
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &stdout) {
            return RunOutput::usage(format!("error: cannot write {}: {e}\n", path.display()));
        }
        return RunOutput { stdout: String::new(), stderr: String::new(), code };
    }
    RunOutput { stdout, stderr: String::new(), code }
}

/// Pretty JSON with sorted keys, newline-terminated.
pub fn render_json(echo: &[&str], outcome: &Outcome) -> String {
    let mut doc = json!({
        "tool": "mpqg",
        "version": env!("CARGO_PKG_VERSION"),
        "command": echo,
        "checks": outcome.report.checks_json(),
        "summary": outcome.report.summary(),
    });
    if let Some(r) = &outcome.result {
        doc["result"] = r.clone();
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

pub fn render_text(echo: &[&str], outcome: &Outcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mpqg {} :: {}", env!("CARGO_PKG_VERSION"), echo.join(" "));
    for line in &outcome.text {
        let _ = writeln!(s, "{line}");
    }
    for c in &outcome.report.checks {
        let _ = writeln!(s, "{:<9} {}", c.status.as_str(), c.name);
    }
    if !outcome.report.checks.is_empty() {
        let r = &outcome.report;
        let _ = writeln!(
            s,
            "pass={} fail={} recorded={}",
            r.count(Status::Pass),
            r.count(Status::Fail),
            r.count(Status::Recorded)
        );
    }
    s
}
