//! Report envelope shared by every subcommand: version, command, seed and the
//! resolved configuration travel with the results so a file can be traced
//! back to the run that produced it.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const VERSION: &str = env!("BDFDOC_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// What a subcommand hands back: the verdict, one line per failed check,
/// informational notes (e.g. skipped comparisons), and the results in both
/// output formats.
#[derive(Debug)]
pub struct Outcome {
    pub pass: bool,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub json: Value,
    pub csv: String,
}

impl Outcome {
    pub fn new(failures: Vec<String>, json: Value, csv: String) -> Self {
        Self { pass: failures.is_empty(), failures, notes: Vec::new(), json, csv }
    }

    pub fn with_notes(mut self, notes: Vec<String>) -> Self {
        self.notes = notes;
        self
    }
}

pub struct Envelope<'a> {
    pub command: &'a str,
    pub seed: u64,
    pub config: &'a Value,
}

impl Envelope<'_> {
    pub fn render(&self, outcome: &Outcome, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let doc = json!({
                    "tool": "bdfdoc",
                    "version": VERSION,
                    "command": self.command,
                    "seed": self.seed,
                    "config": self.config,
                    "pass": outcome.pass,
                    "failures": outcome.failures,
                    "notes": outcome.notes,
                    "results": outcome.json,
                });
                let mut s = serde_json::to_string_pretty(&doc)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut s = format!(
                    "# bdfdoc {VERSION}\n# command: {}\n# seed: {}\n# config: {}\n# pass: {}\n",
                    self.command,
                    self.seed,
                    serde_json::to_string(self.config)?,
                    outcome.pass
                );
                for f in &outcome.failures {
                    s.push_str(&format!("# failure: {f}\n"));
                }
                for n in &outcome.notes {
                    s.push_str(&format!("# note: {n}\n"));
                }
                s.push_str(&outcome.csv);
                Ok(s)
            }
        }
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
