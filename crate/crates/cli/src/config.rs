//! Campaign configuration: an optional TOML or JSON file whose sections
//! mirror the subcommands, overlaid by whatever was given on the command line.

use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use bdfdoc_core::pde::{Preset, Startup};

use crate::commands::{CertifyArgs, ConvergeArgs, DocArgs, KernelsArgs, SpectralArgs, StabilityArgs, StartingArgs};
use crate::report::Format;

/// Bad invocation or configuration; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<String>,
    pub jobs: Option<usize>,
    pub kernels: Option<KernelsArgs>,
    pub doc: Option<DocArgs>,
    pub spectral: Option<SpectralArgs>,
    pub starting: Option<StartingArgs>,
    pub certify: Option<CertifyArgs>,
    pub converge: Option<ConvergeArgs>,
    pub stability: Option<StabilityArgs>,
}

impl FileConfig {
    /// `.json` files are read as JSON, everything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Fields set on the command line win over the file section; unset fields
/// fall through to it.
pub fn overlay<T: Serialize + DeserializeOwned>(file: Option<T>, cli: T) -> Result<T> {
    let Some(file) = file else { return Ok(cli) };
    let mut merged = serde_json::to_value(file)?;
    if let (Value::Object(base), Value::Object(top)) = (&mut merged, serde_json::to_value(cli)?) {
        for (key, value) in top {
            if !value.is_null() {
                base.insert(key, value);
            }
        }
    }
    Ok(serde_json::from_value(merged)?)
}

/// Orders outside `allowed` are a usage error; the list is sorted and
/// deduplicated so reports come out in a fixed order.
pub fn check_orders(
    ks: Option<Vec<usize>>,
    default: &[usize],
    allowed: std::ops::RangeInclusive<usize>,
) -> Result<Vec<usize>> {
    let mut ks = ks.unwrap_or_else(|| default.to_vec());
    if ks.is_empty() {
        return Err(usage("the k list is empty"));
    }
    if let Some(bad) = ks.iter().find(|k| !allowed.contains(k)) {
        return Err(usage(format!(
            "unsupported order k = {bad}; this command accepts {}..={}",
            allowed.start(),
            allowed.end()
        )));
    }
    ks.sort_unstable();
    ks.dedup();
    Ok(ks)
}

pub fn parse_preset(s: &str) -> std::result::Result<Preset, String> {
    Preset::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
        format!("unknown preset '{s}', expected one of {}", names.join(", "))
    })
}

/// `exact`, `cascaded` (default substeps) or `cascaded:N`.
pub fn parse_startup(s: &str, k: usize) -> Result<Startup> {
    match s.split_once(':') {
        None if s == "exact" => Ok(Startup::ExactSolution),
        None if s == "cascaded" => Ok(Startup::CascadedBdf { substeps: bdfdoc_core::pde::default_substeps(k) }),
        Some(("cascaded", n)) => match n.parse::<usize>() {
            Ok(substeps) if substeps > 0 => Ok(Startup::CascadedBdf { substeps }),
            _ => Err(usage(format!("invalid substep count in startup '{s}'"))),
        },
        _ => Err(usage(format!("unknown startup '{s}', expected exact, cascaded or cascaded:N"))),
    }
}
