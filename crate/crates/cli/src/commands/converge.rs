use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use bdfdoc_core::experiment::{
    convergence_study, default_ladder, order_csv, validate_ladder, ConvergenceSettings, OrderReport, SpaceMode,
};
use bdfdoc_core::kernel::{MAX_ORDER, MIN_ORDER};
use bdfdoc_core::pde::{build_preset, ForcingMode, Preset, PresetParams, Space};

use super::Context;
use crate::config::{check_orders, parse_preset, parse_startup, usage};
use crate::report::Outcome;

pub(crate) fn parse_mode(s: &str) -> std::result::Result<SpaceMode, String> {
    match s {
        "scalar" => Ok(SpaceMode::Scalar),
        "pde" => Ok(SpaceMode::Pde),
        _ => Err(format!("unknown mode '{s}', expected scalar or pde")),
    }
}

pub(crate) fn parse_forcing(s: &str) -> std::result::Result<ForcingMode, String> {
    match s {
        "grid_consistent" => Ok(ForcingMode::GridConsistent),
        "continuous" => Ok(ForcingMode::Continuous),
        _ => Err(format!("unknown forcing '{s}', expected grid_consistent or continuous")),
    }
}

/// Preset parameters with the library defaults filled in.
pub(crate) fn preset_params(
    epsilon: Option<f64>,
    beta: Option<f64>,
    beta_star: Option<f64>,
    forcing: Option<ForcingMode>,
) -> PresetParams {
    let d = PresetParams::default();
    PresetParams {
        epsilon: epsilon.unwrap_or(d.epsilon),
        beta: beta.unwrap_or(d.beta),
        beta_star: beta_star.unwrap_or(d.beta_star),
        forcing: forcing.unwrap_or(d.forcing),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeArgs {
    /// Orders, comma separated, each in 1..=5 [default: 1,2,3,4,5]
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// scalar or pde [default: scalar]
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<SpaceMode>,
    /// Interior grid nodes in pde mode [default: 1024]
    #[arg(long)]
    pub m: Option<usize>,
    /// Strictly decreasing step sizes dividing the final time [default: 0.05,0.025,0.0125,0.00625]
    #[arg(long, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    /// Final time T [default: 1]
    #[arg(long)]
    pub final_time: Option<f64>,
    /// Problem preset; needs an exact solution [default: manufactured_sine]
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// exact, cascaded or cascaded:N [default: exact]
    #[arg(long)]
    pub startup: Option<String>,
    /// Repeat the ladder at 2M and require a change below 5% (pde mode) [default: true]
    #[arg(long)]
    pub spatial_check: Option<bool>,
    /// Diffusion coefficient ε [default: 1]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Constant reaction coefficient β of the first two presets [default: -1]
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Amplitude β* of oscillating_beta [default: 1]
    #[arg(long)]
    pub beta_star: Option<f64>,
    /// grid_consistent or continuous manufactured forcing [default: grid_consistent]
    #[arg(long, value_parser = parse_forcing)]
    pub forcing: Option<ForcingMode>,
}

/// Runs the step ladder per order and reports observed orders. A cell that
/// fails to integrate marks its order as failed; the other orders still run.
/// Rejects parameters the preset cannot take (e.g. `β > 0` for
/// `dissipative_decay`) before any run starts, so they surface as a
/// configuration error rather than as per-order aborts.
pub(crate) fn check_params(preset: Preset, params: &PresetParams) -> Result<()> {
    build_preset(preset, params, &Space::Scalar).and_then(|p| p.validate()).map_err(|e| usage(e.to_string()))
}

pub fn run(args: ConvergeArgs, ctx: &Context) -> Result<(Value, Outcome)> {
    let all: Vec<usize> = (MIN_ORDER..=MAX_ORDER).collect();
    let ks = check_orders(args.k, &all, MIN_ORDER..=MAX_ORDER)?;
    let mode = args.mode.unwrap_or(SpaceMode::Scalar);
    let m = args.m.unwrap_or(1024);
    let taus = args.taus.unwrap_or_else(default_ladder);
    let final_time = args.final_time.unwrap_or(1.0);
    validate_ladder(&taus, final_time).map_err(|e| usage(e.to_string()))?;
    if mode == SpaceMode::Pde && m < 2 {
        return Err(usage("--m must be at least 2"));
    }
    let base = ConvergenceSettings {
        k: 1,
        preset: args.preset.unwrap_or(Preset::ManufacturedSine),
        params: preset_params(args.epsilon, args.beta, args.beta_star, args.forcing),
        mode,
        m,
        taus,
        final_time,
        startup: None,
        spatial_check: args.spatial_check.unwrap_or(true) && mode == SpaceMode::Pde,
    };
    check_params(base.preset, &base.params)?;
    let mut settings = Vec::new();
    for &k in &ks {
        let startup = args.startup.as_deref().map(|s| parse_startup(s, k)).transpose()?;
        settings.push(ConvergenceSettings { k, startup, ..base.clone() });
    }

    let mut reports: Vec<OrderReport> = Vec::new();
    let mut failures = Vec::new();
    let mut aborted = Vec::new();
    for s in &settings {
        match convergence_study(s, ctx.exec) {
            Ok(r) => {
                if !r.pass {
                    failures.push(format!(
                        "k={}: mean order {:.4}, pairwise {:?}{}",
                        r.k,
                        r.mean_order,
                        r.pairwise_orders,
                        r.spatial_check
                            .as_ref()
                            .filter(|c| !c.pass)
                            .map(|c| format!(", spatial change {:.3e}", c.max_relative_change))
                            .unwrap_or_default()
                    ));
                }
                reports.push(r);
            }
            Err(e) => {
                failures.push(format!("k={}: aborted: {e}", s.k));
                aborted.push(json!({ "k": s.k, "error": e.to_string() }));
            }
        }
    }
    let mut csv = order_csv(&reports);
    for a in &aborted {
        csv.push_str(&format!("# aborted k={}: {}\n", a["k"], a["error"].as_str().unwrap_or_default()));
    }
    let mut config = serde_json::to_value(&base)?;
    config["k"] = json!(ks);
    config["startup"] = json!(args.startup);
    let results = json!({ "reports": reports, "aborted": aborted });
    Ok((config, Outcome::new(failures, results, csv)))
}
