use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use bdfdoc_core::experiment::{stability_csv, stability_study, SpaceMode, StabilityReport, StabilitySettings};
use bdfdoc_core::pde::{step_restriction, ForcingMode, Preset};

use super::converge::{check_params, parse_forcing, parse_mode, preset_params};
use super::{Context, ANALYSIS_ORDERS};
use crate::config::{check_orders, parse_preset, parse_startup, usage};
use crate::report::Outcome;

/// Step size used when neither `--tau` nor `--tau-factor` is given and the
/// preset has no step restriction.
pub const DEFAULT_TAU: f64 = 0.01;

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityArgs {
    /// Orders, comma separated, each in 3..=5 [default: 3,4,5]
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Problem preset [default: dissipative_decay]
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// scalar or pde [default: pde]
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<SpaceMode>,
    /// Interior grid nodes in pde mode [default: 64]
    #[arg(long)]
    pub m: Option<usize>,
    /// Time step [default: the step restriction for oscillating_beta, else 0.01]
    #[arg(long, conflicts_with = "tau_factor")]
    pub tau: Option<f64>,
    /// Time step as a multiple of (7-k)/(7 rho_k beta*)
    #[arg(long)]
    pub tau_factor: Option<f64>,
    /// Number of steps [default: 100]
    #[arg(long)]
    pub steps: Option<usize>,
    /// exact, cascaded or cascaded:N [default: exact when available]
    #[arg(long)]
    pub startup: Option<String>,
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

/// Records `‖u^n‖` and the applicable energy bound at every step. A run
/// whose step exceeds the restriction is reported as "hypotheses unmet"
/// rather than compared.
pub fn run(args: StabilityArgs, ctx: &Context) -> Result<(Value, Outcome)> {
    let ks = check_orders(args.k, &ANALYSIS_ORDERS, 3..=5)?;
    let preset = args.preset.unwrap_or(Preset::DissipativeDecay);
    let mode = args.mode.unwrap_or(SpaceMode::Pde);
    let m = args.m.unwrap_or(64);
    let steps = args.steps.unwrap_or(100);
    let params = preset_params(args.epsilon, args.beta, args.beta_star, args.forcing);
    if args.tau.is_some() && args.tau_factor.is_some() {
        return Err(usage("give either --tau or --tau-factor, not both"));
    }
    if steps == 0 {
        return Err(usage("--steps must be positive"));
    }
    check_params(preset, &params)?;
    let mut settings = Vec::new();
    for &k in &ks {
        let restriction = step_restriction(k, params.beta_star);
        let tau = match (args.tau, args.tau_factor) {
            (Some(t), _) => t,
            (None, Some(f)) => f * restriction.ok_or_else(|| usage("--tau-factor needs beta_star > 0"))?,
            (None, None) if preset == Preset::OscillatingBeta => restriction.unwrap_or(DEFAULT_TAU),
            (None, None) => DEFAULT_TAU,
        };
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(usage(format!("time step must be positive, got {tau}")));
        }
        let startup = args.startup.as_deref().map(|s| parse_startup(s, k)).transpose()?;
        settings.push(StabilitySettings { k, preset, params, mode, m, tau, final_time: steps as f64 * tau, startup });
    }

    let outcomes = ctx.exec.map_slice(&settings, stability_study);
    let mut reports: Vec<StabilityReport> = Vec::new();
    let mut failures = Vec::new();
    let mut results = Vec::new();
    for (s, outcome) in settings.iter().zip(outcomes) {
        match outcome {
            Ok(r) => {
                if r.check.hypotheses_met && !r.pass() {
                    failures.push(format!(
                        "k={}: norm exceeds the bound first at step {}",
                        s.k,
                        r.check.first_violation.map_or("?".into(), |n| n.to_string())
                    ));
                }
                results.push(json!({ "k": s.k, "tau": s.tau, "status": r.status(), "report": r }));
                reports.push(r);
            }
            Err(e) => {
                failures.push(format!("k={}: aborted: {e}", s.k));
                results.push(json!({ "k": s.k, "tau": s.tau, "status": "aborted", "error": e.to_string() }));
            }
        }
    }
    let notes: Vec<String> = reports
        .iter()
        .map(|r| match &r.check.reason {
            Some(reason) => format!("k={}: {}; {reason}", r.record.k, r.status()),
            None => format!("k={}: {} ({:?} bound)", r.record.k, r.status(), r.check.kind),
        })
        .collect();
    let csv = stability_csv(&reports);
    let config = json!({
        "k": ks,
        "preset": preset,
        "params": params,
        "mode": mode,
        "m": m,
        "tau": settings.iter().map(|s| s.tau).collect::<Vec<_>>(),
        "steps": steps,
        "startup": args.startup,
    });
    Ok((config, Outcome::new(failures, Value::Array(results), csv).with_notes(notes)))
}
