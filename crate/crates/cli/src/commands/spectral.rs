use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use bdfdoc_core::experiment::fmt_f64;
use bdfdoc_core::spectral::{certify_spectral, SpectralReport, SpectralSettings};

use super::{Context, ANALYSIS_ORDERS};
use crate::config::{check_orders, usage};
use crate::report::Outcome;

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralArgs {
    /// Orders, comma separated, each in 2..=5 [default: 3,4,5]
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Toeplitz sizes for the eigenvalue sweep [default: 50,100,200,400]
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    /// Randomized quadratic-form trials per order [default: 10000]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Length of the random vectors [default: 50]
    #[arg(long)]
    pub form_n: Option<usize>,
}

#[derive(Debug, Serialize)]
pub(crate) struct Resolved {
    pub k: Vec<usize>,
    pub m_list: Vec<usize>,
    pub trials: usize,
    pub form_n: usize,
}

impl Resolved {
    pub fn new(
        k: Option<Vec<usize>>,
        m_list: Option<Vec<usize>>,
        trials: Option<usize>,
        form_n: Option<usize>,
    ) -> Result<Self> {
        let defaults = SpectralSettings::default();
        let cfg = Self {
            k: check_orders(k, &ANALYSIS_ORDERS, 2..=5)?,
            m_list: m_list.unwrap_or(defaults.m_list),
            trials: trials.unwrap_or(defaults.trials),
            form_n: form_n.unwrap_or(defaults.form_n),
        };
        if cfg.m_list.is_empty() || cfg.m_list.contains(&0) {
            return Err(usage("--m-list needs positive sizes"));
        }
        if cfg.trials == 0 || cfg.form_n == 0 {
            return Err(usage("--trials and --form-n must be positive"));
        }
        Ok(cfg)
    }

    pub fn settings(&self, seed: u64) -> SpectralSettings {
        SpectralSettings {
            m_list: self.m_list.clone(),
            trials: self.trials,
            form_n: self.form_n,
            seed,
            ..Default::default()
        }
    }
}

/// One line per failed sub-check of a spectral report.
pub(crate) fn failures(r: &SpectralReport) -> Vec<String> {
    let mut out = Vec::new();
    if r.sigma <= 0.0 {
        out.push(format!("k={}: generating function minimum {} is not positive", r.k, r.sigma));
    }
    for (m, l) in &r.lambda_min_by_m {
        if *l < r.sigma - bdfdoc_core::spectral::EIGEN_SLACK {
            out.push(format!("k={}: lambda_min(B_{m}) = {l} below sigma = {}", r.k, r.sigma));
        }
    }
    for (m, l) in &r.lambda_max_by_m {
        if *l > r.g_max + bdfdoc_core::spectral::EIGEN_SLACK {
            out.push(format!("k={}: lambda_max(B_{m}) = {l} above max g = {}", r.k, r.g_max));
        }
    }
    if r.quadratic_form_min < r.sigma - bdfdoc_core::spectral::FORM_SLACK {
        out.push(format!("k={}: quadratic form ratio {} below sigma", r.k, r.quadratic_form_min));
    }
    if r.doc_form_min <= 0.0 {
        out.push(format!("k={}: DOC quadratic form {} not positive", r.k, r.doc_form_min));
    }
    out
}

pub(crate) fn csv_rows(reports: &[SpectralReport]) -> String {
    let mut csv = String::from("k,m,lambda_min,lambda_max,sigma,g_max,quadratic_form_min,doc_form_min\n");
    for r in reports {
        for (m, lo) in &r.lambda_min_by_m {
            csv.push_str(&format!(
                "{},{m},{},{},{},{},{},{}\n",
                r.k,
                fmt_f64(*lo),
                fmt_f64(r.lambda_max_by_m[m]),
                fmt_f64(r.sigma),
                fmt_f64(r.g_max),
                fmt_f64(r.quadratic_form_min),
                fmt_f64(r.doc_form_min)
            ));
        }
    }
    csv
}

/// Generating-function minimum, Toeplitz eigenvalue sandwich and randomized
/// quadratic forms per order.
pub fn run(args: SpectralArgs, ctx: &Context) -> Result<(Value, Outcome)> {
    let cfg = Resolved::new(args.k, args.m_list, args.trials, args.form_n)?;
    let settings = cfg.settings(ctx.seed);
    let reports: Vec<SpectralReport> =
        cfg.k.iter().map(|&k| certify_spectral(k, &settings, ctx.exec)).collect::<Result<_, _>>()?;
    let failed: Vec<String> = reports.iter().flat_map(failures).collect();
    let csv = csv_rows(&reports);
    Ok((serde_json::to_value(&cfg)?, Outcome::new(failed, serde_json::to_value(&reports)?, csv)))
}
