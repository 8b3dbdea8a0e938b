use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use bdfdoc_core::experiment::fmt_f64;
use bdfdoc_core::rational::fraction_string;
use bdfdoc_core::starting::{
    certify_starting_bound, cumulative_starting_sum_with, CumulativeStartingSum, StartingBoundConstant, DEFAULT_N_MAX,
};

use super::{Context, ANALYSIS_ORDERS};
use crate::config::{check_orders, usage};
use crate::report::Outcome;

/// `c_{I,k}` must agree between `n_max/2` and `n_max` to this tolerance.
pub const DOUBLING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StartingArgs {
    /// Orders, comma separated, each in 3..=5 [default: 3,4,5]
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Last step at which the starting coefficients are checked [default: 400]
    #[arg(long)]
    pub n_max: Option<usize>,
}

/// Certification of one order: the constant, the cumulative sum and the
/// comparison with half the horizon.
#[derive(Debug, Serialize)]
pub(crate) struct StartingResult {
    pub constant: StartingBoundConstant,
    pub cumulative: CumulativeStartingSum,
    pub half_horizon_tight: f64,
    pub stable_under_doubling: bool,
}

impl StartingResult {
    pub fn compute(k: usize, n_max: usize) -> Result<Self> {
        let constant = certify_starting_bound(k, n_max)?;
        let half = certify_starting_bound(k, (n_max / 2).max(k))?;
        let cumulative = cumulative_starting_sum_with(k, n_max, &constant.certified)?;
        let stable_under_doubling = (constant.tight_f64 - half.tight_f64).abs() <= DOUBLING_TOL;
        Ok(Self { constant, cumulative, half_horizon_tight: half.tight_f64, stable_under_doubling })
    }

    pub fn failures(&self) -> Vec<String> {
        let k = self.constant.k;
        let mut out = Vec::new();
        if !self.constant.valid {
            out.push(format!("k={k}: starting coefficients exceed the certified envelope"));
        }
        if !self.cumulative.within_bound {
            out.push(format!(
                "k={k}: cumulative starting sum {} exceeds {}",
                self.cumulative.max_sum,
                fraction_string(&self.cumulative.bound)
            ));
        }
        if !self.stable_under_doubling {
            out.push(format!(
                "k={k}: c_I moves from {} to {} when the horizon doubles",
                self.half_horizon_tight, self.constant.tight_f64
            ));
        }
        out
    }
}

pub fn run(args: StartingArgs, _ctx: &Context) -> Result<(Value, Outcome)> {
    let ks = check_orders(args.k, &ANALYSIS_ORDERS, 3..=5)?;
    let n_max = args.n_max.unwrap_or(DEFAULT_N_MAX);
    if let Some(&k) = ks.iter().find(|&&k| n_max < 2 * k) {
        return Err(usage(format!("--n-max must be at least 2k = {}", 2 * k)));
    }
    let results: Vec<StartingResult> = ks.iter().map(|&k| StartingResult::compute(k, n_max)).collect::<Result<_>>()?;
    let mut csv = String::from(
        "k,c_i_certified,c_i_tight,sup_at,n_max,envelope_slack_min,valid,cumulative_max_sum,cumulative_bound,within_bound,stable_under_doubling\n",
    );
    for r in &results {
        let (c, s) = (&r.constant, &r.cumulative);
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            c.k,
            fraction_string(&c.certified),
            fraction_string(&c.tight),
            c.sup_at,
            c.n_max_checked,
            fmt_f64(c.envelope_slack_min),
            c.valid,
            fmt_f64(s.max_sum),
            fraction_string(&s.bound),
            s.within_bound,
            r.stable_under_doubling
        ));
    }
    let failures = results.iter().flat_map(StartingResult::failures).collect();
    let config = json!({ "k": ks, "n_max": n_max });
    Ok((config, Outcome::new(failures, serde_json::to_value(&results)?, csv)))
}
