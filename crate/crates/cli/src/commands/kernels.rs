use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use bdfdoc_core::generate_bdf_kernels;
use bdfdoc_core::kernel::{reference_table, MAX_ORDER, MIN_ORDER};
use bdfdoc_core::rational::fraction_string;

use super::Context;
use crate::config::check_orders;
use crate::report::Outcome;

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelsArgs {
    /// Orders to print, comma separated, each in 1..=5 [default: 1,2,3,4,5]
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
}

/// Prints `b_0..b_{k-1}` as exact fractions and compares them with the
/// hard-coded table for `k = 2..=5`.
pub fn run(args: KernelsArgs, _ctx: &Context) -> Result<(Value, Outcome)> {
    let all: Vec<usize> = (MIN_ORDER..=MAX_ORDER).collect();
    let ks = check_orders(args.k, &all, MIN_ORDER..=MAX_ORDER)?;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut csv = String::from("k,b_0,b_1,b_2,b_3,b_4,matches_table\n");
    for &k in &ks {
        let kernels = generate_bdf_kernels(k)?;
        let fractions: Vec<String> = kernels.coefficients().iter().map(fraction_string).collect();
        let matches = reference_table(k).map(|table| table == kernels.coefficients());
        if matches == Some(false) {
            failures.push(format!("k={k}: kernels {} deviate from the table", fractions.join(" ")));
        }
        let mut cells = fractions.clone();
        cells.resize(MAX_ORDER, String::new());
        let flag = matches.map(|m| m.to_string()).unwrap_or_default();
        csv.push_str(&format!("{k},{},{flag}\n", cells.join(",")));
        rows.push(json!({ "k": k, "kernels": fractions, "matches_table": matches }));
    }
    Ok((json!({ "k": ks }), Outcome::new(failures, Value::Array(rows), csv)))
}
