use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use bdfdoc_core::doc::{
    certify_decay, certify_decay_with, characteristic_roots, closed_form_theta, compute_doc_kernels,
    verify_orthogonality, DecayBound,
};
use bdfdoc_core::experiment::fmt_f64;
use bdfdoc_core::generate_bdf_kernels;
use bdfdoc_core::rational::{fraction_string, to_f64};

use super::{Context, ANALYSIS_ORDERS};
use crate::config::{check_orders, usage};
use crate::report::Outcome;

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DocArgs {
    /// Orders, comma separated, each in 2..=5 [default: 3,4,5]
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Number of kernels θ_0.. to dump [default: 12]
    #[arg(long)]
    pub count: Option<usize>,
    /// Orthogonality identities are checked for all k ≤ j ≤ n ≤ N [default: 200]
    #[arg(long)]
    pub n: Option<usize>,
    /// Decay certificates cover θ_0..θ_J [default: 200]
    #[arg(long)]
    pub j_max: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Resolved {
    k: Vec<usize>,
    count: usize,
    n: usize,
    j_max: usize,
}

/// Dumps the DOC kernels next to their closed form, and checks
/// orthogonality and (for k ≥ 3) the geometric decay envelopes.
pub fn run(args: DocArgs, ctx: &Context) -> Result<(Value, Outcome)> {
    let cfg = Resolved {
        k: check_orders(args.k, &ANALYSIS_ORDERS, 2..=5)?,
        count: args.count.unwrap_or(12),
        n: args.n.unwrap_or(200),
        j_max: args.j_max.unwrap_or(200),
    };
    if cfg.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let mut failures = Vec::new();
    let mut results = Vec::new();
    let mut csv = String::from("k,j,theta,theta_f64,closed_form\n");
    for &k in &cfg.k {
        if cfg.n < k {
            return Err(usage(format!("--n must be at least k = {k}")));
        }
        let b = generate_bdf_kernels(k)?;
        let theta = compute_doc_kernels(&b, cfg.count.max(cfg.n + 1).max(cfg.j_max + 1))?;
        let roots = characteristic_roots(k)?;
        for j in 0..cfg.count {
            let t = &theta.values()[j];
            csv.push_str(&format!(
                "{k},{j},{},{},{}\n",
                fraction_string(t),
                fmt_f64(to_f64(t)),
                fmt_f64(closed_form_theta(&roots, j))
            ));
        }
        let ortho = verify_orthogonality(&b, &theta, cfg.n, ctx.exec)?;
        if let Some(f) = ortho.first_failure {
            failures.push(format!("k={k}: orthogonality {:?} fails at n={}, j={}", f.identity, f.n, f.j));
        }
        let mut decay = Vec::new();
        if k >= 3 {
            let envelope = certify_decay(&theta, cfg.j_max)?;
            let sharp = DecayBound::sharp(k).expect("k in 3..=5");
            let sharp = certify_decay_with(&theta, &sharp, cfg.j_max)?;
            for (name, cert) in [("decay", &envelope), ("sharp_decay", &sharp)] {
                if !cert.valid {
                    failures.push(format!("k={k}: {name} envelope violated at j={:?}", cert.first_violation));
                }
            }
            decay = vec![serde_json::to_value(&envelope)?, serde_json::to_value(&sharp)?];
        }
        let theta_json: Vec<String> = theta.values()[..cfg.count].iter().map(fraction_string).collect();
        results.push(json!({
            "k": k,
            "theta": theta_json,
            "root_moduli": roots.moduli(),
            "orthogonality": { "holds": ortho.holds, "pairs_checked": ortho.pairs_checked },
            "decay": decay,
        }));
    }
    Ok((serde_json::to_value(&cfg)?, Outcome::new(failures, Value::Array(results), csv)))
}
