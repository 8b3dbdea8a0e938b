use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use bdfdoc_core::doc::{certify_decay, certify_decay_with, compute_doc_kernels, verify_orthogonality, DecayBound};
use bdfdoc_core::generate_bdf_kernels;
use bdfdoc_core::spectral::{certify_spectral, EIGEN_SLACK, FORM_SLACK};
use bdfdoc_core::starting::DEFAULT_N_MAX;

use super::spectral::Resolved as SpectralResolved;
use super::starting::StartingResult;
use super::{Context, ANALYSIS_ORDERS};
use crate::config::{check_orders, usage};
use crate::report::Outcome;

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyArgs {
    /// Orders, comma separated, each in 3..=5 [default: 3,4,5]
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Horizon of the orthogonality and decay checks [default: 200]
    #[arg(long)]
    pub j_max: Option<usize>,
    /// Toeplitz sizes for the eigenvalue sweep [default: 50,100,200,400]
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    /// Randomized quadratic-form trials per order [default: 10000]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Length of the random vectors [default: 50]
    #[arg(long)]
    pub form_n: Option<usize>,
    /// Last step of the starting-effect certificate [default: 400]
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Negative control: flips the sign of b_J before the orthogonality and
    /// decay checks, which must then report a failure.
    #[arg(long, hide = true)]
    pub flip_kernel_sign: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Check {
    k: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

impl Check {
    fn new(k: usize, name: &'static str, pass: bool, detail: String) -> Self {
        Self { k, name, pass, detail }
    }
}

/// Runs every certification for each order and reports one verdict per
/// check: orthogonality, decay envelopes, generating-function minimum,
/// Toeplitz sandwich, quadratic forms and starting effects.
pub fn run(args: CertifyArgs, ctx: &Context) -> Result<(Value, Outcome)> {
    let spectral = SpectralResolved::new(args.k.clone(), args.m_list, args.trials, args.form_n)?;
    let ks = check_orders(args.k, &ANALYSIS_ORDERS, 3..=5)?;
    let j_max = args.j_max.unwrap_or(200);
    let n_max = args.n_max.unwrap_or(DEFAULT_N_MAX);
    if let Some(&k) = ks.iter().find(|&&k| j_max < k || n_max < 2 * k) {
        return Err(usage(format!("--j-max must be at least k and --n-max at least 2k (k = {k})")));
    }
    let settings = spectral.settings(ctx.seed);

    let mut checks = Vec::new();
    let mut details = Vec::new();
    for &k in &ks {
        let mut b = generate_bdf_kernels(k)?;
        if let Some(j) = args.flip_kernel_sign {
            b = b.with_flipped_sign(j).map_err(|e| usage(e.to_string()))?;
        }
        let theta = compute_doc_kernels(&b, j_max + 1)?;
        let ortho = verify_orthogonality(&b, &theta, j_max, ctx.exec)?;
        checks.push(Check::new(
            k,
            "orthogonality",
            ortho.holds,
            match ortho.first_failure {
                Some(f) => format!("{:?} fails at n={}, j={}", f.identity, f.n, f.j),
                None => format!("{} pairs per identity", ortho.pairs_checked),
            },
        ));
        let decay = certify_decay(&theta, j_max)?;
        let sharp = certify_decay_with(&theta, &DecayBound::sharp(k).expect("k in 3..=5"), j_max)?;
        for (name, cert) in [("decay", &decay), ("sharp_decay", &sharp)] {
            let detail = match cert.first_violation {
                Some(j) => format!("first violation at j={j}"),
                None => format!("holds for all j <= {j_max}"),
            };
            checks.push(Check::new(k, name, cert.valid, detail));
        }

        let s = certify_spectral(k, &settings, ctx.exec)?;
        checks.push(Check::new(k, "generating_function", s.sigma > 0.0, format!("sigma = {}", s.sigma)));
        let worst_min = s.lambda_min_by_m.values().copied().fold(f64::INFINITY, f64::min);
        let worst_max = s.lambda_max_by_m.values().copied().fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::new(
            k,
            "toeplitz_sandwich",
            worst_min >= s.sigma - EIGEN_SLACK && worst_max <= s.g_max + EIGEN_SLACK,
            format!("lambda in [{worst_min}, {worst_max}] vs [{}, {}]", s.sigma, s.g_max),
        ));
        checks.push(Check::new(
            k,
            "quadratic_forms",
            s.quadratic_form_min >= s.sigma - FORM_SLACK,
            format!("min ratio {} over {} trials", s.quadratic_form_min, s.trials),
        ));
        checks.push(Check::new(k, "doc_forms", s.doc_form_min > 0.0, format!("min DOC form {}", s.doc_form_min)));

        let start = StartingResult::compute(k, n_max)?;
        let start_failures = start.failures();
        checks.push(Check::new(
            k,
            "starting_effects",
            start_failures.is_empty(),
            if start_failures.is_empty() {
                format!("c_I = {} (tight {})", start.constant.c_i, start.constant.tight_f64)
            } else {
                start_failures.join("; ")
            },
        ));
        details.push(json!({ "k": k, "decay": decay, "sharp_decay": sharp, "spectral": s, "starting_effects": start }));
    }

    let failures: Vec<String> =
        checks.iter().filter(|c| !c.pass).map(|c| format!("k={} {}: {}", c.k, c.name, c.detail)).collect();
    let mut csv = String::from("k,check,pass,detail\n");
    for c in &checks {
        csv.push_str(&format!("{},{},{},\"{}\"\n", c.k, c.name, c.pass, c.detail.replace('"', "'")));
    }
    let config = json!({
        "k": ks,
        "j_max": j_max,
        "m_list": spectral.m_list,
        "trials": spectral.trials,
        "form_n": spectral.form_n,
        "n_max": n_max,
        "flip_kernel_sign": args.flip_kernel_sign,
    });
    let results = json!({ "checks": checks, "details": details });
    Ok((config, Outcome::new(failures, results, csv)))
}
