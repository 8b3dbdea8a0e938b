//! Positive definiteness of the BDF-k kernels: generating-function minima,
//! Toeplitz eigenvalue sandwiches and randomized quadratic forms.

mod forms;
mod genfun;
mod surd;
mod toeplitz;

use std::collections::BTreeMap;

use serde::Serialize;

pub use forms::{
    doc_positive_definiteness_check, doc_quadratic_form_min, quadratic_form, quadratic_form_check,
    quadratic_form_ratio, trial_vector, DEFAULT_SEED,
};
pub use genfun::{minimize_generating_function, GeneratingFunction, SigmaBound};
pub use surd::{sqrt_parts, QuadSurd};
pub use toeplitz::{build_toeplitz, max_eigenvalue, min_eigenvalue, ToeplitzForm, DEFAULT_EIGEN_TOL};

use crate::error::Result;
use crate::kernel::generate_bdf_kernels;
use crate::par::Execution;

pub const DEFAULT_M_LIST: [usize; 4] = [50, 100, 200, 400];
pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_FORM_N: usize = 50;
/// Slack allowed below `σ_k` for the eigenvalue sandwich.
pub const EIGEN_SLACK: f64 = 1e-8;
/// Slack allowed below `σ_k` for randomized quadratic forms.
pub const FORM_SLACK: f64 = 1e-6;
const ROOT_TOL: f64 = 1e-12;

/// `σ_k` and `max g` for the BDF-k kernels.
pub fn sigma(k: usize) -> Result<SigmaBound> {
    minimize_generating_function(&GeneratingFunction::new(&generate_bdf_kernels(k)?), ROOT_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub k: usize,
    pub sigma: f64,
    pub sigma_exact: Option<String>,
    pub argmin_cos: f64,
    pub g_max: f64,
    pub lambda_min_by_m: BTreeMap<usize, f64>,
    pub lambda_max_by_m: BTreeMap<usize, f64>,
    pub quadratic_form_min: f64,
    pub doc_form_min: f64,
    pub trials: usize,
    pub seed: u64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SpectralSettings {
    pub m_list: Vec<usize>,
    pub trials: usize,
    pub form_n: usize,
    pub seed: u64,
    pub eigen_tol: f64,
}

impl Default for SpectralSettings {
    fn default() -> Self {
        Self {
            m_list: DEFAULT_M_LIST.to_vec(),
            trials: DEFAULT_TRIALS,
            form_n: DEFAULT_FORM_N,
            seed: DEFAULT_SEED,
            eigen_tol: DEFAULT_EIGEN_TOL,
        }
    }
}

/// Runs the full certification for one `k`. The per-`m` eigenvalue cells run
/// through `exec` and are merged by `m`.
pub fn certify_spectral(k: usize, settings: &SpectralSettings, exec: Execution) -> Result<SpectralReport> {
    let kernels = generate_bdf_kernels(k)?;
    let s = minimize_generating_function(&GeneratingFunction::new(&kernels), ROOT_TOL)?;
    let cells = exec.map_slice(&settings.m_list, |&m| -> Result<(usize, f64, f64)> {
        let t = build_toeplitz(&kernels, m)?;
        Ok((m, min_eigenvalue(&t, settings.eigen_tol)?, max_eigenvalue(&t, settings.eigen_tol)?))
    });
    let mut lambda_min_by_m = BTreeMap::new();
    let mut lambda_max_by_m = BTreeMap::new();
    for cell in cells {
        let (m, lo, hi) = cell?;
        lambda_min_by_m.insert(m, lo);
        lambda_max_by_m.insert(m, hi);
    }
    let quadratic_form_min = quadratic_form_check(k, settings.form_n, settings.trials, settings.seed, exec)?;
    let doc_form_min = doc_quadratic_form_min(k, settings.form_n, settings.trials, settings.seed, exec)?;
    let sandwich = lambda_min_by_m.values().all(|&l| l >= s.sigma - EIGEN_SLACK)
        && lambda_max_by_m.values().all(|&l| l <= s.g_max + EIGEN_SLACK);
    let pass = s.sigma > 0.0 && sandwich && quadratic_form_min >= s.sigma - FORM_SLACK && doc_form_min > 0.0;
    Ok(SpectralReport {
        k,
        sigma: s.sigma,
        sigma_exact: s.exact_form,
        argmin_cos: s.argmin_cos,
        g_max: s.g_max,
        lambda_min_by_m,
        lambda_max_by_m,
        quadratic_form_min,
        doc_form_min,
        trials: settings.trials,
        seed: settings.seed,
        pass,
    })
}
