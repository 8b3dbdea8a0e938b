use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::doc::compute_doc_kernels;
use crate::error::{Error, Result};
use crate::kernel::generate_bdf_kernels;
use crate::par::Execution;

pub const DEFAULT_SEED: u64 = 0x5EED;

/// `2 Σ_m w_m Σ_{j≤m} c_{m-j} w_j / Σ w_m²` for a kernel sequence `c`
/// (entries beyond `c.len()` are zero).
pub fn quadratic_form_ratio(c: &[f64], w: &[f64]) -> f64 {
    let norm: f64 = w.iter().map(|v| v * v).sum();
    quadratic_form(c, w) / norm
}

/// `2 Σ_m w_m Σ_{j≤m} c_{m-j} w_j`.
pub fn quadratic_form(c: &[f64], w: &[f64]) -> f64 {
    let mut total = 0.0;
    for (m, wm) in w.iter().enumerate() {
        let lo = (m + 1).saturating_sub(c.len());
        let inner: f64 = (lo..=m).map(|j| c[m - j] * w[j]).sum();
        total += wm * inner;
    }
    2.0 * total
}

/// Trial vector `trial`: uniform on `[-1, 1]`, from its own ChaCha stream so
/// every trial is reproducible independently of scheduling.
pub fn trial_vector(seed: u64, trial: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

fn check_sizes(k: usize, n: usize, trials: usize) -> Result<usize> {
    if n < k {
        return Err(Error::Precondition(format!("need n >= k, got n = {n}, k = {k}")));
    }
    if trials == 0 {
        return Err(Error::Precondition("need at least one trial".into()));
    }
    Ok(n - k + 1)
}

/// Smallest ratio of the `b`-form over `trials` random vectors `w_k..w_n`.
pub fn quadratic_form_check(k: usize, n: usize, trials: usize, seed: u64, exec: Execution) -> Result<f64> {
    let len = check_sizes(k, n, trials)?;
    let b = generate_bdf_kernels(k)?.to_f64();
    Ok(exec.min_f64(trials, |t| quadratic_form_ratio(&b, &trial_vector(seed, t as u64, len))))
}

/// Smallest ratio of the `θ`-form over `trials` random vectors.
pub fn doc_quadratic_form_min(k: usize, n: usize, trials: usize, seed: u64, exec: Execution) -> Result<f64> {
    let len = check_sizes(k, n, trials)?;
    let theta = compute_doc_kernels(&generate_bdf_kernels(k)?, len)?.to_f64();
    Ok(exec.min_f64(trials, |t| quadratic_form_ratio(&theta, &trial_vector(seed, t as u64, len))))
}

/// Whether every random `θ`-form is strictly positive.
pub fn doc_positive_definiteness_check(k: usize, n: usize, trials: usize, seed: u64, exec: Execution) -> Result<bool> {
    Ok(doc_quadratic_form_min(k, n, trials, seed, exec)? > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sigma;
    use proptest::prelude::*;

    #[test]
    fn single_spike() {
        let b = generate_bdf_kernels(3).unwrap().to_f64();
        assert!((quadratic_form_ratio(&b, &[1.0, 0.0, 0.0]) - 11.0 / 3.0).abs() < 1e-15);
        assert!((quadratic_form_ratio(&b, &[0.0, 0.0, 2.0]) - 11.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn one_term_doc_form() {
        let min = doc_quadratic_form_min(3, 3, 5, DEFAULT_SEED, Execution::Sequential).unwrap();
        assert!((min - 12.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn forms_bounded_by_sigma() {
        for k in 3..=5 {
            let s = sigma(k).unwrap().sigma;
            let min = quadratic_form_check(k, 50, 2000, DEFAULT_SEED, Execution::Parallel).unwrap();
            assert!(min >= s - 1e-9, "k = {k}: {min} < {s}");
            assert!(doc_positive_definiteness_check(k, 50, 2000, DEFAULT_SEED, Execution::Parallel).unwrap());
        }
    }

    #[test]
    fn reproducible_across_execution() {
        let a = quadratic_form_check(4, 30, 300, 7, Execution::Sequential).unwrap();
        let b = quadratic_form_check(4, 30, 300, 7, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_ne!(trial_vector(1, 0, 5), trial_vector(1, 1, 5));
        assert_eq!(trial_vector(1, 3, 5), trial_vector(1, 3, 5));
    }

    #[test]
    fn preconditions() {
        assert!(quadratic_form_check(3, 2, 10, 0, Execution::Sequential).is_err());
        assert!(quadratic_form_check(3, 10, 0, 0, Execution::Sequential).is_err());
        assert!(quadratic_form_check(6, 10, 1, 0, Execution::Sequential).is_err());
    }

    proptest! {
        #[test]
        fn b_form_above_sigma(k in 3usize..=5, w in prop::collection::vec(-1.0f64..1.0, 1..40)) {
            prop_assume!(w.iter().any(|v| v.abs() > 1e-3));
            let b = generate_bdf_kernels(k).unwrap().to_f64();
            let s = sigma(k).unwrap().sigma;
            prop_assert!(quadratic_form_ratio(&b, &w) >= s - 1e-9);
        }
    }
}
