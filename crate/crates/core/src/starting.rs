//! Starting effects: how the `k-1` prescribed initial differences enter the
//! DOC-transformed scheme at step `n`.
//!
//! Writing `u_I^{(k,n)} = Σ_{ℓ=1}^{k-1} c_ℓ(n) ∇_τ u^ℓ` with
//! `c_ℓ(n) = Σ_{j=k}^{n} θ_{n-j} b_{j-ℓ}`, every bound here is stated on the
//! coefficients, which implies the corresponding bound on `u_I` by the
//! triangle inequality.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::doc::{compute_doc_kernels, DocKernels};
use crate::error::{Error, Result};
use crate::kernel::{decay_rho, generate_bdf_kernels, BdfKernels};
use crate::rational::{self, int, rat, Rational};

pub const DEFAULT_N_MAX: usize = 400;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartingCoefficients {
    pub k: usize,
    pub n: usize,
    /// `c_1..c_{k-1}`.
    pub c: Vec<Rational>,
}

impl StartingCoefficients {
    /// `max_ℓ |c_ℓ|`, zero when `k = 1`.
    pub fn max_abs(&self) -> Rational {
        self.c.iter().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }

    /// `u_I^{(k,n)}` for the given initial differences `∇_τ u^1..∇_τ u^{k-1}`.
    pub fn apply(&self, differences: &[Vec<f64>]) -> Result<Vec<f64>> {
        if differences.len() != self.c.len() {
            return Err(Error::Dimension { expected: self.c.len(), found: differences.len() });
        }
        let len = differences.first().map_or(0, Vec::len);
        let mut out = vec![0.0; len];
        for (c, d) in self.c.iter().zip(differences) {
            if d.len() != len {
                return Err(Error::Dimension { expected: len, found: d.len() });
            }
            let c = rational::to_f64(c);
            out.iter_mut().zip(d).for_each(|(o, v)| *o += c * v);
        }
        Ok(out)
    }
}

/// Direct evaluation of `c_ℓ(n)`; the inner sum stops where `b_{j-ℓ}`
/// vanishes.
pub fn starting_coefficients(k: usize, n: usize, theta: &DocKernels, b: &BdfKernels) -> Result<StartingCoefficients> {
    check_order(k, theta, b)?;
    if n < k {
        return Err(Error::Precondition(format!("need n >= k, got n = {n}, k = {k}")));
    }
    if theta.len() < n - k + 1 {
        return Err(Error::Precondition(format!(
            "need {} DOC kernels for n = {n}, only {} computed",
            n - k + 1,
            theta.len()
        )));
    }
    let th = theta.values();
    let c = (1..k)
        .map(|l| (k..=n.min(l + k - 1)).fold(Rational::zero(), |acc, j| acc + &th[n - j] * b.get(j - l)))
        .collect();
    Ok(StartingCoefficients { k, n, c })
}

/// The simplified form valid once `n ≥ 2k-2`: the tail sums
/// `Σ_{m=k-ℓ}^{k-1} b_m θ_{n-ℓ-m}` for `ℓ < k-1`, and `-b_0 θ_{n-k+1}` for the
/// last coefficient (from the recurrence `Σ_m b_m θ_{p-m} = 0`).
pub fn simplified_starting_coefficients(
    k: usize,
    n: usize,
    theta: &DocKernels,
    b: &BdfKernels,
) -> Result<StartingCoefficients> {
    check_order(k, theta, b)?;
    if k < 2 || n < 2 * k - 2 {
        return Err(Error::Precondition(format!("simplified form needs k >= 2 and n >= {}", 2 * k.max(1) - 2)));
    }
    if theta.len() < n - k + 2 {
        return Err(Error::Precondition(format!("need {} DOC kernels", n - k + 2)));
    }
    let th = theta.values();
    let mut c: Vec<Rational> =
        (1..k - 1).map(|l| (k - l..k).fold(Rational::zero(), |acc, m| acc + b.get(m) * &th[n - l - m])).collect();
    c.push(-b.get(0) * &th[n - k + 1]);
    Ok(StartingCoefficients { k, n, c })
}

fn check_order(k: usize, theta: &DocKernels, b: &BdfKernels) -> Result<()> {
    if theta.order() != k || b.order() != k {
        return Err(Error::Precondition(format!(
            "order mismatch: k = {k}, DOC kernels k = {}, BDF kernels k = {}",
            theta.order(),
            b.order()
        )));
    }
    Ok(())
}

/// The certified starting-effect constant `c_{I,k}` for the envelope
/// `max_ℓ |c_ℓ(n)| ≤ (c_I ρ_k / 8)(k/7)^{n-k}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartingBoundConstant {
    pub k: usize,
    /// The constant used downstream: the classical value `11/7` for `k = 3`,
    /// otherwise `tight`. Always verified against every `n ≤ n_max_checked`.
    #[serde(serialize_with = "rational::serialize_fraction")]
    pub certified: Rational,
    /// `max(1, sup_n max_ℓ |c_ℓ(n)| · 8 / (ρ_k (k/7)^{n-k}))`.
    #[serde(serialize_with = "rational::serialize_fraction")]
    pub tight: Rational,
    pub c_i: f64,
    pub tight_f64: f64,
    /// Step at which the supremum is attained.
    pub sup_at: usize,
    pub n_max_checked: usize,
    /// `min_n (1 − max_ℓ|c_ℓ(n)| / envelope(n))` with the certified constant.
    pub envelope_slack_min: f64,
    pub valid: bool,
    /// `c_ℓ(n)` as fractions for `k ≤ n ≤ 2k-2`.
    pub base_cases: Vec<BaseCase>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseCase {
    pub n: usize,
    pub c: Vec<String>,
}

/// The classical `c_{I,k}` where one is known in closed form.
pub fn classical_constant(k: usize) -> Option<Rational> {
    (k == 3).then(|| rat(11, 7))
}

/// Envelope `(c ρ_k / 8)(k/7)^{n-k}` with `c = 1`.
fn unit_envelope(k: usize, n: usize) -> Option<Rational> {
    let rho = decay_rho(k)?;
    Some(rho / int(8) * rational::pow(&rat(k as i64, 7), n - k))
}

pub fn certify_starting_bound(k: usize, n_max: usize) -> Result<StartingBoundConstant> {
    if decay_rho(k).is_none() {
        return Err(Error::UnsupportedOrder(k, "3..=5"));
    }
    if n_max < k {
        return Err(Error::Precondition(format!("need n_max >= k, got n_max = {n_max}, k = {k}")));
    }
    let b = generate_bdf_kernels(k)?;
    let theta = compute_doc_kernels(&b, n_max - k + 1)?;

    // ratio(n) = max_ℓ|c_ℓ(n)| / unit_envelope(n)
    let mut ratios = Vec::with_capacity(n_max - k + 1);
    let mut base_cases = Vec::new();
    for n in k..=n_max {
        let c = starting_coefficients(k, n, &theta, &b)?;
        if n <= 2 * k - 2 {
            base_cases.push(BaseCase { n, c: c.c.iter().map(rational::fraction_string).collect() });
        }
        ratios.push(c.max_abs() / unit_envelope(k, n).expect("order checked above"));
    }
    let (sup_idx, sup) =
        ratios.iter().enumerate().max_by(|a, b| a.1.cmp(b.1)).map(|(i, r)| (i, r.clone())).expect("at least one step");
    let tight = if sup < Rational::one() { Rational::one() } else { sup };
    let certified = classical_constant(k).unwrap_or_else(|| tight.clone());
    let valid = ratios.iter().all(|r| *r <= certified);
    let worst = ratios.iter().max().expect("at least one step");
    let envelope_slack_min = 1.0 - rational::to_f64(&(worst / &certified));
    Ok(StartingBoundConstant {
        k,
        c_i: rational::to_f64(&certified),
        tight_f64: rational::to_f64(&tight),
        certified,
        tight,
        sup_at: k + sup_idx,
        n_max_checked: n_max,
        envelope_slack_min,
        valid,
        base_cases,
    })
}

/// Accumulated starting effects over `k ≤ j ≤ n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeStartingSum {
    pub k: usize,
    pub n: usize,
    /// `Σ_j max_ℓ |c_ℓ(j)|`.
    pub max_sum: f64,
    /// `Σ_j |c_ℓ(j)|` for each `ℓ`.
    pub per_ell: Vec<f64>,
    /// `7 c_{I,k} ρ_k / (8(7-k))` with the certified constant.
    #[serde(serialize_with = "rational::serialize_fraction")]
    pub bound: Rational,
    pub within_bound: bool,
}

pub fn cumulative_starting_sum(k: usize, n: usize) -> Result<CumulativeStartingSum> {
    let c_i = certify_starting_bound(k, n.max(k))?.certified;
    cumulative_starting_sum_with(k, n, &c_i)
}

/// As [`cumulative_starting_sum`] with a caller-supplied `c_{I,k}`.
pub fn cumulative_starting_sum_with(k: usize, n: usize, c_i: &Rational) -> Result<CumulativeStartingSum> {
    let rho = decay_rho(k).ok_or(Error::UnsupportedOrder(k, "3..=5"))?;
    if n < k {
        return Err(Error::Precondition(format!("need n >= k, got n = {n}, k = {k}")));
    }
    let b = generate_bdf_kernels(k)?;
    let theta = compute_doc_kernels(&b, n - k + 1)?;
    let mut max_sum = Rational::zero();
    let mut per_ell = vec![Rational::zero(); k - 1];
    for j in k..=n {
        let c = starting_coefficients(k, j, &theta, &b)?;
        max_sum += c.max_abs();
        per_ell.iter_mut().zip(&c.c).for_each(|(s, v)| *s += v.abs());
    }
    let bound = int(7) * c_i * rho / int(8 * (7 - k as i64));
    let within_bound = max_sum <= bound && per_ell.iter().all(|s| *s <= bound);
    Ok(CumulativeStartingSum {
        k,
        n,
        max_sum: rational::to_f64(&max_sum),
        per_ell: per_ell.iter().map(rational::to_f64).collect(),
        bound,
        within_bound,
    })
}
