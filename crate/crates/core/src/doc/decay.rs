use num_traits::{Signed, Zero};
use serde::Serialize;

use super::DocKernels;
use crate::error::{Error, Result};
use crate::kernel::decay_rho;
use crate::rational::{self, rat, Rational};

/// Geometric envelope `scale · ratio^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecayBound {
    pub scale: Rational,
    pub ratio: Rational,
}

impl DecayBound {
    /// `(ρ_k/4)(k/7)^j` for `k` in `3..=5`.
    pub fn geometric(k: usize) -> Option<Self> {
        let rho = decay_rho(k)?;
        Some(Self { scale: rho / rat(4, 1), ratio: rat(k as i64, 7) })
    }

    /// The per-order bounds `(5/6)(3/7)^j`, `(3/2)(4/7)^j`, `(24/5)(5/7)^j`,
    /// stated separately from the ρ_k envelope.
    pub fn sharp(k: usize) -> Option<Self> {
        let scale = match k {
            3 => rat(5, 6),
            4 => rat(3, 2),
            5 => rat(24, 5),
            _ => return None,
        };
        Some(Self { scale, ratio: rat(k as i64, 7) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub k: usize,
    /// `ρ_k`, or `4·scale` for a custom envelope.
    #[serde(serialize_with = "rational::serialize_fraction")]
    pub rho: Rational,
    #[serde(serialize_with = "rational::serialize_fraction")]
    pub ratio: Rational,
    pub j_max: usize,
    /// `min_j (bound_j − |θ_j|)` as a float.
    pub max_slack: f64,
    pub valid: bool,
    pub first_violation: Option<usize>,
}

/// Exact check of `|θ_j| ≤ (ρ_k/4)(k/7)^j` for `0 ≤ j ≤ j_max`.
pub fn certify_decay(theta: &DocKernels, j_max: usize) -> Result<DecayCertificate> {
    let k = theta.order();
    let bound = DecayBound::geometric(k).ok_or(Error::UnsupportedOrder(k, "3..=5"))?;
    certify_decay_with(theta, &bound, j_max)
}

pub fn certify_decay_with(theta: &DocKernels, bound: &DecayBound, j_max: usize) -> Result<DecayCertificate> {
    if theta.len() < j_max + 1 {
        return Err(Error::Precondition(format!("need {} DOC kernels, only {} computed", j_max + 1, theta.len())));
    }
    let mut envelope = bound.scale.clone();
    let mut min_slack: Option<Rational> = None;
    let mut first_violation = None;
    for (j, t) in theta.values()[..=j_max].iter().enumerate() {
        let slack = &envelope - t.abs();
        if slack.is_negative() && first_violation.is_none() {
            first_violation = Some(j);
        }
        if min_slack.as_ref().is_none_or(|m| slack < *m) {
            min_slack = Some(slack);
        }
        envelope *= &bound.ratio;
    }
    Ok(DecayCertificate {
        k: theta.order(),
        rho: &bound.scale * rat(4, 1),
        ratio: bound.ratio.clone(),
        j_max,
        max_slack: min_slack.map(|s| rational::to_f64(&s)).unwrap_or(0.0),
        valid: first_violation.is_none(),
        first_violation,
    })
}

impl DecayCertificate {
    pub fn is_valid(&self) -> bool {
        self.valid && !self.rho.is_zero()
    }
}
