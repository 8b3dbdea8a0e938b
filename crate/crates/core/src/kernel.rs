//! BDF-k convolution kernels.
//!
//! The k-step formula is written as a convolution of backward differences,
//! `D_k v^n = (1/τ) Σ_{j=0}^{k-1} b_j (v^{n-j} - v^{n-j-1})`, where the `b_j`
//! are the coefficients of `Σ_{l=1}^{k} (1/l)(1-ζ)^{l-1}` in powers of `ζ`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

pub const MIN_ORDER: usize = 1;
pub const MAX_ORDER: usize = 5;

/// The kernels `b_0..b_{k-1}` of BDF-k. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdfKernels {
    k: usize,
    b: Vec<Rational>,
}

impl BdfKernels {
    /// Wraps arbitrary coefficients without checking them against the
    /// generating polynomial. Meant for negative controls and experiments
    /// with perturbed kernels.
    pub fn from_coefficients(b: Vec<Rational>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::Precondition("kernel sequence must be non-empty".into()));
        }
        if b[0].is_zero() {
            return Err(Error::Precondition("b_0 must be nonzero".into()));
        }
        Ok(Self { k: b.len(), b })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.b
    }

    /// `b_j`, zero for `j >= k`.
    pub fn get(&self, j: usize) -> Rational {
        self.b.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.b.iter().map(rational::to_f64).collect()
    }

    /// Returns a copy with `b_j` negated.
    pub fn with_flipped_sign(&self, j: usize) -> Result<Self> {
        if j >= self.k {
            return Err(Error::Precondition(format!("no kernel b_{j} for k = {}", self.k)));
        }
        let mut b = self.b.clone();
        b[j] = -b[j].clone();
        Self::from_coefficients(b)
    }
}

/// Expands the generating polynomial for `k` in `1..=5`.
///
/// `(1-ζ)^{l-1}` is built by repeated convolution with `[1, -1]`, so the
/// whole expansion stays in exact rationals.
pub fn generate_bdf_kernels(k: usize) -> Result<BdfKernels> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&k) {
        return Err(Error::UnsupportedOrder(k, "1..=5"));
    }
    let mut b = vec![Rational::zero(); k];
    let mut power = vec![Rational::one()];
    for l in 1..=k {
        let weight = Rational::new(1.into(), (l as i64).into());
        for (acc, c) in b.iter_mut().zip(&power) {
            *acc += &weight * c;
        }
        let mut next = vec![Rational::zero(); power.len() + 1];
        for (i, c) in power.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c;
        }
        power = next;
    }
    Ok(BdfKernels { k, b })
}

/// Applies `D_k` to the history `v^{n-k}, ..., v^n` (oldest first).
pub fn bdf_apply(kernels: &BdfKernels, history: &[Vec<f64>], tau: f64) -> Result<Vec<f64>> {
    let k = kernels.order();
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("time step must be positive, got {tau}")));
    }
    if history.len() != k + 1 {
        return Err(Error::Dimension { expected: k + 1, found: history.len() });
    }
    let len = history[0].len();
    if let Some(bad) = history.iter().find(|v| v.len() != len) {
        return Err(Error::Dimension { expected: len, found: bad.len() });
    }
    let b = kernels.to_f64();
    let newest = k;
    let mut out = vec![0.0; len];
    for (j, bj) in b.iter().enumerate() {
        let upper = &history[newest - j];
        let lower = &history[newest - j - 1];
        for ((o, u), l) in out.iter_mut().zip(upper).zip(lower) {
            *o += bj * (u - l);
        }
    }
    out.iter_mut().for_each(|o| *o /= tau);
    Ok(out)
}

/// Exact version of [`bdf_apply`] for scalar rational histories.
pub fn bdf_apply_exact(kernels: &BdfKernels, history: &[Rational], tau: &Rational) -> Result<Rational> {
    let k = kernels.order();
    if history.len() != k + 1 {
        return Err(Error::Dimension { expected: k + 1, found: history.len() });
    }
    if *tau <= Rational::zero() {
        return Err(Error::Domain("time step must be positive".into()));
    }
    let sum = kernels
        .coefficients()
        .iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (j, bj)| acc + bj * (&history[k - j] - &history[k - j - 1]));
    Ok(sum / tau)
}

/// Table values for `k = 2..=5`, used by the CLI as a hard oracle.
pub fn reference_table(k: usize) -> Option<Vec<Rational>> {
    use rational::rat;
    Some(match k {
        2 => vec![rat(3, 2), rat(-1, 2)],
        3 => vec![rat(11, 6), rat(-7, 6), rat(1, 3)],
        4 => vec![rat(25, 12), rat(-23, 12), rat(13, 12), rat(-1, 4)],
        5 => vec![rat(137, 60), rat(-163, 60), rat(137, 60), rat(-21, 20), rat(1, 5)],
        _ => return None,
    })
}

/// The decay constant `ρ_k` of the DOC kernel bound `|θ_j| ≤ (ρ_k/4)(k/7)^j`.
pub fn decay_rho(k: usize) -> Option<Rational> {
    use rational::rat;
    match k {
        3 => Some(rat(10, 3)),
        4 => Some(int(6)),
        5 => Some(rat(96, 5)),
        _ => None,
    }
}
