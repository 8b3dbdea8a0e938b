//! Right-hand sides of the two energy stability bounds, evaluated on a
//! recorded run.

use serde::Serialize;

use super::solver::{step_restriction, RunRecord};
use crate::error::{Error, Result};
use crate::kernel::decay_rho;
use crate::rational::{self, Rational};
use crate::starting::{certify_starting_bound, DEFAULT_N_MAX};

/// `ρ_k` and the certified `c_{I,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityConstants {
    pub rho: f64,
    pub c_i: f64,
}

impl StabilityConstants {
    /// `ρ_k` together with `c_{I,k}` from [`certify_starting_bound`].
    pub fn certified(k: usize) -> Result<Self> {
        let rho = decay_rho(k).ok_or(Error::UnsupportedOrder(k, "3..=5"))?;
        let c_i = certify_starting_bound(k, DEFAULT_N_MAX)?.certified;
        Ok(Self::from_rationals(&rho, &c_i))
    }

    pub fn from_rationals(rho: &Rational, c_i: &Rational) -> Self {
        Self { rho: rational::to_f64(rho), c_i: rational::to_f64(c_i) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `β = β(x) ≤ 0`, no step restriction.
    Dissipative,
    /// `|β| ≤ β*` under `τ ≤ (7-k)/(7 ρ_k β*)`.
    General,
}

/// Bound values for steps `n ≥ k`; `None` for the starting levels.
pub fn theoretical_stability_bound(
    record: &RunRecord,
    constants: &StabilityConstants,
    kind: BoundKind,
) -> Result<Vec<Option<f64>>> {
    let k = record.k;
    if decay_rho(k).is_none() {
        return Err(Error::UnsupportedOrder(k, "3..=5"));
    }
    let q = 7.0 - k as f64;
    let (rho, c_i, tau) = (constants.rho, constants.c_i, record.tau);
    let norms = record.norms();
    let mut out = vec![None; k.min(norms.len())];
    let mut forcing_sum = 0.0;
    match kind {
        BoundKind::Dissipative => {
            let diffs: f64 = record.starting_difference_norms.iter().sum();
            let base = norms[k - 1] + 7.0 * c_i * rho / (4.0 * q) * diffs;
            for n in k..norms.len() {
                forcing_sum += tau * record.forcing_norms[n];
                out.push(Some(base + 7.0 * rho / (2.0 * q) * forcing_sum));
            }
        }
        BoundKind::General => {
            let lead = 7.0 * rho / q;
            let start: f64 = norms[..k].iter().sum();
            for n in k..norms.len() {
                forcing_sum += tau * record.forcing_norms[n];
                let t = (n - k) as f64 * tau;
                out.push(Some(lead * (lead * record.beta_star * t).exp() * (c_i * start + forcing_sum)));
            }
        }
    }
    Ok(out)
}

/// Outcome of comparing a run with the applicable bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub kind: BoundKind,
    /// `false` when the run does not satisfy the bound's hypotheses; no
    /// comparison is made then.
    pub hypotheses_met: bool,
    pub reason: Option<String>,
    pub bound: Vec<Option<f64>>,
    pub first_violation: Option<usize>,
    /// `max_n ‖u^n‖ / bound_n`.
    pub max_ratio: f64,
}

impl BoundCheck {
    pub fn pass(&self) -> bool {
        self.hypotheses_met && self.first_violation.is_none()
    }
}

/// Relative tolerance for `‖u^n‖ ≤ bound_n`.
pub const BOUND_TOL: f64 = 1e-12;

/// Picks the dissipative bound when `β = β(x) ≤ 0`, otherwise the general
/// bound, and compares it with the recorded norms.
pub fn check_stability(record: &RunRecord, constants: &StabilityConstants) -> Result<BoundCheck> {
    let kind = if record.dissipative() { BoundKind::Dissipative } else { BoundKind::General };
    let reason = match kind {
        BoundKind::Dissipative => None,
        BoundKind::General => step_restriction(record.k, record.beta_star)
            .filter(|&limit| record.tau > limit)
            .map(|limit| format!("tau = {} exceeds (7-k)/(7 rho_k beta*) = {limit}", record.tau)),
    };
    let bound = theoretical_stability_bound(record, constants, kind)?;
    if let Some(reason) = reason {
        return Ok(BoundCheck {
            kind,
            hypotheses_met: false,
            reason: Some(reason),
            bound,
            first_violation: None,
            max_ratio: f64::NAN,
        });
    }
    let mut first_violation = None;
    let mut max_ratio: f64 = 0.0;
    for (s, b) in record.steps.iter().zip(&bound) {
        let Some(b) = b else { continue };
        if s.norm > b * (1.0 + BOUND_TOL) && first_violation.is_none() {
            first_violation = Some(s.step);
        }
        if *b > 0.0 {
            max_ratio = max_ratio.max(s.norm / b);
        } else if s.norm > 0.0 {
            max_ratio = f64::INFINITY;
        }
    }
    Ok(BoundCheck { kind, hypotheses_met: true, reason: None, bound, first_violation, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::grid::{Grid1D, Space};
    use crate::pde::problem::{build_preset, Preset, PresetParams};
    use crate::pde::solver::{run, SolverConfig, Startup};
    use crate::rational::{int, rat};

    fn constants(k: usize) -> StabilityConstants {
        let c = match k {
            3 => rat(11, 7),
            4 => rat(92, 75),
            _ => int(1),
        };
        StabilityConstants::from_rationals(&decay_rho(k).unwrap(), &c)
    }

    #[test]
    fn certified_constants() {
        let c = StabilityConstants::certified(3).unwrap();
        assert_eq!(c, constants(3));
        assert!(StabilityConstants::certified(2).is_err());
    }

    #[test]
    fn zero_data_gives_zero_bound() {
        let space = Space::Grid(Grid1D::unit(8).unwrap());
        let mut p = build_preset(Preset::DissipativeDecay, &PresetParams::default(), &space).unwrap();
        p.initial = std::sync::Arc::new(|_| 0.0);
        p.exact = None;
        let cfg = SolverConfig { k: 3, tau: 0.1, num_steps: 10, startup: Some(Startup::CascadedBdf { substeps: 2 }) };
        let r = run(&p, &space, &cfg).unwrap();
        let check = check_stability(&r, &constants(3)).unwrap();
        assert!(check.bound.iter().flatten().all(|&b| b == 0.0));
        assert!(check.pass());
    }

    #[test]
    fn dissipative_run_dominated() {
        let space = Space::Grid(Grid1D::unit(63).unwrap());
        let p = build_preset(Preset::DissipativeDecay, &PresetParams::default(), &space).unwrap();
        for k in 3..=5 {
            let cfg = SolverConfig { k, tau: 0.01, num_steps: 100, startup: None };
            let r = run(&p, &space, &cfg).unwrap();
            let check = check_stability(&r, &constants(k)).unwrap();
            assert_eq!(check.kind, BoundKind::Dissipative);
            assert!(check.pass(), "k = {k}: {:?}", check.first_violation);
        }
    }

    #[test]
    fn general_run_under_restriction() {
        let p = build_preset(Preset::OscillatingBeta, &PresetParams::default(), &Space::Scalar).unwrap();
        let cfg = SolverConfig { k: 4, tau: 1.0 / 14.0, num_steps: 70, startup: None };
        let r = run(&p, &Space::Scalar, &cfg).unwrap();
        let check = check_stability(&r, &constants(4)).unwrap();
        assert_eq!(check.kind, BoundKind::General);
        assert!(check.pass());
    }

    #[test]
    fn hypotheses_unmet_beyond_restriction() {
        let p = build_preset(Preset::OscillatingBeta, &PresetParams::default(), &Space::Scalar).unwrap();
        let tau = 10.0 * step_restriction(3, 1.0).unwrap();
        let cfg = SolverConfig { k: 3, tau, num_steps: 10, startup: None };
        let r = run(&p, &Space::Scalar, &cfg).unwrap();
        let check = check_stability(&r, &constants(3)).unwrap();
        assert!(!check.hypotheses_met && !check.pass());
        assert!(check.reason.is_some());
    }

    #[test]
    fn dissipative_formula_by_hand() {
        // Scalar u' = -u with prescribed start: the bound is
        // |u^2| + (7 c ρ /16)(|∇u^1| + |∇u^2|) + 0.
        let p = build_preset(Preset::DissipativeDecay, &PresetParams::default(), &Space::Scalar).unwrap();
        let start = Startup::Prescribed { values: vec![vec![1.0], vec![0.9], vec![0.8]] };
        let cfg = SolverConfig { k: 3, tau: 0.1, num_steps: 4, startup: Some(start) };
        let r = run(&p, &Space::Scalar, &cfg).unwrap();
        let c = constants(3);
        let b = theoretical_stability_bound(&r, &c, BoundKind::Dissipative).unwrap();
        let expected = 0.8 + 7.0 * (11.0 / 7.0) * (10.0 / 3.0) / 16.0 * 0.2;
        assert_eq!(b[..3], [None, None, None]);
        assert!((b[3].unwrap() - expected).abs() < 1e-14);
        assert_eq!(b[3], b[4]);
    }
}
