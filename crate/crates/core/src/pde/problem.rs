use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::Space;
use crate::error::{Error, Result};

pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `u_t = εu_xx + β(x,t)u + f(x,t)` on `(0, L)` with `u = 0` at both ends.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub epsilon: f64,
    pub beta: SpaceTimeFn,
    /// Claimed bound `|β| ≤ β*`, checked on the grid at every step.
    pub beta_star: f64,
    /// Whether `β` varies with `t`; the dissipative bound needs `β = β(x)`.
    pub beta_time_dependent: bool,
    pub forcing: SpaceTimeFn,
    pub initial: SpaceFn,
    pub exact: Option<SpaceTimeFn>,
    pub length: f64,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("epsilon", &self.epsilon)
            .field("beta_star", &self.beta_star)
            .field("beta_time_dependent", &self.beta_time_dependent)
            .field("has_exact", &self.exact.is_some())
            .field("length", &self.length)
            .finish()
    }
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Domain(format!("epsilon must be nonnegative, got {}", self.epsilon)));
        }
        if !(self.beta_star >= 0.0) {
            return Err(Error::Domain(format!("beta_star must be nonnegative, got {}", self.beta_star)));
        }
        if !(self.length > 0.0) {
            return Err(Error::Domain(format!("domain length must be positive, got {}", self.length)));
        }
        Ok(())
    }

    pub fn sample_initial(&self, space: &Space) -> Vec<f64> {
        space.nodes().iter().map(|&x| (self.initial)(x)).collect()
    }

    pub fn sample_exact(&self, space: &Space, t: f64) -> Option<Vec<f64>> {
        let exact = self.exact.as_ref()?;
        Some(space.nodes().iter().map(|&x| exact(x, t)).collect())
    }
}

/// How the forcing of the manufactured problem is built on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingMode {
    /// Uses the eigenvalue of the three-point Laplacian, so the sampled
    /// exact solution solves the semi-discrete system and the measured error
    /// is purely temporal.
    #[default]
    GridConsistent,
    /// Uses `π²`; the spatial truncation error then adds `O(h²)`.
    Continuous,
}

/// Named problem setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `u = e^{-t} sin(πx)` on `[0, 1]` with constant `β`.
    ManufacturedSine,
    /// Constant `β ≤ 0`, `f = 0`, `u_0 = sin(πx)`.
    DissipativeDecay,
    /// `β = β* sin t`, `f = 0`, `u_0 = sin(πx)`.
    OscillatingBeta,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::ManufacturedSine, Preset::DissipativeDecay, Preset::OscillatingBeta];

    pub fn name(self) -> &'static str {
        match self {
            Preset::ManufacturedSine => "manufactured_sine",
            Preset::DissipativeDecay => "dissipative_decay",
            Preset::OscillatingBeta => "oscillating_beta",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }
}

/// Tunable numbers of a preset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PresetParams {
    pub epsilon: f64,
    /// Constant reaction coefficient for the first two presets.
    pub beta: f64,
    /// Amplitude for `oscillating_beta`.
    pub beta_star: f64,
    pub forcing: ForcingMode,
}

impl Default for PresetParams {
    fn default() -> Self {
        Self { epsilon: 1.0, beta: -1.0, beta_star: 1.0, forcing: ForcingMode::GridConsistent }
    }
}

/// Decay rate of the `sin(πx)` mode under `εΔ` on the given space: the
/// discrete eigenvalue on a grid, `π²` in continuous mode, `0` for the
/// scalar problem.
fn mode_rate(space: &Space, epsilon: f64, forcing: ForcingMode) -> f64 {
    match (space, forcing) {
        (Space::Scalar, _) => 0.0,
        (Space::Grid(g), ForcingMode::GridConsistent) => epsilon * g.dirichlet_eigenvalue(1),
        (Space::Grid(g), ForcingMode::Continuous) => epsilon * (PI / g.length).powi(2),
    }
}

/// Builds a preset for a space. In scalar mode the spatial profile is the
/// constant 1 and `ε` is ignored.
pub fn build_preset(preset: Preset, params: &PresetParams, space: &Space) -> Result<ProblemSpec> {
    let scalar = matches!(space, Space::Scalar);
    let length = match space {
        Space::Grid(g) => g.length,
        Space::Scalar => 1.0,
    };
    let profile: SpaceFn = if scalar { Arc::new(|_| 1.0) } else { Arc::new(move |x: f64| (PI * x / length).sin()) };
    let p = *params;
    let spec = match preset {
        Preset::ManufacturedSine => {
            // u_t - εu_xx - βu = (-1 + εκ - β) e^{-t} φ(x)
            let rate = mode_rate(space, p.epsilon, p.forcing);
            let amp = -1.0 + rate - p.beta;
            let (pf, pe) = (profile.clone(), profile.clone());
            ProblemSpec {
                name: preset.name().into(),
                epsilon: p.epsilon,
                beta: Arc::new(move |_, _| p.beta),
                beta_star: p.beta.abs(),
                beta_time_dependent: false,
                forcing: Arc::new(move |x, t| amp * (-t).exp() * pf(x)),
                initial: profile,
                exact: Some(Arc::new(move |x, t| (-t).exp() * pe(x))),
                length,
            }
        }
        Preset::DissipativeDecay => {
            if p.beta > 0.0 {
                return Err(Error::Config(format!("dissipative_decay needs beta <= 0, got {}", p.beta)));
            }
            // Exact for the semi-discrete system; continuous mode uses π².
            let rate = mode_rate(space, p.epsilon, p.forcing) - p.beta;
            let pe = profile.clone();
            ProblemSpec {
                name: preset.name().into(),
                epsilon: p.epsilon,
                beta: Arc::new(move |_, _| p.beta),
                beta_star: p.beta.abs(),
                beta_time_dependent: false,
                forcing: Arc::new(|_, _| 0.0),
                initial: profile,
                exact: Some(Arc::new(move |x, t| (-rate * t).exp() * pe(x))),
                length,
            }
        }
        Preset::OscillatingBeta => {
            if !(p.beta_star >= 0.0) {
                return Err(Error::Config(format!("beta_star must be nonnegative, got {}", p.beta_star)));
            }
            let rate = mode_rate(space, p.epsilon, p.forcing);
            let amp = p.beta_star;
            let pe = profile.clone();
            ProblemSpec {
                name: preset.name().into(),
                epsilon: p.epsilon,
                beta: Arc::new(move |_, t| amp * t.sin()),
                beta_star: amp,
                beta_time_dependent: true,
                forcing: Arc::new(|_, _| 0.0),
                initial: profile,
                // u = exp(-κt + β*(1 - cos t)) φ(x)
                exact: Some(Arc::new(move |x, t| (-rate * t + amp * (1.0 - t.cos())).exp() * pe(x))),
                length,
            }
        }
    };
    spec.validate()?;
    Ok(spec)
}
