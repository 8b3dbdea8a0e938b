//! Convergence and stability studies built on the solver, plus the
//! deterministic CSV formatting used by every report.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::pde::{
    build_preset, check_stability, run, BoundCheck, Grid1D, Preset, PresetParams, RunRecord, SolverConfig, Space,
    StabilityConstants, Startup,
};

/// Mean observed order must be within this of `k`.
pub const MEAN_ORDER_TOL: f64 = 0.2;
/// Every pairwise order must be at least `k` minus this.
pub const PAIRWISE_ORDER_SLACK: f64 = 0.35;
/// Largest relative change of the final error allowed when `M` is doubled.
pub const SPATIAL_CHANGE_TOL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub k: usize,
    pub taus: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log(e_i/e_{i+1}) / log(τ_i/τ_{i+1})`, i.e. `log₂(e_i/e_{i+1})` for a
    /// halving ladder.
    pub pairwise_orders: Vec<f64>,
    pub mean_order: f64,
    pub spatial_check: Option<SpatialCheck>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialCheck {
    pub m: usize,
    pub m_refined: usize,
    pub errors_refined: Vec<f64>,
    /// `max_i |e_i(2M) - e_i(M)| / e_i(M)`.
    pub max_relative_change: f64,
    pub pass: bool,
}

/// Observed orders from a ladder of final errors.
pub fn order_report(k: usize, taus: &[f64], errors: &[f64]) -> Result<OrderReport> {
    if taus.len() != errors.len() {
        return Err(Error::Dimension { expected: taus.len(), found: errors.len() });
    }
    if taus.len() < 2 {
        return Err(Error::Precondition("need at least two step sizes".into()));
    }
    let pairwise_orders: Vec<f64> =
        (0..taus.len() - 1).map(|i| (errors[i] / errors[i + 1]).ln() / (taus[i] / taus[i + 1]).ln()).collect();
    let mean_order = pairwise_orders.iter().sum::<f64>() / pairwise_orders.len() as f64;
    let kf = k as f64;
    let pass =
        (mean_order - kf).abs() <= MEAN_ORDER_TOL && pairwise_orders.iter().all(|&p| p >= kf - PAIRWISE_ORDER_SLACK);
    Ok(OrderReport {
        k,
        taus: taus.to_vec(),
        errors: errors.to_vec(),
        pairwise_orders,
        mean_order,
        spatial_check: None,
        pass,
    })
}

/// Strictly decreasing, positive, and each `T/τ` an integer.
pub fn validate_ladder(taus: &[f64], final_time: f64) -> Result<Vec<usize>> {
    if taus.len() < 2 {
        return Err(Error::Config("the step ladder needs at least two entries".into()));
    }
    if taus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("step ladder entries must be strictly decreasing".into()));
    }
    taus.iter().map(|&tau| step_count(tau, final_time)).collect()
}

/// `T/τ`, which must be a positive integer.
pub fn step_count(tau: f64, final_time: f64) -> Result<usize> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Config(format!("step sizes must be positive, got {tau}")));
    }
    let n = final_time / tau;
    let rounded = n.round();
    if rounded < 1.0 || (n - rounded).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::Config(format!("final time {final_time} is not a multiple of tau = {tau}")));
    }
    Ok(rounded as usize)
}

/// Spatial setting of a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceMode {
    Scalar,
    Pde,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSettings {
    pub k: usize,
    pub preset: Preset,
    pub params: PresetParams,
    pub mode: SpaceMode,
    /// Interior nodes in PDE mode.
    pub m: usize,
    pub taus: Vec<f64>,
    pub final_time: f64,
    pub startup: Option<Startup>,
    /// Repeat every cell at `2M` and require the final error to move by less
    /// than [`SPATIAL_CHANGE_TOL`].
    pub spatial_check: bool,
}

/// The halving ladder `1/20, 1/40, 1/80, 1/160`.
pub fn default_ladder() -> Vec<f64> {
    vec![1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0]
}

impl ConvergenceSettings {
    pub fn scalar(k: usize) -> Self {
        Self {
            k,
            preset: Preset::ManufacturedSine,
            params: PresetParams::default(),
            mode: SpaceMode::Scalar,
            m: 1024,
            taus: default_ladder(),
            final_time: 1.0,
            startup: None,
            spatial_check: false,
        }
    }

    pub fn pde(k: usize, m: usize) -> Self {
        Self { mode: SpaceMode::Pde, m, spatial_check: true, ..Self::scalar(k) }
    }

    fn space(&self, m: usize) -> Result<Space> {
        Ok(match self.mode {
            SpaceMode::Scalar => Space::Scalar,
            SpaceMode::Pde => Space::Grid(Grid1D::unit(m)?),
        })
    }
}

fn final_error(settings: &ConvergenceSettings, m: usize, tau: f64, steps: usize) -> Result<f64> {
    let space = settings.space(m)?;
    let problem = build_preset(settings.preset, &settings.params, &space)?;
    let config = SolverConfig { k: settings.k, tau, num_steps: steps, startup: settings.startup.clone() };
    run(&problem, &space, &config)?
        .final_error
        .ok_or_else(|| Error::Config(format!("preset {} has no exact solution", problem.name)))
}

/// Runs the ladder (and the refined-grid ladder when requested) with one
/// cell per `(M, τ)`; results are assembled in ladder order.
pub fn convergence_study(settings: &ConvergenceSettings, exec: Execution) -> Result<OrderReport> {
    let steps = validate_ladder(&settings.taus, settings.final_time)?;
    let refine = settings.spatial_check && settings.mode == SpaceMode::Pde;
    let mut cells: Vec<(usize, f64, usize)> =
        settings.taus.iter().zip(&steps).map(|(&t, &n)| (settings.m, t, n)).collect();
    if refine {
        cells.extend(settings.taus.iter().zip(&steps).map(|(&t, &n)| (2 * settings.m, t, n)));
    }
    let results = exec.map_slice(&cells, |&(m, tau, n)| final_error(settings, m, tau, n));
    let results: Vec<f64> = results.into_iter().collect::<Result<_>>()?;
    let (coarse, refined) = results.split_at(settings.taus.len());
    let mut report = order_report(settings.k, &settings.taus, coarse)?;
    if refine {
        let max_relative_change = coarse.iter().zip(refined).map(|(a, b)| (b - a).abs() / a.abs()).fold(0.0, f64::max);
        let pass = max_relative_change < SPATIAL_CHANGE_TOL;
        report.pass &= pass;
        report.spatial_check = Some(SpatialCheck {
            m: settings.m,
            m_refined: 2 * settings.m,
            errors_refined: refined.to_vec(),
            max_relative_change,
            pass,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySettings {
    pub k: usize,
    pub preset: Preset,
    pub params: PresetParams,
    pub mode: SpaceMode,
    pub m: usize,
    pub tau: f64,
    pub final_time: f64,
    pub startup: Option<Startup>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub record: RunRecord,
    pub constants: StabilityConstants,
    pub check: BoundCheck,
}

impl StabilityReport {
    pub fn pass(&self) -> bool {
        self.check.pass()
    }

    /// `hypotheses unmet` when the bound does not apply.
    pub fn status(&self) -> &'static str {
        if !self.check.hypotheses_met {
            "hypotheses unmet"
        } else if self.check.pass() {
            "pass"
        } else {
            "fail"
        }
    }
}

pub fn stability_study(settings: &StabilitySettings) -> Result<StabilityReport> {
    let steps = step_count(settings.tau, settings.final_time)?;
    let space = match settings.mode {
        SpaceMode::Scalar => Space::Scalar,
        SpaceMode::Pde => Space::Grid(Grid1D::unit(settings.m)?),
    };
    let problem = build_preset(settings.preset, &settings.params, &space)?;
    let config = SolverConfig { k: settings.k, tau: settings.tau, num_steps: steps, startup: settings.startup.clone() };
    let record = run(&problem, &space, &config)?;
    let constants = StabilityConstants::certified(settings.k)?;
    let check = check_stability(&record, &constants)?;
    Ok(StabilityReport { record, constants, check })
}

/// Fixed 17-significant-digit scientific form, so identical runs produce
/// byte-identical files.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// `k,step,t,norm,error,bound` rows for one or more stability reports; the
/// bound is empty on the starting levels.
pub fn stability_csv(reports: &[StabilityReport]) -> String {
    let mut out = String::from("k,step,t,norm,error,bound\n");
    for r in reports {
        for (s, b) in r.record.steps.iter().zip(&r.check.bound) {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.record.k,
                s.step,
                fmt_f64(s.t),
                fmt_f64(s.norm),
                fmt_opt(s.error),
                fmt_opt(*b)
            ));
        }
    }
    out
}

/// `k,tau,error,order,error_refined` rows; `order` is the order between this
/// row and the previous one.
pub fn order_csv(reports: &[OrderReport]) -> String {
    let mut out = String::from("k,tau,error,order,error_refined\n");
    for r in reports {
        for (i, (tau, e)) in r.taus.iter().zip(&r.errors).enumerate() {
            let order = if i == 0 { None } else { Some(r.pairwise_orders[i - 1]) };
            let refined = r.spatial_check.as_ref().map(|c| c.errors_refined[i]);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.k,
                fmt_f64(*tau),
                fmt_f64(*e),
                fmt_opt(order),
                fmt_opt(refined)
            ));
        }
    }
    out
}
