use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::grid::{Space, Tridiagonal};
use super::problem::ProblemSpec;
use super::tridiag;
use crate::error::{Error, Result};
use crate::kernel::{decay_rho, generate_bdf_kernels};
use crate::rational;

/// How `u^0..u^{k-1}` are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Startup {
    /// Samples the exact solution at `t_0..t_{k-1}`.
    ExactSolution,
    /// Marches from `u^0` on refined substeps of `τ/substeps`: each macro
    /// step is taken with implicit Euler at `j·substeps` substeps for
    /// `j = 1..=k+1` and the results are extrapolated to zero substep
    /// size, which makes the local error `O(τ^{k+2})`: one order more than
    /// the scheme needs, so the startup error stays well below the BDF-k
    /// error even on fine steps.
    CascadedBdf { substeps: usize },
    /// Uses the given levels `u^0..u^{k-1}` verbatim.
    Prescribed { values: Vec<Vec<f64>> },
}

impl Startup {
    /// Exact sampling when an exact solution is known, otherwise the
    /// cascade with `4^k` substeps.
    pub fn default_for(k: usize, problem: &ProblemSpec) -> Self {
        if problem.exact.is_some() {
            Startup::ExactSolution
        } else {
            Startup::CascadedBdf { substeps: default_substeps(k) }
        }
    }
}

pub fn default_substeps(k: usize) -> usize {
    4usize.pow(k as u32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub k: usize,
    pub tau: f64,
    pub num_steps: usize,
    /// `None` picks [`Startup::default_for`].
    pub startup: Option<Startup>,
}

impl SolverConfig {
    pub fn final_time(&self) -> f64 {
        self.tau * self.num_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.k) {
            return Err(Error::UnsupportedOrder(self.k, "1..=5"));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::Domain(format!("time step must be positive, got {}", self.tau)));
        }
        if self.num_steps + 1 < self.k {
            return Err(Error::Precondition(format!(
                "need at least k - 1 = {} steps, got {}",
                self.k - 1,
                self.num_steps
            )));
        }
        if let Some(Startup::CascadedBdf { substeps: 0 }) = self.startup {
            return Err(Error::Config("cascaded startup needs at least one substep".into()));
        }
        Ok(())
    }
}

/// `(7-k)/(7 ρ_k β*)`, the step restriction of the general stability bound.
/// `None` when it does not apply (`k < 3` or `β* = 0`).
pub fn step_restriction(k: usize, beta_star: f64) -> Option<f64> {
    let rho = rational::to_f64(&decay_rho(k)?);
    (beta_star > 0.0).then(|| (7.0 - k as f64) / (7.0 * rho * beta_star))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub norm: f64,
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub problem: String,
    pub k: usize,
    pub tau: f64,
    pub num_steps: usize,
    pub nodes: usize,
    pub startup: Startup,
    pub steps: Vec<StepRecord>,
    /// `‖∇_τ u^ℓ‖` for `ℓ = 1..k-1`.
    pub starting_difference_norms: Vec<f64>,
    /// `‖f^n‖` for `n = 0..N`.
    pub forcing_norms: Vec<f64>,
    pub final_error: Option<f64>,
    pub max_error: Option<f64>,
    pub beta_star: f64,
    /// Largest `β` seen on the grid over all time levels.
    pub beta_max_observed: f64,
    pub beta_time_dependent: bool,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub final_state: Vec<f64>,
}

impl RunRecord {
    /// `β = β(x) ≤ 0` on every sample.
    pub fn dissipative(&self) -> bool {
        !self.beta_time_dependent && self.beta_max_observed <= 0.0
    }

    pub fn norms(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.norm).collect()
    }
}

struct Stepper<'a> {
    problem: &'a ProblemSpec,
    space: &'a Space,
    nodes: Vec<f64>,
    operator: Tridiagonal,
    beta_max: f64,
}

impl Stepper<'_> {
    fn beta_at(&mut self, t: f64, step: usize) -> Result<Vec<f64>> {
        let beta: Vec<f64> = self.nodes.iter().map(|&x| (self.problem.beta)(x, t)).collect();
        let limit = self.problem.beta_star * (1.0 + 1e-12);
        for (&x, &b) in self.nodes.iter().zip(&beta) {
            if !b.is_finite() || b.abs() > limit {
                return Err(Error::Step {
                    step,
                    reason: format!("|beta({x}, {t})| = {} exceeds beta_star = {}", b.abs(), self.problem.beta_star),
                });
            }
            self.beta_max = self.beta_max.max(b);
        }
        Ok(beta)
    }

    fn forcing_at(&self, t: f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| (self.problem.forcing)(x, t)).collect()
    }

    /// Solves `(c I - A - diag β) u = rhs` with one step of iterative
    /// refinement. The assembled diagonal `c + 2ε/h² - β` rounds the shift
    /// against `ε/h²` identically in every row; that bias is invisible in
    /// one solve but accumulates over many steps. The residual, formed with
    /// the difference form of `A`, removes it.
    fn solve_shifted(&self, c: f64, beta: &[f64], rhs: &[f64], step: usize) -> Result<Vec<f64>> {
        let a = &self.operator;
        let lhs = Tridiagonal {
            lower: a.lower.iter().map(|v| -v).collect(),
            diag: a.diag.iter().zip(beta).map(|(d, b)| c - d - b).collect(),
            upper: a.upper.iter().map(|v| -v).collect(),
        };
        let fail = |e: Error| Error::Step { step, reason: e.to_string() };
        let mut u = tridiag::solve(&lhs, rhs).map_err(fail)?;
        if let Space::Grid(_) = self.space {
            let au = self.space.apply_operator(self.problem.epsilon, &u);
            let residual: Vec<f64> = rhs
                .iter()
                .zip(&u)
                .zip(beta.iter().zip(&au))
                .map(|((r, ui), (b, ai))| r - ((c - b) * ui - ai))
                .collect();
            let correction = tridiag::solve(&lhs, &residual).map_err(fail)?;
            for (ui, di) in u.iter_mut().zip(&correction) {
                *ui += di;
            }
        }
        Ok(u)
    }

    /// One implicit Euler step of size `h` ending at `t`.
    fn euler(&mut self, u: &[f64], t: f64, h: f64, step: usize) -> Result<Vec<f64>> {
        let beta = self.beta_at(t, step)?;
        let f = self.forcing_at(t);
        let rhs: Vec<f64> = u.iter().zip(&f).map(|(ui, fi)| ui / h + fi).collect();
        self.solve_shifted(1.0 / h, &beta, &rhs, step)
    }

    /// Advances `u` from `t0` by `tau` with extrapolated implicit Euler.
    fn extrapolated_step(
        &mut self,
        u: &[f64],
        t0: f64,
        tau: f64,
        order: usize,
        substeps: usize,
        step: usize,
    ) -> Result<Vec<f64>> {
        let counts: Vec<usize> = (1..=order).map(|j| j * substeps).collect();
        let mut table: Vec<Vec<f64>> = Vec::with_capacity(order);
        for &n in &counts {
            let h = tau / n as f64;
            let mut v = u.to_vec();
            for i in 1..=n {
                v = self.euler(&v, t0 + i as f64 * h, h, step)?;
            }
            table.push(v);
        }
        // Aitken–Neville for an error expansion in powers of h.
        for level in 1..order {
            for j in (level..order).rev() {
                let ratio = counts[j] as f64 / counts[j - level] as f64;
                let (prev, cur) = (table[j - 1].clone(), &mut table[j]);
                for (c, p) in cur.iter_mut().zip(&prev) {
                    *c += (*c - p) / (ratio - 1.0);
                }
            }
        }
        Ok(table.pop().expect("order >= 1"))
    }
}

fn startup_levels(stepper: &mut Stepper, config: &SolverConfig, startup: &Startup) -> Result<Vec<Vec<f64>>> {
    let k = config.k;
    let len = stepper.space.len();
    match startup {
        Startup::ExactSolution => (0..k)
            .map(|n| {
                stepper
                    .problem
                    .sample_exact(stepper.space, n as f64 * config.tau)
                    .ok_or_else(|| Error::Config("exact-solution startup needs an exact solution".into()))
            })
            .collect(),
        Startup::Prescribed { values } => {
            if values.len() != k {
                return Err(Error::Config(format!("prescribed startup needs {k} levels, got {}", values.len())));
            }
            if let Some(v) = values.iter().find(|v| v.len() != len) {
                return Err(Error::Dimension { expected: len, found: v.len() });
            }
            Ok(values.clone())
        }
        Startup::CascadedBdf { substeps } => {
            let mut levels = vec![stepper.problem.sample_initial(stepper.space)];
            for n in 1..k {
                let prev = levels.last().expect("initial level");
                let next =
                    stepper.extrapolated_step(prev, (n - 1) as f64 * config.tau, config.tau, k + 1, *substeps, n)?;
                levels.push(next);
            }
            Ok(levels)
        }
    }
}

/// Integrates `D_k u^n = εΔ_h u^n + β^n u^n + f^n` for `n = k..N`.
pub fn run(problem: &ProblemSpec, space: &Space, config: &SolverConfig) -> Result<RunRecord> {
    problem.validate()?;
    config.validate()?;
    let k = config.k;
    let tau = config.tau;
    let kernels = generate_bdf_kernels(k)?;
    let startup = config.startup.clone().unwrap_or_else(|| Startup::default_for(k, problem));

    let mut warnings = Vec::new();
    if let Some(limit) = step_restriction(k, problem.beta_star) {
        if tau > limit {
            warnings.push(format!("tau = {tau} exceeds the stability restriction (7-k)/(7 rho_k beta*) = {limit}"));
        }
    }

    let mut stepper = Stepper {
        problem,
        space,
        nodes: space.nodes(),
        operator: space.operator(problem.epsilon),
        beta_max: f64::NEG_INFINITY,
    };
    for n in 0..k {
        stepper.beta_at(n as f64 * tau, n)?;
    }
    let levels = startup_levels(&mut stepper, config, &startup)?;

    let mut steps = Vec::with_capacity(config.num_steps + 1);
    let mut forcing_norms = Vec::with_capacity(config.num_steps + 1);
    let mut record_level = |n: usize, u: &[f64], f_norm: f64, steps: &mut Vec<StepRecord>| {
        let t = n as f64 * tau;
        let error = problem.sample_exact(space, t).map(|e| {
            let diff: Vec<f64> = e.iter().zip(u).map(|(a, b)| a - b).collect();
            space.norm(&diff)
        });
        forcing_norms.push(f_norm);
        steps.push(StepRecord { step: n, t, norm: space.norm(u), error });
    };
    for (n, u) in levels.iter().enumerate() {
        let f_norm = space.norm(&stepper.forcing_at(n as f64 * tau));
        record_level(n, u, f_norm, &mut steps);
    }
    let starting_difference_norms: Vec<f64> = levels
        .windows(2)
        .map(|w| {
            let d: Vec<f64> = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
            space.norm(&d)
        })
        .collect();

    let b = kernels.to_f64();
    let mut history: VecDeque<Vec<f64>> = levels.into_iter().collect();
    for n in k..=config.num_steps {
        let t = n as f64 * tau;
        let beta = stepper.beta_at(t, n)?;
        let f = stepper.forcing_at(t);
        let au = space.apply_operator(problem.epsilon, &history[k - 1]);
        let rhs = increment_rhs(&b, &history, &au, &beta, &f, tau);
        let delta = stepper.solve_shifted(b[0] / tau, &beta, &rhs, n)?;
        let u: Vec<f64> = history[k - 1].iter().zip(&delta).map(|(u, d)| u + d).collect();
        record_level(n, &u, space.norm(&f), &mut steps);
        if !u.iter().all(|v| v.is_finite()) {
            return Err(Error::Step { step: n, reason: "solution is no longer finite".into() });
        }
        history.push_back(u);
        history.pop_front();
    }

    let final_error = steps.last().and_then(|s| s.error);
    let max_error = steps.iter().filter_map(|s| s.error).reduce(f64::max);
    let final_state = history.pop_back().expect("at least one level");
    Ok(RunRecord {
        problem: problem.name.clone(),
        k,
        tau,
        num_steps: config.num_steps,
        nodes: space.len(),
        startup,
        steps,
        starting_difference_norms,
        forcing_norms,
        final_error,
        max_error,
        beta_star: problem.beta_star,
        beta_max_observed: stepper.beta_max,
        beta_time_dependent: problem.beta_time_dependent,
        warnings,
        final_state,
    })
}

/// Right-hand side for the increment `δ = u^n - u^{n-1}`:
/// `f^n + (A + diag β^n) u^{n-1} - (1/τ) Σ_{j=1}^{k-1} b_j ∇_τ u^{n-j}`, with
/// `au = A u^{n-1}` and `history` holding `u^{n-k}..u^{n-1}`. Solving for the increment keeps the
/// rounding error of the stiff operator from accumulating in `u`.
fn increment_rhs(b: &[f64], history: &VecDeque<Vec<f64>>, au: &[f64], beta: &[f64], f: &[f64], tau: f64) -> Vec<f64> {
    let last = history.len() - 1;
    let mut rhs: Vec<f64> =
        f.iter().zip(au).zip(beta.iter().zip(&history[last])).map(|((fi, ai), (bi, ui))| fi + ai + bi * ui).collect();
    for (j, bj) in b.iter().enumerate().skip(1) {
        let (hi, lo) = (&history[last + 1 - j], &history[last - j]);
        for ((r, u1), u0) in rhs.iter_mut().zip(hi).zip(lo) {
            *r -= bj / tau * (u1 - u0);
        }
    }
    rhs
}
