//! BDF-k integration of `u_t = εu_xx + β(x,t)u + f` on an interval with
//! homogeneous Dirichlet ends, discretized by central differences, plus a
//! scalar ODE mode with no spatial operator.

mod bounds;
mod grid;
mod problem;
mod solver;
pub mod tridiag;

pub use bounds::{check_stability, theoretical_stability_bound, BoundCheck, BoundKind, StabilityConstants, BOUND_TOL};
pub use grid::{assemble_operator, Grid1D, Space, Tridiagonal};
pub use problem::{build_preset, ForcingMode, Preset, PresetParams, ProblemSpec, SpaceFn, SpaceTimeFn};
pub use solver::{default_substeps, run, step_restriction, RunRecord, SolverConfig, Startup, StepRecord};
