//! BDF-k time stepping for linear reaction–diffusion problems, together with
//! machinery that certifies the discrete orthogonal convolution (DOC) energy
//! analysis of those schemes.
//!
//! The crate is organised bottom-up:
//!
//! - [`rational`] and [`poly`] hold exact arithmetic helpers.
//! - [`kernel`] generates the BDF-k convolution kernels `b_j`.
//! - [`doc`] builds the DOC kernels `θ_j`, checks the orthogonality identities,
//!   finds characteristic roots and certifies geometric decay.
//! - [`spectral`] certifies positive definiteness through generating
//!   functions, Toeplitz eigenvalues and randomized quadratic forms.
//! - [`starting`] handles the starting-effect coefficients.
//! - [`pde`] integrates the 1D problem (and a scalar ODE mode).
//! - [`experiment`] wires everything into convergence and stability studies.
//!
//! Data-parallel loops go through [`par::Execution`]; with the `parallel`
//! feature disabled they always run sequentially.

// `!(x > 0.0)` is used on purpose: unlike `x <= 0.0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod doc;
pub mod error;
pub mod experiment;
pub mod kernel;
pub mod par;
pub mod pde;
pub mod poly;
pub mod rational;
pub mod spectral;
pub mod starting;

pub use error::{Error, Result};
pub use kernel::{bdf_apply, generate_bdf_kernels, BdfKernels};
pub use rational::Rational;
