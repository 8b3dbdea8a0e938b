//! One module per subcommand. Each takes its (file-overlaid) arguments,
//! applies defaults, and returns the resolved configuration for the report
//! echo together with the outcome.

mod certify;
mod converge;
mod doc;
mod kernels;
mod spectral;
mod stability;
mod starting;

pub use certify::{run as certify, CertifyArgs};
pub use converge::{run as converge, ConvergeArgs};
pub use doc::{run as doc, DocArgs};
pub use kernels::{run as kernels, KernelsArgs};
pub use spectral::{run as spectral, SpectralArgs};
pub use stability::{run as stability, StabilityArgs};
pub use starting::{run as starting, StartingArgs};

use bdfdoc_core::par::Execution;

/// Settings shared by all subcommands.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub seed: u64,
    pub exec: Execution,
}

/// Orders the certification commands analyse.
pub const ANALYSIS_ORDERS: [usize; 3] = [3, 4, 5];
