//! Fractional Ornstein-Uhlenbeck processes driven by fractional
//! Brownian motion.
//!
//! The crate covers two constructions and the analytics connecting
//! them:
//!
//! * the Langevin equation dU = -alpha U dt + dZ with Z fractional
//!   Brownian motion (first kind), and
//! * the Langevin equation driven by the increment process Y extracted
//!   from the time-changed, exponentially damped copy of Z known from
//!   Doob's transform (second kind), whose memory is short for every
//!   Hurst index.
//!
//! Modules:
//!
//! * [`fbm`]: exact covariances and samplers for fractional Brownian
//!   motion (Cholesky, circulant embedding, two-sided extension).
//! * [`transforms`]: the deterministic time change, the driver process,
//!   Langevin solving, and path constructions for both process kinds.
//! * [`analytics`]: closed-form and quadrature-backed covariance
//!   functions, the moving-average kernel of the driver, and the
//!   constants in its Brownian scaling limit.
//! * [`estimation`]: empirical covariance, dependence-range
//!   diagnostics, decay-rate fitting, and the weak-convergence
//!   experiment.
//! * [`cli`]: the command-line front end (subcommand dispatch, run
//!   directories, CSV/SVG output).

pub mod analytics;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod fbm;
pub mod rng;
pub mod transforms;
pub mod types;

pub use error::{FouError, Result};
pub use types::{CovMatrix, Ensemble, ModelParams, ProcessKind, SamplePath, TimeGrid};
