//! Differential-privacy statistics core.
//!
//! `no_std` with `alloc`. The crate holds everything that does not touch the
//! outside world:
//!
//! * [`mechanisms`]: Laplace, bounded Laplace, Gaussian, randomized response
//!   and exponential mechanisms over a seeded [`rng::UniformSource`].
//! * [`sensitivity`]: closed-form change-one sensitivities for count, sum,
//!   mean and variance, plus an exhaustive oracle.
//! * [`queries`]: the DP aggregates and the named privacy levels.
//! * [`column`]: validated numeric columns and bounds inference.
//! * [`accountant`]: sequential-composition budget ledger.
//! * [`bench`]: ε sweeps and error metrics.
//!
//! CSV ingestion, persistence and the command line live in the `gramdp` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod accountant;
pub mod bench;
pub mod column;
pub mod error;
pub mod mechanisms;
pub mod queries;
pub mod rng;
pub mod sensitivity;
#[cfg(feature = "test-hooks")]
#[doc(hidden)]
pub mod testing;

pub use accountant::{BudgetLedger, Charge};
pub use column::{clamp_to_bounds, infer_bounds, NumericColumn};
pub use error::{Error, Result};
pub use mechanisms::{NoiseScale, OutputRange, PrivacyParams};
pub use queries::{run_query, DpResult, Privacy, PrivacyLevel, QuerySpec};
pub use rng::{RngStream, ScriptedUniforms, UniformSource};
pub use sensitivity::{BoundedDomain, QueryKind};
