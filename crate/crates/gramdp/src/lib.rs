//! Standard-library companion to `gramdp-core`: CSV ingestion, the persistent
//! budget ledger, sweep report files and the `gramdp` command line.

pub mod cli;
pub mod error;
pub mod ingest;
pub mod ledger;
pub mod report;

pub use error::{AppError, Result};
