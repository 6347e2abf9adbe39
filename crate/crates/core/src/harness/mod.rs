//! Verification harness: configuration, check suites, reports and exports.

pub mod config;
pub mod export;
pub mod report;
pub mod suites;

pub use config::{RunConfig, TOL_ENV};
pub use report::{CaseResult, CheckReport, Comparison, Status};
pub use suites::{run_suite, Suite};
