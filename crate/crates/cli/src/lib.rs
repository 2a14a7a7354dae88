//! Fixture registry, verification suites, demos and export for the
//! `procosh` driver.

pub mod demo;
pub mod export;
pub mod fixtures;
pub mod report;
pub mod suites;

pub use fixtures::Registry;
pub use report::VerificationReport;
pub use suites::{run_suite, Ctx, SUITES};
