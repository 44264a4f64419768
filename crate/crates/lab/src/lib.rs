//! Verification suites, limit studies and conjecture search over
//! `meanlab-core`, plus the `meanlab` command-line front end.

pub mod cli;
pub mod conjecture;
pub mod error;
pub mod matfile;
pub mod report;
pub mod suites;

pub use error::{ExitStatus, LabError, LabResult};
pub use matfile::MatrixFile;
pub use report::{SuiteReport, SCHEMA_VERSION};
pub use suites::{run_verification_suite, SuiteConfig, SUITES};
