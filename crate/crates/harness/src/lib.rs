//! Instance generators, instance files, the suite runner and the
//! non-commuting 3x3 demonstration for `qprob-core`.

pub mod config;
pub mod generate;
pub mod instance;
pub mod remark;
pub mod suite;

pub use config::SuiteConfig;
pub use instance::Instance;
pub use suite::{run_suite, SuiteReport, VerifierKind};

#[derive(Debug, Clone, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] qprob_core::Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INEQUALITY_FAILURE: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
}
