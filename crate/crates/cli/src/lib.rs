//! Command implementations behind the `fracctrl` binary.

pub mod commands;
pub mod config;
pub mod render;

use std::fmt;

/// Failure classes with stable exit codes. Attached to errors as context
/// and recovered by the binary when choosing the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    /// Unreadable, malformed or invalid configuration, or bad arguments.
    Config,
    /// The solver or a study failed.
    Solver,
    /// Cache verification found corrupt entries, or clearing was refused.
    Cache,
}

impl ExitClass {
    pub fn code(self) -> u8 {
        match self {
            ExitClass::Config => 2,
            ExitClass::Solver => 3,
            ExitClass::Cache => 4,
        }
    }

    /// The class attached to `err`, if any.
    pub fn of(err: &anyhow::Error) -> Option<Self> {
        err.downcast_ref::<ExitClass>().copied()
    }
}

impl fmt::Display for ExitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExitClass::Config => "configuration error",
            ExitClass::Solver => "solver failure",
            ExitClass::Cache => "cache error",
        })
    }
}

impl std::error::Error for ExitClass {}
