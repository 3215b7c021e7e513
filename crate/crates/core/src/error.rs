use alloc::string::String;

use thiserror::Error;

/// Failures of the analytical solvers. Queue ids are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("queue {queue} is unstable: utilization {rho:.6} >= 1")]
    UnstableQueue { queue: usize, rho: f64 },
    #[error("singular linear system while solving {what}")]
    SingularSystem { what: &'static str },
    #[error("queue {queue}: arrival SCV solved to {value:e}, which is negative")]
    NegativeScv { queue: usize, value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Failures of the simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("simulation diverged: queue {queue} holds {len} packets (cap {cap})")]
    SimDiverged { queue: usize, len: usize, cap: usize },
    #[error("invalid simulation input: {0}")]
    InvalidInput(String),
}
