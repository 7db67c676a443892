use thiserror::Error;

/// Errors raised by the solvers, quadrature routines and simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum VfpError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("quadrature did not converge after {refinements} refinements (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        refinements: u32,
        estimate: f64,
        error: f64,
    },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("root finding failed: {0}")]
    RootFindingFailure(String),
    #[error("well-depth ratio is unbounded above for a0 = {a0}")]
    UnboundedSup { a0: f64 },
    #[error("no fixed point found on [-{bracket}, {bracket}] at lambda = {lambda}")]
    BracketExhausted { lambda: f64, bracket: f64 },
    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("divergent integrand: {0}")]
    DivergentIntegrand(String),
    #[error("no sign change on ({lo}, {hi})")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("potential outside the supported class: {0}")]
    NotInPotentialClass(String),
    #[error("no phase transition at alpha = {alpha}: the symmetric measure is unique for every lambda in the search window")]
    NoTransition { alpha: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid too coarse: {nodes} nodes, at least {min} required per direction")]
    GridTooCoarse { nodes: usize, min: usize },
    #[error("hypothesis not met: {0}")]
    ConditionViolated(String),
    #[error("particle {particle} blew up at step {step} (|q| = {value:e})")]
    BlowUp {
        step: u64,
        particle: usize,
        value: f64,
    },
}

pub type Result<T> = std::result::Result<T, VfpError>;
