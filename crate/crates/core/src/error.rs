use thiserror::Error;

use crate::support::Interval;

/// Errors raised by model construction, bound computation and the samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("x = {x} lies outside the support {support}")]
    OutsideSupport { x: f64, support: Interval },

    #[error("term index {index} out of range for a model with {len} terms")]
    TermIndex { index: usize, len: usize },

    #[error("{what} requires x {requirement}, got x = {x}")]
    Sign {
        what: &'static str,
        requirement: &'static str,
        x: f64,
    },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid support set: {0}")]
    InvalidSupport(String),

    #[error("support set must contain 0 because 0 lies in the closure of the domain {0}")]
    MissingZeroSupport(Interval),

    #[error("rho must be finite and >= 1, got {0}")]
    InvalidRho(f64),

    #[error("envelope has infinite mass on {0}: the reduced potential has no finite lower bound there (choose another proposal term)")]
    InfiniteEnvelope(Interval),

    #[error("ratio-of-uniforms region is unbounded on {0}: tails too heavy; increase rho")]
    UnboundedRegion(Interval),

    #[error("degenerate cone [{lo}, {hi}]")]
    DegenerateCone { lo: f64, hi: f64 },

    #[error("proposal density does not match term {0} of the model")]
    ProposalMismatch(usize),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
