//! Error type shared across the library.
//!
//! Errors fall into two classes that map onto process exit codes:
//! configuration/validation problems (exit 2) and numerical failures
//! detected while solving (exit 3).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a dilation matrix: {0}")]
    NotDilation(String),

    #[error("unknown bank id: {0}")]
    UnknownBank(String),

    #[error("non-refinable mask: {0}")]
    NonRefinable(String),

    #[error("time evaluation unavailable: {0}")]
    TimeEvalUnavailable(String),

    #[error("Lambda search exhausted at xi = {anchor:?} (radius {radius}): found {found} of {needed} shifts")]
    LambdaExhausted {
        anchor: Vec<f64>,
        radius: i64,
        found: usize,
        needed: usize,
    },

    #[error("SNR undefined for zero signal")]
    SnrUndefined,

    #[error("lattice match ambiguous: node phase {phase} matches {first:?} and {second:?}")]
    LatticeAmbiguous {
        phase: f64,
        first: Vec<i64>,
        second: Vec<i64>,
    },

    #[error("node off-lattice: phase {phase} has no box candidate within {tol} (closest {dist} at {closest:?})")]
    NodeOffLattice {
        phase: f64,
        tol: f64,
        dist: f64,
        closest: Vec<i64>,
    },

    #[error("sparsity exceeded: union support has {got} locations but sparsity is {limit}")]
    SparsityExceeded { got: usize, limit: usize },

    #[error("Phi-hat system ill-conditioned at (j={level}, gamma={gamma}, m'={m_prime}): condition {cond:.3e}")]
    IllConditioned {
        level: usize,
        gamma: i64,
        m_prime: usize,
        cond: f64,
    },

    #[error("mask matrix singular at gamma={gamma} (level {level}): sigma_min {sigma_min:.3e}")]
    MaskSingular {
        level: usize,
        gamma: i64,
        sigma_min: f64,
    },

    #[error("reconstruction mismatch: re-measured signal deviates by {mismatch:.3e} (> {tol:.1e}); per-level residuals {per_level:?}")]
    VerifyMismatch {
        mismatch: f64,
        tol: f64,
        per_level: Vec<f64>,
    },

    #[error("measurement set is missing frequency {xi:?} required by the plan")]
    MissingFrequency { xi: Vec<f64> },

    #[error("plan hash mismatch: measurements were taken for {got}, plan is {expected}")]
    PlanHashMismatch { got: String, expected: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Exit code class: 2 for validation problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::LambdaExhausted { .. }
            | Error::LatticeAmbiguous { .. }
            | Error::NodeOffLattice { .. }
            | Error::SparsityExceeded { .. }
            | Error::IllConditioned { .. }
            | Error::MaskSingular { .. }
            | Error::NonRefinable(_)
            | Error::VerifyMismatch { .. } => 3,
            _ => 2,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
