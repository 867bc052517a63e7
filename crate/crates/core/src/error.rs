use std::fmt;

use thiserror::Error;

/// Why a design was rejected. These are the failure codes written to sweep
/// tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureCode {
    NoExtremalQ2,
    NoRealization,
    SelfIntersecting,
    NoSaddle,
    SaddleNotShaky,
    /// The shakiness condition has no root with a real singular realization.
    NoShakyQ2,
}

impl FailureCode {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureCode::NoExtremalQ2 => "NO_EXTREMAL_Q2",
            FailureCode::NoRealization => "NO_REALIZATION",
            FailureCode::SelfIntersecting => "SELF_INTERSECTING",
            FailureCode::NoSaddle => "NO_SADDLE",
            FailureCode::SaddleNotShaky => "SADDLE_NOT_SHAKY",
            FailureCode::NoShakyQ2 => "NO_SHAKY_Q2",
        }
    }
}

impl fmt::Display for FailureCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid design: {0}")]
    InvalidSpec(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("degenerate design: {0}")]
    Degenerate(String),
    #[error("no real realization exists")]
    EmptySet,
    #[error("development overlaps itself: {0}")]
    Overlap(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("verification failed: {0}")]
    VerificationFailed(FailureCode),
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("saddle search did not converge: {0}")]
    NoPathConvergence(String),
    #[error("saddle is not a shaky configuration (normalized discriminant {0:e})")]
    SaddleNotShaky(f64),
    #[error("infinitesimal flex is trivial")]
    ZeroFlex,
    #[error("table has no usable rows")]
    EmptyTable,
    #[error("mesh is not closed: {0}")]
    NonClosedMesh(String),
    #[error("degenerate face {0}")]
    DegenerateFace(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Failure code for sweep tables, when the error maps onto one.
    pub fn failure_code(&self) -> Option<FailureCode> {
        match self {
            Error::VerificationFailed(code) => Some(*code),
            Error::SaddleNotShaky(_) => Some(FailureCode::SaddleNotShaky),
            Error::NoPathConvergence(_) => Some(FailureCode::NoSaddle),
            Error::EmptySet | Error::Degenerate(_) => Some(FailureCode::NoRealization),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
