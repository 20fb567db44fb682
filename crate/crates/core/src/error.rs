use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to map failures onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: geometry, ranges, files, mismatched grids.
    Validation,
    /// A numerical procedure did not produce a trustworthy answer.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("{name} = {value} is out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("energy {energy} lies outside the search window ({lo}, {hi})")]
    EnergyOutOfBracket { energy: f64, lo: f64, hi: f64 },

    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("incompatible intervals: outer [{outer_lo}, {outer_hi}] is not contained in inner [{inner_lo}, {inner_hi}]")]
    IncompatibleInterval {
        outer_lo: f64,
        outer_hi: f64,
        inner_lo: f64,
        inner_hi: f64,
    },

    #[error("factorization failed at E = {energy}")]
    Factorization { energy: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("no discrete eigenvalue below the discrete threshold {threshold} (lowest Schur eigenvalue {lowest})")]
    BracketEmpty { threshold: f64, lowest: f64 },

    #[error("quadratic form is not positive on the constraint set")]
    IndefiniteForm,

    #[error("linear constraints are degenerate on the grid")]
    ConstraintDegeneracy,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Factorization { .. }
            | Error::NoConvergence(_)
            | Error::BracketEmpty { .. }
            | Error::IndefiniteForm
            | Error::ConstraintDegeneracy => ErrorClass::Numerical,
            _ => ErrorClass::Validation,
        }
    }

    pub(crate) fn out_of_range(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::OutOfRange {
            name,
            value,
            reason: reason.into(),
        }
    }
}
