use std::fmt;

use thiserror::Error;

/// Which end of the periodic box a tail check failed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Left,
    Right,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Left => f.write_str("left"),
            Boundary::Right => f.write_str("right"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what}: |f| = {value:.3e} at the {boundary} boundary exceeds tail tolerance {tolerance:.1e}")]
    DecayViolation {
        what: String,
        boundary: Boundary,
        value: f64,
        tolerance: f64,
    },

    #[error("train needs at least two members (got {0})")]
    InsufficientMembers(usize),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("unsupported kink orientation: {0}")]
    UnsupportedOrientation(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("numerical divergence at t = {time}")]
    Divergence { time: f64 },

    #[error("contraction failed after {} iterates (last ratios {:?})", .report.iterates, .report.ratios.iter().rev().take(2).collect::<Vec<_>>())]
    ContractionFailure {
        report: Box<crate::fixedpoint::PicardReport>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
