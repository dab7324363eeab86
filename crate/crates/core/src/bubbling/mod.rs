//! Limits of degenerating families of zero configurations as bubble trees,
//! and a finite-scale convergence check.

mod convergence;
mod extract;
mod family;

use thiserror::Error;

use crate::stable_maps::Violation;

pub use convergence::{
    check_convergence, check_convergence_with, verdict, ConditionReport, ConvergenceCondition,
    ConvergenceReport, Verdict, CONVERGENCE_TOLERANCE, ROUNDOFF,
};
pub use extract::{
    extract_bubble_tree, ExponentLevel, Extraction, ExtractionReport, PairExponent, VertexReport,
    LEVEL_GAP, MIN_SCALES,
};
pub use family::{ConfigurationFamily, MobiusFamily};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BubblingError {
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("ambiguous growth exponents: {detail}")]
    AmbiguousExponents { detail: String },
    #[error("extracted tree is not stable: {}", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    UnstableLimit { violations: Vec<Violation> },
    #[error("inconsistent sizes: {0}")]
    SizeMismatch(String),
}
