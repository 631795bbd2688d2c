//! Polynomial algebra over exact rationals: dense univariate and sparse
//! multivariate polynomials, compositional decomposition, detection of
//! additive/multiplicative composite forms, and classification of
//! polynomial families into translation/scaling classes.
//!
//! Every algorithm in this module is exact: candidates are produced by
//! triangular coefficient solves or root extractions over the rationals
//! and then confirmed by symbolic recomposition, so a returned witness is
//! a proof and a rejection is a genuine non-existence verdict at the
//! probed degrees.

mod classify;
mod decompose;
mod detect;
mod multipoly;
mod parse;
mod unipoly;

pub use classify::{classify_family, eps_structured, EpsVerdict, FamilyClass, PolyFamily};
pub use decompose::{decompose_uni, Decomposition};
pub use detect::{detect_addmul, AddMulForm};
pub use multipoly::MultiPoly;
pub use parse::{parse_family, parse_poly, parse_surface_poly, parse_uni};
pub use unipoly::UniPoly;

use thiserror::Error;

/// The two composite shapes the detector and the family classifier share:
/// a one-parameter family of translates `outer(inner + a)` or of dilates
/// `outer(inner * a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompositeKind {
    Additive,
    Multiplicative,
}

impl std::fmt::Display for CompositeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompositeKind::Additive => write!(f, "additive"),
            CompositeKind::Multiplicative => write!(f, "multiplicative"),
        }
    }
}

/// Errors for parsing and structural polynomial operations.
#[derive(Debug, Error, PartialEq, Clone)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("arity mismatch: polynomial has {expected} variables, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("operation requires degree at least {required}, polynomial has degree {actual}")]
    DegreeTooSmall { required: usize, actual: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("polynomial family must be nonempty")]
    EmptyFamily,
    #[error("polynomial family members must be nonconstant (member {index} is constant)")]
    ConstantMember { index: usize },
    #[error("structure threshold must lie strictly between 0 and 1, got {0}")]
    InvalidEps(f64),
    #[error("division by the zero polynomial")]
    DivisionByZero,
}
