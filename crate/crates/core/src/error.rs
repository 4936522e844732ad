use thiserror::Error;

use crate::tensor_core::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("metric is singular (|det| = {det:e})")]
    SingularMetric { det: f64 },
    #[error("metric is not positive definite (leading minor {minor:e})")]
    NotPositiveDefinite { minor: f64 },
    #[error("vectors span a degenerate plane (Q = {q:e})")]
    DegeneratePlane { q: f64 },
    #[error("seed has horizontal part of norm {norm:e}")]
    DegenerateSeed { norm: f64 },
    #[error("could not complete a phi-basis from the coordinate directions")]
    ExhaustedCandidates,
    #[error("K(X, xi) = lambda eta(X) xi fails with residual {residual:e}")]
    AcsViolated { residual: f64 },
    #[error("connection table has torsion (asymmetry {residual:e})")]
    TorsionPresent { residual: f64 },
    #[error("section vector is not orthogonal to xi (eta(X) = {eta:e})")]
    NotHorizontal { eta: f64 },
    #[error("phi-section is degenerate (Q = {q:e})")]
    DegenerateSection { q: f64 },
    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),
    #[error("unsupported dimension {0}: need an odd dimension of at least 3")]
    UnsupportedDimension(usize),
    #[error("invalid manifold spec: {0}")]
    Spec(String),
    #[error("unknown zoo entry `{0}`")]
    UnknownZooEntry(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
