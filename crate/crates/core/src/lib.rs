//! Numerical engine for almost contact statistical manifolds.
//!
//! A structure `(g, φ, ξ, η, ∇ = ∇° + K)` lives on one coordinate chart as
//! symbolic component fields. Derivatives come from forward-mode dual
//! numbers, so Christoffel symbols and curvature are exact up to rounding
//! for polynomial and elementary-function inputs.
//!
//! The main entry points are [`zoo`] for ready-made structures,
//! [`spec_file`] for loading charts from TOML, and [`commands`] for the
//! validate / curvature / audit runs used by the `acsm` binary.

pub mod almost_contact;
pub mod commands;
pub mod curvature_lab;
pub mod error;
pub mod manifold;
pub mod metric_geometry;
pub mod report;
pub mod spec_file;
pub mod statistical;
pub mod tensor;
pub mod tensor_core;
pub mod zoo;

pub use error::{Error, Result};
pub use manifold::{ChartManifold, PointFrame};
pub use report::AuditReport;
