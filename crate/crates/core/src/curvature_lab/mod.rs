//! Curvature of statistical structures on almost contact metric manifolds.

pub mod audits;
pub mod bracket;
pub mod sectional;

pub use audits::{
    full_audit, geodesic_xi, phi_compat_check, phi_derivative_identity, psi_check, vanishing_audit,
    AuditOptions, PhiCompatOutcome, VanishingConditions, VANISHING_CHECKS,
};
pub use bracket::{kk_bracket, kk_tensor, KKBracketAtPoint};
pub use sectional::{
    phi_sectional_k_curvature, phi_sectional_triple, statistical_curvature, sweep_sections,
    PhiSectionalTriple, PhiSectionalValue, StatisticalCurvatureAtPoint,
};
