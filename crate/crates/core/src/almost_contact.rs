//! Almost contact metric structures `(φ, ξ, η, g)`: axiom checks, φ-bases and
//! the cosymplectic condition `∇°φ = 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::manifold::ChartManifold;
use crate::metric_geometry::{check_positive_definite, christoffel, MIN_LEADING_MINOR};
use crate::metric_geometry::{covariant_derivative_11_at, eval_fields_with_gradient};
use crate::report::AuditReport;
use crate::tensor::{basis_vector, inner, norm};
use crate::tensor_core::{Point, ScalarField};

/// Singular value below which φ is treated as having a kernel.
pub const RANK_ZERO: f64 = 1e-9;
/// Singular value above which a direction counts toward the rank.
pub const RANK_NONZERO: f64 = 1e-6;
/// Agreement required between an explicit η and `g ξ`.
pub const ETA_CONSISTENCY: f64 = 1e-12;
/// Symmetry required of mirrored metric entries.
pub const METRIC_SYMMETRY: f64 = 1e-12;
pub const DEGENERATE_SEED: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct AlmostContactData {
    /// `φ^i_j`, row-major.
    pub phi: Vec<ScalarField>,
    pub xi: Vec<ScalarField>,
    /// Explicit η; derived as `η_i = g_ij ξ^j` when absent.
    pub eta: Option<Vec<ScalarField>>,
}

/// Orthonormal frame `(e_1, …, e_n, φe_1, …, φe_n, ξ)` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiBasis {
    pub n: usize,
    pub vectors: Vec<DVector<f64>>,
}

impl PhiBasis {
    /// The `2n` vectors orthogonal to ξ.
    pub fn horizontal(&self) -> &[DVector<f64>] {
        &self.vectors[..2 * self.n]
    }

    pub fn xi(&self) -> &DVector<f64> {
        &self.vectors[2 * self.n]
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_residual(&self, g: &DMatrix<f64>) -> f64 {
        let mut m: f64 = 0.0;
        for (a, u) in self.vectors.iter().enumerate() {
            for (b, v) in self.vectors.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                m = m.max((inner(g, u, v) - target).abs());
            }
        }
        m
    }

    /// Largest `|v_{n+i} − φ v_i|`.
    pub fn phi_residual(&self, phi: &DMatrix<f64>) -> f64 {
        (0..self.n)
            .map(|i| (&self.vectors[self.n + i] - phi * &self.vectors[i]).amax())
            .fold(0.0, f64::max)
    }
}

/// Builds a φ-basis starting from the horizontal part of `seed`.
pub fn phi_basis_at(
    g: &DMatrix<f64>,
    phi: &DMatrix<f64>,
    xi: &DVector<f64>,
    eta: &DVector<f64>,
    seed: &DVector<f64>,
) -> Result<PhiBasis> {
    let d = g.nrows();
    let n = (d - 1) / 2;
    let h = seed - xi * eta.dot(seed);
    let h_norm = norm(g, &h);
    if h_norm < DEGENERATE_SEED {
        return Err(Error::DegenerateSeed { norm: h_norm });
    }
    let mut es = vec![h / h_norm];
    let mut fs = vec![phi * &es[0]];
    let mut candidate = 0;
    while es.len() < n {
        let mut accepted = None;
        while candidate < d && accepted.is_none() {
            let mut v = basis_vector(d, candidate);
            candidate += 1;
            // two Gram-Schmidt passes
            for _ in 0..2 {
                for u in es.iter().chain(fs.iter()).chain(std::iter::once(xi)) {
                    let c = inner(g, &v, u) / inner(g, u, u);
                    v -= u * c;
                }
            }
            let vn = norm(g, &v);
            if vn > 1e-6 {
                accepted = Some(v / vn);
            }
        }
        let e = accepted.ok_or(Error::ExhaustedCandidates)?;
        fs.push(phi * &e);
        es.push(e);
    }
    let mut vectors = es;
    vectors.extend(fs);
    vectors.push(xi.clone());
    Ok(PhiBasis { n, vectors })
}

pub fn phi_basis(m: &ChartManifold, p: &Point, seed: &DVector<f64>) -> Result<PhiBasis> {
    let s = StructureAtPoint::eval(m, p)?;
    phi_basis_at(&s.g, &s.phi, &s.xi, &s.eta, seed)
}

/// The algebraic data `(g, φ, ξ, η)` at a point.
#[derive(Debug, Clone)]
pub struct StructureAtPoint {
    pub g: DMatrix<f64>,
    pub phi: DMatrix<f64>,
    pub xi: DVector<f64>,
    pub eta: DVector<f64>,
    pub eta_explicit: Option<DVector<f64>>,
}

impl StructureAtPoint {
    pub fn eval(m: &ChartManifold, p: &Point) -> Result<StructureAtPoint> {
        let d = m.dim();
        let g = m.metric.eval(p)?;
        let phi_v = m
            .structure
            .phi
            .iter()
            .map(|f| f.eval(p))
            .collect::<Result<Vec<_>, _>>()?;
        let xi = DVector::from_vec(
            m.structure
                .xi
                .iter()
                .map(|f| f.eval(p))
                .collect::<Result<Vec<_>, _>>()?,
        );
        let eta_explicit = match &m.structure.eta {
            Some(e) => Some(DVector::from_vec(
                e.iter().map(|f| f.eval(p)).collect::<Result<Vec<_>, _>>()?,
            )),
            None => None,
        };
        let eta = eta_explicit.clone().unwrap_or_else(|| &g * &xi);
        Ok(StructureAtPoint {
            phi: DMatrix::from_row_slice(d, d, &phi_v),
            g,
            xi,
            eta,
            eta_explicit,
        })
    }
}

/// Residuals of the axioms and derived identities of an almost contact
/// metric structure at `p`, recorded as assertions.
pub fn validate_structure(m: &ChartManifold, p: &Point, tol: f64) -> Result<AuditReport> {
    let s = StructureAtPoint::eval(m, p)?;
    let mut rep = AuditReport::new();
    let at = p.coords();
    let symmetry = m.metric.symmetry_residual(std::slice::from_ref(p))?;
    rep.assert("metric.symmetric", at, symmetry, METRIC_SYMMETRY);
    let minor = match check_positive_definite(&s.g) {
        Ok(min) => min,
        Err(Error::NotPositiveDefinite { minor }) => minor,
        Err(e) => return Err(e),
    };
    rep.assert_flag(
        "metric.positive_definite",
        at,
        (MIN_LEADING_MINOR - minor).max(0.0),
        minor > MIN_LEADING_MINOR,
    );
    structure_residuals(&s, tol, at, &mut rep);
    Ok(rep)
}

/// Appends the almost contact checks for evaluated data.
pub fn structure_residuals(s: &StructureAtPoint, tol: f64, at: &[f64], rep: &mut AuditReport) {
    let d = s.g.nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let (g, phi, xi, eta) = (&s.g, &s.phi, &s.xi, &s.eta);

    let phi2 = phi * phi;
    let target = -&id + xi * eta.transpose();
    rep.assert(
        "almost_contact.phi_squared",
        at,
        (&phi2 - target).amax(),
        tol,
    );
    rep.assert(
        "almost_contact.eta_of_xi",
        at,
        (eta.dot(xi) - 1.0).abs(),
        tol,
    );

    let mut sv: Vec<f64> = phi.clone().singular_values().iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    let rank_ok = sv[0] < RANK_ZERO && sv.get(1).is_none_or(|&s2| s2 > RANK_NONZERO);
    rep.assert_flag("almost_contact.rank_phi", at, sv[0], rank_ok);

    // g(φX, φY) − g(X, Y) + η(X)η(Y) over the coordinate basis
    let compat = phi.transpose() * g * phi - g + eta * eta.transpose();
    rep.assert("almost_contact.metric_compatible", at, compat.amax(), tol);

    rep.assert("almost_contact.phi_xi", at, (phi * xi).amax(), tol);
    rep.assert(
        "almost_contact.eta_phi",
        at,
        (eta.transpose() * phi).amax(),
        tol,
    );
    rep.assert(
        "almost_contact.g_xi_xi",
        at,
        (inner(g, xi, xi) - 1.0).abs(),
        tol,
    );
    let eta_gap = (eta - g * xi).amax();
    let eta_tol = if s.eta_explicit.is_some() {
        ETA_CONSISTENCY
    } else {
        tol
    };
    rep.assert("almost_contact.eta_equals_g_xi", at, eta_gap, eta_tol);
    // g(φX, Y) + g(X, φY)
    let skew = phi.transpose() * g + g * phi;
    rep.assert("almost_contact.phi_skew", at, skew.amax(), tol);
    // g(X, φX) = 0 and g(φ²X, Y) = −g(φX, φY)
    let mut gxphix: f64 = 0.0;
    for i in 0..d {
        let x = basis_vector(d, i);
        gxphix = gxphix.max(inner(g, &x, &(phi * &x)).abs());
    }
    rep.assert("almost_contact.g_x_phi_x", at, gxphix, tol);
    let lhs = phi2.transpose() * g;
    let rhs = -(phi.transpose() * g * phi);
    rep.assert(
        "almost_contact.phi_squared_metric",
        at,
        (lhs - rhs).amax(),
        tol,
    );
}

/// Cosymplectic decision: `max |∇°φ| ≤ tol` over the sample points.
pub fn is_cosymplectic(m: &ChartManifold, points: &[Point], tol: f64) -> Result<(bool, f64)> {
    let mut worst: f64 = 0.0;
    for p in points {
        worst = worst.max(levi_civita_phi_residual(m, p)?);
    }
    Ok((worst <= tol, worst))
}

/// `max_i |∇°_i φ|` at `p`.
pub fn levi_civita_phi_residual(m: &ChartManifold, p: &Point) -> Result<f64> {
    let d = m.dim();
    let gamma = christoffel(&m.metric, p)?;
    let (vals, grads) = eval_fields_with_gradient(&m.structure.phi, p)?;
    let phi = DMatrix::from_row_slice(d, d, &vals);
    let mut worst: f64 = 0.0;
    for (i, grad) in grads.iter().enumerate() {
        let dphi = DMatrix::from_row_slice(d, d, grad);
        worst = worst.max(covariant_derivative_11_at(&gamma.0, &phi, &dphi, i).amax());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn zoo_examples_satisfy_axioms_exactly() {
        let e = zoo::example_flat_acs(1).unwrap();
        let rep =
            validate_structure(&e.manifold, &Point::from(&[0.0, 0.0, 0.0][..]), 1e-9).unwrap();
        assert!(rep.passed());
        for r in &rep.records {
            assert_eq!(r.residual, 0.0, "{}", r.check);
        }
        let e = zoo::example_r3_negative();
        let rep =
            validate_structure(&e.manifold, &Point::from(&[1.0, 2.0, 3.0][..]), 1e-9).unwrap();
        assert!(rep.passed());
        for r in &rep.records {
            assert_eq!(r.residual, 0.0, "{}", r.check);
        }
    }

    #[test]
    fn scaled_xi_is_rejected() {
        let mut m = zoo::example_r3_negative().manifold;
        let two = ScalarField::constant(2.0, &m.coords);
        m.structure.xi[2] = two.clone();
        m.structure.eta = Some(vec![
            ScalarField::constant(0.0, &m.coords),
            ScalarField::constant(0.0, &m.coords),
            ScalarField::constant(1.0, &m.coords),
        ]);
        let rep = validate_structure(&m, &Point::from(&[0.0, 0.0, 0.0][..]), 1e-9).unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.worst("almost_contact.eta_of_xi"), 1.0);
        assert!(!rep.all_pass("almost_contact.eta_of_xi"));
    }

    #[test]
    fn phi_basis_of_flat_example() {
        let m = zoo::example_flat_acs(1).unwrap().manifold;
        let p = Point::from(&[0.0, 0.0, 0.0][..]);
        let b = phi_basis(&m, &p, &basis_vector(3, 0)).unwrap();
        assert_eq!(
            b.vectors,
            vec![basis_vector(3, 0), basis_vector(3, 1), basis_vector(3, 2)]
        );
        let s = StructureAtPoint::eval(&m, &p).unwrap();
        assert_eq!(b.gram_residual(&s.g), 0.0);
        assert_eq!(b.phi_residual(&s.phi), 0.0);
    }

    #[test]
    fn phi_basis_rejects_xi_seed() {
        let m = zoo::example_flat_acs(2).unwrap().manifold;
        let p = Point::from(&[0.0; 5][..]);
        assert!(matches!(
            phi_basis(&m, &p, &basis_vector(5, 4)),
            Err(Error::DegenerateSeed { .. })
        ));
        let b = phi_basis(&m, &p, &DVector::from_vec(vec![1.0, 2.0, -1.0, 0.5, 3.0])).unwrap();
        let s = StructureAtPoint::eval(&m, &p).unwrap();
        assert!(b.gram_residual(&s.g) < 1e-12);
        assert_eq!(b.horizontal().len(), 4);
    }

    #[test]
    fn cosymplectic_decisions() {
        let e = zoo::example_flat_acs(1).unwrap();
        let pts = e.manifold.sample_points(None);
        assert_eq!(
            is_cosymplectic(&e.manifold, &pts, 1e-9).unwrap(),
            (true, 0.0)
        );
        let e = zoo::example_r3_negative();
        assert_eq!(
            is_cosymplectic(&e.manifold, &pts, 1e-9).unwrap(),
            (true, 0.0)
        );
        let e = zoo::example_twisted_frame();
        let pts = e.manifold.sample_points(None);
        let (ok, residual) = is_cosymplectic(&e.manifold, &pts, 1e-9).unwrap();
        assert!(!ok);
        assert!(residual > 0.5);
    }
}
