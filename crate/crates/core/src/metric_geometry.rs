//! Riemannian machinery on a chart: metric evaluation, the Levi-Civita
//! connection, curvature of an arbitrary torsion-free connection, covariant
//! derivatives and sectional curvature.
//!
//! Index conventions used throughout the crate:
//!
//! * `Γ^i_jk` is stored at `gamma[(i, j, k)]` with `∇_{∂j} ∂k = Γ^i_jk ∂i`.
//! * Derivatives of connection coefficients: `dgamma[(i, j, k, l)] = ∂_l Γ^i_jk`.
//! * Curvature: `r[(i, j, k, l)] = R^i_jkl`, the `∂i` component of
//!   `R(∂k, ∂l)∂j`, with `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tensor::{inner, invert, Tensor3, Tensor4};
use crate::tensor_core::{seed, seed_nested, Dual, EvalError, Point, Real, ScalarField};

pub const SINGULAR_DET: f64 = 1e-12;
pub const MIN_LEADING_MINOR: f64 = 1e-10;
pub const DEGENERATE_PLANE: f64 = 1e-12;

/// `g_ij` as fields, stored row-major.
#[derive(Debug, Clone)]
pub struct MetricField {
    dim: usize,
    comps: Vec<ScalarField>,
}

impl MetricField {
    pub fn new(dim: usize, comps: Vec<ScalarField>) -> Result<MetricField> {
        if comps.len() != dim * dim {
            return Err(Error::Spec(format!(
                "metric needs {} components, got {}",
                dim * dim,
                comps.len()
            )));
        }
        Ok(MetricField { dim, comps })
    }

    /// Builds a metric from its lower triangle (`rows[i]` has `i + 1`
    /// entries); the upper triangle shares the same fields.
    pub fn from_lower_triangle(rows: Vec<Vec<ScalarField>>) -> Result<MetricField> {
        let dim = rows.len();
        let mut comps: Vec<Option<ScalarField>> = vec![None; dim * dim];
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::Spec(format!(
                    "metric row {i} must have {} entries",
                    i + 1
                )));
            }
            for (j, f) in row.into_iter().enumerate() {
                comps[j * dim + i] = Some(f.clone());
                comps[i * dim + j] = Some(f);
            }
        }
        MetricField::new(dim, comps.into_iter().map(Option::unwrap).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.comps[i * self.dim + j]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    pub fn eval(&self, p: &Point) -> Result<DMatrix<f64>> {
        let vals = self
            .comps
            .iter()
            .map(|f| f.eval(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &vals))
    }

    /// Values and first derivatives: `(g, [∂_0 g, …, ∂_{n-1} g])`.
    pub fn eval_with_gradient(&self, p: &Point) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>)> {
        let (vals, grads) = eval_fields_with_gradient(&self.comps, p)?;
        let d = self.dim;
        Ok((
            DMatrix::from_row_slice(d, d, &vals),
            grads
                .iter()
                .map(|g| DMatrix::from_row_slice(d, d, g))
                .collect(),
        ))
    }

    /// Largest `|g_ij − g_ji|` over `points`; zero without evaluation when the
    /// mirrored entries are the same expression.
    pub fn symmetry_residual(&self, points: &[Point]) -> Result<f64> {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..i {
                let (a, b) = (self.component(i, j), self.component(j, i));
                if a.same_as(b) {
                    continue;
                }
                for p in points {
                    worst = worst.max((a.eval(p)? - b.eval(p)?).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Values of `fields` at `p` and their gradients; `grads[k][n]` is
/// `∂_k fields[n]`.
pub fn eval_fields_with_gradient(
    fields: &[ScalarField],
    p: &Point,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), EvalError> {
    let mut vals = Vec::with_capacity(fields.len());
    let mut grads = vec![Vec::with_capacity(fields.len()); p.dim()];
    for (k, grad) in grads.iter_mut().enumerate() {
        let x = seed(p, k)?;
        for f in fields {
            let v = f.eval_generic(&x)?;
            if k == 0 {
                vals.push(v.re);
            }
            grad.push(v.eps);
        }
    }
    if p.dim() == 0 {
        for f in fields {
            vals.push(f.eval(p)?);
        }
    }
    Ok((vals, grads))
}

/// Smallest leading principal minor, or an error when one is ≤ 1e-10.
pub fn check_positive_definite(g: &DMatrix<f64>) -> Result<f64> {
    let mut smallest = f64::INFINITY;
    for k in 1..=g.nrows() {
        let minor = g.view((0, 0), (k, k)).into_owned().determinant();
        smallest = smallest.min(minor);
        if minor <= MIN_LEADING_MINOR {
            return Err(Error::NotPositiveDefinite { minor });
        }
    }
    Ok(smallest)
}

/// Levi-Civita coefficients from metric values and first derivatives
/// (`dg[l][a * n + b] = ∂_l g_ab`), over any scalar type.
pub fn christoffel_generic<T: Real>(g: &[T], dg: &[Vec<T>], n: usize) -> Result<Tensor3<T>> {
    let (inv, det) = invert(g, n);
    let inv = match inv {
        Some(inv) if det.primal().abs() >= SINGULAR_DET => inv,
        _ => return Err(Error::SingularMetric { det: det.primal() }),
    };
    let half = T::from_f64(0.5);
    let mut gamma = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let mut s = T::zero();
                for l in 0..n {
                    let gil = inv[i * n + l];
                    if gil == T::zero() {
                        continue;
                    }
                    s = s + gil * (dg[j][l * n + k] + dg[k][j * n + l] - dg[l][j * n + k]);
                }
                gamma[(i, j, k)] = half * s;
                gamma[(i, k, j)] = half * s;
            }
        }
    }
    Ok(gamma)
}

/// Levi-Civita connection coefficients at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoefficients(pub Tensor3);

impl ConnectionCoefficients {
    pub fn torsion_residual(&self) -> f64 {
        self.0.lower_asymmetry()
    }
}

pub fn christoffel(g: &MetricField, p: &Point) -> Result<ConnectionCoefficients> {
    let (vals, grads) = eval_fields_with_gradient(g.components(), p)?;
    Ok(ConnectionCoefficients(christoffel_generic(
        &vals,
        &grads,
        g.dim(),
    )?))
}

/// Christoffel symbols and their first derivatives, the latter obtained by
/// running the Christoffel computation itself on dual numbers seeded along
/// each coordinate (metric entries evaluated on nested duals).
pub fn christoffel_with_derivative(
    g: &MetricField,
    p: &Point,
) -> Result<(ConnectionCoefficients, Tensor4)> {
    let n = g.dim();
    let mut gamma = Tensor3::zeros(n);
    let mut dgamma = Tensor4::zeros(n);
    for l in 0..n {
        let mut vals: Vec<Dual<f64>> = Vec::with_capacity(n * n);
        let mut grads: Vec<Vec<Dual<f64>>> = vec![Vec::with_capacity(n * n); n];
        for (j, grad) in grads.iter_mut().enumerate() {
            let x = seed_nested(p, j, l);
            for f in g.components() {
                let v = f.eval_generic(&x)?;
                if j == 0 {
                    vals.push(Dual::new(v.re.re, v.eps.re));
                }
                grad.push(Dual::new(v.re.eps, v.eps.eps));
            }
        }
        let gl = christoffel_generic(&vals, &grads, n)?;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = gl[(i, j, k)];
                    gamma[(i, j, k)] = v.re;
                    dgamma[(i, j, k, l)] = v.eps;
                }
            }
        }
    }
    Ok((ConnectionCoefficients(gamma), dgamma))
}

/// Curvature tensor of a torsion-free connection at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureAtPoint(pub Tensor4);

impl CurvatureAtPoint {
    /// `R^i_jkl = ∂_k Γ^i_lj − ∂_l Γ^i_kj + Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj`.
    pub fn from_connection(gamma: &Tensor3, dgamma: &Tensor4) -> CurvatureAtPoint {
        let n = gamma.dim();
        CurvatureAtPoint(Tensor4::from_fn(n, |i, j, k, l| {
            let mut s = dgamma[(i, l, j, k)] - dgamma[(i, k, j, l)];
            for m in 0..n {
                s += gamma[(i, k, m)] * gamma[(m, l, j)] - gamma[(i, l, m)] * gamma[(m, k, j)];
            }
            s
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `R(X, Y)Z`.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        apply4(&self.0, x, y, z)
    }

    /// Largest `|R^i_jkl + R^i_jlk|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let r = &self.0;
        let n = r.dim();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        m = m.max((r[(i, j, k, l)] + r[(i, j, l, k)]).abs());
                    }
                }
            }
        }
        m
    }
}

/// `T(X, Y)Z` for a tensor in the curvature layout.
pub fn apply4(t: &Tensor4, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
    let n = t.dim();
    DVector::from_fn(n, |i, _| {
        let mut s = 0.0;
        for j in 0..n {
            if z[j] == 0.0 {
                continue;
            }
            for k in 0..n {
                if x[k] == 0.0 {
                    continue;
                }
                for l in 0..n {
                    s += t[(i, j, k, l)] * z[j] * x[k] * y[l];
                }
            }
        }
        s
    })
}

/// Levi-Civita curvature `R°` at `p`.
pub fn riemann(g: &MetricField, p: &Point) -> Result<CurvatureAtPoint> {
    let (gamma, dgamma) = christoffel_with_derivative(g, p)?;
    Ok(CurvatureAtPoint::from_connection(&gamma.0, &dgamma))
}

/// `Q(X, Y) = g(X,X) g(Y,Y) − g(X,Y)²`.
pub fn plane_q(g: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let xy = inner(g, x, y);
    inner(g, x, x) * inner(g, y, y) - xy * xy
}

/// `g(T(X,Y)Y, X) / Q(X,Y)` for an evaluated metric and any tensor in the
/// curvature layout.
pub fn sectional_value(
    g: &DMatrix<f64>,
    t: &Tensor4,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    let q = plane_q(g, x, y);
    if q <= DEGENERATE_PLANE {
        return Err(Error::DegeneratePlane { q });
    }
    Ok(inner(g, &apply4(t, x, y, y), x) / q)
}

pub fn sectional_curvature(
    g: &MetricField,
    r: &CurvatureAtPoint,
    x: &DVector<f64>,
    y: &DVector<f64>,
    p: &Point,
) -> Result<f64> {
    sectional_value(&g.eval(p)?, &r.0, x, y)
}

/// `(∇g)_ijk = (∇_{∂i} g)(∂j, ∂k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NablaGAtPoint(pub Tensor3);

impl NablaGAtPoint {
    pub fn from_parts(gamma: &Tensor3, g: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> NablaGAtPoint {
        let n = gamma.dim();
        NablaGAtPoint(Tensor3::from_fn(n, |i, j, k| {
            let mut s = dg[i][(j, k)];
            for m in 0..n {
                s -= gamma[(m, i, j)] * g[(m, k)] + gamma[(m, i, k)] * g[(j, m)];
            }
            s
        }))
    }

    /// Largest deviation from total symmetry over all slot permutations.
    pub fn symmetry_residual(&self) -> f64 {
        total_symmetry_residual(&self.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }
}

pub fn total_symmetry_residual(t: &Tensor3) -> f64 {
    let n = t.dim();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = t[(i, j, k)];
                for w in [
                    t[(i, k, j)],
                    t[(j, i, k)],
                    t[(j, k, i)],
                    t[(k, i, j)],
                    t[(k, j, i)],
                ] {
                    m = m.max((v - w).abs());
                }
            }
        }
    }
    m
}

pub fn nabla_g(
    gamma: &ConnectionCoefficients,
    g: &MetricField,
    p: &Point,
) -> Result<NablaGAtPoint> {
    let (gm, dg) = g.eval_with_gradient(p)?;
    Ok(NablaGAtPoint::from_parts(&gamma.0, &gm, &dg))
}

/// `(∇_i φ)^j_k = ∂_i φ^j_k + Γ^j_im φ^m_k − Γ^m_ik φ^j_m` for evaluated
/// components and `dphi_i = ∂_i φ`.
pub fn covariant_derivative_11_at(
    gamma: &Tensor3,
    phi: &DMatrix<f64>,
    dphi_i: &DMatrix<f64>,
    i: usize,
) -> DMatrix<f64> {
    let n = phi.nrows();
    DMatrix::from_fn(n, n, |j, k| {
        let mut s = dphi_i[(j, k)];
        for m in 0..n {
            s += gamma[(j, i, m)] * phi[(m, k)] - gamma[(m, i, k)] * phi[(j, m)];
        }
        s
    })
}

/// Covariant derivative of a (1,1) tensor field given as row-major fields
/// `φ^j_k`, in the direction `∂_i`.
pub fn covariant_derivative_11(
    gamma: &ConnectionCoefficients,
    phi: &[ScalarField],
    p: &Point,
    i: usize,
) -> Result<DMatrix<f64>> {
    let n = p.dim();
    let (vals, grads) = eval_fields_with_gradient(phi, p)?;
    if i >= n {
        return Err(EvalError::IndexOutOfRange { index: i, dim: n }.into());
    }
    let phi_m = DMatrix::from_row_slice(n, n, &vals);
    let dphi = DMatrix::from_row_slice(n, n, &grads[i]);
    Ok(covariant_derivative_11_at(&gamma.0, &phi_m, &dphi, i))
}

/// Residuals of the four algebraic curvature identities for a tensor in the
/// curvature layout, measured through `W(a,b,c,d) = g(T(∂a,∂b)∂c, ∂d)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurvatureSymmetries {
    /// `T(X,Y) = −T(Y,X)`.
    pub first_pair: f64,
    /// `g(T(X,Y)Z,W) = −g(T(X,Y)W,Z)`.
    pub last_pair: f64,
    /// `g(T(X,Y)Z,W) = g(T(Z,W)X,Y)`.
    pub pair_exchange: f64,
    /// `T(X,Y)Z + T(Y,Z)X + T(Z,X)Y = 0`.
    pub bianchi: f64,
}

impl CurvatureSymmetries {
    pub fn of(t: &Tensor4, g: &DMatrix<f64>) -> CurvatureSymmetries {
        let n = t.dim();
        let w = Tensor4::from_fn(n, |a, b, c, d| {
            (0..n).map(|m| g[(d, m)] * t[(m, c, a, b)]).sum()
        });
        let mut out = CurvatureSymmetries::default();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = w[(a, b, c, d)];
                        out.first_pair = out.first_pair.max((v + w[(b, a, c, d)]).abs());
                        out.last_pair = out.last_pair.max((v + w[(a, b, d, c)]).abs());
                        out.pair_exchange = out.pair_exchange.max((v - w[(c, d, a, b)]).abs());
                        out.bianchi = out
                            .bianchi
                            .max((v + w[(b, c, a, d)] + w[(c, a, b, d)]).abs());
                    }
                }
            }
        }
        out
    }

    pub fn max(&self) -> f64 {
        self.first_pair
            .max(self.last_pair)
            .max(self.pair_exchange)
            .max(self.bianchi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::basis_vector;
    use crate::tensor_core::coordinates;

    fn field(text: &str, names: &[&str]) -> ScalarField {
        ScalarField::parse(text, &coordinates(names)).unwrap()
    }

    fn diag_metric(entries: &[&str], names: &[&str]) -> MetricField {
        let n = entries.len();
        let rows = (0..n)
            .map(|i| {
                (0..=i)
                    .map(|j| field(if i == j { entries[i] } else { "0" }, names))
                    .collect()
            })
            .collect();
        MetricField::from_lower_triangle(rows).unwrap()
    }

    fn sphere() -> MetricField {
        diag_metric(&["1", "sin(t)^2"], &["t", "f"])
    }

    #[test]
    fn euclidean_is_flat() {
        let g = diag_metric(&["1", "1", "1"], &["x", "y", "z"]);
        let p = Point::from(&[0.3, -1.0, 2.0][..]);
        assert_eq!(christoffel(&g, &p).unwrap().0.max_abs(), 0.0);
        let r = riemann(&g, &p).unwrap();
        assert_eq!(r.0.max_abs(), 0.0);
        let k = sectional_curvature(&g, &r, &basis_vector(3, 0), &basis_vector(3, 1), &p);
        assert_eq!(k.unwrap(), 0.0);
    }

    #[test]
    fn sphere_christoffel_symbols() {
        let t = std::f64::consts::FRAC_PI_3;
        let gamma = christoffel(&sphere(), &Point::from(&[t, 0.0][..]))
            .unwrap()
            .0;
        assert!((gamma[(0, 1, 1)] + t.sin() * t.cos()).abs() < 1e-15);
        assert!((gamma[(1, 0, 1)] - t.cos() / t.sin()).abs() < 1e-15);
        assert!((gamma[(1, 1, 0)] - t.cos() / t.sin()).abs() < 1e-15);
        assert_eq!(gamma[(0, 0, 0)], 0.0);
    }

    #[test]
    fn sphere_has_unit_sectional_curvature() {
        let g = sphere();
        let p = Point::from(&[std::f64::consts::FRAC_PI_3, 0.0][..]);
        let r = riemann(&g, &p).unwrap();
        let (x, y) = (basis_vector(2, 0), basis_vector(2, 1));
        let k = sectional_curvature(&g, &r, &x, &y, &p).unwrap();
        assert!((k - 1.0).abs() < 1e-12);
        // same plane, basis (X, X + 2Y)
        let k2 = sectional_curvature(&g, &r, &x, &(&x + &y * 2.0), &p).unwrap();
        assert!((k - k2).abs() < 1e-9);
        assert!(r.antisymmetry_residual() < 1e-12);
    }

    #[test]
    fn degenerate_plane() {
        let g = sphere();
        let p = Point::from(&[1.0, 0.0][..]);
        let r = riemann(&g, &p).unwrap();
        let x = basis_vector(2, 0);
        assert!(matches!(
            sectional_curvature(&g, &r, &x, &(&x * 3.0), &p),
            Err(Error::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn singular_metric() {
        let g = diag_metric(&["1", "x^2"], &["x", "y"]);
        assert!(matches!(
            christoffel(&g, &Point::from(&[0.0, 0.0][..])),
            Err(Error::SingularMetric { .. })
        ));
        assert!(check_positive_definite(&g.eval(&Point::from(&[0.0, 0.0][..])).unwrap()).is_err());
    }

    #[test]
    fn levi_civita_is_metric() {
        let names = ["x", "y"];
        let g = MetricField::from_lower_triangle(vec![
            vec![field("1 + x^2", &names)],
            vec![field("0.3*x*y", &names), field("2 + sin(y)", &names)],
        ])
        .unwrap();
        let p = Point::from(&[0.4, -0.7][..]);
        let gamma = christoffel(&g, &p).unwrap();
        assert!(nabla_g(&gamma, &g, &p).unwrap().max_abs() < 1e-14);
        assert_eq!(gamma.torsion_residual(), 0.0);
    }

    #[test]
    fn zero_connection_with_constant_metric() {
        let g = diag_metric(&["2", "3"], &["x", "y"]);
        let p = Point::from(&[0.0, 0.0][..]);
        let zero = ConnectionCoefficients(Tensor3::zeros(2));
        assert_eq!(nabla_g(&zero, &g, &p).unwrap().max_abs(), 0.0);
        let phi = vec![field("1", &["x", "y"]); 4];
        let d = covariant_derivative_11(&zero, &phi, &p, 0).unwrap();
        assert_eq!(d.amax(), 0.0);
    }

    #[test]
    fn symmetry_residual_checks_mirrored_entries() {
        let names = ["x", "y"];
        let g = MetricField::new(
            2,
            vec![
                field("1", &names),
                field("x", &names),
                field("x + 0", &names),
                field("1", &names),
            ],
        )
        .unwrap();
        let pts = [Point::from(&[0.5, 0.0][..])];
        assert_eq!(g.symmetry_residual(&pts).unwrap(), 0.0);
        let g = MetricField::new(
            2,
            vec![
                field("1", &names),
                field("x", &names),
                field("y", &names),
                field("1", &names),
            ],
        )
        .unwrap();
        assert_eq!(g.symmetry_residual(&pts).unwrap(), 0.5);
    }
}
