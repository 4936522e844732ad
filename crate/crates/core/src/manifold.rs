//! A chart carrying the full structure `(g, φ, ξ, η, K)` and its evaluation
//! at a point.

use nalgebra::{DMatrix, DVector};

use crate::almost_contact::AlmostContactData;
use crate::error::{Error, Result};
use crate::metric_geometry::{
    christoffel_with_derivative, covariant_derivative_11_at, eval_fields_with_gradient,
    MetricField, NablaGAtPoint,
};
use crate::statistical::DifferenceTensorField;
use crate::tensor::{basis_vector, inner, norm, Tensor3, Tensor4};
use crate::tensor_core::{Coordinates, Point};

/// Points per coordinate when no grid is requested.
pub const DEFAULT_GRID: usize = 3;
/// Cap on the default grid size.
pub const MAX_DEFAULT_POINTS: usize = 243;
/// Tolerance for structures built from exact constant expressions.
pub const EXACT_TOL: f64 = 1e-9;
/// Tolerance for randomized polynomial structures.
pub const POLYNOMIAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Points per coordinate; `None` means the capped default.
    pub counts: Option<Vec<usize>>,
}

impl SamplingBox {
    pub fn symmetric(dim: usize, half_width: f64) -> SamplingBox {
        SamplingBox {
            lo: vec![-half_width; dim],
            hi: vec![half_width; dim],
            counts: None,
        }
    }

    /// Grid points in lexicographic order (last coordinate fastest).
    pub fn grid(&self, grid_override: Option<usize>) -> Vec<Point> {
        let dim = self.lo.len();
        let counts = match (grid_override, &self.counts) {
            (Some(c), _) => vec![c.max(1); dim],
            (None, Some(c)) => c.clone(),
            (None, None) => {
                let mut c = DEFAULT_GRID;
                while c > 1 && c.pow(dim as u32) > MAX_DEFAULT_POINTS {
                    c -= 1;
                }
                vec![c; dim]
            }
        };
        let axis = |i: usize, t: usize| -> f64 {
            if counts[i] <= 1 {
                0.5 * (self.lo[i] + self.hi[i])
            } else {
                self.lo[i] + (self.hi[i] - self.lo[i]) * t as f64 / (counts[i] - 1) as f64
            }
        };
        let total: usize = counts.iter().product();
        (0..total)
            .map(|mut idx| {
                let mut c = vec![0.0; dim];
                for i in (0..dim).rev() {
                    c[i] = axis(i, idx % counts[i]);
                    idx /= counts[i];
                }
                Point::from(&c[..])
            })
            .collect()
    }
}

/// Structure fields on one coordinate chart.
#[derive(Debug, Clone)]
pub struct ChartManifold {
    pub name: String,
    pub coords: Coordinates,
    pub sampling: SamplingBox,
    pub metric: MetricField,
    pub structure: AlmostContactData,
    pub k: DifferenceTensorField,
    /// Residual tolerance for the exactness class of the structure.
    pub tolerance: f64,
}

impl ChartManifold {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn n(&self) -> usize {
        (self.dim() - 1) / 2
    }

    pub fn sample_points(&self, grid_override: Option<usize>) -> Vec<Point> {
        self.sampling.grid(grid_override)
    }

    pub fn frame_at(&self, p: &Point) -> Result<PointFrame> {
        PointFrame::new(self, p)
    }

    /// Checks the chart-level invariants: odd dimension ≥ 3 and matching
    /// component counts.
    pub fn check_shape(&self) -> Result<()> {
        let d = self.dim();
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::UnsupportedDimension(d));
        }
        if self.metric.dim() != d
            || self.structure.phi.len() != d * d
            || self.structure.xi.len() != d
            || self.structure.eta.as_ref().is_some_and(|e| e.len() != d)
            || self.k.fields().len() != d * d * d
            || self.sampling.lo.len() != d
            || self.sampling.hi.len() != d
        {
            return Err(Error::Spec(format!(
                "component counts do not match dimension {d}"
            )));
        }
        Ok(())
    }
}

/// Everything evaluated at one point: metric jet, Levi-Civita connection and
/// its derivative, `K` and its derivative, and the almost contact data.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub point: Point,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `dg[k] = ∂_k g`.
    pub dg: Vec<DMatrix<f64>>,
    pub gamma0: Tensor3,
    /// `dgamma0[(i, j, k, l)] = ∂_l Γ°^i_jk`.
    pub dgamma0: Tensor4,
    pub k: Tensor3,
    /// `dk[(i, j, k, l)] = ∂_l K^i_jk`.
    pub dk: Tensor4,
    pub phi: DMatrix<f64>,
    /// `dphi[k] = ∂_k φ`.
    pub dphi: Vec<DMatrix<f64>>,
    pub xi: DVector<f64>,
    /// `dxi[k] = ∂_k ξ`.
    pub dxi: Vec<DVector<f64>>,
    /// η as used by every check: the explicit covector if given, else `g ξ`.
    pub eta: DVector<f64>,
    pub eta_explicit: Option<DVector<f64>>,
}

impl PointFrame {
    pub fn new(m: &ChartManifold, p: &Point) -> Result<PointFrame> {
        let d = m.dim();
        if p.dim() != d {
            return Err(crate::tensor_core::EvalError::DimensionMismatch {
                expected: d,
                found: p.dim(),
            }
            .into());
        }
        let (g, dg) = m.metric.eval_with_gradient(p)?;
        let g_inv = g.clone().try_inverse().ok_or(Error::SingularMetric {
            det: g.determinant(),
        })?;
        let (gamma0, dgamma0) = christoffel_with_derivative(&m.metric, p)?;
        let (k, dk) = m.k.eval_at(&m.metric, p, &gamma0.0, &dgamma0)?;

        let (phi_v, phi_d) = eval_fields_with_gradient(&m.structure.phi, p)?;
        let phi = DMatrix::from_row_slice(d, d, &phi_v);
        let dphi = phi_d
            .iter()
            .map(|v| DMatrix::from_row_slice(d, d, v))
            .collect();
        let (xi_v, xi_d) = eval_fields_with_gradient(&m.structure.xi, p)?;
        let xi = DVector::from_vec(xi_v);
        let dxi = xi_d.into_iter().map(DVector::from_vec).collect();
        let eta_explicit = match &m.structure.eta {
            Some(fields) => Some(DVector::from_vec(
                fields
                    .iter()
                    .map(|f| f.eval(p))
                    .collect::<Result<Vec<_>, _>>()?,
            )),
            None => None,
        };
        let eta = eta_explicit.clone().unwrap_or_else(|| &g * &xi);
        Ok(PointFrame {
            point: p.clone(),
            g,
            g_inv,
            dg,
            gamma0: gamma0.0,
            dgamma0,
            k,
            dk,
            phi,
            dphi,
            xi,
            dxi,
            eta,
            eta_explicit,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn n(&self) -> usize {
        (self.dim() - 1) / 2
    }

    pub fn coords(&self) -> Vec<f64> {
        self.point.coords().to_vec()
    }

    /// Coefficients of `∇ = ∇° + K`.
    pub fn gamma(&self) -> Tensor3 {
        self.gamma0.zip_with(&self.k, |a, b| a + b)
    }

    pub fn dgamma(&self) -> Tensor4 {
        self.dgamma0.zip_with(&self.dk, |a, b| a + b)
    }

    /// Coefficients of the conjugate connection `∇̄ = ∇° − K`.
    pub fn gamma_conj(&self) -> Tensor3 {
        self.gamma0.zip_with(&self.k, |a, b| a - b)
    }

    pub fn dgamma_conj(&self) -> Tensor4 {
        self.dgamma0.zip_with(&self.dk, |a, b| a - b)
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        inner(&self.g, x, y)
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        norm(&self.g, x)
    }

    pub fn eta_of(&self, x: &DVector<f64>) -> f64 {
        self.eta.dot(x)
    }

    pub fn phi_of(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.phi * x
    }

    /// `K(X, Y)`.
    pub fn k_of(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.k.apply(x, y)
    }

    /// `X − η(X) ξ`.
    pub fn horizontal_part(&self, x: &DVector<f64>) -> DVector<f64> {
        x - &self.xi * self.eta_of(x)
    }

    /// Distance of `v` from the line of ξ, measured by the g-norm of its
    /// horizontal part (zero vectors count as parallel).
    pub fn parallel_to_xi_residual(&self, v: &DVector<f64>) -> f64 {
        self.norm(&self.horizontal_part(v))
    }

    pub fn basis(&self, i: usize) -> DVector<f64> {
        basis_vector(self.dim(), i)
    }

    pub fn coordinate_frame(&self) -> Vec<DVector<f64>> {
        (0..self.dim()).map(|i| self.basis(i)).collect()
    }

    pub fn nabla_g(&self, gamma: &Tensor3) -> NablaGAtPoint {
        NablaGAtPoint::from_parts(gamma, &self.g, &self.dg)
    }

    /// `∇_{∂i} φ` for the connection with coefficients `gamma`.
    pub fn nabla_phi(&self, gamma: &Tensor3, i: usize) -> DMatrix<f64> {
        covariant_derivative_11_at(gamma, &self.phi, &self.dphi[i], i)
    }

    /// `∇_{∂i} ξ` for the connection with coefficients `gamma`.
    pub fn nabla_xi(&self, gamma: &Tensor3, i: usize) -> DVector<f64> {
        let d = self.dim();
        DVector::from_fn(d, |j, _| {
            self.dxi[i][j] + (0..d).map(|m| gamma[(j, i, m)] * self.xi[m]).sum::<f64>()
        })
    }

    /// `∇_X Y` for constant-coefficient vectors `X`, `Y`.
    pub fn covariant(&self, gamma: &Tensor3, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        gamma.apply(x, y)
    }
}

/// Coordinate frame plus all pairwise sums and differences.
pub fn probe_vectors(frame: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut out = frame.to_vec();
    for a in 0..frame.len() {
        for b in a + 1..frame.len() {
            out.push(&frame[a] + &frame[b]);
            out.push(&frame[a] - &frame[b]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_capped() {
        let b = SamplingBox::symmetric(5, 1.0);
        assert_eq!(b.grid(None).len(), 243);
        let b = SamplingBox::symmetric(7, 1.0);
        assert_eq!(b.grid(None).len(), 128);
        let b = SamplingBox::symmetric(3, 1.0);
        let pts = b.grid(None);
        assert_eq!(pts.len(), 27);
        assert_eq!(pts[0].coords(), &[-1.0, -1.0, -1.0]);
        assert_eq!(pts[1].coords(), &[-1.0, -1.0, 0.0]);
        assert_eq!(pts[26].coords(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn grid_override_and_single_point() {
        let b = SamplingBox::symmetric(3, 2.0);
        assert_eq!(b.grid(Some(5)).len(), 125);
        let one = b.grid(Some(1));
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].coords(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn probes_cover_sums_and_differences() {
        let frame: Vec<_> = (0..3).map(|i| basis_vector(3, i)).collect();
        assert_eq!(probe_vectors(&frame).len(), 3 + 6);
    }
}
