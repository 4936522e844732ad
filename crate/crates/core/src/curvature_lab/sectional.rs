//! φ-sectional curvatures, the statistical curvature tensor and section sweeps.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bracket::{kk_bracket, kk_tensor};
use crate::almost_contact::{phi_basis_at, PhiBasis};
use crate::error::{Error, Result};
use crate::manifold::{probe_vectors, PointFrame};
use crate::metric_geometry::{
    plane_q, sectional_value, CurvatureAtPoint, CurvatureSymmetries, DEGENERATE_PLANE,
};
use crate::tensor::Tensor4;

/// Smallest admissible g-norm of a section vector.
pub const MIN_SECTION_NORM: f64 = 1e-10;

/// `𝒦_φ(X) = g([K,K](X,φX)φX, X) / Q(X,φX)` together with the closed form
/// `−2‖K(X,X)‖²/‖X‖⁴`, computed independently.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSectionalValue {
    pub value: f64,
    pub closed_form: f64,
    pub x: DVector<f64>,
    pub phi_x: DVector<f64>,
    pub point: Vec<f64>,
}

impl PhiSectionalValue {
    pub fn closed_form_gap(&self) -> f64 {
        (self.value - self.closed_form).abs()
    }
}

pub fn phi_sectional_k_curvature(
    f: &PointFrame,
    x: &DVector<f64>,
    tol: f64,
) -> Result<PhiSectionalValue> {
    let eta = f.eta_of(x);
    if eta.abs() > tol {
        return Err(Error::NotHorizontal { eta });
    }
    let px = f.phi_of(x);
    let q = plane_q(&f.g, x, &px);
    let nx = f.norm(x);
    if nx <= MIN_SECTION_NORM || q <= DEGENERATE_PLANE {
        return Err(Error::DegenerateSection { q });
    }
    let value = f.inner(&kk_bracket(&f.k, x, &px, &px), x) / q;
    let kxx = f.k_of(x, x);
    let closed_form = -2.0 * f.inner(&kxx, &kxx) / nx.powi(4);
    Ok(PhiSectionalValue {
        value,
        closed_form,
        x: x.clone(),
        phi_x: px,
        point: f.coords(),
    })
}

/// Relative deviation with a unit floor, so values near zero compare
/// absolutely.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// `S = ½(R + R̄)` next to `R°`, `R`, `R̄` and `[K,K]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticalCurvatureAtPoint {
    pub s: Tensor4,
    pub r0: Tensor4,
    pub r: Tensor4,
    pub r_bar: Tensor4,
    pub kk: Tensor4,
}

impl StatisticalCurvatureAtPoint {
    /// `max |S − R° − [K,K]|`.
    pub fn decomposition_residual(&self) -> f64 {
        let n = self.s.dim();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let idx = (i, j, k, l);
                        m = m.max((self.s[idx] - self.r0[idx] - self.kk[idx]).abs());
                    }
                }
            }
        }
        m
    }

    /// `max |g(R(X,Y)Z,W) + g(R̄(X,Y)W,Z)|` over coordinate quadruples.
    pub fn duality_residual(&self, g: &DMatrix<f64>) -> f64 {
        let n = self.s.dim();
        let lower = |t: &Tensor4, a: usize, b: usize, c: usize, d: usize| -> f64 {
            (0..n).map(|m| g[(d, m)] * t[(m, c, a, b)]).sum()
        };
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let v = lower(&self.r, a, b, c, d) + lower(&self.r_bar, a, b, d, c);
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn s_symmetries(&self, g: &DMatrix<f64>) -> CurvatureSymmetries {
        CurvatureSymmetries::of(&self.s, g)
    }

    pub fn kk_symmetries(&self, g: &DMatrix<f64>) -> CurvatureSymmetries {
        CurvatureSymmetries::of(&self.kk, g)
    }
}

/// `R` and `R̄` come from the same curvature routine run on `Γ° ± K`.
pub fn statistical_curvature(f: &PointFrame) -> StatisticalCurvatureAtPoint {
    let r0 = CurvatureAtPoint::from_connection(&f.gamma0, &f.dgamma0).0;
    let r = CurvatureAtPoint::from_connection(&f.gamma(), &f.dgamma()).0;
    let r_bar = CurvatureAtPoint::from_connection(&f.gamma_conj(), &f.dgamma_conj()).0;
    let s = r.zip_with(&r_bar, |a, b| 0.5 * (a + b));
    StatisticalCurvatureAtPoint {
        s,
        r0,
        r,
        r_bar,
        kk: kk_tensor(&f.k),
    }
}

/// `(𝒦_φ^S, 𝒦_φ°, 𝒦_φ)` on the φ-section of `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSectionalTriple {
    pub statistical: f64,
    pub levi_civita: f64,
    pub k: PhiSectionalValue,
}

impl PhiSectionalTriple {
    /// `|𝒦_φ^S − 𝒦_φ° − 𝒦_φ|`.
    pub fn additivity_residual(&self) -> f64 {
        (self.statistical - self.levi_civita - self.k.value).abs()
    }
}

pub fn phi_sectional_triple(
    f: &PointFrame,
    curv: &StatisticalCurvatureAtPoint,
    x: &DVector<f64>,
    tol: f64,
) -> Result<PhiSectionalTriple> {
    let k = phi_sectional_k_curvature(f, x, tol)?;
    let statistical = sectional_value(&f.g, &curv.s, x, &k.phi_x)?;
    let levi_civita = sectional_value(&f.g, &curv.r0, x, &k.phi_x)?;
    Ok(PhiSectionalTriple {
        statistical,
        levi_civita,
        k,
    })
}

/// A φ-basis at the frame's point, seeded by the first coordinate vector
/// with a usable horizontal part.
pub fn phi_basis_here(f: &PointFrame) -> Result<PhiBasis> {
    let mut last = Error::ExhaustedCandidates;
    for i in 0..f.dim() {
        match phi_basis_at(&f.g, &f.phi, &f.xi, &f.eta, &f.basis(i)) {
            Ok(b) => return Ok(b),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Section vectors for a sweep: the horizontal φ-basis vectors, their
/// pairwise sums and differences, and `extra` random horizontal
/// combinations when a seed is given.
pub fn sweep_sections(
    f: &PointFrame,
    seed: Option<u64>,
    extra: usize,
) -> Result<Vec<DVector<f64>>> {
    let basis = phi_basis_here(f)?;
    let horizontal = basis.horizontal();
    let mut out = probe_vectors(horizontal);
    if let Some(s) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut added = 0;
        while added < extra {
            let v = horizontal.iter().fold(DVector::zeros(f.dim()), |acc, e| {
                acc + e * rng.gen_range(-1.0..1.0)
            });
            if f.norm(&v) > 1e-3 {
                out.push(v);
                added += 1;
            }
        }
    }
    Ok(out)
}
