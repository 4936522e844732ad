//! Difference tensors `K = ∇ − ∇°`, statistical and almost-contact-statistical
//! validation, λ, and the conjugate connection `∇̄ = ∇° − K`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::manifold::{probe_vectors, PointFrame};
use crate::metric_geometry::{eval_fields_with_gradient, total_symmetry_residual, MetricField};
use crate::report::AuditReport;
use crate::tensor::{invert, Tensor3, Tensor4};
use crate::tensor_core::{seed, Dual, Point, ScalarField};

/// Tolerance for lower-index symmetry of `K` and of connection tables.
pub const LOWER_SYMMETRY: f64 = 1e-12;

/// How `K^i_jk` is specified. Every variant evaluates to components and
/// first derivatives at a point.
#[derive(Debug, Clone)]
pub enum DifferenceTensorField {
    /// `K^i_jk` given directly, stored at `i·n² + j·n + k`.
    Components(Vec<ScalarField>),
    /// A full connection table `Γ^i_jk`; `K = Γ − Γ°(g)`.
    Connection(Vec<ScalarField>),
    /// A cubic form `C_ijk = g(∂i, K(∂j, ∂k))`; `K^i_jk = g^il C_ljk`.
    CubicForm(Vec<ScalarField>),
}

impl DifferenceTensorField {
    pub fn fields(&self) -> &[ScalarField] {
        match self {
            DifferenceTensorField::Components(f)
            | DifferenceTensorField::Connection(f)
            | DifferenceTensorField::CubicForm(f) => f,
        }
    }

    pub fn zero(dim: usize, coords: &crate::tensor_core::Coordinates) -> DifferenceTensorField {
        DifferenceTensorField::Components(vec![ScalarField::constant(0.0, coords); dim.pow(3)])
    }

    /// `K` and `∂K` (`dk[(i, j, k, l)] = ∂_l K^i_jk`) at `p`, given the
    /// Levi-Civita coefficients there.
    pub fn eval_at(
        &self,
        metric: &MetricField,
        p: &Point,
        gamma0: &Tensor3,
        dgamma0: &Tensor4,
    ) -> Result<(Tensor3, Tensor4)> {
        let n = p.dim();
        match self {
            DifferenceTensorField::Components(f) | DifferenceTensorField::Connection(f) => {
                let (vals, grads) = eval_fields_with_gradient(f, p)?;
                let mut k = Tensor3::from_fn(n, |i, j, kk| vals[(i * n + j) * n + kk]);
                let mut dk = Tensor4::from_fn(n, |i, j, kk, l| grads[l][(i * n + j) * n + kk]);
                if matches!(self, DifferenceTensorField::Connection(_)) {
                    k = k.zip_with(gamma0, |a, b| a - b);
                    dk = dk.zip_with(dgamma0, |a, b| a - b);
                }
                Ok((k, dk))
            }
            DifferenceTensorField::CubicForm(c) => {
                let mut k = Tensor3::zeros(n);
                let mut dk = Tensor4::zeros(n);
                for l in 0..n {
                    let x = seed(p, l)?;
                    let g = metric
                        .components()
                        .iter()
                        .map(|f| f.eval_generic(&x))
                        .collect::<Result<Vec<Dual<f64>>, _>>()?;
                    let cv = c
                        .iter()
                        .map(|f| f.eval_generic(&x))
                        .collect::<Result<Vec<Dual<f64>>, _>>()?;
                    let (inv, det) = invert(&g, n);
                    let inv = inv.ok_or(Error::SingularMetric { det: det.re })?;
                    for i in 0..n {
                        for j in 0..n {
                            for kk in 0..n {
                                let mut s = Dual::new(0.0, 0.0);
                                for a in 0..n {
                                    s = s + inv[i * n + a] * cv[(a * n + j) * n + kk];
                                }
                                k[(i, j, kk)] = s.re;
                                dk[(i, j, kk, l)] = s.eps;
                            }
                        }
                    }
                }
                Ok((k, dk))
            }
        }
    }
}

/// `K` from a user connection table, after checking it is torsion-free at
/// the sample points.
pub fn difference_from_connection(
    gamma: Vec<ScalarField>,
    g: &MetricField,
    samples: &[Point],
) -> Result<DifferenceTensorField> {
    let n = g.dim();
    if gamma.len() != n.pow(3) {
        return Err(Error::Spec(format!(
            "connection table needs {} entries, got {}",
            n.pow(3),
            gamma.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..j {
                let (a, b) = (&gamma[(i * n + j) * n + k], &gamma[(i * n + k) * n + j]);
                if a.same_as(b) {
                    continue;
                }
                for p in samples {
                    worst = worst.max((a.eval(p)? - b.eval(p)?).abs());
                }
            }
        }
    }
    if worst > LOWER_SYMMETRY {
        return Err(Error::TorsionPresent { residual: worst });
    }
    Ok(DifferenceTensorField::Connection(gamma))
}

/// `C_ijk = g(∂i, K(∂j, ∂k))`.
pub fn cubic_form(f: &PointFrame) -> Tensor3 {
    let n = f.dim();
    Tensor3::from_fn(n, |i, j, k| {
        (0..n).map(|m| f.g[(i, m)] * f.k[(m, j, k)]).sum()
    })
}

/// Statistical-structure residuals at a frame.
pub fn validate_statistical(f: &PointFrame, tol: f64) -> AuditReport {
    let mut rep = AuditReport::new();
    let at = f.coords();
    rep.assert(
        "statistical.k_lower_symmetric",
        &at,
        f.k.lower_asymmetry(),
        LOWER_SYMMETRY,
    );
    let c = cubic_form(f);
    rep.assert(
        "statistical.cubic_form_symmetric",
        &at,
        total_symmetry_residual(&c),
        tol,
    );
    let ng = f.nabla_g(&f.gamma());
    rep.assert(
        "statistical.nabla_g_symmetric",
        &at,
        ng.symmetry_residual(),
        tol,
    );
    let ng_conj = f.nabla_g(&f.gamma_conj());
    rep.assert(
        "statistical.conjugate_nabla_g_symmetric",
        &at,
        ng_conj.symmetry_residual(),
        tol,
    );
    // (∇_X g)(Y, Z) = −2 g(X, K(Y, Z))
    let cross = ng.0.zip_with(&c, |a, b| a + 2.0 * b).max_abs();
    rep.assert("statistical.nabla_g_equals_cubic_form", &at, cross, tol);
    rep
}

/// Almost-contact-statistical residuals over coordinate basis pairs:
/// `K(X, φY) + φK(X, Y) = 0` and the equivalent `K(X, φY) = K(φX, Y)`.
pub fn validate_acs(f: &PointFrame, tol: f64) -> AuditReport {
    let (def, swap) = acs_residuals(f);
    let mut rep = AuditReport::new();
    let at = f.coords();
    rep.assert("acs.k_phi_anticommutes", &at, def, tol);
    rep.assert("acs.k_phi_symmetric", &at, swap, tol);
    rep
}

pub fn acs_residuals(f: &PointFrame) -> (f64, f64) {
    let frame = f.coordinate_frame();
    let (mut def, mut swap) = (0.0f64, 0.0f64);
    for x in &frame {
        for y in &frame {
            let k_x_phiy = f.k_of(x, &f.phi_of(y));
            def = def.max((&k_x_phiy + f.phi_of(&f.k_of(x, y))).amax());
            swap = swap.max((&k_x_phiy - f.k_of(&f.phi_of(x), y)).amax());
        }
    }
    (def, swap)
}

/// `λ = g(K(ξ, ξ), ξ)` with the residual of `K(X, ξ) = λ η(X) ξ` over the
/// coordinate frame and ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaValue {
    pub lambda: f64,
    pub residual: f64,
}

pub fn lambda_of(f: &PointFrame, tol: f64) -> Result<LambdaValue> {
    let lv = lambda_unchecked(f);
    if lv.residual > tol {
        return Err(Error::AcsViolated {
            residual: lv.residual,
        });
    }
    Ok(lv)
}

pub fn lambda_unchecked(f: &PointFrame) -> LambdaValue {
    let kxx = f.k_of(&f.xi, &f.xi);
    let lambda = f.inner(&kxx, &f.xi);
    let mut residual = (&kxx - &f.xi * lambda).amax();
    for x in f.coordinate_frame() {
        let r = f.k_of(&x, &f.xi) - &f.xi * (lambda * f.eta_of(&x));
        residual = residual.max(r.amax());
    }
    LambdaValue { lambda, residual }
}

/// Conjugate connection coefficients with the residual of
/// `g(∇_X Y, Z) + g(Y, ∇̄_X Z) = X·g(Y, Z)` over coordinate triples.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateConnection {
    pub gamma: Tensor3,
    pub duality_residual: f64,
}

pub fn conjugate_connection(f: &PointFrame) -> ConjugateConnection {
    let n = f.dim();
    let gamma = f.gamma();
    let conj = f.gamma_conj();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = -f.dg[i][(j, k)];
                for m in 0..n {
                    s += gamma[(m, i, j)] * f.g[(m, k)] + conj[(m, i, k)] * f.g[(j, m)];
                }
                worst = worst.max(s.abs());
            }
        }
    }
    ConjugateConnection {
        gamma: conj,
        duality_residual: worst,
    }
}

/// Pointwise consequences of the almost-contact-statistical condition,
/// checked on the coordinate frame plus pairwise sums and differences.
/// Equivalences are recorded as agreement of two boolean evaluations.
pub fn acs_identities(f: &PointFrame, horizontal: &[DVector<f64>], tol: f64) -> AuditReport {
    let mut rep = AuditReport::new();
    let at = f.coords();
    let probes = probe_vectors(&f.coordinate_frame());
    let hprobes = probe_vectors(horizontal);
    let phi2 = &f.phi * &f.phi;
    let zero = |v: &DVector<f64>| v.amax() <= tol;
    let par = |v: &DVector<f64>| f.parallel_to_xi_residual(v) <= tol;

    let mut k_phix_xi: f64 = 0.0;
    let mut phi2_rules: f64 = 0.0;
    let mut pointwise_equiv = true;
    for x in &probes {
        k_phix_xi = k_phix_xi.max(f.k_of(&f.phi_of(x), &f.xi).amax());
        // φX = 0 ⟺ X ∥ ξ
        pointwise_equiv &= zero(&f.phi_of(x)) == par(x);
        for y in &probes {
            let kxy = f.k_of(x, y);
            let target = &phi2 * &kxy;
            phi2_rules = phi2_rules
                .max((f.k_of(&(&phi2 * x), y) - &target).amax())
                .max((f.k_of(x, &(&phi2 * y)) - &target).amax())
                .max((f.k_of(&f.phi_of(x), &f.phi_of(y)) - &target).amax());
            // K(X, φY) = 0 ⟺ φK(X, Y) = 0; φK(X, Y) = 0 ⟺ K(X, Y) ∥ ξ
            let phik = f.phi_of(&kxy);
            pointwise_equiv &= zero(&f.k_of(x, &f.phi_of(y))) == zero(&phik);
            pointwise_equiv &= zero(&phik) == par(&kxy);
        }
    }
    rep.assert("acs.k_phi_x_xi", &at, k_phix_xi, tol);
    rep.assert("acs.phi_squared_rules", &at, phi2_rules, tol);
    rep.assert_flag("acs.pointwise_equivalences", &at, 0.0, pointwise_equiv);

    // quantified equivalences, polarization reading
    let all = |vs: &[DVector<f64>], pred: &dyn Fn(&DVector<f64>) -> bool| vs.iter().all(pred);
    let all_pairs = |vs: &[DVector<f64>], pred: &dyn Fn(&DVector<f64>, &DVector<f64>) -> bool| {
        vs.iter().all(|x| vs.iter().all(|y| pred(x, y)))
    };
    let pairs = [
        (
            all_pairs(&probes, &|x, y| zero(&f.k_of(x, y))),
            all(&probes, &|x| zero(&f.k_of(x, x))),
        ),
        (
            all_pairs(&hprobes, &|x, y| zero(&f.k_of(x, y))),
            all(&hprobes, &|x| zero(&f.k_of(x, x))),
        ),
        (
            all_pairs(&probes, &|x, y| zero(&f.k_of(x, &f.phi_of(y)))),
            all(&probes, &|x| zero(&f.k_of(x, &f.phi_of(x)))),
        ),
        (
            all_pairs(&probes, &|x, y| zero(&f.phi_of(&f.k_of(x, y)))),
            all(&probes, &|x| zero(&f.phi_of(&f.k_of(x, x)))),
        ),
        (
            all_pairs(&probes, &|x, y| par(&f.k_of(x, y))),
            all(&probes, &|x| par(&f.k_of(x, x))),
        ),
    ];
    let agree = pairs.iter().all(|(a, b)| a == b);
    rep.assert_flag("acs.polarization_equivalences", &at, 0.0, agree);
    rep
}
