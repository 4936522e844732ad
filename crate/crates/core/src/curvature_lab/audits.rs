//! Executable audits: the nine-way vanishing equivalence, φ-compatibility and
//! its consequences, the Ψ form, the φ-derivative identity and ξ-geodesics.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::sectional::{
    phi_basis_here, phi_sectional_k_curvature, phi_sectional_triple, relative_gap,
    statistical_curvature, sweep_sections, StatisticalCurvatureAtPoint,
};
use crate::error::{Error, Result};
use crate::manifold::{probe_vectors, ChartManifold, PointFrame};
use crate::metric_geometry::sectional_value;
use crate::report::AuditReport;
use crate::statistical::{conjugate_connection, lambda_unchecked, LambdaValue};
use crate::tensor_core::Point;

/// Max-minus-min over the grid below which a quantity counts as constant.
pub const CONSTANCY_TOL: f64 = 1e-6;
/// Random horizontal sections added per point when a seed is given.
pub const RANDOM_SECTIONS: usize = 8;
/// Scalings used for the section-invariance check.
pub const SECTION_SCALES: [f64; 3] = [-3.0, 0.5, 7.0];

/// Tolerance for identities that involve second derivatives of the inputs.
pub fn loose(tol: f64) -> f64 {
    tol.max(1e-6)
}

/// Names of the nine equivalent vanishing conditions, in audit order.
pub const VANISHING_CHECKS: [&str; 9] = [
    "vanishing.kphi_zero",
    "vanishing.statistical_sectional_equals_levi_civita",
    "vanishing.k_is_lambda_eta_eta_xi",
    "vanishing.kk_zero",
    "vanishing.s_equals_levi_civita_curvature",
    "vanishing.k_xx_zero",
    "vanishing.k_x_phix_zero",
    "vanishing.phi_k_xx_zero",
    "vanishing.k_xx_parallel_xi",
];

/// Frames at all points, evaluated in parallel, in point order.
pub fn frames(m: &ChartManifold, points: &[Point]) -> Result<Vec<PointFrame>> {
    points.par_iter().map(|p| m.frame_at(p)).collect()
}

/// Residuals of the nine vanishing conditions at one point; condition `i`
/// holds when `residuals[i] ≤ tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanishingConditions {
    pub residuals: [f64; 9],
}

impl VanishingConditions {
    pub fn holds(&self, tol: f64) -> [bool; 9] {
        self.residuals.map(|r| r <= tol)
    }

    pub fn unanimous(&self, tol: f64) -> bool {
        let h = self.holds(tol);
        h.iter().all(|&b| b == h[0])
    }
}

pub fn vanishing_conditions(
    f: &PointFrame,
    curv: &StatisticalCurvatureAtPoint,
    sections: &[DVector<f64>],
    lambda: f64,
    tol: f64,
) -> Result<VanishingConditions> {
    let n = f.dim();
    let mut r = [0.0f64; 9];
    for x in sections {
        let t = phi_sectional_triple(f, curv, x, tol)?;
        r[0] = r[0].max(t.k.value.abs());
        r[1] = r[1].max((t.statistical - t.levi_civita).abs());
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let target = lambda * f.eta[j] * f.eta[k] * f.xi[i];
                r[2] = r[2].max((f.k[(i, j, k)] - target).abs());
            }
        }
    }
    r[3] = curv.kk.max_abs();
    r[4] = curv.s.max_abs_diff(&curv.r0);
    let basis = phi_basis_here(f)?;
    for x in probe_vectors(basis.horizontal()) {
        let kxx = f.k_of(&x, &x);
        r[5] = r[5].max(kxx.amax());
        r[6] = r[6].max(f.k_of(&x, &f.phi_of(&x)).amax());
        r[7] = r[7].max(f.phi_of(&kxx).amax());
        r[8] = r[8].max(f.parallel_to_xi_residual(&kxx));
    }
    Ok(VanishingConditions { residuals: r })
}

/// Records the nine conditions as booleans per point, asserts that they
/// agree, and asserts `K = 0` wherever all hold with `λ = 0`.
pub fn vanishing_audit(m: &ChartManifold, points: &[Point], tol: f64) -> Result<AuditReport> {
    let fs = frames(m, points)?;
    let reps = fs
        .par_iter()
        .map(|f| {
            let curv = statistical_curvature(f);
            let sections = sweep_sections(f, None, 0)?;
            let lambda = lambda_unchecked(f).lambda;
            let mut rep = AuditReport::new();
            vanishing_records(f, &curv, &sections, lambda, tol, &mut rep)?;
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(reps))
}

fn vanishing_records(
    f: &PointFrame,
    curv: &StatisticalCurvatureAtPoint,
    sections: &[DVector<f64>],
    lambda: f64,
    tol: f64,
    rep: &mut AuditReport,
) -> Result<VanishingConditions> {
    let at = f.coords();
    let v = vanishing_conditions(f, curv, sections, lambda, tol)?;
    for (name, &r) in VANISHING_CHECKS.iter().zip(&v.residuals) {
        rep.condition(name, &at, r, tol);
    }
    let spread = v.residuals.iter().fold(0.0f64, |a, &b| a.max(b));
    rep.assert_flag("vanishing.unanimous", &at, spread, v.unanimous(tol));
    if v.holds(tol).iter().all(|&b| b) && lambda.abs() <= tol {
        rep.assert(
            "vanishing.lambda_zero_forces_k_zero",
            &at,
            f.k.max_abs(),
            tol,
        );
    }
    Ok(v)
}

/// `max |(∇°_X φ)Y − (∇_X φ)Y − 2φK(X,Y)|` over coordinate pairs.
pub fn phi_derivative_identity(f: &PointFrame) -> f64 {
    let gamma = f.gamma();
    let n = f.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let lc = f.nabla_phi(&f.gamma0, i);
        let full = f.nabla_phi(&gamma, i);
        for k in 0..n {
            let phik = f.phi_of(&f.k_of(&f.basis(i), &f.basis(k)));
            let r = lc.column(k) - full.column(k) - phik * 2.0;
            worst = worst.max(r.amax());
        }
    }
    worst
}

/// `(‖∇°_ξ ξ‖, ‖∇_ξ ξ‖)`.
pub fn geodesic_xi(f: &PointFrame) -> (f64, f64) {
    let along = |gamma: &crate::tensor::Tensor3| {
        (0..f.dim()).fold(DVector::zeros(f.dim()), |acc, i| {
            acc + f.nabla_xi(gamma, i) * f.xi[i]
        })
    };
    (f.norm(&along(&f.gamma0)), f.norm(&along(&f.gamma())))
}

/// The three equivalent φ-compatibility conditions at one point:
/// `∇φ = 0`, `∇_X φY = φ∇_X Y`, and `(∇°_X φ)Y = 2φK(X,Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiCompatConditions {
    pub nabla_phi: f64,
    pub commutes: f64,
    pub levi_civita_form: f64,
}

impl PhiCompatConditions {
    pub fn at(f: &PointFrame) -> PhiCompatConditions {
        let n = f.dim();
        let gamma = f.gamma();
        let mut out = PhiCompatConditions {
            nabla_phi: 0.0,
            commutes: 0.0,
            levi_civita_form: 0.0,
        };
        for i in 0..n {
            out.nabla_phi = out.nabla_phi.max(f.nabla_phi(&gamma, i).amax());
            let lc = f.nabla_phi(&f.gamma0, i);
            let x = f.basis(i);
            for k in 0..n {
                let y = f.basis(k);
                // ∇_X(φY) for the field φY with Y constant in the chart
                let phiy = f.phi_of(&y);
                let lhs = &f.dphi[i] * &y + gamma.apply(&x, &phiy);
                let rhs = f.phi_of(&gamma.apply(&x, &y));
                out.commutes = out.commutes.max((lhs - rhs).amax());
                let form = lc.column(k) - f.phi_of(&f.k_of(&x, &y)) * 2.0;
                out.levi_civita_form = out.levi_civita_form.max(form.amax());
            }
        }
        out
    }

    pub fn holds(&self, tol: f64) -> [bool; 3] {
        [
            self.nabla_phi <= tol,
            self.commutes <= tol,
            self.levi_civita_form <= tol,
        ]
    }

    pub fn compatible(&self, tol: f64) -> bool {
        self.holds(tol)[0]
    }
}

/// `max_i |∇°_i φ|` from an evaluated frame.
pub fn cosymplectic_residual(f: &PointFrame) -> f64 {
    (0..f.dim())
        .map(|i| f.nabla_phi(&f.gamma0, i).amax())
        .fold(0.0, f64::max)
}

/// Largest distance of `∇_{∂i} ξ` and `∇°_{∂i} ξ` from the line of ξ.
pub fn xi_parallel_residual(f: &PointFrame) -> f64 {
    let gamma = f.gamma();
    (0..f.dim())
        .map(|i| {
            f.parallel_to_xi_residual(&f.nabla_xi(&gamma, i))
                .max(f.parallel_to_xi_residual(&f.nabla_xi(&f.gamma0, i)))
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiCompatOutcome {
    pub compatible: bool,
    pub report: AuditReport,
}

/// φ-compatibility over the points. When it holds everywhere, also asserts
/// the consequences: cosymplectic, `𝒦_φ = 0`, and `∇ξ`, `∇°ξ` parallel to ξ.
pub fn phi_compat_check(m: &ChartManifold, points: &[Point], tol: f64) -> Result<PhiCompatOutcome> {
    let fs = frames(m, points)?;
    let conds: Vec<PhiCompatConditions> = fs.par_iter().map(PhiCompatConditions::at).collect();
    let compatible = conds.iter().all(|c| c.compatible(tol));
    let reps = fs
        .par_iter()
        .zip(&conds)
        .map(|(f, c)| {
            let mut rep = AuditReport::new();
            phi_compat_records(f, c, compatible, tol, &mut rep)?;
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhiCompatOutcome {
        compatible,
        report: merge(reps),
    })
}

fn phi_compat_records(
    f: &PointFrame,
    c: &PhiCompatConditions,
    compatible: bool,
    tol: f64,
    rep: &mut AuditReport,
) -> Result<()> {
    let at = f.coords();
    rep.condition("phi_compat.nabla_phi_zero", &at, c.nabla_phi, tol);
    rep.condition("phi_compat.commutes_with_phi", &at, c.commutes, tol);
    rep.condition("phi_compat.levi_civita_form", &at, c.levi_civita_form, tol);
    let h = c.holds(tol);
    let spread = c.nabla_phi.max(c.commutes).max(c.levi_civita_form);
    rep.assert_flag(
        "phi_compat.equivalent",
        &at,
        spread,
        h[0] == h[1] && h[1] == h[2],
    );
    if compatible {
        rep.assert(
            "phi_compat.implies_cosymplectic",
            &at,
            cosymplectic_residual(f),
            tol,
        );
        let mut kphi: f64 = 0.0;
        for x in sweep_sections(f, None, 0)? {
            kphi = kphi.max(phi_sectional_k_curvature(f, &x, tol)?.value.abs());
        }
        rep.assert("phi_compat.implies_kphi_zero", &at, kphi, tol);
        rep.assert("phi_compat.xi_parallel", &at, xi_parallel_residual(f), tol);
    }
    Ok(())
}

/// `Ψ_X(Y,Z) = (∇_X g)(Y, φZ)` on coordinate triples, `psi[(i, j, k)]`.
pub fn psi_table(f: &PointFrame) -> crate::tensor::Tensor3 {
    let n = f.dim();
    let ng = f.nabla_g(&f.gamma()).0;
    crate::tensor::Tensor3::from_fn(n, |i, j, k| {
        (0..n).map(|m| ng[(i, j, m)] * f.phi[(m, k)]).sum()
    })
}

/// Ψ identities at one point. Requires a φ-compatible structure.
pub fn psi_check(f: &PointFrame, compatible: bool, tol: f64) -> Result<AuditReport> {
    if !compatible {
        return Err(Error::PreconditionNotMet(
            "the Ψ identities need a φ-compatible statistical connection".into(),
        ));
    }
    let n = f.dim();
    let at = f.coords();
    let psi = psi_table(f);
    let phi = &f.phi;
    // Ψ with φ applied to the second or third slot
    let psi_phi = |i: usize, a: &DVector<f64>, b: &DVector<f64>| -> f64 {
        let mut s = 0.0;
        for j in 0..n {
            for k in 0..n {
                s += psi[(i, j, k)] * a[j] * b[k];
            }
        }
        s
    };
    let col = |m: &DMatrix<f64>, k: usize| -> DVector<f64> { m.column(k).into_owned() };
    let (mut anti, mut cubic, mut slots, mut phi_rules): (f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let x = f.basis(i);
        for j in 0..n {
            for k in 0..n {
                let v = psi[(i, j, k)];
                anti = anti.max((v + psi[(i, k, j)]).abs());
                let target = 2.0 * f.inner(&f.phi_of(&f.k_of(&f.basis(j), &f.basis(k))), &x);
                cubic = cubic.max((v - target).abs());
                slots = slots
                    .max((v - psi[(j, i, k)]).abs())
                    .max((v - psi[(k, j, i)]).abs());
                let (ej, ek) = (f.basis(j), f.basis(k));
                let (pj, pk) = (col(phi, j), col(phi, k));
                phi_rules = phi_rules
                    .max((psi_phi(i, &pj, &ek) + psi_phi(i, &ej, &pk)).abs())
                    .max((psi_phi(i, &pj, &pk) - v).abs());
            }
        }
    }
    let mut rep = AuditReport::new();
    rep.assert("psi.antisymmetric", &at, anti, tol);
    rep.assert("psi.equals_phi_k_form", &at, cubic, tol);
    rep.assert("psi.slot_symmetric", &at, slots, tol);
    rep.assert("psi.phi_slot_rules", &at, phi_rules, tol);
    let mut kphi: f64 = 0.0;
    for x in sweep_sections(f, None, 0)? {
        kphi = kphi.max(phi_sectional_k_curvature(f, &x, tol)?.value.abs());
    }
    let psi_zero = rep.condition("psi.vanishes", &at, psi.max_abs(), tol);
    let kphi_zero = rep.condition("psi.kphi_zero", &at, kphi, tol);
    rep.assert_flag(
        "psi.vanishes_iff_kphi_zero",
        &at,
        psi.max_abs().max(kphi),
        psi_zero == kphi_zero,
    );
    rep.assert_flag(
        "psi.vanishes_when_compatible",
        &at,
        psi.max_abs(),
        psi_zero && kphi_zero,
    );
    Ok(rep)
}

/// Options for [`full_audit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub tol: f64,
    /// Adds random horizontal sections to each sweep.
    pub seed: Option<u64>,
}

/// Everything the curvature lab checks, per point, in point order.
pub fn full_audit(m: &ChartManifold, points: &[Point], opts: AuditOptions) -> Result<AuditReport> {
    let tol = opts.tol;
    let fs = frames(m, points)?;
    let conds: Vec<PhiCompatConditions> = fs.par_iter().map(PhiCompatConditions::at).collect();
    let compatible = conds.iter().all(|c| c.compatible(tol));
    let cosym_residuals: Vec<f64> = fs.iter().map(cosymplectic_residual).collect();
    let cosymplectic = cosym_residuals.iter().all(|&r| r <= tol);

    let per_point = fs
        .par_iter()
        .zip(&conds)
        .map(|(f, c)| point_audit(f, c, compatible, cosymplectic, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut kphi_values = Vec::new();
    let mut lambdas = Vec::new();
    let mut reps = Vec::new();
    for (rep, kv, lv) in per_point {
        kphi_values.extend(kv);
        lambdas.push(lv.lambda);
        reps.push(rep);
    }
    let mut rep = merge(reps);
    let at: Vec<f64> = Vec::new();
    rep.condition(
        "cosymplectic",
        &at,
        cosym_residuals.iter().fold(0.0, |a: f64, &b| a.max(b)),
        tol,
    );
    rep.condition_flag("phi_compatible", &at, 0.0, compatible);
    let gap = spread(&kphi_values);
    rep.value("kphi.constancy_gap", &at, gap);
    rep.condition("kphi.constant", &at, gap, CONSTANCY_TOL);
    rep.value("lambda.constancy_gap", &at, spread(&lambdas));
    Ok(rep)
}

pub fn spread(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    hi - lo
}

fn point_audit(
    f: &PointFrame,
    c: &PhiCompatConditions,
    compatible: bool,
    cosymplectic: bool,
    opts: AuditOptions,
) -> Result<(AuditReport, Vec<f64>, LambdaValue)> {
    let tol = opts.tol;
    let at = f.coords();
    let mut rep = AuditReport::new();

    let lv = lambda_unchecked(f);
    rep.value("lambda", &at, lv.lambda);
    rep.assert("lambda.k_x_xi", &at, lv.residual, tol);

    let curv = statistical_curvature(f);
    let sections = sweep_sections(
        f,
        opts.seed,
        if opts.seed.is_some() {
            RANDOM_SECTIONS
        } else {
            0
        },
    )?;
    let mut kphi_values = Vec::with_capacity(sections.len());
    for x in &sections {
        let xs = x.as_slice();
        let t = phi_sectional_triple(f, &curv, x, tol)?;
        let v = t.k.value;
        kphi_values.push(v);
        rep.value_on_section("kphi", &at, xs, v);
        rep.value_on_section("kphi.levi_civita", &at, xs, t.levi_civita);
        rep.value_on_section("kphi.statistical", &at, xs, t.statistical);
        rep.assert_on_section("kphi.nonpositive", &at, xs, v.max(0.0), tol);
        rep.assert_on_section("kphi.closed_form", &at, xs, t.k.closed_form_gap(), tol);
        let scale = SECTION_SCALES
            .iter()
            .map(|&s| {
                Ok(relative_gap(
                    phi_sectional_k_curvature(f, &(x * s), tol)?.value,
                    v,
                ))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        rep.assert_on_section("kphi.scale_invariant", &at, xs, scale, tol);
        let swapped = phi_sectional_k_curvature(f, &t.k.phi_x, tol)?.value;
        rep.assert_on_section(
            "kphi.swap_invariant",
            &at,
            xs,
            relative_gap(swapped, v),
            tol,
        );
        // another basis of the same plane, through the general quotient
        let y = x * 2.0 + &t.k.phi_x;
        let w = x - &t.k.phi_x * 3.0;
        let other = sectional_value(&f.g, &curv.kk, &y, &w)?;
        rep.push(
            "kphi.plane_basis_invariant",
            &at,
            relative_gap(other, v),
            relative_gap(other, v) <= tol,
            crate::report::RecordKind::Condition,
            None,
        );
        rep.assert_on_section(
            "kphi.triple_additive",
            &at,
            xs,
            t.additivity_residual(),
            loose(tol),
        );
    }

    vanishing_records(f, &curv, &sections, lv.lambda, tol, &mut rep)?;

    rep.assert(
        "curvature.decomposition",
        &at,
        curv.decomposition_residual(),
        loose(tol),
    );
    rep.assert(
        "curvature.conjugate_duality",
        &at,
        curv.duality_residual(&f.g),
        loose(tol),
    );
    let kks = curv.kk_symmetries(&f.g);
    rep.assert("kk.first_pair_antisymmetric", &at, kks.first_pair, tol);
    rep.assert("kk.last_pair_antisymmetric", &at, kks.last_pair, tol);
    rep.assert("kk.pair_exchange", &at, kks.pair_exchange, tol);
    rep.assert("kk.bianchi", &at, kks.bianchi, tol);
    let ss = curv.s_symmetries(&f.g);
    rep.assert("s.first_pair_antisymmetric", &at, ss.first_pair, loose(tol));
    rep.assert("s.last_pair_antisymmetric", &at, ss.last_pair, loose(tol));
    rep.assert("s.pair_exchange", &at, ss.pair_exchange, loose(tol));
    rep.assert("s.bianchi", &at, ss.bianchi, loose(tol));

    let conj = conjugate_connection(f);
    rep.assert(
        "conjugate.duality_equation",
        &at,
        conj.duality_residual,
        tol,
    );
    rep.assert(
        "phi_derivative.identity",
        &at,
        phi_derivative_identity(f),
        tol,
    );

    let (lc, full) = geodesic_xi(f);
    rep.value("geodesic.levi_civita_norm", &at, lc);
    rep.value("geodesic.norm", &at, full);
    if cosymplectic {
        rep.assert("geodesic.levi_civita_vanishes", &at, lc, tol);
    }
    // ∇_ξ ξ = λξ + ∇°_ξ ξ
    let lam_xi = (f.norm(&(&f.xi * lv.lambda)) - full).abs();
    rep.assert(
        "geodesic.lambda_xi",
        &at,
        if lc <= tol { lam_xi } else { 0.0 },
        tol,
    );

    phi_compat_records(f, c, compatible, tol, &mut rep)?;
    if compatible {
        rep.extend(psi_check(f, compatible, tol)?);
    }
    Ok((rep, kphi_values, lv))
}

fn merge(reps: Vec<AuditReport>) -> AuditReport {
    let mut out = AuditReport::new();
    for r in reps {
        out.extend(r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn pts(m: &ChartManifold) -> Vec<Point> {
        m.sample_points(Some(2))
    }

    #[test]
    fn vanishing_audit_branches() {
        let e = zoo::example_flat_acs(1).unwrap();
        let rep = vanishing_audit(&e.manifold, &pts(&e.manifold), 1e-9).unwrap();
        assert!(rep.passed());
        for name in VANISHING_CHECKS {
            assert!(rep.all_pass(name), "{name}");
        }
        let e = zoo::example_r3_negative();
        let rep = vanishing_audit(&e.manifold, &pts(&e.manifold), 1e-9).unwrap();
        assert!(rep.passed());
        for name in VANISHING_CHECKS {
            assert!(rep.by_check(name).all(|r| !r.pass), "{name}");
        }
        let mut m = e.manifold.clone();
        m.k = crate::statistical::DifferenceTensorField::zero(3, &m.coords);
        let rep = vanishing_audit(&m, &pts(&m), 1e-9).unwrap();
        assert!(rep.passed());
        assert!(rep.all_pass("vanishing.lambda_zero_forces_k_zero"));
    }

    #[test]
    fn phi_derivative_and_geodesics() {
        let e = zoo::example_r3_negative();
        let f = e
            .manifold
            .frame_at(&Point::from(&[0.4, 0.0, -1.0][..]))
            .unwrap();
        assert!(phi_derivative_identity(&f) <= 1e-15);
        assert_eq!(geodesic_xi(&f), (0.0, 0.0));
        let e = zoo::example_flat_acs(1).unwrap();
        let f = e
            .manifold
            .frame_at(&Point::from(&[0.4, 0.0, -1.0][..]))
            .unwrap();
        assert_eq!(geodesic_xi(&f), (0.0, 1.0));
        assert_eq!(phi_derivative_identity(&f), 0.0);
    }

    #[test]
    fn phi_compat_examples() {
        let e = zoo::example_flat_acs(1).unwrap();
        let out = phi_compat_check(&e.manifold, &pts(&e.manifold), 1e-9).unwrap();
        assert!(out.compatible);
        assert!(out.report.passed());
        assert!(out.report.all_pass("phi_compat.implies_kphi_zero"));

        let e = zoo::example_r3_negative();
        let out = phi_compat_check(&e.manifold, &pts(&e.manifold), 1e-9).unwrap();
        assert!(!out.compatible);
        assert!(out.report.passed());
        assert_eq!(
            out.report
                .by_check("phi_compat.implies_cosymplectic")
                .count(),
            0
        );

        let mut m = zoo::example_flat_acs(1).unwrap().manifold;
        m.k = crate::statistical::DifferenceTensorField::zero(3, &m.coords);
        assert!(phi_compat_check(&m, &pts(&m), 1e-9).unwrap().compatible);
    }

    #[test]
    fn psi_examples() {
        let e = zoo::example_flat_acs(1).unwrap();
        let f = e.manifold.frame_at(&Point::from(&[0.0; 3][..])).unwrap();
        assert_eq!(psi_table(&f).max_abs(), 0.0);
        let rep = psi_check(&f, true, 1e-9).unwrap();
        assert!(rep.passed());
        assert!(rep.all_pass("psi.vanishes"));
        assert!(matches!(
            psi_check(&f, false, 1e-9),
            Err(Error::PreconditionNotMet(_))
        ));
    }

    #[test]
    fn full_audit_on_examples() {
        let opts = AuditOptions {
            tol: 1e-9,
            seed: Some(3),
        };
        let e = zoo::example_r3_negative();
        let rep = full_audit(&e.manifold, &e.manifold.sample_points(None), opts).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        let values = rep.values("kphi");
        assert_eq!(values.len(), 27 * (4 + RANDOM_SECTIONS));
        assert!(values.iter().all(|v| (v + 1.0).abs() <= 1e-9));
        assert!(rep.all_pass("kphi.constant"));
        assert!(!rep.all_pass("phi_compatible"));
        assert!(rep.all_pass("cosymplectic"));

        let e = zoo::example_twisted_frame();
        let rep = full_audit(&e.manifold, &pts(&e.manifold), opts).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert!(!rep.all_pass("cosymplectic"));
        assert!(!rep.all_pass("phi_compatible"));
        for name in VANISHING_CHECKS {
            assert!(rep.all_pass(name));
        }
    }

    #[test]
    fn curved_entry_audit() {
        let e = zoo::example_sphere_product(0.8);
        let opts = AuditOptions {
            tol: 1e-9,
            seed: None,
        };
        let rep = full_audit(&e.manifold, &pts(&e.manifold), opts).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        for (v, s) in rep
            .values("kphi")
            .iter()
            .zip(rep.values("kphi.statistical"))
        {
            assert!((v + 0.64).abs() < 1e-12);
            assert!((s - 0.36).abs() < 1e-12);
        }
    }
}
