//! The batch commands behind the `acsm` binary: validate, curvature, audit.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::almost_contact::validate_structure;
use crate::curvature_lab::audits::{
    full_audit, spread, AuditOptions, CONSTANCY_TOL, RANDOM_SECTIONS,
};
use crate::curvature_lab::{
    phi_sectional_triple, statistical_curvature, sweep_sections, VANISHING_CHECKS,
};
use crate::error::{Error, Result};
use crate::manifold::ChartManifold;
use crate::report::{AuditReport, RecordKind};
use crate::spec_file::load_spec;
use crate::statistical::{lambda_unchecked, validate_acs, validate_statistical};
use crate::tensor_core::{Point, ScalarField};
use crate::zoo::{self, ExpectedOutcomes};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    /// Overrides the input's own tolerance.
    pub tol: Option<f64>,
    /// Check-name prefixes to keep, e.g. `kphi` or `almost_contact.rank_phi`.
    pub checks: Option<Vec<String>>,
    pub format: Format,
    pub grid: Option<usize>,
    /// Adds random sections to sweeps.
    pub seed: Option<u64>,
}

impl RunConfig {
    fn tolerance(&self, m: &ChartManifold) -> Result<f64> {
        match self.tol {
            Some(t) if t > 0.0 && t.is_finite() => Ok(t),
            Some(t) => Err(Error::Spec(format!("tolerance must be positive, got {t}"))),
            None => Ok(m.tolerance),
        }
    }

    fn points(&self, m: &ChartManifold) -> Result<Vec<Point>> {
        if self.grid == Some(0) {
            return Err(Error::Spec("grid must be at least 1".into()));
        }
        Ok(m.sample_points(self.grid))
    }

    /// Keeps only the selected checks; a selection that matches nothing is
    /// an input error.
    fn select(&self, rep: AuditReport) -> Result<AuditReport> {
        let Some(prefixes) = &self.checks else {
            return Ok(rep);
        };
        let matches = |check: &str, p: &str| check == p || check.starts_with(&format!("{p}."));
        for p in prefixes {
            if !rep.records.iter().any(|r| matches(&r.check, p)) {
                return Err(Error::Spec(format!("no check named {p:?} in this run")));
            }
        }
        Ok(AuditReport {
            records: rep
                .records
                .into_iter()
                .filter(|r| prefixes.iter().any(|p| matches(&r.check, p)))
                .collect(),
        })
    }
}

/// A loaded input: a spec file or a zoo entry with its expected outcomes.
#[derive(Debug, Clone)]
pub struct Input {
    pub manifold: ChartManifold,
    pub expected: Option<ExpectedOutcomes>,
}

/// `zoo:`-prefixed names resolve in the zoo; anything else is a spec path.
pub fn load_input(arg: &str) -> Result<Input> {
    if arg.starts_with("zoo:") {
        let e = zoo::resolve(arg)?;
        return Ok(Input {
            manifold: e.manifold,
            expected: Some(e.expected),
        });
    }
    let text = std::fs::read_to_string(arg)?;
    Ok(Input {
        manifold: load_spec(&text)?,
        expected: None,
    })
}

fn validation(m: &ChartManifold, points: &[Point], tol: f64) -> Result<AuditReport> {
    let reps = points
        .par_iter()
        .map(|p| {
            let mut rep = validate_structure(m, p, tol)?;
            let f = m.frame_at(p)?;
            rep.extend(validate_statistical(&f, tol));
            rep.extend(validate_acs(&f, tol));
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = AuditReport::new();
    for r in reps {
        out.extend(r);
    }
    Ok(out)
}

/// Structure, statistical and almost-contact-statistical checks over the grid.
pub fn cmd_validate(input: &Input, cfg: &RunConfig) -> Result<AuditReport> {
    let m = &input.manifold;
    let tol = cfg.tolerance(m)?;
    cfg.select(validation(m, &cfg.points(m)?, tol)?)
}

/// Parses a comma-separated vector of expressions in the chart coordinates.
pub fn parse_section(text: &str, m: &ChartManifold) -> Result<Vec<ScalarField>> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != m.dim() {
        return Err(Error::Spec(format!(
            "section {text:?} has {} components, expected {}",
            parts.len(),
            m.dim()
        )));
    }
    parts
        .iter()
        .map(|p| ScalarField::parse(p.trim(), &m.coords).map_err(Error::from))
        .collect()
}

/// Per-point, per-section `(𝒦_φ^S, 𝒦_φ°, 𝒦_φ)` and λ, with constancy gaps.
/// `sections` of `None` sweeps a φ-basis at every point.
pub fn cmd_curvature(
    input: &Input,
    sections: Option<&[String]>,
    cfg: &RunConfig,
) -> Result<AuditReport> {
    let m = &input.manifold;
    let tol = cfg.tolerance(m)?;
    let points = cfg.points(m)?;
    let checked = validation(m, &points, tol)?;
    if !checked.passed() {
        return cfg.select(checked);
    }
    let user: Option<Vec<Vec<ScalarField>>> = sections
        .map(|s| s.iter().map(|t| parse_section(t, m)).collect())
        .transpose()?;
    let extra = if cfg.seed.is_some() {
        RANDOM_SECTIONS
    } else {
        0
    };
    let reps = points
        .par_iter()
        .map(|p| {
            let f = m.frame_at(p)?;
            let at = f.coords();
            let xs = match &user {
                Some(list) => list
                    .iter()
                    .map(|v| {
                        Ok(DVector::from_vec(
                            v.iter().map(|c| c.eval(p)).collect::<Result<_, _>>()?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => sweep_sections(&f, cfg.seed, extra)?,
            };
            let curv = statistical_curvature(&f);
            let mut rep = AuditReport::new();
            rep.value("lambda", &at, lambda_unchecked(&f).lambda);
            for x in &xs {
                let t = phi_sectional_triple(&f, &curv, x, tol)?;
                let s = x.as_slice();
                rep.value_on_section("kphi", &at, s, t.k.value);
                rep.value_on_section("kphi.levi_civita", &at, s, t.levi_civita);
                rep.value_on_section("kphi.statistical", &at, s, t.statistical);
            }
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = AuditReport::new();
    for r in reps {
        rep.extend(r);
    }
    let none: [f64; 0] = [];
    for q in ["kphi", "kphi.levi_civita", "kphi.statistical", "lambda"] {
        let gap = spread(&rep.values(q));
        rep.value(&format!("constancy.{q}"), &none, gap);
    }
    let gap = spread(&rep.values("kphi"));
    rep.condition("constancy.kphi_constant", &none, gap, CONSTANCY_TOL);
    cfg.select(rep)
}

/// Validation followed by the full curvature audit; zoo inputs also get
/// `expected.*` assertions against their known outcomes.
pub fn cmd_audit(input: &Input, cfg: &RunConfig) -> Result<AuditReport> {
    let m = &input.manifold;
    let tol = cfg.tolerance(m)?;
    let points = cfg.points(m)?;
    let mut rep = validation(m, &points, tol)?;
    if !rep.passed() {
        return cfg.select(rep);
    }
    rep.extend(full_audit(
        m,
        &points,
        AuditOptions {
            tol,
            seed: cfg.seed,
        },
    )?);
    if let Some(e) = &input.expected {
        expected_records(&mut rep, e, tol);
    }
    cfg.select(rep)
}

fn expected_records(rep: &mut AuditReport, e: &ExpectedOutcomes, tol: f64) {
    let mut add = AuditReport::new();
    let none: [f64; 0] = [];
    let per_value =
        |add: &mut AuditReport, rep: &AuditReport, check: &str, name: &str, target: f64| {
            for r in rep.by_check(check) {
                if let Some(v) = r.value {
                    add.assert(name, &r.point, (v - target).abs(), tol);
                }
            }
        };
    if let Some(l) = e.lambda {
        per_value(&mut add, rep, "lambda", "expected.lambda", l);
    }
    if let Some(k) = e.k_phi {
        per_value(&mut add, rep, "kphi", "expected.kphi", k);
    }
    if let Some((lc, full)) = e.geodesic {
        per_value(
            &mut add,
            rep,
            "geodesic.levi_civita_norm",
            "expected.geodesic_levi_civita",
            lc,
        );
        per_value(&mut add, rep, "geodesic.norm", "expected.geodesic", full);
    }
    let flag = |add: &mut AuditReport, rep: &AuditReport, check: &str, name: &str, want: bool| {
        let got = rep.all_pass(check);
        add.assert_flag(
            name,
            &none,
            if got == want { 0.0 } else { 1.0 },
            got == want,
        );
    };
    if let Some(c) = e.cosymplectic {
        flag(&mut add, rep, "cosymplectic", "expected.cosymplectic", c);
    }
    if let Some(c) = e.phi_compatible {
        flag(
            &mut add,
            rep,
            "phi_compatible",
            "expected.phi_compatible",
            c,
        );
    }
    if let Some(v) = e.vanishing {
        let agree = VANISHING_CHECKS.iter().all(|name| {
            rep.by_check(name)
                .filter(|r| r.kind == RecordKind::Condition)
                .all(|r| r.pass == v)
        });
        add.assert_flag(
            "expected.vanishing",
            &none,
            if agree { 0.0 } else { 1.0 },
            agree,
        );
    }
    rep.extend(add);
}

pub fn render(rep: &AuditReport, format: Format) -> String {
    match format {
        Format::Json => rep.to_json_lines(),
        Format::Table => rep.to_table(),
    }
}

/// Exit status for a command result: 0 pass, 1 failed assertion, 2 input error.
pub fn exit_code(result: &Result<AuditReport>) -> i32 {
    match result {
        Ok(rep) if rep.passed() => EXIT_OK,
        Ok(_) => EXIT_FAILED,
        Err(_) => EXIT_INPUT,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zoo_input(name: &str) -> Input {
        load_input(name).unwrap()
    }

    #[test]
    fn validate_examples() {
        let cfg = RunConfig::default();
        let rep = cmd_validate(&zoo_input("zoo:example_r3_negative"), &cfg).unwrap();
        assert!(rep.passed());
        assert!(rep.records.iter().all(|r| r.residual <= 1e-9));
    }

    #[test]
    fn audit_flat_example() {
        let cfg = RunConfig {
            grid: Some(2),
            ..RunConfig::default()
        };
        let rep = cmd_audit(&zoo_input("zoo:example_flat_acs:2"), &cfg).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert!(rep.all_pass("expected.vanishing"));
        assert!(rep.values("geodesic.norm").iter().all(|&v| v == 1.0));
    }

    #[test]
    fn curvature_sweep_and_sections() {
        let cfg = RunConfig::default();
        let input = zoo_input("zoo:example_r3_negative");
        let rep = cmd_curvature(&input, None, &cfg).unwrap();
        assert!(rep.values("kphi").iter().all(|&v| (v + 1.0).abs() <= 1e-9));
        assert!(rep.values("constancy.kphi")[0] <= 1e-9);
        let sections = vec!["3, -4, 0".to_string(), "cos(z), sin(z), 0".to_string()];
        let rep = cmd_curvature(&input, Some(&sections), &cfg).unwrap();
        assert_eq!(rep.values("kphi").len(), 27 * 2);
        let xi = vec!["0,0,1".to_string()];
        assert!(matches!(
            cmd_curvature(&input, Some(&xi), &cfg),
            Err(Error::NotHorizontal { .. })
        ));
    }

    #[test]
    fn check_selection() {
        let cfg = RunConfig {
            checks: Some(vec!["almost_contact.rank_phi".into()]),
            ..RunConfig::default()
        };
        let rep = cmd_validate(&zoo_input("zoo:example_r3_negative"), &cfg).unwrap();
        assert_eq!(rep.records.len(), 27);
        let cfg = RunConfig {
            checks: Some(vec!["nonexistent".into()]),
            ..RunConfig::default()
        };
        assert!(cmd_validate(&zoo_input("zoo:example_r3_negative"), &cfg).is_err());
        let cfg = RunConfig {
            tol: Some(-1.0),
            ..RunConfig::default()
        };
        assert!(cmd_validate(&zoo_input("zoo:example_r3_negative"), &cfg).is_err());
    }

    #[test]
    fn exit_codes() {
        let mut rep = AuditReport::new();
        assert_eq!(exit_code(&Ok(rep.clone())), EXIT_OK);
        rep.assert("x", &[], 1.0, 0.0);
        assert_eq!(exit_code(&Ok(rep)), EXIT_FAILED);
        assert_eq!(
            exit_code(&Err(Error::UnknownZooEntry("x".into()))),
            EXIT_INPUT
        );
    }
}
