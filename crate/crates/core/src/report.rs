//! Per-point check records and their JSON-lines / table rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

/// How a record participates in the overall verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    /// Must pass for the run to succeed.
    Assert,
    /// A mathematical condition that may legitimately be true or false;
    /// `pass` carries its truth value.
    Condition,
    /// A computed quantity, reported in `value`.
    Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub check: String,
    pub point: Vec<f64>,
    pub residual: f64,
    pub pass: bool,
    pub kind: RecordKind,
    pub value: Option<f64>,
    /// Tangent vector the record refers to, for per-section quantities.
    pub section: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    pub records: Vec<CheckRecord>,
}

/// Worst residual of one check over all its records.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub check: String,
    pub kind: RecordKind,
    pub worst_residual: f64,
    pub count: usize,
    pub passed: usize,
}

impl AuditReport {
    pub fn new() -> AuditReport {
        AuditReport::default()
    }

    /// Records an assertion that passes when `residual ≤ tol`.
    pub fn assert(&mut self, check: &str, point: &[f64], residual: f64, tol: f64) -> bool {
        let pass = residual <= tol;
        self.push(check, point, residual, pass, RecordKind::Assert, None);
        pass
    }

    /// Records an assertion with an explicit verdict.
    pub fn assert_flag(&mut self, check: &str, point: &[f64], residual: f64, pass: bool) {
        self.push(check, point, residual, pass, RecordKind::Assert, None);
    }

    /// Records a condition that holds when `residual ≤ tol`, and returns it.
    pub fn condition(&mut self, check: &str, point: &[f64], residual: f64, tol: f64) -> bool {
        let holds = residual <= tol;
        self.push(check, point, residual, holds, RecordKind::Condition, None);
        holds
    }

    pub fn condition_flag(&mut self, check: &str, point: &[f64], residual: f64, holds: bool) {
        self.push(check, point, residual, holds, RecordKind::Condition, None);
    }

    pub fn value(&mut self, check: &str, point: &[f64], value: f64) {
        self.push(check, point, 0.0, true, RecordKind::Value, Some(value));
    }

    pub fn push(
        &mut self,
        check: &str,
        point: &[f64],
        residual: f64,
        pass: bool,
        kind: RecordKind,
        value: Option<f64>,
    ) {
        self.records.push(CheckRecord {
            check: check.to_string(),
            point: point.to_vec(),
            residual,
            pass,
            kind,
            value,
            section: None,
        });
    }

    /// Records a value computed on the section spanned by `x` (and `φx`).
    pub fn value_on_section(&mut self, check: &str, point: &[f64], x: &[f64], value: f64) {
        self.push(check, point, 0.0, true, RecordKind::Value, Some(value));
        self.tag_last(x);
    }

    pub fn assert_on_section(
        &mut self,
        check: &str,
        point: &[f64],
        x: &[f64],
        residual: f64,
        tol: f64,
    ) -> bool {
        let pass = self.assert(check, point, residual, tol);
        self.tag_last(x);
        pass
    }

    fn tag_last(&mut self, x: &[f64]) {
        if let Some(r) = self.records.last_mut() {
            r.section = Some(x.to_vec());
        }
    }

    pub fn extend(&mut self, other: AuditReport) {
        self.records.extend(other.records);
    }

    /// True when every assertion passed.
    pub fn passed(&self) -> bool {
        self.records
            .iter()
            .filter(|r| r.kind == RecordKind::Assert)
            .all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records
            .iter()
            .filter(|r| r.kind == RecordKind::Assert && !r.pass)
    }

    pub fn by_check<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.records.iter().filter(move |r| r.check == check)
    }

    /// Largest residual recorded under `check` (0 if absent).
    pub fn worst(&self, check: &str) -> f64 {
        self.by_check(check).fold(0.0, |m, r| m.max(r.residual))
    }

    /// True when at least one record exists for `check` and all of them pass.
    pub fn all_pass(&self, check: &str) -> bool {
        let mut any = false;
        for r in self.by_check(check) {
            any = true;
            if !r.pass {
                return false;
            }
        }
        any
    }

    pub fn values(&self, check: &str) -> Vec<f64> {
        self.by_check(check).filter_map(|r| r.value).collect()
    }

    /// One summary per check name, in first-appearance order.
    pub fn summary(&self) -> Vec<CheckSummary> {
        let mut order: Vec<String> = Vec::new();
        let mut map: BTreeMap<String, CheckSummary> = BTreeMap::new();
        for r in &self.records {
            let s = map.entry(r.check.clone()).or_insert_with(|| {
                order.push(r.check.clone());
                CheckSummary {
                    check: r.check.clone(),
                    kind: r.kind,
                    worst_residual: 0.0,
                    count: 0,
                    passed: 0,
                }
            });
            s.worst_residual = s.worst_residual.max(r.residual);
            s.count += 1;
            s.passed += r.pass as usize;
        }
        order.into_iter().map(|c| map.remove(&c).unwrap()).collect()
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&json_line(r));
            out.push('\n');
        }
        out
    }

    /// Fixed-width table, one row per record, followed by a per-check summary.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .records
            .iter()
            .map(|r| r.check.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let _ = writeln!(
            out,
            "{:<width$}  {:<9}  {:<5}  {:>24}  {:>24}  point",
            "check", "kind", "pass", "residual", "value"
        );
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:<width$}  {:<9}  {:<5}  {:>24}  {:>24}  [{}]{}",
                r.check,
                kind_name(r.kind),
                r.pass,
                num(r.residual),
                r.value.map(num).unwrap_or_default(),
                join(&r.point, ", "),
                r.section
                    .as_ref()
                    .map(|x| format!(" section [{}]", join(x, ", ")))
                    .unwrap_or_default()
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<width$}  {:<9}  {:>9}  {:>24}",
            "summary", "kind", "pass/all", "worst residual"
        );
        for s in self.summary() {
            let _ = writeln!(
                out,
                "{:<width$}  {:<9}  {:>9}  {:>24}",
                s.check,
                kind_name(s.kind),
                format!("{}/{}", s.passed, s.count),
                num(s.worst_residual)
            );
        }
        out
    }
}

fn kind_name(k: RecordKind) -> &'static str {
    match k {
        RecordKind::Assert => "assert",
        RecordKind::Condition => "condition",
        RecordKind::Value => "value",
    }
}

fn join(v: &[f64], sep: &str) -> String {
    v.iter().map(|&c| num(c)).collect::<Vec<_>>().join(sep)
}

/// 17 significant digits; non-finite values become `null`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

fn json_line(r: &CheckRecord) -> String {
    let check = serde_json::to_string(&r.check).expect("string serialization");
    let kind = serde_json::to_string(&r.kind).expect("enum serialization");
    let point = join(&r.point, ",");
    let mut line = format!(
        "{{\"check\":{check},\"point\":[{point}],\"residual\":{},\"pass\":{},\"kind\":{kind}",
        num(r.residual),
        r.pass
    );
    if let Some(v) = r.value {
        let _ = write!(line, ",\"value\":{}", num(v));
    }
    if let Some(x) = &r.section {
        let _ = write!(line, ",\"section\":[{}]", join(x, ","));
    }
    line.push('}');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_lines_schema() {
        let mut rep = AuditReport::new();
        rep.assert("a.b", &[1.0, -0.5], 1e-12, 1e-9);
        rep.value_on_section("k_phi", &[0.0], &[1.0], -1.0);
        let text = rep.to_json_lines();
        let lines: Vec<serde_json::Value> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 2);
        for l in &lines {
            for key in ["check", "point", "residual", "pass"] {
                assert!(l.get(key).is_some(), "missing {key} in {l}");
            }
        }
        assert_eq!(lines[0]["check"], "a.b");
        assert_eq!(lines[0]["pass"], true);
        assert_eq!(lines[1]["value"].as_f64(), Some(-1.0));
        assert_eq!(lines[1]["section"][0].as_f64(), Some(1.0));
        assert!(lines[0].get("section").is_none());
        assert!(text.contains("-5.0000000000000000e-1"));
    }

    #[test]
    fn verdicts() {
        let mut rep = AuditReport::new();
        rep.condition("c", &[], 1.0, 1e-9);
        assert!(rep.passed());
        rep.assert("a", &[], 1.0, 1e-9);
        assert!(!rep.passed());
        assert_eq!(rep.failures().count(), 1);
        assert_eq!(rep.worst("c"), 1.0);
        assert!(!rep.all_pass("missing"));
        let table = rep.to_table();
        assert!(table.contains("summary"));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(num(f64::NAN), "null");
    }
}
