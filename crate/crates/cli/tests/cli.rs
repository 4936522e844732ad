use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn acsm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acsm"))
        .args(args)
        .output()
        .unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

const R3: &str = r#"
name = "r3"
dimension = 3
coordinates = ["x", "y", "z"]
tolerance = 1e-9

[sampling]
lo = [-1.0, -1.0, -1.0]
hi = [1.0, 1.0, 1.0]

[metric]
"x,x" = 1
"y,y" = 1
"z,z" = 1

[phi]
"x,y" = -1
"y,x" = 1

[xi]
z = XI_Z

[connection]
"x,x,x" = "-1/2"
"x,x,y" = "1/2"
"x,y,y" = "1/2"
"y,x,x" = "1/2"
"y,x,y" = "1/2"
"y,y,y" = "-1/2"
"#;

fn write_spec(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn valid_spec_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "r3.toml", &R3.replace("XI_Z", "1"));
    let out = acsm(&["validate", &spec]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(records(&out).iter().all(|r| r["pass"] == true));
}

#[test]
fn failed_check_exits_one_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "bad.toml", &R3.replace("XI_Z", "2"));
    let out = acsm(&["validate", &spec]);
    assert_eq!(out.status.code(), Some(1));
    let failed: Vec<_> = records(&out)
        .into_iter()
        .filter(|r| r["pass"] == false)
        .collect();
    assert!(failed
        .iter()
        .any(|r| r["check"] == "almost_contact.eta_of_xi"));
}

#[test]
fn unparseable_expression_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "syntax.toml", &R3.replace("XI_Z", "\"x +\""));
    let out = acsm(&["validate", &spec]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('3'), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn vertical_section_exits_two() {
    let out = acsm(&["curvature", "zoo:example_r3_negative", "--section", "0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_file_and_bad_options_exit_two() {
    assert_eq!(
        acsm(&["validate", "/nonexistent/spec.toml"]).status.code(),
        Some(2)
    );
    assert_eq!(
        acsm(&["audit", "zoo:example_r3_negative", "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        acsm(&["audit", "zoo:example_r3_negative", "--checks", "nosuch"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(acsm(&["audit", "zoo:nosuch"]).status.code(), Some(2));
}

#[test]
fn json_records_have_the_documented_keys() {
    let out = acsm(&[
        "curvature",
        "zoo:example_r3_negative",
        "--section",
        "1,0,0",
        "--grid",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert!(!recs.is_empty());
    for r in &recs {
        for key in ["check", "point", "residual", "pass", "kind"] {
            assert!(r.get(key).is_some(), "{r}");
        }
        assert!(r["point"].as_array().unwrap().iter().all(Value::is_number));
    }
    let kphi: Vec<_> = recs.iter().filter(|r| r["check"] == "kphi").collect();
    assert_eq!(kphi.len(), 8);
    for r in kphi {
        assert!((r["value"].as_f64().unwrap() + 1.0).abs() <= 1e-9);
        assert_eq!(r["section"], serde_json::json!([1.0, 0.0, 0.0]));
    }
}

#[test]
fn checks_filter_and_table_format() {
    let out = acsm(&[
        "audit",
        "zoo:example_r3_negative",
        "--checks",
        "kphi.closed_form",
        "--grid",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(records(&out)
        .iter()
        .all(|r| r["check"] == "kphi.closed_form"));
    let table = acsm(&[
        "audit",
        "zoo:example_r3_negative",
        "--format",
        "table",
        "--grid",
        "1",
    ]);
    assert_eq!(table.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&table.stdout).contains("kphi.closed_form"));
}

#[test]
fn exported_zoo_entries_audit_identically() {
    let dir = tempfile::tempdir().unwrap();
    for name in [
        "zoo:example_r3_negative",
        "zoo:example_flat_acs:2",
        "zoo:random:5:7:mixed",
        "zoo:twisted_frame",
    ] {
        let file = dir.path().join("entry.toml");
        let file = file.to_str().unwrap();
        assert_eq!(
            acsm(&["export-zoo", name, "-o", file]).status.code(),
            Some(0)
        );
        let a = acsm(&["audit", name, "--grid", "2", "--seed", "3"]);
        let b = acsm(&["audit", file, "--grid", "2", "--seed", "3"]);
        let (ra, rb) = (records(&a), records(&b));
        // the zoo run adds checks against the entry's expected outcomes
        let rb_checks: Vec<_> = rb.iter().map(|r| &r["check"]).collect();
        let ra: Vec<_> = ra
            .into_iter()
            .filter(|r| !r["check"].as_str().unwrap().starts_with("expected."))
            .collect();
        assert_eq!(
            ra.iter().map(|r| &r["check"]).collect::<Vec<_>>(),
            rb_checks,
            "{name}"
        );
        for (x, y) in ra.iter().zip(&rb) {
            assert_eq!(x["pass"], y["pass"], "{name} {}", x["check"]);
            let (u, v) = (
                x["residual"].as_f64().unwrap(),
                y["residual"].as_f64().unwrap(),
            );
            assert!((u - v).abs() <= 1e-12, "{name} {}: {u} vs {v}", x["check"]);
        }
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn list_zoo_names_every_entry() {
    let out = acsm(&["list-zoo"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "zoo:example_flat_acs",
        "zoo:example_r3_negative",
        "zoo:random:",
    ] {
        assert!(text.contains(name));
    }
}
