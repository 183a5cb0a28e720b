use std::path::Path;
use std::process::Command;

use qheis::dressing::{classify_orbit, OrbitFamily};
use qheis::groups::{Group, GroupId};
use qheis::harness::Report;
use qheis::kernel::scalar::eta;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qheis"))
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn verify_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let st = bin().args(["verify", "--suite", "groups", "--seed", "42", "--out"]).arg(p).status().unwrap();
        assert!(st.success());
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let report = Report::from_json(std::str::from_utf8(&x).unwrap()).unwrap();
    assert!(report.all_passed());
    assert_eq!(report.wall_ms, None);
    assert!(report.checks.iter().all(|c| c.pass == (c.residual <= c.tol)));
    assert_eq!(report.summary.passed, report.checks.len());
}

#[test]
fn verify_exit_status_follows_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let st = bin().args(["verify", "--suite", "groups", "--tol", "1e-12", "--out"]).arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(1));
    let report = Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.summary.failed >= 1);
    let st = bin().args(["verify", "--suite", "knots"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let st = bin().args(["verify", "--suite", "groups", "--grid-n", "100"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("grid_n"));
}

#[test]
fn orbit_csv_rows_self_classify() {
    let dir = tempfile::tempdir().unwrap();
    for (name, space) in [("G", GroupId::G), ("Gt", GroupId::Gtilde), ("H", GroupId::H), ("Ht", GroupId::Htilde)] {
        let out = dir.path().join(format!("{name}.csv"));
        let st = bin()
            .args(["orbits", "--space", name, "--count", "120", "--lambda", "1", "--seed", "7", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(st.success());
        let (header, rows) = read_rows(&out);
        assert_eq!(header[0], "family");
        assert_eq!(rows.len(), 120);
        let group = Group::new(space, 1, 1.0).unwrap();
        let first = header.iter().position(|h| h.starts_with("coord_")).unwrap();
        for row in rows {
            let coords: Vec<f64> = row[first..].iter().map(|v| v.parse().unwrap()).collect();
            let params: Vec<f64> = row[1..first].iter().filter(|v| !v.is_empty()).map(|v| v.parse().unwrap()).collect();
            let d = classify_orbit(&group.element(coords.clone()).unwrap()).unwrap();
            assert_eq!(d.family.label(), row[0]);
            match space {
                GroupId::G if coords[2] != 0.0 => assert_eq!(d.family, OrbitFamily::GLeaf),
                GroupId::Gtilde if d.family == OrbitFamily::GtLeaf => {
                    let s = coords[3] + coords[0] * coords[1] / eta(1.0, coords[2]);
                    assert!((s - params[1]).abs() < 1e-8, "{s} vs {}", params[1]);
                }
                _ => {}
            }
        }
    }
}

#[test]
fn orbits_with_zero_count_write_the_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.csv");
    assert!(bin().args(["orbits", "--space", "H", "--count", "0", "--out"]).arg(&out).status().unwrap().success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "family,param_0,param_1,coord_0,coord_1,coord_2\n");
    let st = bin().args(["orbits", "--space", "D", "--out"]).arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let st = bin().args(["orbits", "--space", "G", "--out", "/nonexistent/x.csv"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn braid_reports_the_double_braid() {
    let out = bin().args(["braid", "--r", "0.5", "--r-prime", "0.5", "--lambda", "1"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let d = v["distance_to_identity"].as_f64().unwrap();
    assert!((d - qheis::harness::FROZEN_BRAID_DISTANCE).abs() < 1e-6);
    assert!(v["composition_residual"].as_f64().unwrap() < 1e-6);
}
