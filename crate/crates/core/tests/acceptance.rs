//! The twelve acceptance criteria at default settings.  Prints one
//! pass/fail line per criterion, then fails if any criterion failed.

use std::process::{Command, Stdio};

use qheis::dressing::classify_orbit;
use qheis::groups::{Group, GroupId};
use qheis::harness::{orbit_rows, run_suite, Check, RunConfig, Suite};
use qheis::kernel::scalar::eta;

struct Criterion {
    id: usize,
    title: &'static str,
    prefixes: &'static [&'static str],
}

const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, title: "group axioms", prefixes: &["groups."] },
    Criterion { id: 2, title: "double Lie algebra", prefixes: &["lie."] },
    Criterion { id: 3, title: "dressing actions and orbits", prefixes: &["dressing."] },
    Criterion { id: 4, title: "cocycles", prefixes: &["algebra."] },
    Criterion { id: 5, title: "projective relations", prefixes: &["reps.Q_r(", "reps.Qt_rs(r=-1,s", "reps.Qt_rs(r=0.3,s", "reps.Qt_rs(r=1,s", "reps.Q_pq", "reps.Qt_s", "reps.Qt_pq"] },
    Criterion { id: 6, title: "homomorphism arbiters", prefixes: &["reps.pi_r.homomorphism", "reps.pi_r.star", "reps.pit_rs.homomorphism"] },
    Criterion { id: 7, title: "restrictions", prefixes: &["reps.Qt_rs(r=-1).restricts", "reps.Qt_rs(r=0.3).restricts", "reps.Qt_rs(r=1).restricts", "reps.pit_pq.direct_integral"] },
    Criterion { id: 8, title: "inner tensor identities", prefixes: &["tensor."] },
    Criterion { id: 9, title: "intertwiners", prefixes: &["braid.S", "braid.T_", "braid.fromR", "braid.intertwiners", "braid.R."] },
    Criterion { id: 10, title: "quasitriangularity", prefixes: &["braid.composition."] },
    Criterion { id: 11, title: "FFT cross-check", prefixes: &["reps.pi_r.fft"] },
];

fn line(id: usize, title: &str, ok: bool, detail: &str) {
    println!("criterion {id:>2} {:<28} {} {detail}", title, if ok { "PASS" } else { "FAIL" });
}

/// Determinism, exit status and orbit self-classification.
fn harness_criterion() -> (bool, String) {
    let mut notes = Vec::new();
    let cfg = RunConfig {
        suites: vec![Suite::Groups, Suite::Algebra],
        ..RunConfig::default()
    };
    let a = run_suite(&cfg).unwrap().to_json().unwrap();
    let b = run_suite(&cfg).unwrap().to_json().unwrap();
    let deterministic = a == b;
    notes.push(format!("identical_reports={deterministic}"));

    let bin = env!("CARGO_BIN_EXE_qheis");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let failing = Command::new(bin)
        .args(["verify", "--suite", "groups", "--tol", "1e-12", "--out"])
        .arg(&out)
        .stderr(Stdio::null())
        .status()
        .unwrap();
    let passing = Command::new(bin)
        .args(["verify", "--suite", "algebra", "--out"])
        .arg(&out)
        .stderr(Stdio::null())
        .status()
        .unwrap();
    let exit_ok = !failing.success() && passing.success();
    notes.push(format!("exit_status_ok={exit_ok}"));

    let mut worst: f64 = 0.0;
    let mut families_ok = true;
    for space in [GroupId::G, GroupId::Gtilde, GroupId::H, GroupId::Htilde] {
        let group = Group::new(space, 1, 1.0).unwrap();
        for row in orbit_rows(space, 300, 1.0, 42).unwrap() {
            let d = classify_orbit(&group.element(row.coords.clone()).unwrap()).unwrap();
            families_ok &= d.family == row.family;
            if space == GroupId::Gtilde && row.coords[2] != 0.0 {
                let c = &row.coords;
                worst = worst.max((c[3] + c[0] * c[1] / eta(1.0, c[2]) - row.params[1]).abs());
            }
        }
    }
    let csv_ok = families_ok && worst < 1e-8;
    notes.push(format!("orbit_rows_self_classify={csv_ok}"));
    (deterministic && exit_ok && csv_ok, notes.join(" "))
}

#[test]
fn acceptance() {
    let report = run_suite(&RunConfig::default()).expect("default run");
    let mut all = true;
    let mut claimed = vec![false; report.checks.len()];
    for c in &CRITERIA {
        let mine: Vec<(usize, &Check)> = report
            .checks
            .iter()
            .enumerate()
            .filter(|(_, k)| c.prefixes.iter().any(|p| k.name.starts_with(p)))
            .collect();
        for (i, _) in &mine {
            claimed[*i] = true;
        }
        let failed: Vec<&str> = mine.iter().filter(|(_, k)| !k.pass).map(|(_, k)| k.name.as_str()).collect();
        let ok = !mine.is_empty() && failed.is_empty();
        let detail = if failed.is_empty() {
            format!("({} checks)", mine.len())
        } else {
            format!("({} checks, failing: {})", mine.len(), failed.join("; "))
        };
        line(c.id, c.title, ok, &detail);
        all &= ok;
    }
    let (ok, detail) = harness_criterion();
    line(12, "harness", ok, &detail);
    all &= ok;
    let orphans: Vec<&str> = report
        .checks
        .iter()
        .zip(&claimed)
        .filter(|(_, c)| !**c)
        .map(|(k, _)| k.name.as_str())
        .collect();
    assert!(orphans.is_empty(), "checks not mapped to a criterion: {orphans:?}");
    assert!(all, "at least one acceptance criterion failed");
}
