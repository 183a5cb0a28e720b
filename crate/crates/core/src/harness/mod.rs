//! Verification harness: run configuration, check records, JSON reports and
//! orbit CSV export.

mod checks;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dressing::{classify_orbit, dress, sample_actor, sample_point, ActionId, OrbitFamily};
use crate::error::{Error, Result};
use crate::groups::{Group, GroupId};
use crate::rng::stream;

pub use checks::FROZEN_BRAID_DISTANCE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Groups,
    Dressing,
    Algebra,
    Representations,
    Braiding,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Groups, Suite::Dressing, Suite::Algebra, Suite::Representations, Suite::Braiding];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Groups => "groups",
            Suite::Dressing => "dressing",
            Suite::Algebra => "algebra",
            Suite::Representations => "representations",
            Suite::Braiding => "braiding",
        }
    }

    /// Parses a suite name; `all` expands to every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::from_str(s).map(|v| vec![v])
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| Error::Config {
            field: "suites",
            reason: format!("unknown suite `{s}`"),
        })
    }
}

/// Harness settings.  `out` is not echoed into reports, so the same run
/// written to two paths yields identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub lambda: f64,
    pub n: usize,
    pub grid_n: usize,
    pub grid_l: f64,
    /// Budget for grid-assembled checks; the per-check tolerances scale with
    /// `tol_grid / 1e-6`.
    pub tol_grid: f64,
    /// Budget for closed-form checks; scales with `tol_analytic / 1e-12`.
    pub tol_analytic: f64,
    pub seed: u64,
    pub suites: Vec<Suite>,
    /// Record wall time in the report.  Off by default so reports are
    /// reproducible byte for byte.
    pub timing: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_TOL_GRID: f64 = 1e-6;
pub const DEFAULT_TOL_ANALYTIC: f64 = 1e-12;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lambda: 1.0,
            n: 1,
            grid_n: 256,
            grid_l: 8.0,
            tol_grid: DEFAULT_TOL_GRID,
            tol_analytic: DEFAULT_TOL_ANALYTIC,
            seed: 42,
            suites: Suite::ALL.to_vec(),
            timing: false,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: &str| {
            Err(Error::Config {
                field,
                reason: reason.to_string(),
            })
        };
        if !self.lambda.is_finite() {
            return bad("lambda", "must be finite");
        }
        if self.n != 1 && self.n != 2 {
            return bad("n", "must be 1 or 2");
        }
        if self.grid_n < 16 || !self.grid_n.is_power_of_two() {
            return bad("grid_n", "must be a power of two, at least 16");
        }
        if !(self.grid_l.is_finite() && self.grid_l > 0.0) {
            return bad("grid_l", "must be positive");
        }
        if !(self.tol_grid.is_finite() && self.tol_grid > 0.0) {
            return bad("tol_grid", "must be positive");
        }
        if !(self.tol_analytic.is_finite() && self.tol_analytic > 0.0) {
            return bad("tol_analytic", "must be positive");
        }
        if self.suites.is_empty() {
            return bad("suites", "select at least one suite");
        }
        Ok(())
    }
}

/// One verified identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// Non-finite residuals are recorded as `f64::MAX` and fail.
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, residual: f64, tol: f64) -> Check {
        let residual = if residual.is_finite() { residual } else { f64::MAX };
        let anchor = anchor.into();
        let mut name = name.into();
        name.push_str(&format!(" [{anchor}]"));
        Check {
            name,
            anchor,
            residual,
            tol,
            pass: residual <= tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub summary: Summary,
    pub wall_ms: Option<u64>,
}

impl Report {
    pub fn new(config: RunConfig, checks: Vec<Check>, wall_ms: Option<u64>) -> Report {
        let passed = checks.iter().filter(|c| c.pass).count();
        Report {
            summary: Summary {
                passed,
                failed: checks.len() - passed,
            },
            config,
            checks,
            wall_ms,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Report> {
        serde_json::from_str(s).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Runs the selected suites in a fixed order.
pub fn run_suite(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let mut out = Vec::new();
    for s in suites {
        out.extend(checks::run(s, config)?);
    }
    let wall = config.timing.then(|| start.elapsed().as_millis() as u64);
    Ok(Report::new(config.clone(), out, wall))
}

/// Writes `contents` to a sibling temp file and renames it into place.
pub fn write_atomic(out: &Path, contents: &[u8]) -> Result<()> {
    let name = out
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", out.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = out.with_file_name(tmp_name);
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, out)
    })();
    if let Err(e) = res {
        let _ = fs::remove_file(&tmp);
        return Err(Error::Io(format!("{}: {e}", out.display())));
    }
    Ok(())
}

pub fn emit_report(report: &Report, out: &Path) -> Result<()> {
    write_atomic(out, report.to_json()?.as_bytes())
}

/// Parses `G`, `Gt`, `H` or `Ht`.
pub fn parse_space(s: &str) -> Result<GroupId> {
    match s {
        "G" => Ok(GroupId::G),
        "Gt" => Ok(GroupId::Gtilde),
        "H" => Ok(GroupId::H),
        "Ht" => Ok(GroupId::Htilde),
        _ => Err(Error::Config {
            field: "space",
            reason: format!("`{s}` is not one of G, Gt, H, Ht"),
        }),
    }
}

/// One orbit sample: the seed point's family and invariants, and the
/// coordinates of a dressed image of it.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRow {
    pub family: OrbitFamily,
    pub params: Vec<f64>,
    pub coords: Vec<f64>,
}

/// `count` dressed random points of `space` (with `n = 1`), cycling through
/// the orbit families.
pub fn orbit_rows(space: GroupId, count: usize, lambda: f64, seed: u64) -> Result<Vec<OrbitRow>> {
    let group = Group::new(space, 1, lambda)?;
    let action = ActionId::on(space)?;
    let fams = OrbitFamily::families(space);
    let mut rng = stream(seed, &format!("orbits.{space}"));
    (0..count)
        .map(|i| {
            let family = fams[i % fams.len()];
            let x = sample_point(&group, family, &mut rng)?;
            let gamma = sample_actor(&group, space, &mut rng)?;
            let y = dress(action, &gamma, &x)?;
            let d = classify_orbit(&x)?;
            Ok(OrbitRow {
                family: d.family,
                params: d.params,
                coords: y.coords,
            })
        })
        .collect()
}

/// CSV text for `rows`: `family,param_0..,coord_0..`, params padded to the
/// largest family of the space.
pub fn orbit_csv(space: GroupId, rows: &[OrbitRow]) -> Result<String> {
    let group = Group::new(space, 1, 0.0)?;
    let width = OrbitFamily::families(space).iter().map(|f| f.param_count(1)).max().unwrap_or(0);
    let mut header = vec!["family".to_string()];
    header.extend((0..width).map(|i| format!("param_{i}")));
    header.extend((0..group.dim()).map(|i| format!("coord_{i}")));
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(io)?;
    for row in rows {
        let mut rec = vec![row.family.label().to_string()];
        rec.extend((0..width).map(|i| row.params.get(i).map(|v| format!("{v:e}")).unwrap_or_default()));
        rec.extend(row.coords.iter().map(|v| format!("{v:e}")));
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn emit_orbits(space: GroupId, count: usize, lambda: f64, seed: u64, out: &Path) -> Result<()> {
    let rows = orbit_rows(space, count, lambda, seed)?;
    write_atomic(out, orbit_csv(space, &rows)?.as_bytes())
}
