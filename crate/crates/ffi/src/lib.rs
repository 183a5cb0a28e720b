//! C ABI over the `qheis` toolkit.
//!
//! Every fallible call returns a [`QheisStatus`]; on failure the message is
//! available from [`qheis_last_error`] on the same thread.  Objects are
//! opaque and owned by the caller once returned; release them with the
//! matching `_free`.  Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qheis::braiding::analytic_identity_distance;
use qheis::dressing::{classify_orbit, dress, ActionId, OrbitFamily};
use qheis::groups::{Group, GroupId};
use qheis::harness::{run_suite, Report, RunConfig, Suite};
use qheis::kernel::scalar;
use qheis::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QheisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QheisGroup {
    H = 0,
    Htilde = 1,
    G = 2,
    Gtilde = 3,
    D = 4,
    Dtilde = 5,
    /// Uses the `r` argument.
    E = 6,
    /// Uses the `r` argument.
    Etilde = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QheisAction {
    HtildeOnGtilde = 0,
    GtildeOnHtilde = 1,
    HOnG = 2,
    GOnH = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QheisOrbitFamily {
    GtildePoint = 0,
    GtildePlane = 1,
    GtildeLeaf = 2,
    GPoint = 3,
    GLeaf = 4,
    HtildePoint = 5,
    HtildeRay = 6,
    HPoint = 7,
    HRay = 8,
}

/// Run settings; starts at the harness defaults.
pub struct QheisConfig(RunConfig);

pub struct QheisReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QheisStatus {
    match e {
        Error::Config { .. } => QheisStatus::Config,
        Error::Io(_) => QheisStatus::Io,
        Error::NonFinite(_)
        | Error::Quadrature(_)
        | Error::NotIntegrable(_)
        | Error::FactorNotConverged(_)
        | Error::OffLattice(_) => QheisStatus::Numerical,
        _ => QheisStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (QheisStatus, String)>) -> QheisStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QheisStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            QheisStatus::Panic
        }
    }
}

fn lift(e: Error) -> (QheisStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (QheisStatus, String) {
    (QheisStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (QheisStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn group_id(g: QheisGroup, r: f64) -> GroupId {
    match g {
        QheisGroup::H => GroupId::H,
        QheisGroup::Htilde => GroupId::Htilde,
        QheisGroup::G => GroupId::G,
        QheisGroup::Gtilde => GroupId::Gtilde,
        QheisGroup::D => GroupId::D,
        QheisGroup::Dtilde => GroupId::Dtilde,
        QheisGroup::E => GroupId::E { r },
        QheisGroup::Etilde => GroupId::Etilde { r },
    }
}

fn action_id(a: QheisAction) -> ActionId {
    match a {
        QheisAction::HtildeOnGtilde => ActionId::HtOnGt,
        QheisAction::GtildeOnHtilde => ActionId::GtOnHt,
        QheisAction::HOnG => ActionId::HOnG,
        QheisAction::GOnH => ActionId::GOnH,
    }
}

fn family_code(f: OrbitFamily) -> QheisOrbitFamily {
    match f {
        OrbitFamily::GtPoint => QheisOrbitFamily::GtildePoint,
        OrbitFamily::GtPlane => QheisOrbitFamily::GtildePlane,
        OrbitFamily::GtLeaf => QheisOrbitFamily::GtildeLeaf,
        OrbitFamily::GPoint => QheisOrbitFamily::GPoint,
        OrbitFamily::GLeaf => QheisOrbitFamily::GLeaf,
        OrbitFamily::HtPoint => QheisOrbitFamily::HtildePoint,
        OrbitFamily::HtRay => QheisOrbitFamily::HtildeRay,
        OrbitFamily::HPoint => QheisOrbitFamily::HPoint,
        OrbitFamily::HRay => QheisOrbitFamily::HRay,
    }
}

/// Message of the last failed call on this thread, or null.  The pointer
/// stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn qheis_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn qheis_config_new() -> *mut QheisConfig {
    Box::into_raw(Box::new(QheisConfig(RunConfig::default())))
}

/// # Safety
/// `cfg` must come from [`qheis_config_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qheis_config_free(cfg: *mut QheisConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live config.
#[no_mangle]
pub unsafe extern "C" fn qheis_config_set_lambda(cfg: *mut QheisConfig, lambda: f64) -> QheisStatus {
    guard(|| {
        cfg.as_mut().ok_or_else(|| null("config"))?.0.lambda = lambda;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live config.
#[no_mangle]
pub unsafe extern "C" fn qheis_config_set_n(cfg: *mut QheisConfig, n: usize) -> QheisStatus {
    guard(|| {
        cfg.as_mut().ok_or_else(|| null("config"))?.0.n = n;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live config.
#[no_mangle]
pub unsafe extern "C" fn qheis_config_set_grid(cfg: *mut QheisConfig, points: usize, half_width: f64) -> QheisStatus {
    guard(|| {
        let c = &mut cfg.as_mut().ok_or_else(|| null("config"))?.0;
        c.grid_n = points;
        c.grid_l = half_width;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live config.
#[no_mangle]
pub unsafe extern "C" fn qheis_config_set_tolerances(cfg: *mut QheisConfig, tol_grid: f64, tol_analytic: f64) -> QheisStatus {
    guard(|| {
        let c = &mut cfg.as_mut().ok_or_else(|| null("config"))?.0;
        c.tol_grid = tol_grid;
        c.tol_analytic = tol_analytic;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live config.
#[no_mangle]
pub unsafe extern "C" fn qheis_config_set_seed(cfg: *mut QheisConfig, seed: u64) -> QheisStatus {
    guard(|| {
        cfg.as_mut().ok_or_else(|| null("config"))?.0.seed = seed;
        Ok(())
    })
}

/// Comma-separated suite names, or `all`.
///
/// # Safety
/// `cfg` must be a live config and `suites` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qheis_config_set_suites(cfg: *mut QheisConfig, suites: *const c_char) -> QheisStatus {
    guard(|| {
        let c = &mut cfg.as_mut().ok_or_else(|| null("config"))?.0;
        if suites.is_null() {
            return Err(null("suites"));
        }
        let s = CStr::from_ptr(suites)
            .to_str()
            .map_err(|_| (QheisStatus::InvalidArgument, "suites is not UTF-8".to_string()))?;
        let mut list = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            list.extend(Suite::parse_list(part).map_err(lift)?);
        }
        c.suites = list;
        Ok(())
    })
}

/// Runs the configured suites.  On success `*out` owns a new report.
///
/// # Safety
/// `cfg` must be a live config and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qheis_run(cfg: *const QheisConfig, out: *mut *mut QheisReport) -> QheisStatus {
    guard(|| {
        let c = cfg.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = run_suite(&c.0).map_err(lift)?;
        *out = Box::into_raw(Box::new(QheisReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live report or null.
#[no_mangle]
pub unsafe extern "C" fn qheis_report_passed(report: *const QheisReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.summary.passed)
}

/// # Safety
/// `report` must be a live report or null.
#[no_mangle]
pub unsafe extern "C" fn qheis_report_failed(report: *const QheisReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.summary.failed)
}

/// The report as JSON; free with [`qheis_string_free`].  Null on failure.
///
/// # Safety
/// `report` must be a live report.
#[no_mangle]
pub unsafe extern "C" fn qheis_report_json(report: *const QheisReport) -> *mut c_char {
    let mut out = ptr::null_mut();
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let s = r.0.to_json().map_err(lift)?;
        out = CString::new(s)
            .map_err(|_| (QheisStatus::Io, "report contains NUL".to_string()))?
            .into_raw();
        Ok(())
    });
    out
}

/// # Safety
/// `report` must come from [`qheis_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qheis_report_free(report: *mut QheisReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qheis_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `ē(t) = e^{-2πit}`.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qheis_ebar(t: f64, re: *mut f64, im: *mut f64) -> QheisStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let z = scalar::ebar(t).map_err(lift)?;
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// `η_λ(r) = (e^{2λr} − 1) / 2λ`.
#[no_mangle]
pub extern "C" fn qheis_eta(lambda: f64, r: f64) -> f64 {
    scalar::eta(lambda, r)
}

/// `out = a · b`; all three arrays hold `len` coordinates.
///
/// # Safety
/// The arrays must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qheis_group_multiply(
    group: QheisGroup,
    n: usize,
    lambda: f64,
    r: f64,
    a: *const f64,
    b: *const f64,
    out: *mut f64,
    len: usize,
) -> QheisStatus {
    guard(|| {
        let g = Group::new(group_id(group, r), n, lambda).map_err(lift)?;
        let x = g.element(slice(a, len, "a")?.to_vec()).map_err(lift)?;
        let y = g.element(slice(b, len, "b")?.to_vec()).map_err(lift)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let z = g.multiply(&x, &y).map_err(lift)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(z.coords());
        Ok(())
    })
}

/// `out = a⁻¹`.
///
/// # Safety
/// The arrays must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qheis_group_inverse(
    group: QheisGroup,
    n: usize,
    lambda: f64,
    r: f64,
    a: *const f64,
    out: *mut f64,
    len: usize,
) -> QheisStatus {
    guard(|| {
        let g = Group::new(group_id(group, r), n, lambda).map_err(lift)?;
        let x = g.element(slice(a, len, "a")?.to_vec()).map_err(lift)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let z = g.inverse(&x).map_err(lift)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(z.coords());
        Ok(())
    })
}

/// Dresses `point` by `actor`; `out` has the length of `point`.
///
/// # Safety
/// `actor` holds `actor_len` doubles; `point` and `out` hold `point_len`.
#[no_mangle]
pub unsafe extern "C" fn qheis_dress(
    action: QheisAction,
    n: usize,
    lambda: f64,
    actor: *const f64,
    actor_len: usize,
    point: *const f64,
    point_len: usize,
    out: *mut f64,
) -> QheisStatus {
    guard(|| {
        let act = action_id(action);
        let ag = Group::new(act.actor(), n, lambda).map_err(lift)?;
        let sg = Group::new(act.space(), n, lambda).map_err(lift)?;
        let a = ag.element(slice(actor, actor_len, "actor")?.to_vec()).map_err(lift)?;
        let p = sg.element(slice(point, point_len, "point")?.to_vec()).map_err(lift)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let y = dress(act, &a, &p).map_err(lift)?;
        std::slice::from_raw_parts_mut(out, point_len).copy_from_slice(y.coords());
        Ok(())
    })
}

/// Orbit family of a point of `G`, `G̃`, `H` or `H̃`.  Up to `params_cap`
/// invariants are written to `params` and their count to `*params_len`.
///
/// # Safety
/// `point` holds `len` doubles, `params` holds `params_cap`, and the other
/// outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn qheis_classify(
    space: QheisGroup,
    n: usize,
    lambda: f64,
    point: *const f64,
    len: usize,
    family: *mut QheisOrbitFamily,
    params: *mut f64,
    params_cap: usize,
    params_len: *mut usize,
) -> QheisStatus {
    guard(|| {
        let g = Group::new(group_id(space, 0.0), n, lambda).map_err(lift)?;
        let p = g.element(slice(point, len, "point")?.to_vec()).map_err(lift)?;
        if family.is_null() || params_len.is_null() || (params.is_null() && params_cap > 0) {
            return Err(null("output"));
        }
        let d = classify_orbit(&p).map_err(lift)?;
        *family = family_code(d.family);
        let k = d.params.len().min(params_cap);
        if k > 0 {
            std::slice::from_raw_parts_mut(params, k).copy_from_slice(&d.params[..k]);
        }
        *params_len = d.params.len();
        Ok(())
    })
}

/// Distance to the identity of `T_{π_{r'}π_r} T_{π_r π_{r'}}` on the unit
/// Gaussian, from the closed-form Gaussian overlap.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qheis_braid_distance(lambda: f64, r: f64, r_prime: f64, out: *mut f64) -> QheisStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if ![lambda, r, r_prime].iter().all(|v| v.is_finite()) {
            return Err((QheisStatus::InvalidArgument, "non-finite braid parameter".into()));
        }
        *out = analytic_identity_distance(lambda, r, r_prime);
        Ok(())
    })
}
