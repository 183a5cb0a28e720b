use std::ffi::{CStr, CString};
use std::ptr;

use qheis_ffi::*;

fn last_error() -> String {
    let p = qheis_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalars() {
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { qheis_ebar(0.25, &mut re, &mut im) }, QheisStatus::Ok);
    assert!(re.abs() < 1e-15 && (im + 1.0).abs() < 1e-15);
    assert_eq!(unsafe { qheis_ebar(f64::NAN, &mut re, &mut im) }, QheisStatus::Numerical);
    assert_eq!(unsafe { qheis_ebar(0.0, ptr::null_mut(), &mut im) }, QheisStatus::NullPointer);
    assert!(last_error().contains("null"));
    assert!((qheis_eta(1.0, 0.5) - (1f64.exp() - 1.0) / 2.0).abs() < 1e-15);
    assert_eq!(qheis_eta(0.0, 0.7), 0.7);
}

#[test]
fn group_law_and_inverse() {
    let a = [1.0, 2.0, 3.0];
    let b = [4.0, 5.0, 6.0];
    let mut out = [0.0; 3];
    let st = unsafe { qheis_group_multiply(QheisGroup::H, 1, 1.0, 0.0, a.as_ptr(), b.as_ptr(), out.as_mut_ptr(), 3) };
    assert_eq!(st, QheisStatus::Ok);
    assert_eq!(out, [5.0, 7.0, 14.0]);
    let st = unsafe { qheis_group_inverse(QheisGroup::H, 1, 1.0, 0.0, a.as_ptr(), out.as_mut_ptr(), 3) };
    assert_eq!(st, QheisStatus::Ok);
    assert_eq!(out, [-1.0, -2.0, -1.0]);
    let st = unsafe { qheis_group_multiply(QheisGroup::G, 1, 1.0, 0.0, a.as_ptr(), b.as_ptr(), out.as_mut_ptr(), 2) };
    assert_eq!(st, QheisStatus::InvalidArgument);
    assert!(last_error().contains("dimension"));
}

#[test]
fn dressing_and_classification() {
    // flat limit: (p − r y, q + r x, r)
    let actor = [0.5, -0.25, 3.0];
    let point = [1.0, 2.0, 2.0];
    let mut out = [0.0; 3];
    let st = unsafe { qheis_dress(QheisAction::HOnG, 1, 0.0, actor.as_ptr(), 3, point.as_ptr(), 3, out.as_mut_ptr()) };
    assert_eq!(st, QheisStatus::Ok);
    assert_eq!(out, [1.5, 3.0, 2.0]);

    let mut fam = QheisOrbitFamily::HPoint;
    let mut params = [0.0; 4];
    let mut count = 0usize;
    let st = unsafe {
        qheis_classify(QheisGroup::G, 1, 1.0, out.as_ptr(), 3, &mut fam, params.as_mut_ptr(), 4, &mut count)
    };
    assert_eq!(st, QheisStatus::Ok);
    assert_eq!(fam, QheisOrbitFamily::GLeaf);
    assert_eq!((count, params[0]), (1, 2.0));
    let st = unsafe {
        qheis_classify(QheisGroup::D, 1, 1.0, params.as_ptr(), 6, &mut fam, params.as_mut_ptr(), 4, &mut count)
    };
    assert_ne!(st, QheisStatus::Ok);
}

#[test]
fn braid_distance_matches_frozen_value() {
    let mut d = 0.0;
    assert_eq!(unsafe { qheis_braid_distance(1.0, 0.5, 0.5, &mut d) }, QheisStatus::Ok);
    assert!((d - qheis::harness::FROZEN_BRAID_DISTANCE).abs() < 1e-12);
    assert_eq!(unsafe { qheis_braid_distance(0.0, 0.5, 0.5, &mut d) }, QheisStatus::Ok);
    assert!(d < 1e-12);
}

#[test]
fn run_and_report_lifecycle() {
    unsafe {
        let cfg = qheis_config_new();
        let suites = CString::new("groups, algebra").unwrap();
        assert_eq!(qheis_config_set_suites(cfg, suites.as_ptr()), QheisStatus::Ok);
        assert_eq!(qheis_config_set_seed(cfg, 7), QheisStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(qheis_run(cfg, &mut report), QheisStatus::Ok);
        assert!(qheis_report_passed(report) > 0);
        assert_eq!(qheis_report_failed(report), 0);
        let json = qheis_report_json(report);
        let text = CStr::from_ptr(json).to_str().unwrap();
        let back = qheis::harness::Report::from_json(text).unwrap();
        assert_eq!(back.config.seed, 7);
        qheis_string_free(json);
        qheis_report_free(report);

        assert_eq!(qheis_config_set_n(cfg, 3), QheisStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(qheis_run(cfg, &mut report), QheisStatus::Config);
        assert!(report.is_null());
        assert!(last_error().contains("`n`"));
        let bad = CString::new("knots").unwrap();
        assert_eq!(qheis_config_set_suites(cfg, bad.as_ptr()), QheisStatus::Config);
        qheis_config_free(cfg);
    }
    assert_eq!(unsafe { qheis_config_set_lambda(ptr::null_mut(), 1.0) }, QheisStatus::NullPointer);
    assert_eq!(unsafe { qheis_report_passed(ptr::null()) }, 0);
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/qheis.h");
    for name in [
        "qheis_last_error",
        "qheis_config_new",
        "qheis_config_free",
        "qheis_config_set_suites",
        "qheis_run",
        "qheis_report_json",
        "qheis_report_free",
        "qheis_string_free",
        "qheis_ebar",
        "qheis_eta",
        "qheis_group_multiply",
        "qheis_group_inverse",
        "qheis_dress",
        "qheis_classify",
        "qheis_braid_distance",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
