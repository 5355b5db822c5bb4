use std::ffi::{CStr, CString};
use std::ptr;

use nonlocal_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(nl_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn chsh_bounds() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(nl_functional_chsh(&mut f), NlStatus::Ok);
        let mut classical = 0.0;
        assert_eq!(nl_classical_bound(f, &mut classical), NlStatus::Ok);
        assert_eq!(classical, 2.0);
        let mut upper = 0.0;
        assert_eq!(nl_npa_bound(f, 1, &mut upper), NlStatus::Ok);
        assert!((upper - 2.0 * 2f64.sqrt()).abs() < 1e-6);
        let mut lower = 0.0;
        assert_eq!(nl_see_saw(f, 2, 2, 5, 0, &mut lower), NlStatus::Ok);
        assert!(lower <= upper + 1e-6 && lower > 2.8);
        nl_functional_free(f);
    }
}

#[test]
fn box_handles() {
    unsafe {
        let mut pr = ptr::null_mut();
        assert_eq!(nl_box_pr(&mut pr), NlStatus::Ok);
        let (mut ok, mut violation) = (false, 1.0);
        assert_eq!(nl_nonsignalling(pr, 1e-12, &mut ok, &mut violation), NlStatus::Ok);
        assert!(ok && violation < 1e-12);
        let mut member = true;
        assert_eq!(nl_lhv_member(pr, &mut member), NlStatus::Ok);
        assert!(!member);
        let (mut feasible, mut margin) = (true, 0.0);
        assert_eq!(nl_npa_feasible(pr, 1, 1e-7, &mut feasible, &mut margin), NlStatus::Ok);
        assert!(!feasible && margin < -1e-3);

        let mut json = ptr::null_mut();
        assert_eq!(nl_box_to_json(pr, &mut json), NlStatus::Ok);
        let mut copy = ptr::null_mut();
        assert_eq!(nl_box_from_json(json, &mut copy), NlStatus::Ok);
        let mut f = ptr::null_mut();
        assert_eq!(nl_functional_chsh(&mut f), NlStatus::Ok);
        let mut value = 0.0;
        assert_eq!(nl_evaluate(f, copy, &mut value), NlStatus::Ok);
        assert!((value - 4.0).abs() < 1e-12);
        nl_string_free(json);
        nl_box_free(copy);
        nl_box_free(pr);
        nl_functional_free(f);

        let mut iso = ptr::null_mut();
        assert_eq!(nl_box_isotropic(0.4, &mut iso), NlStatus::Ok);
        assert_eq!(nl_lhv_member(iso, &mut member), NlStatus::Ok);
        assert!(member);
        nl_box_free(iso);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut b = ptr::null_mut();
        assert_eq!(nl_box_from_json(ptr::null(), &mut b), NlStatus::NullPointer);
        assert!(last_error().contains("null"));
        let bad = CString::new(r#"{"m":2,"n":2,"p":[1.0]}"#).unwrap();
        assert_eq!(nl_box_from_json(bad.as_ptr(), &mut b), NlStatus::InvalidInput);
        assert!(!last_error().is_empty());
        assert!(b.is_null());
        assert_eq!(nl_box_isotropic(1.5, &mut b), NlStatus::InvalidInput);
        let mut value = 0.0;
        assert_eq!(nl_classical_bound(ptr::null(), &mut value), NlStatus::NullPointer);
        let mut pr = ptr::null_mut();
        assert_eq!(nl_box_pr(&mut pr), NlStatus::Ok);
        assert_eq!(last_error(), "");
        assert_eq!(nl_lhv_member(pr, ptr::null_mut()), NlStatus::NullPointer);
        nl_box_free(pr);
        nl_box_free(ptr::null_mut());
        nl_string_free(ptr::null_mut());
        assert!(!CStr::from_ptr(nl_version()).to_bytes().is_empty());
    }
}

#[test]
fn json_entry_points() {
    unsafe {
        let element = CString::new(r#"{"m":2,"n":2,"re":[1,0,0,0],"im":[0,0,0,0]}"#).unwrap();
        let mut positive = false;
        assert_eq!(nl_cube_is_positive(element.as_ptr(), &mut positive), NlStatus::Ok);
        assert!(positive);

        let zx = CString::new(serde_json::to_string(&nonlocal::steering::fixtures::zx_functional()).unwrap()).unwrap();
        let (mut lhs, mut quantum) = (0.0, 0.0);
        assert_eq!(nl_steering_bounds(zx.as_ptr(), &mut lhs, &mut quantum), NlStatus::Ok);
        assert!((lhs - 2f64.sqrt()).abs() < 1e-9 && (quantum - 2.0).abs() < 1e-6);

        let phi = CString::new(serde_json::to_string(&nonlocal::steering::fixtures::phi_plus_assemblage()).unwrap()).unwrap();
        let mut member = true;
        assert_eq!(nl_lhs_member(phi.as_ptr(), 1e-7, &mut member), NlStatus::Ok);
        assert!(!member);

        let r = CString::new(serde_json::to_string(&nonlocal::approx::tsirelson_two_qubit()).unwrap()).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(nl_approximate(r.as_ptr(), 0.2, &mut out), NlStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        assert_eq!(v["N"], 8);
        assert!(v["distance"].as_f64().unwrap() <= 0.2);
        nl_string_free(out);
        assert_eq!(nl_approximate(r.as_ptr(), 5.0, &mut out), NlStatus::InvalidInput);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/nonlocal.h")).unwrap();
    let source = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20, "{exports:?}");
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for item in ["typedef struct NlBox NlBox;", "typedef struct NlFunctional NlFunctional;", "NL_STATUS_SOLVER_FAILURE = 3"] {
        assert!(header.contains(item), "{item}");
    }
}
