//! Exercises the C surface from Rust: handle lifecycles, status codes,
//! and the generated header.

use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use linkpack_ffi::*;

fn read_and_free(text: *mut c_char) -> String {
    assert!(!text.is_null());
    let copy = unsafe { CStr::from_ptr(text) }
        .to_str()
        .expect("library strings are utf-8")
        .to_string();
    unsafe { lp_string_free(text) };
    copy
}

fn last_error() -> String {
    read_and_free(lp_last_error_message())
}

#[test]
fn hopf_pair_certifies_through_the_c_surface() {
    unsafe {
        let mut link: *mut LpLink = ptr::null_mut();
        assert_eq!(lp_link_canonical_hopf(0.2, &mut link), LpStatus::Ok);

        let red = CString::new("r").unwrap();
        let blue = CString::new("b").unwrap();
        let mut lk = 0i64;
        assert_eq!(
            lp_linking_number(link, red.as_ptr(), blue.as_ptr(), &mut lk),
            LpStatus::Ok
        );
        assert_eq!(lk.abs(), 1);

        let mut cert: *mut LpCertificate = ptr::null_mut();
        assert_eq!(
            lp_certify(link, red.as_ptr(), blue.as_ptr(), 0.2, &mut cert),
            LpStatus::Ok
        );
        let mut eq1 = false;
        assert_eq!(lp_certificate_eq1(cert, &mut eq1), LpStatus::Ok);
        assert!(eq1);

        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(lp_certificate_to_json(cert, &mut json), LpStatus::Ok);
        assert!(read_and_free(json).contains("\"eq1\""));

        let mut fingerprint: *mut c_char = ptr::null_mut();
        assert_eq!(
            lp_certificate_fingerprint(cert, &mut fingerprint),
            LpStatus::Ok
        );
        assert!(!read_and_free(fingerprint).is_empty());

        lp_certificate_free(cert);
        lp_link_free(link);
    }
}

#[test]
fn split_pair_does_not_certify() {
    unsafe {
        let mut link: *mut LpLink = ptr::null_mut();
        assert_eq!(lp_link_split_pair(0.2, &mut link), LpStatus::Ok);
        let red = CString::new("r").unwrap();
        let blue = CString::new("b").unwrap();
        let mut cert: *mut LpCertificate = ptr::null_mut();
        assert_eq!(
            lp_certify(link, red.as_ptr(), blue.as_ptr(), 0.2, &mut cert),
            LpStatus::Ok
        );
        let mut eq1 = true;
        assert_eq!(lp_certificate_eq1(cert, &mut eq1), LpStatus::Ok);
        assert!(!eq1);
        lp_certificate_free(cert);
        lp_link_free(link);
    }
}

#[test]
fn link_json_round_trips_through_handles() {
    unsafe {
        let mut link: *mut LpLink = ptr::null_mut();
        assert_eq!(lp_link_canonical_hopf(0.1, &mut link), LpStatus::Ok);
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(lp_link_to_json(link, &mut json), LpStatus::Ok);
        let text = read_and_free(json);

        let c_text = CString::new(text.clone()).unwrap();
        let mut reparsed: *mut LpLink = ptr::null_mut();
        assert_eq!(lp_link_from_json(c_text.as_ptr(), &mut reparsed), LpStatus::Ok);
        let mut json_again: *mut c_char = ptr::null_mut();
        assert_eq!(lp_link_to_json(reparsed, &mut json_again), LpStatus::Ok);
        assert_eq!(read_and_free(json_again), text);

        lp_link_free(reparsed);
        lp_link_free(link);
    }
}

#[test]
fn packing_lifecycle_and_verification() {
    unsafe {
        let mut packing: *mut LpPacking = ptr::null_mut();
        assert_eq!(lp_pack(0.05, 1, &mut packing), LpStatus::Ok);
        let mut count = 0u64;
        assert_eq!(lp_packing_pair_count(packing, &mut count), LpStatus::Ok);
        assert_eq!(count, 8);

        let mut pass = false;
        assert_eq!(lp_packing_verify(packing, 0.05, &mut pass), LpStatus::Ok);
        assert!(pass);
        assert_eq!(lp_packing_verify(packing, 0.4, &mut pass), LpStatus::Ok);
        assert!(!pass);

        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(lp_packing_to_json(packing, &mut json), LpStatus::Ok);
        let text = read_and_free(json);
        let c_text = CString::new(text).unwrap();
        let mut reparsed: *mut LpPacking = ptr::null_mut();
        assert_eq!(
            lp_packing_from_json(c_text.as_ptr(), &mut reparsed),
            LpStatus::Ok
        );
        let mut count_again = 0u64;
        assert_eq!(
            lp_packing_pair_count(reparsed, &mut count_again),
            LpStatus::Ok
        );
        assert_eq!(count_again, count);

        lp_packing_free(reparsed);
        lp_packing_free(packing);
    }
}

#[test]
fn mu_bar_over_c_strings() {
    let pd = CString::new(
        "# positive Hopf link\nX 1,2,1,2 +\nX 2,1,2,1 +\nC 1 1\nC 2 2\n",
    )
    .unwrap();
    let indices = [1u32, 2];
    let mut coefficient: *mut c_char = ptr::null_mut();
    let mut residue = 0u64;
    let mut indeterminate = true;
    let status = unsafe {
        lp_mu_bar(
            pd.as_ptr(),
            indices.as_ptr(),
            indices.len(),
            0,
            &mut coefficient,
            &mut residue,
            &mut indeterminate,
        )
    };
    assert_eq!(status, LpStatus::Ok);
    let text = read_and_free(coefficient);
    assert!(text == "1" || text == "-1", "got {text}");
    assert!(!indeterminate);
}

#[test]
fn error_paths_set_status_and_message() {
    unsafe {
        assert_eq!(
            lp_link_canonical_hopf(0.2, ptr::null_mut()),
            LpStatus::NullPointer
        );

        let mut link: *mut LpLink = ptr::null_mut();
        assert_eq!(lp_link_canonical_hopf(-1.0, &mut link), LpStatus::BadInput);
        assert!(!last_error().is_empty());

        let garbage = CString::new("not json").unwrap();
        assert_eq!(
            lp_link_from_json(garbage.as_ptr(), &mut link),
            LpStatus::BadInput
        );

        let mut order: *mut c_char = ptr::null_mut();
        assert_eq!(lp_burnside_order(0, &mut order), LpStatus::BadInput);
        assert_eq!(lp_burnside_order(100_000, &mut order), LpStatus::TooLarge);
        assert_eq!(lp_burnside_order(2, &mut order), LpStatus::Ok);
        assert_eq!(read_and_free(order), "27");
    }
}

#[test]
fn generated_header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/linkpack.h");
    assert!(header.exists(), "build script writes the header");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["lp_certify", "lp_pack", "lp_mu_bar", "LpStatus"] {
        assert!(text.contains(name), "header misses {name}");
    }
    let check = Command::new("clang")
        .args(["-x", "c", "-std=c99", "-fsyntax-only"])
        .arg(&header)
        .output()
        .expect("clang runs");
    assert!(
        check.status.success(),
        "header rejected: {}",
        String::from_utf8_lossy(&check.stderr)
    );
}
