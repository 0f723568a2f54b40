use std::ffi::{CStr, CString};
use std::ptr;

use qmrlab_ffi::*;

fn last_error() -> String {
    let p = qmr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn point(r: usize) -> [f64; 6] {
    let mut v = [0.0; 6];
    v[r] = 1.0;
    v
}

unsafe fn exp1_profile() -> *mut QmrProfile {
    let mut h = ptr::null_mut();
    assert_eq!(qmr_profile_new(3, 5, &mut h), QmrStatus::Ok);
    for (i, r) in [1, 2, 3, 4, 5].into_iter().enumerate() {
        let v = point(r);
        assert_eq!(qmr_profile_set_voter(h, i, v.as_ptr(), 6), QmrStatus::Ok);
    }
    h
}

#[test]
fn classical_and_aggregate_through_handles() {
    unsafe {
        let h = exp1_profile();
        let mut w = -2;
        assert_eq!(qmr_classical_winner(h, &mut w), QmrStatus::Ok);
        assert_eq!(w, 2);

        let mut rho = [0.0; 6];
        assert_eq!(qmr_aggregate_profile(h, 0.0, 0.0, false, rho.as_mut_ptr(), 6), QmrStatus::Ok);
        assert_eq!(rho, point(5));
        assert_eq!(qmr_winner_from_distribution(3, rho.as_ptr(), 6, &mut w), QmrStatus::Ok);
        assert_eq!(w, 2);

        let mut small = [0.0; 3];
        assert_eq!(
            qmr_aggregate_profile(h, 0.0, 0.0, false, small.as_mut_ptr(), 3),
            QmrStatus::BufferTooSmall
        );
        assert_eq!(qmr_aggregate_profile(h, 0.9, 0.0, false, rho.as_mut_ptr(), 6), QmrStatus::InvalidArgument);
        assert!(last_error().contains("GMS"));
        qmr_profile_free(h);
    }
}

#[test]
fn unset_voter_is_reported() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(qmr_profile_new(3, 2, &mut h), QmrStatus::Ok);
        let v = point(0);
        assert_eq!(qmr_profile_set_voter(h, 0, v.as_ptr(), 6), QmrStatus::Ok);
        let mut w = 0;
        assert_eq!(qmr_classical_winner(h, &mut w), QmrStatus::InvalidArgument);
        assert!(last_error().contains("profile[1]"));
        assert_eq!(qmr_profile_set_voter(h, 7, v.as_ptr(), 6), QmrStatus::InvalidArgument);
        qmr_profile_free(h);
    }
}

#[test]
fn null_and_range_errors() {
    unsafe {
        assert_eq!(qmr_profile_new(3, 1, ptr::null_mut()), QmrStatus::NullPointer);
        let mut h = ptr::null_mut();
        assert_eq!(qmr_profile_new(9, 1, &mut h), QmrStatus::InvalidArgument);
        assert!(h.is_null());
        qmr_profile_free(ptr::null_mut());
        assert_eq!(qmr_ranking_count(4), 24);
        assert_eq!(qmr_ranking_count(0), 0);
    }
}

#[test]
fn lehmer_round_trip() {
    unsafe {
        let mut order = [0u32; 4];
        for i in 0..24 {
            assert_eq!(qmr_lehmer_decode(i, 4, order.as_mut_ptr()), QmrStatus::Ok);
            let mut back = 0;
            assert_eq!(qmr_lehmer_encode(order.as_ptr(), 4, &mut back), QmrStatus::Ok);
            assert_eq!(back, i);
        }
        assert_eq!(qmr_lehmer_decode(24, 4, order.as_mut_ptr()), QmrStatus::InvalidArgument);
        let bad = [0u32, 0, 1];
        let mut out = 0;
        assert_eq!(qmr_lehmer_encode(bad.as_ptr(), 3, &mut out), QmrStatus::InvalidArgument);
    }
}

#[test]
fn js_divergence_values() {
    unsafe {
        let a = point(0);
        let b = point(5);
        let mut js = -1.0;
        assert_eq!(qmr_js_divergence(3, a.as_ptr(), b.as_ptr(), 6, &mut js), QmrStatus::Ok);
        assert_eq!(js, 1.0);
        assert_eq!(qmr_js_divergence(3, a.as_ptr(), a.as_ptr(), 6, &mut js), QmrStatus::Ok);
        assert_eq!(js, 0.0);
    }
}

#[test]
fn qmr2_histogram_handle() {
    let cfg = CString::new(
        r#"{"m":3,"blocks":[{"kind":"ghz","size":5,"base_ranking":0}],"iterations":2000,"seed":4}"#,
    )
    .unwrap();
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(qmr2_run_json(cfg.as_ptr(), &mut h), QmrStatus::Ok);
        let len = qmr2_histogram_len(h);
        assert_eq!(len, 7);
        let mut counts = vec![0u64; len];
        let mut all_discarded = 9;
        assert_eq!(qmr2_histogram_counts(h, counts.as_mut_ptr(), len, &mut all_discarded), QmrStatus::Ok);
        assert_eq!(counts[0], 0);
        assert_eq!(counts[1] + counts[6], 2000);
        assert_eq!(all_discarded, 0);
        qmr2_histogram_free(h);

        let bad = CString::new(r#"{"m":3,"blocks":[{"kind":"ghz","size":"x"}],"iterations":1,"seed":1}"#).unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(qmr2_run_json(bad.as_ptr(), &mut h), QmrStatus::Config);
        assert!(last_error().contains("blocks[0].size"), "{}", last_error());
    }
}

#[test]
fn sweep_writes_files() {
    let dir = std::env::temp_dir().join(format!("qmrlab-ffi-sweep-{}", std::process::id()));
    let cfg = CString::new(
        r#"{"name":"tiny","m":3,"profile":[[1,0,0,0,0,0],[0,1,0,0,0,0],[1,0,0,0,0,0]],
            "noise_grid":[0.0,0.1],"shots":20,"runs":3,"seed":5}"#,
    )
    .unwrap();
    let out = CString::new(dir.to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(qmr_sweep_json(cfg.as_ptr(), out.as_ptr()), QmrStatus::Ok);
    }
    let metrics = std::fs::read_to_string(dir.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/qmrlab.h");
    for name in [
        "qmr_last_error_message",
        "qmr_profile_new",
        "qmr_profile_set_voter",
        "qmr_profile_free",
        "qmr_classical_winner",
        "qmr_aggregate_profile",
        "qmr_winner_from_distribution",
        "qmr_js_divergence",
        "qmr_lehmer_encode",
        "qmr_lehmer_decode",
        "qmr2_run_json",
        "qmr2_histogram_counts",
        "qmr2_histogram_free",
        "qmr_sweep_json",
        "QMR_STATUS_BUFFER_TOO_SMALL",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
