use std::ffi::{CStr, CString};
use std::ptr;

use ltp_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ltp_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn ols_and_domain_error() {
    let mut v = 0.0;
    assert_eq!(
        unsafe { ltp_ols(0.5391, 0.9745, 0.0674, 0.3905, &mut v) },
        LtpStatus::Ok
    );
    assert!((v - 0.5995).abs() < 5e-4);
    assert_eq!(
        unsafe { ltp_ols(1.2, 0.5, 0.5, 0.5, &mut v) },
        LtpStatus::InvalidArgument
    );
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { ltp_ols(0.5, 0.5, 0.5, 0.5, ptr::null_mut()) },
        LtpStatus::NullPointer
    );
}

#[test]
fn frechet_and_ap() {
    let a = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
    let b = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
    let mut d = 0.0;
    assert_eq!(
        unsafe { ltp_discrete_frechet(a.as_ptr(), 2, b.as_ptr(), 2, &mut d) },
        LtpStatus::Ok
    );
    assert_eq!(d, 1.0);
    assert_eq!(
        unsafe { ltp_discrete_frechet(a.as_ptr(), 0, b.as_ptr(), 2, &mut d) },
        LtpStatus::InvalidArgument
    );
    let decisions = [1u8, 0, 1];
    let mut ap = 0.0;
    assert_eq!(
        unsafe { ltp_average_precision(decisions.as_ptr(), 3, 2, &mut ap) },
        LtpStatus::Ok
    );
    assert!((ap - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
    assert_eq!(
        unsafe { ltp_average_precision(decisions.as_ptr(), 3, 1, &mut ap) },
        LtpStatus::InvalidArgument
    );
}

#[test]
fn suffix_strings() {
    let name = CString::new("Oregon Expressway").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ltp_road_suffix(name.as_ptr(), &mut out) }, LtpStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(out) }.to_str().unwrap(), "Expressway");
    unsafe { ltp_string_free(out) };
    let name = CString::new("Broadway").unwrap();
    assert_eq!(unsafe { ltp_road_suffix(name.as_ptr(), &mut out) }, LtpStatus::Ok);
    assert!(out.is_null());
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { ltp_road_suffix(bad.as_ptr().cast(), &mut out) },
        LtpStatus::InvalidUtf8
    );
    assert_eq!(
        unsafe { ltp_road_suffix(ptr::null(), &mut out) },
        LtpStatus::NullPointer
    );
}

#[test]
fn embedder_handle() {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { ltp_embedder_new(16, &mut e) }, LtpStatus::Ok);
    assert_eq!(unsafe { ltp_embedder_dimension(e) }, 16);
    let text = CString::new("lanes=2; oneway=yes").unwrap();
    let mut a = [0.0; 16];
    let mut b = [0.0; 16];
    assert_eq!(
        unsafe { ltp_embed_text(e, text.as_ptr(), a.as_mut_ptr(), 16) },
        LtpStatus::Ok
    );
    assert_eq!(
        unsafe { ltp_embed_text(e, text.as_ptr(), b.as_mut_ptr(), 16) },
        LtpStatus::Ok
    );
    assert_eq!(a, b);
    let norm: f64 = a.iter().map(|x| x * x).sum();
    assert!((norm - 1.0).abs() < 1e-12);
    let mut c = 0.0;
    assert_eq!(
        unsafe { ltp_cosine_similarity(a.as_ptr(), b.as_ptr(), 16, &mut c) },
        LtpStatus::Ok
    );
    assert!((c - 1.0).abs() < 1e-12);
    assert_eq!(
        unsafe { ltp_embed_text(e, text.as_ptr(), a.as_mut_ptr(), 8) },
        LtpStatus::DimensionMismatch
    );
    unsafe { ltp_embedder_free(e) };
    assert_eq!(unsafe { ltp_embedder_new(0, &mut e) }, LtpStatus::InvalidArgument);
    assert_eq!(unsafe { ltp_embedder_dimension(ptr::null()) }, 0);
}

#[test]
fn fusion_handle_reductions() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ltp_fusion_params_new(4, 3, 6, 11, &mut p) }, LtpStatus::Ok);
    let (mut dt, mut h, mut dm) = (0, 0, 0);
    assert_eq!(
        unsafe { ltp_fusion_params_dims(p, &mut dt, &mut h, &mut dm) },
        LtpStatus::Ok
    );
    assert_eq!((dt, h, dm), (4, 3, 6));
    let xy = [0.0, 0.0, 10.0, 0.0, 20.0, 5.0];
    let mut g = [0.0; 6];
    assert_eq!(
        unsafe { ltp_graph_embed(xy.as_ptr(), 3, 6, g.as_mut_ptr()) },
        LtpStatus::Ok
    );
    let t = [0.1, -0.2, 0.3, 0.4];
    let (mut add, mut weighted) = ([0.0; 6], [0.0; 6]);
    let fuse = |mode, out: &mut [f64; 6]| unsafe { ltp_fuse(p, mode, g.as_ptr(), 6, t.as_ptr(), 4, out.as_mut_ptr()) };
    assert_eq!(fuse(LtpFuseMode::Additive, &mut add), LtpStatus::Ok);
    assert_eq!(fuse(LtpFuseMode::Weighted, &mut weighted), LtpStatus::Ok);
    assert_eq!(add, weighted);
    assert_eq!(unsafe { ltp_fusion_params_set_lambda(p, 0.0) }, LtpStatus::Ok);
    assert_eq!(fuse(LtpFuseMode::Weighted, &mut weighted), LtpStatus::Ok);
    assert_eq!(weighted, g);
    let mut l = 1.0;
    assert_eq!(unsafe { ltp_fusion_params_lambda(p, &mut l) }, LtpStatus::Ok);
    assert_eq!(l, 0.0);
    assert_eq!(
        unsafe { ltp_fuse(p, LtpFuseMode::Additive, g.as_ptr(), 6, t.as_ptr(), 3, add.as_mut_ptr()) },
        LtpStatus::DimensionMismatch
    );
    unsafe { ltp_fusion_params_free(p) };

    let missing = CString::new("/nonexistent/params.bin").unwrap();
    assert_eq!(
        unsafe { ltp_fusion_params_load(missing.as_ptr(), &mut p) },
        LtpStatus::Io
    );
    assert!(last_error().contains("nonexistent"));
}

#[test]
fn evaluate_json_round_trip() {
    let scenario = CString::new(
        r#"{"city": "x", "frames": [{"frame_id": 1,
            "lanes": [{"points": [[0,0,0],[5,0,0]]}, {"points": [[5,0,0],[9,1,0]]}],
            "lane_adjacency": [[0, 1, 1.0]]}]}"#,
    )
    .unwrap();
    let label = CString::new("NF + λ").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { ltp_evaluate_json(scenario.as_ptr(), scenario.as_ptr(), label.as_ptr(), &mut out) },
        LtpStatus::Ok
    );
    let json: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(out) }.to_str().unwrap()).unwrap();
    unsafe { ltp_string_free(out) };
    assert_eq!(json["label"], "NF + λ");
    assert_eq!(json["ols"], 1.0);
    let bad = CString::new("{").unwrap();
    assert_eq!(
        unsafe { ltp_evaluate_json(bad.as_ptr(), scenario.as_ptr(), label.as_ptr(), &mut out) },
        LtpStatus::Parse
    );
    assert!(last_error().starts_with("gt_json"));
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(ltp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
