//! C ABI over `ltp-core`.
//!
//! Every function returns an [`LtpStatus`]; results go through out-pointers.
//! On failure a message is kept per thread and read with
//! [`ltp_last_error_message`]. Handles are opaque and released with their
//! `_free` function; strings returned by the library are released with
//! [`ltp_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use ltp_core::eval_harness::{evaluate_scenarios, ScenarioFile};
use ltp_core::prior_fusion::{
    fuse_additive, fuse_weighted, graph_embed_polyline, read_params, FusionParams, PolylineEmbedding,
};
use ltp_core::text_embed::{embed_text, EmbeddingVector, OfflineEmbedder};
use ltp_core::topo_metrics::{average_precision, discrete_frechet, MetricConfig, Point3};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    DimensionMismatch = 4,
    Parse = 5,
    Io = 6,
    Panic = 7,
}

/// Offline feature-hashing text embedder.
pub struct LtpEmbedder {
    inner: OfflineEmbedder,
}

/// MLP weights plus λ for embedding fusion.
pub struct LtpFusionParams {
    inner: FusionParams,
}

/// `Additive`: `G + MLP(t)`; `Weighted`: `G + λ·MLP(t)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtpFuseMode {
    Additive = 0,
    Weighted = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(LtpStatus, String);

impl Failure {
    fn new(status: LtpStatus, msg: impl Into<String>) -> Self {
        Failure(status, msg.into())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LtpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LtpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            LtpStatus::Panic
        }
    }
}

fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: caller promises `p` is null or valid for writes.
    unsafe { p.as_mut() }.ok_or_else(|| Failure::new(LtpStatus::NullPointer, format!("{name} is null")))
}

fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(LtpStatus::NullPointer, format!("{name} is null")));
    }
    // SAFETY: caller promises `len` readable elements at `p`.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::new(LtpStatus::NullPointer, format!("{name} is null")));
    }
    // SAFETY: caller promises `len` writable elements at `p`.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(LtpStatus::NullPointer, format!("{name} is null")));
    }
    // SAFETY: caller promises a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure::new(LtpStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: non-null handles come from this library and are still live.
    unsafe { p.as_ref() }.ok_or_else(|| Failure::new(LtpStatus::NullPointer, format!("{name} is null")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior NUL").into_raw()
}

fn points3(xyz: &[f64]) -> Vec<Point3> {
    xyz.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
}

fn invalid(msg: impl ToString) -> Failure {
    Failure::new(LtpStatus::InvalidArgument, msg.to_string())
}

/// Message of the last failed call on this thread; empty if none. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ltp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ltp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ltp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `(DET_l + DET_t + √TOP_ll + √TOP_lt) / 4`; inputs must lie in [0, 1].
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ltp_ols(det_l: f64, det_t: f64, top_ll: f64, top_lt: f64, out: *mut f64) -> LtpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ltp_core::topo_metrics::ols(det_l, det_t, top_ll, top_lt).map_err(invalid)?;
        Ok(())
    })
}

/// Discrete Fréchet distance between polylines given as packed `x,y,z`
/// triples (`n_a` and `n_b` points).
///
/// # Safety
/// `a` and `b` must hold `3·n` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ltp_discrete_frechet(
    a: *const f64,
    n_a: usize,
    b: *const f64,
    n_b: usize,
    out: *mut f64,
) -> LtpStatus {
    guard(|| {
        let a = points3(slice(a, n_a * 3, "a")?);
        let b = points3(slice(b, n_b * 3, "b")?);
        if a.is_empty() || b.is_empty() {
            return Err(invalid("polylines need at least one point"));
        }
        *out_ref(out, "out")? = discrete_frechet(&a, &b);
        Ok(())
    })
}

/// All-point interpolated AP of ranked decisions (nonzero = true positive).
///
/// # Safety
/// `decisions` must hold `n` bytes; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ltp_average_precision(
    decisions: *const u8,
    n: usize,
    n_gt: usize,
    out: *mut f64,
) -> LtpStatus {
    guard(|| {
        let d: Vec<bool> = slice(decisions, n, "decisions")?.iter().map(|&b| b != 0).collect();
        if d.iter().filter(|&&x| x).count() > n_gt {
            return Err(invalid("more true positives than ground-truth items"));
        }
        *out_ref(out, "out")? = average_precision(&d, n_gt);
        Ok(())
    })
}

/// Road-type suffix of a name with the built-in vocabulary. `*out` is set to
/// a new string, or null when the name has no suffix.
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ltp_road_suffix(name: *const c_char, out: *mut *mut c_char) -> LtpStatus {
    guard(|| {
        let name = text(name, "name")?;
        let out = out_ref(out, "out")?;
        *out = ltp_core::osm_ingest::road_suffix(name).map_or(std::ptr::null_mut(), owned_string);
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ltp_embedder_new(dimension: usize, out: *mut *mut LtpEmbedder) -> LtpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let inner = OfflineEmbedder::new(dimension).map_err(invalid)?;
        *out = Box::into_raw(Box::new(LtpEmbedder { inner }));
        Ok(())
    })
}

/// # Safety
/// `embedder` must come from [`ltp_embedder_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ltp_embedder_free(embedder: *mut LtpEmbedder) {
    if !embedder.is_null() {
        drop(Box::from_raw(embedder));
    }
}

/// Output dimension, or 0 for a null handle.
///
/// # Safety
/// `embedder` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ltp_embedder_dimension(embedder: *const LtpEmbedder) -> usize {
    use ltp_core::text_embed::EmbedBackend;
    embedder.as_ref().map_or(0, |e| e.inner.dimension())
}

/// Embeds `text` into `out`, which must have exactly the embedder's dimension.
///
/// # Safety
/// `embedder` must be live, `text` NUL-terminated, `out` writable for `len`.
#[no_mangle]
pub unsafe extern "C" fn ltp_embed_text(
    embedder: *const LtpEmbedder,
    text_in: *const c_char,
    out: *mut f64,
    len: usize,
) -> LtpStatus {
    guard(|| {
        let e = handle(embedder, "embedder")?;
        let t = text(text_in, "text")?;
        let v = embed_text(&e.inner, t).map_err(invalid)?;
        if v.dim() != len {
            return Err(Failure::new(
                LtpStatus::DimensionMismatch,
                format!("buffer holds {len}, embedding has {}", v.dim()),
            ));
        }
        slice_mut(out, len, "out")?.copy_from_slice(v.values());
        Ok(())
    })
}

/// Cosine similarity of two length-`n` vectors; 0 when either is zero.
///
/// # Safety
/// `a` and `b` must hold `n` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ltp_cosine_similarity(a: *const f64, b: *const f64, n: usize, out: *mut f64) -> LtpStatus {
    guard(|| {
        let a = EmbeddingVector::new(slice(a, n, "a")?.to_vec()).map_err(invalid)?;
        let b = EmbeddingVector::new(slice(b, n, "b")?.to_vec()).map_err(invalid)?;
        *out_ref(out, "out")? = ltp_core::text_embed::cosine_similarity(&a, &b).map_err(invalid)?;
        Ok(())
    })
}

/// Sinusoidal polyline embedding of packed `x,y` pairs in meters.
///
/// # Safety
/// `xy` must hold `2·n_points` doubles; `out` must be writable for `d_map`.
#[no_mangle]
pub unsafe extern "C" fn ltp_graph_embed(xy: *const f64, n_points: usize, d_map: usize, out: *mut f64) -> LtpStatus {
    guard(|| {
        let pts: Vec<(f64, f64)> = slice(xy, n_points * 2, "xy")?
            .chunks_exact(2)
            .map(|c| (c[0], c[1]))
            .collect();
        let g = graph_embed_polyline(&pts, d_map).map_err(invalid)?;
        slice_mut(out, d_map, "out")?.copy_from_slice(g.values());
        Ok(())
    })
}

/// Seeded parameters with λ = 1.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ltp_fusion_params_new(
    d_text: usize,
    hidden: usize,
    d_map: usize,
    seed: u64,
    out: *mut *mut LtpFusionParams,
) -> LtpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let inner = FusionParams::seeded(d_text, hidden, d_map, seed).map_err(invalid)?;
        *out = Box::into_raw(Box::new(LtpFusionParams { inner }));
        Ok(())
    })
}

/// Reads a parameter file written by `ltp fuse --params`.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ltp_fusion_params_load(path: *const c_char, out: *mut *mut LtpFusionParams) -> LtpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let path = Path::new(text(path, "path")?);
        let file =
            std::fs::File::open(path).map_err(|e| Failure::new(LtpStatus::Io, format!("{}: {e}", path.display())))?;
        let (inner, _) = read_params(std::io::BufReader::new(file))
            .map_err(|e| Failure::new(LtpStatus::Parse, format!("{}: {e}", path.display())))?;
        *out = Box::into_raw(Box::new(LtpFusionParams { inner }));
        Ok(())
    })
}

/// # Safety
/// `params` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ltp_fusion_params_free(params: *mut LtpFusionParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Writes `d_text`, `hidden` and `d_map` through the non-null pointers.
///
/// # Safety
/// `params` must be live; each out-pointer must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ltp_fusion_params_dims(
    params: *const LtpFusionParams,
    d_text: *mut usize,
    hidden: *mut usize,
    d_map: *mut usize,
) -> LtpStatus {
    guard(|| {
        let m = &handle(params, "params")?.inner.mlp;
        for (p, v) in [(d_text, m.d_text()), (hidden, m.hidden()), (d_map, m.d_map())] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ltp_fusion_params_set_lambda(params: *mut LtpFusionParams, lambda: f64) -> LtpStatus {
    guard(|| {
        if !lambda.is_finite() {
            return Err(invalid("lambda must be finite"));
        }
        out_ref(params, "params")?.inner.lambda = lambda;
        Ok(())
    })
}

/// # Safety
/// `params` must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ltp_fusion_params_lambda(params: *const LtpFusionParams, out: *mut f64) -> LtpStatus {
    guard(|| {
        *out_ref(out, "out")? = handle(params, "params")?.inner.lambda;
        Ok(())
    })
}

/// Fused embedding of a graph vector (`d_map`) and a text vector (`d_text`),
/// written to `out` (`d_map`).
///
/// # Safety
/// `params` must be live; buffers must hold `d_map`, `d_text` and `d_map`
/// doubles respectively.
#[no_mangle]
pub unsafe extern "C" fn ltp_fuse(
    params: *const LtpFusionParams,
    mode: LtpFuseMode,
    graph: *const f64,
    d_map: usize,
    text_vec: *const f64,
    d_text: usize,
    out: *mut f64,
) -> LtpStatus {
    guard(|| {
        let p = &handle(params, "params")?.inner;
        let g = PolylineEmbedding(slice(graph, d_map, "graph")?.to_vec());
        let t = EmbeddingVector::new(slice(text_vec, d_text, "text")?.to_vec()).map_err(invalid)?;
        let result = match mode {
            LtpFuseMode::Additive => fuse_additive(&g, &t, &p.mlp),
            LtpFuseMode::Weighted => fuse_weighted(&g, &t, p),
        }
        .map_err(|e| Failure::new(LtpStatus::DimensionMismatch, e.to_string()))?;
        slice_mut(out, d_map, "out")?.copy_from_slice(&result);
        Ok(())
    })
}

/// Scores two scenario JSON documents with default thresholds and sets
/// `*report_json` to the report as a new JSON string.
///
/// # Safety
/// Strings must be NUL-terminated; `report_json` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ltp_evaluate_json(
    gt_json: *const c_char,
    pred_json: *const c_char,
    label: *const c_char,
    report_json: *mut *mut c_char,
) -> LtpStatus {
    guard(|| {
        let out = out_ref(report_json, "report_json")?;
        let label = text(label, "label")?;
        let parse = |p, name| {
            ScenarioFile::from_json(text(p, name)?, None)
                .map_err(|e| Failure::new(LtpStatus::Parse, format!("{name}: {e}")))
        };
        let gt = parse(gt_json, "gt_json")?;
        let pred = parse(pred_json, "pred_json")?;
        let report = evaluate_scenarios(&gt, &pred, label, &MetricConfig::default()).map_err(invalid)?;
        *out = owned_string(serde_json::to_string(&report).expect("report serializes"));
        Ok(())
    })
}
