//! C ABI over the `crossmedia` core.
//!
//! Every fallible function returns a [`CmStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`cm_last_error_message`]. Handles are opaque and must be
//! released with their matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use crossmedia::corpus::{ingest_corpus, Corpus, EventSeries, SourceKind};
use crossmedia::granger::{granger_test_values, GrangerResult};
use crossmedia::hawkes::{smooth_timestamps, IntensitySeries};
use crossmedia::influence::{lag_heatmap, HeatmapSpec, LagHeatmap};
use crossmedia::sentiment::{load_lexicon, Lexicon};
use crossmedia::stats::{self, VarianceAssumption};
use crossmedia::{topics, Error};

/// Result codes shared by every function in this library.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    LengthMismatch = 4,
    Parse = 5,
    Io = 6,
    InsufficientData = 7,
    Degenerate = 8,
    RankDeficient = 9,
    NoConvergence = 10,
    Backend = 11,
    Output = 12,
    /// The quantity exists but is undefined for this input (zero variance).
    Undefined = 13,
    OutOfRange = 14,
    Panic = 15,
}

impl From<&Error> for CmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } => Self::Parse,
            Error::Io { .. } => Self::Io,
            Error::InvalidArgument(_) => Self::InvalidArgument,
            Error::LengthMismatch { .. } => Self::LengthMismatch,
            Error::InsufficientData(_) => Self::InsufficientData,
            Error::RankDeficient { .. } => Self::RankDeficient,
            Error::Degenerate(_) => Self::Degenerate,
            Error::NoConvergence(_) => Self::NoConvergence,
            Error::Backend(_) => Self::Backend,
            Error::Output(_) => Self::Output,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let msg = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: CmStatus, message: impl Into<String>) -> CmStatus {
    set_error(message);
    status
}

fn fail_with(e: Error) -> CmStatus {
    let status = CmStatus::from(&e);
    fail(status, e.to_string())
}

/// Runs `body`, clearing the last error first and turning panics into [`CmStatus::Panic`].
fn guard(body: impl FnOnce() -> CmStatus) -> CmStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(CmStatus::Panic, format!("panic: {msg}"))
        }
    }
}

macro_rules! try_cm {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! try_core {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail_with(e),
        }
    };
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, CmStatus> {
    p.as_mut()
        .ok_or_else(|| fail(CmStatus::NullPointer, format!("{name} is null")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, CmStatus> {
    p.as_ref()
        .ok_or_else(|| fail(CmStatus::NullPointer, format!("{name} is null")))
}

unsafe fn input<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], CmStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(CmStatus::NullPointer, format!("{name} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, CmStatus> {
    if p.is_null() {
        return Err(fail(CmStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CmStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn boxed<T>(value: T, out: &mut *mut T) -> CmStatus {
    *out = Box::into_raw(Box::new(value));
    CmStatus::Ok
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the most recent failure on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- statistics ------------------------------------------------------------

/// Pearson correlation of two equal-length arrays.
/// Returns [`CmStatus::Undefined`] when either input has zero variance.
#[no_mangle]
pub unsafe extern "C" fn cm_pearson(x: *const f64, y: *const f64, n: usize, out: *mut f64) -> CmStatus {
    guard(|| {
        let out = try_cm!(out_ref(out, "out"));
        let x = try_cm!(input(x, n, "x"));
        let y = try_cm!(input(y, n, "y"));
        match try_core!(stats::pearson(x, y)) {
            Some(r) => {
                *out = r;
                CmStatus::Ok
            }
            None => fail(CmStatus::Undefined, "correlation undefined: zero variance"),
        }
    })
}

/// Student t cumulative distribution function.
#[no_mangle]
pub unsafe extern "C" fn cm_t_cdf(t: f64, df: f64, out: *mut f64) -> CmStatus {
    guard(|| {
        let out = try_cm!(out_ref(out, "out"));
        *out = try_core!(stats::t_cdf(t, df));
        CmStatus::Ok
    })
}

/// Fisher-Snedecor F cumulative distribution function.
#[no_mangle]
pub unsafe extern "C" fn cm_f_cdf(f: f64, d1: f64, d2: f64, out: *mut f64) -> CmStatus {
    guard(|| {
        let out = try_cm!(out_ref(out, "out"));
        *out = try_core!(stats::f_cdf(f, d1, d2));
        CmStatus::Ok
    })
}

/// Two-sample t-test. `pooled` selects equal variances; otherwise Welch.
#[no_mangle]
pub unsafe extern "C" fn cm_t_test(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    pooled: bool,
    out_t: *mut f64,
    out_df: *mut f64,
    out_p: *mut f64,
) -> CmStatus {
    guard(|| {
        let out_t = try_cm!(out_ref(out_t, "out_t"));
        let out_df = try_cm!(out_ref(out_df, "out_df"));
        let out_p = try_cm!(out_ref(out_p, "out_p"));
        let a = try_cm!(input(a, na, "a"));
        let b = try_cm!(input(b, nb, "b"));
        let variance = if pooled { VarianceAssumption::Pooled } else { VarianceAssumption::Welch };
        let r = try_core!(stats::two_sample_t_test(a, b, variance));
        *out_t = r.statistic;
        *out_df = match r.df {
            stats::DegreesOfFreedom::Single(d) => d,
            stats::DegreesOfFreedom::Pair(_, d) => d,
        };
        *out_p = r.p_value;
        CmStatus::Ok
    })
}

/// F-test of a restricted model against an unrestricted one.
#[no_mangle]
pub unsafe extern "C" fn cm_f_test_nested(
    ssr_restricted: f64,
    ssr_unrestricted: f64,
    q: usize,
    df_denom: usize,
    out_f: *mut f64,
    out_p: *mut f64,
) -> CmStatus {
    guard(|| {
        let out_f = try_cm!(out_ref(out_f, "out_f"));
        let out_p = try_cm!(out_ref(out_p, "out_p"));
        let r = try_core!(stats::f_test_nested(ssr_restricted, ssr_unrestricted, q, df_denom));
        *out_f = r.statistic;
        *out_p = r.p_value;
        CmStatus::Ok
    })
}

/// Jensen-Shannon divergence (base 2) of two distributions of length `n`.
#[no_mangle]
pub unsafe extern "C" fn cm_jensen_shannon(p: *const f64, q: *const f64, n: usize, out: *mut f64) -> CmStatus {
    guard(|| {
        let out = try_cm!(out_ref(out, "out"));
        let p = try_cm!(input(p, n, "p"));
        let q = try_cm!(input(q, n, "q"));
        *out = try_core!(topics::jensen_shannon(p, q));
        CmStatus::Ok
    })
}

// ---- corpus ----------------------------------------------------------------

/// An ingested corpus directory.
pub struct CmCorpus {
    inner: Corpus,
    names: Vec<CString>,
}

/// Loads and validates a corpus directory.
#[no_mangle]
pub unsafe extern "C" fn cm_corpus_open(path: *const c_char, out: *mut *mut CmCorpus) -> CmStatus {
    guard(|| {
        let out = try_cm!(out_ref(out, "out"));
        *out = ptr::null_mut();
        let path = try_cm!(text(path, "path"));
        let inner = try_core!(ingest_corpus(path));
        let names = inner
            .candidates()
            .iter()
            .map(|n| CString::new(n.as_str()).unwrap_or_default())
            .collect();
        boxed(CmCorpus { inner, names }, out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn cm_corpus_free(corpus: *mut CmCorpus) {
    release(corpus);
}

/// Total number of document events.
#[no_mangle]
pub unsafe extern "C" fn cm_corpus_len(corpus: *const CmCorpus, out: *mut usize) -> CmStatus {
    guard(|| {
        let c = try_cm!(handle(corpus, "corpus"));
        *try_cm!(out_ref(out, "out")) = c.inner.len();
        CmStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn cm_corpus_candidate_count(corpus: *const CmCorpus, out: *mut usize) -> CmStatus {
    guard(|| {
        let c = try_cm!(handle(corpus, "corpus"));
        *try_cm!(out_ref(out, "out")) = c.inner.candidates().len();
        CmStatus::Ok
    })
}

/// Name of candidate `index`, valid for the lifetime of the corpus handle.
#[no_mangle]
pub unsafe extern "C" fn cm_corpus_candidate(
    corpus: *const CmCorpus,
    index: usize,
    out: *mut *const c_char,
) -> CmStatus {
    guard(|| {
        let c = try_cm!(handle(corpus, "corpus"));
        let out = try_cm!(out_ref(out, "out"));
        match c.names.get(index) {
            Some(name) => {
                *out = name.as_ptr();
                CmStatus::Ok
            }
            None => fail(CmStatus::OutOfRange, format!("candidate index {index} out of range")),
        }
    })
}

/// Number of events for a candidate and source kind
/// (`"twitter"`, `"news"` or `"candidate_twitter"`).
#[no_mangle]
pub unsafe extern "C" fn cm_corpus_group_len(
    corpus: *const CmCorpus,
    candidate: *const c_char,
    source_kind: *const c_char,
    out: *mut usize,
) -> CmStatus {
    guard(|| {
        let c = try_cm!(handle(corpus, "corpus"));
        let out = try_cm!(out_ref(out, "out"));
        let cand = try_cm!(text(candidate, "candidate"));
        let kind: SourceKind = try_core!(try_cm!(text(source_kind, "source_kind")).parse());
        try_core!(c.inner.require_candidate(cand));
        *out = c.inner.group_len(cand, kind);
        CmStatus::Ok
    })
}

// ---- intensity -------------------------------------------------------------

/// Exponentially smoothed event intensity on a regular grid.
pub struct CmIntensity {
    inner: IntensitySeries,
}

/// Smooths sorted or unsorted `timestamps` onto `t0, t0 + step, ... < t1`.
#[no_mangle]
pub unsafe extern "C" fn cm_intensity_smooth(
    timestamps: *const i64,
    n: usize,
    t0: i64,
    t1: i64,
    step: i64,
    half_life: f64,
    out: *mut *mut CmIntensity,
) -> CmStatus {
    guard(|| {
        let out = try_cm!(out_ref(out, "out"));
        *out = ptr::null_mut();
        let mut ts = try_cm!(input(timestamps, n, "timestamps")).to_vec();
        ts.sort_unstable();
        let inner = try_core!(smooth_timestamps(&ts, t0, t1, step, half_life));
        boxed(CmIntensity { inner }, out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn cm_intensity_free(series: *mut CmIntensity) {
    release(series);
}

/// Borrowed view of the sampled values, valid until the handle is freed.
#[no_mangle]
pub unsafe extern "C" fn cm_intensity_values(
    series: *const CmIntensity,
    out_values: *mut *const f64,
    out_len: *mut usize,
) -> CmStatus {
    guard(|| {
        let s = try_cm!(handle(series, "series"));
        let out_values = try_cm!(out_ref(out_values, "out_values"));
        let out_len = try_cm!(out_ref(out_len, "out_len"));
        *out_values = s.inner.values.as_ptr();
        *out_len = s.inner.values.len();
        CmStatus::Ok
    })
}

// ---- heatmap ---------------------------------------------------------------

/// Heatmap geometry in seconds. A `half_life` of zero or less selects each
/// series' average inter-event period.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CmHeatmapSpec {
    pub window: i64,
    pub stride: i64,
    pub max_offset: i64,
    pub offset_step: i64,
    pub grid_step: i64,
    pub half_life: f64,
}

impl From<CmHeatmapSpec> for HeatmapSpec {
    fn from(s: CmHeatmapSpec) -> Self {
        HeatmapSpec {
            window: s.window,
            stride: s.stride,
            max_offset: s.max_offset,
            offset_step: s.offset_step,
            grid_step: s.grid_step,
            half_life: (s.half_life > 0.0).then_some(s.half_life),
        }
    }
}

/// Two-week windows, 12-hour stride, offsets up to 48 hours in 1-hour steps, 5-minute grid.
#[no_mangle]
pub extern "C" fn cm_heatmap_spec_default() -> CmHeatmapSpec {
    let d = HeatmapSpec::default();
    CmHeatmapSpec {
        window: d.window,
        stride: d.stride,
        max_offset: d.max_offset,
        offset_step: d.offset_step,
        grid_step: d.grid_step,
        half_life: d.half_life.unwrap_or(0.0),
    }
}

pub struct CmHeatmap {
    inner: LagHeatmap,
}

/// Lag-correlation heatmap of `fixed` against windows of `shifted` moved by
/// each offset. A positive offset means `fixed` leads.
#[no_mangle]
pub unsafe extern "C" fn cm_heatmap_compute(
    fixed: *const i64,
    n_fixed: usize,
    shifted: *const i64,
    n_shifted: usize,
    spec: *const CmHeatmapSpec,
    out: *mut *mut CmHeatmap,
) -> CmStatus {
    guard(|| {
        let out = try_cm!(out_ref(out, "out"));
        *out = ptr::null_mut();
        let spec = HeatmapSpec::from(*try_cm!(handle(spec, "spec")));
        let f = try_cm!(input(fixed, n_fixed, "fixed")).to_vec();
        let s = try_cm!(input(shifted, n_shifted, "shifted")).to_vec();
        let f = EventSeries::from_unsorted("", SourceKind::Twitter, f);
        let s = EventSeries::from_unsorted("", SourceKind::News, s);
        let inner = try_core!(lag_heatmap(&f, &s, &spec));
        boxed(CmHeatmap { inner }, out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn cm_heatmap_free(heatmap: *mut CmHeatmap) {
    release(heatmap);
}

#[no_mangle]
pub unsafe extern "C" fn cm_heatmap_shape(
    heatmap: *const CmHeatmap,
    out_rows: *mut usize,
    out_cols: *mut usize,
) -> CmStatus {
    guard(|| {
        let h = try_cm!(handle(heatmap, "heatmap"));
        *try_cm!(out_ref(out_rows, "out_rows")) = h.inner.rows();
        *try_cm!(out_ref(out_cols, "out_cols")) = h.inner.cols();
        CmStatus::Ok
    })
}

/// Offset in seconds of column `col`.
#[no_mangle]
pub unsafe extern "C" fn cm_heatmap_offset(heatmap: *const CmHeatmap, col: usize, out: *mut i64) -> CmStatus {
    guard(|| {
        let h = try_cm!(handle(heatmap, "heatmap"));
        let out = try_cm!(out_ref(out, "out"));
        match h.inner.offsets.get(col) {
            Some(&o) => {
                *out = o;
                CmStatus::Ok
            }
            None => fail(CmStatus::OutOfRange, format!("column {col} out of range")),
        }
    })
}

/// Start time of row `row`.
#[no_mangle]
pub unsafe extern "C" fn cm_heatmap_row_start(heatmap: *const CmHeatmap, row: usize, out: *mut i64) -> CmStatus {
    guard(|| {
        let h = try_cm!(handle(heatmap, "heatmap"));
        let out = try_cm!(out_ref(out, "out"));
        match h.inner.row_starts.get(row) {
            Some(&t) => {
                *out = t;
                CmStatus::Ok
            }
            None => fail(CmStatus::OutOfRange, format!("row {row} out of range")),
        }
    })
}

/// Correlation at one cell; [`CmStatus::Undefined`] when a window had no variance.
#[no_mangle]
pub unsafe extern "C" fn cm_heatmap_get(
    heatmap: *const CmHeatmap,
    row: usize,
    col: usize,
    out: *mut f64,
) -> CmStatus {
    guard(|| {
        let h = try_cm!(handle(heatmap, "heatmap"));
        let out = try_cm!(out_ref(out, "out"));
        if row >= h.inner.rows() || col >= h.inner.cols() {
            return fail(CmStatus::OutOfRange, format!("cell ({row}, {col}) out of range"));
        }
        match h.inner.get(row, col) {
            Some(v) => {
                *out = v;
                CmStatus::Ok
            }
            None => fail(CmStatus::Undefined, "cell undefined: zero variance in window"),
        }
    })
}

// ---- granger ---------------------------------------------------------------

pub struct CmGranger {
    inner: GrangerResult,
}

/// Tests whether `cause` helps predict `effect` at lags `1..=max_lag`.
#[no_mangle]
pub unsafe extern "C" fn cm_granger_test(
    effect: *const f64,
    cause: *const f64,
    n: usize,
    max_lag: usize,
    out: *mut *mut CmGranger,
) -> CmStatus {
    guard(|| {
        let out = try_cm!(out_ref(out, "out"));
        *out = ptr::null_mut();
        let effect = try_cm!(input(effect, n, "effect"));
        let cause = try_cm!(input(cause, n, "cause"));
        let inner = try_core!(granger_test_values(effect, cause, max_lag));
        boxed(CmGranger { inner }, out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn cm_granger_free(result: *mut CmGranger) {
    release(result);
}

#[no_mangle]
pub unsafe extern "C" fn cm_granger_lag_count(result: *const CmGranger, out: *mut usize) -> CmStatus {
    guard(|| {
        let g = try_cm!(handle(result, "result"));
        *try_cm!(out_ref(out, "out")) = g.inner.lags.len();
        CmStatus::Ok
    })
}

/// F statistic and p-value at lag `lag` (1-based).
#[no_mangle]
pub unsafe extern "C" fn cm_granger_lag(
    result: *const CmGranger,
    lag: usize,
    out_f: *mut f64,
    out_p: *mut f64,
) -> CmStatus {
    guard(|| {
        let g = try_cm!(handle(result, "result"));
        let out_f = try_cm!(out_ref(out_f, "out_f"));
        let out_p = try_cm!(out_ref(out_p, "out_p"));
        match g.inner.lags.iter().find(|t| t.lag == lag) {
            Some(t) => {
                *out_f = t.f;
                *out_p = t.p;
                CmStatus::Ok
            }
            None => fail(CmStatus::OutOfRange, format!("lag {lag} out of range")),
        }
    })
}

/// Mean of the per-lag p-values.
#[no_mangle]
pub unsafe extern "C" fn cm_granger_average_p(result: *const CmGranger, out: *mut f64) -> CmStatus {
    guard(|| {
        let g = try_cm!(handle(result, "result"));
        *try_cm!(out_ref(out, "out")) = g.inner.avg_p;
        CmStatus::Ok
    })
}

// ---- sentiment -------------------------------------------------------------

pub struct CmLexicon {
    inner: Lexicon,
}

/// Loads a tab-separated `token<TAB>valence` lexicon.
#[no_mangle]
pub unsafe extern "C" fn cm_lexicon_load(path: *const c_char, out: *mut *mut CmLexicon) -> CmStatus {
    guard(|| {
        let out = try_cm!(out_ref(out, "out"));
        *out = ptr::null_mut();
        let path = try_cm!(text(path, "path"));
        let inner = try_core!(load_lexicon(path));
        boxed(CmLexicon { inner }, out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn cm_lexicon_free(lexicon: *mut CmLexicon) {
    release(lexicon);
}

/// Compound sentiment score in `[-1, 1]`.
#[no_mangle]
pub unsafe extern "C" fn cm_sentiment_score(
    lexicon: *const CmLexicon,
    text_utf8: *const c_char,
    out: *mut f64,
) -> CmStatus {
    guard(|| {
        let lex = try_cm!(handle(lexicon, "lexicon"));
        let out = try_cm!(out_ref(out, "out"));
        let t = try_cm!(text(text_utf8, "text"));
        *out = crossmedia::sentiment::score(t, &lex.inner);
        CmStatus::Ok
    })
}
