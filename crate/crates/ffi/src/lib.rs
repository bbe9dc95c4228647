//! C ABI over `knapmatch`.
//!
//! Every fallible call returns a [`KmStatus`]; on failure the message is
//! available from [`km_last_error_message`] on the same thread. Handles are
//! opaque and owned by the caller once returned; release them with the
//! matching `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use knapmatch::error::Error;
use knapmatch::harness::{run_seeded, Algo, AlgoOutcome};
use knapmatch::io::Instance;
use knapmatch::model::{ArrivalOrder, BipartiteInstance};
use knapmatch::offline::Gamma;

pub const KM_ALGO_ON: u32 = 0;
pub const KM_ALGO_VIRTUAL: u32 = 1;
pub const KM_ALGO_ON_TRUTH: u32 = 2;
pub const KM_ALGO_THRESHOLD: u32 = 3;
pub const KM_ALGO_GREEDY: u32 = 4;
pub const KM_ALGO_EXACT: u32 = 5;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Json = 3,
    Structural = 4,
    Domain = 5,
    Size = 6,
    Generation = 7,
    Io = 8,
    /// The requested field does not apply to this outcome.
    NoValue = 9,
    Panic = 10,
}

/// A parsed instance; knapsack inputs are stored in graph form.
pub struct KmInstance(BipartiteInstance);

pub struct KmOutcome(AlgoOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: KmStatus, msg: impl Into<String>) -> KmStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> KmStatus {
    let status = match &e {
        Error::Structural(_) => KmStatus::Structural,
        Error::Domain(_) => KmStatus::Domain,
        Error::Size(_) => KmStatus::Size,
        Error::Generation(_) => KmStatus::Generation,
        Error::Io { .. } | Error::Csv(_) => KmStatus::Io,
        Error::Json(_) => KmStatus::Json,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> KmStatus) -> KmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(KmStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn algo_from(code: u32) -> Option<Algo> {
    Some(match code {
        KM_ALGO_ON => Algo::On,
        KM_ALGO_VIRTUAL => Algo::Virtual,
        KM_ALGO_ON_TRUTH => Algo::OnTruth,
        KM_ALGO_THRESHOLD => Algo::Threshold,
        KM_ALGO_GREEDY => Algo::Greedy,
        KM_ALGO_EXACT => Algo::Exact,
        _ => return None,
    })
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn km_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse an instance in the JSON format written by `knapmatch gen`.
///
/// # Safety
/// `json` must be NULL or a NUL-terminated string; `out` must be NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn km_instance_from_json(json: *const c_char, out: *mut *mut KmInstance) -> KmStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(KmStatus::NullPointer, "json and out must be non-null");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(KmStatus::InvalidUtf8, e.to_string()),
        };
        match serde_json::from_str::<Instance>(text) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(KmInstance(inst.to_bipartite())));
                KmStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// # Safety
/// `inst` must be NULL or a handle from [`km_instance_from_json`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn km_instance_free(inst: *mut KmInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Left vertices; 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn km_instance_left_count(inst: *const KmInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.left_count())
}

/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn km_instance_right_count(inst: *const KmInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.right_count())
}

/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn km_instance_edge_count(inst: *const KmInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.edges().len())
}

/// Budget, or NaN for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn km_instance_budget(inst: *const KmInstance) -> f64 {
    inst.as_ref().map_or(f64::NAN, |i| i.0.budget())
}

/// Run one algorithm (a `KM_ALGO_*` code). `order` lists left ids in arrival
/// order; pass NULL to draw it from `seed`, exactly as `knapmatch run`.
///
/// # Safety
/// `inst` must be a live handle, `order` NULL or `order_len` readable
/// elements, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn km_run(
    inst: *const KmInstance,
    algo: u32,
    order: *const usize,
    order_len: usize,
    seed: u64,
    t_fraction: f64,
    enforce_cost: bool,
    out: *mut *mut KmOutcome,
) -> KmStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
            return fail(KmStatus::NullPointer, "inst and out must be non-null");
        };
        let Some(algo) = algo_from(algo) else {
            return fail(KmStatus::Domain, format!("unknown algorithm code {algo}"));
        };
        let order = if order.is_null() {
            None
        } else {
            let ids = std::slice::from_raw_parts(order, order_len).to_vec();
            match ArrivalOrder::new(ids) {
                Ok(o) => Some(o),
                Err(e) => return from_error(e),
            }
        };
        match run_seeded(algo, &inst.0, order, seed, t_fraction, enforce_cost) {
            Ok(outcome) => {
                *out = Box::into_raw(Box::new(KmOutcome(outcome)));
                KmStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `outcome` must be NULL or a handle from [`km_run`] that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn km_outcome_free(outcome: *mut KmOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// Total matched value, or NaN for NULL.
///
/// # Safety
/// `outcome` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn km_outcome_value(outcome: *const KmOutcome) -> f64 {
    outcome.as_ref().map_or(f64::NAN, |o| o.0.value)
}

/// Total bid of the selected lefts, or NaN for NULL.
///
/// # Safety
/// `outcome` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn km_outcome_spend(outcome: *const KmOutcome) -> f64 {
    outcome.as_ref().map_or(f64::NAN, |o| o.0.spend)
}

/// # Safety
/// `outcome` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn km_outcome_payments_total(outcome: *const KmOutcome) -> f64 {
    outcome.as_ref().map_or(f64::NAN, |o| o.0.payments_total)
}

/// # Safety
/// `outcome` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn km_outcome_feasible(outcome: *const KmOutcome) -> bool {
    outcome.as_ref().is_some_and(|o| o.0.feasible)
}

/// Number of selected lefts; 0 for NULL.
///
/// # Safety
/// `outcome` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn km_outcome_selected_count(outcome: *const KmOutcome) -> usize {
    outcome.as_ref().map_or(0, |o| o.0.selected_lefts.len())
}

/// Borrowed array of [`km_outcome_selected_count`] left ids, valid while the
/// outcome lives. NULL for NULL.
///
/// # Safety
/// `outcome` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn km_outcome_selected(outcome: *const KmOutcome) -> *const usize {
    outcome.as_ref().map_or(ptr::null(), |o| o.0.selected_lefts.as_ptr())
}

/// Payment to `left`.
///
/// # Safety
/// `outcome` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn km_outcome_payment(outcome: *const KmOutcome, left: usize, out: *mut f64) -> KmStatus {
    guard(|| {
        let (Some(o), false) = (outcome.as_ref(), out.is_null()) else {
            return fail(KmStatus::NullPointer, "outcome and out must be non-null");
        };
        match o.0.payments.get(left) {
            Some(&p) => {
                *out = p;
                KmStatus::Ok
            }
            None => fail(KmStatus::Domain, format!("left {left} out of range")),
        }
    })
}

/// Threshold the algorithm used; +infinity when unbounded, `NoValue` when
/// the algorithm has none (greedy, exact, virtual).
///
/// # Safety
/// `outcome` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn km_outcome_gamma(outcome: *const KmOutcome, out: *mut f64) -> KmStatus {
    guard(|| {
        let (Some(o), false) = (outcome.as_ref(), out.is_null()) else {
            return fail(KmStatus::NullPointer, "outcome and out must be non-null");
        };
        match o.0.gamma {
            Some(Gamma::Finite(g)) => *out = g,
            Some(Gamma::Unbounded) => *out = f64::INFINITY,
            None => return fail(KmStatus::NoValue, "this algorithm has no threshold"),
        }
        KmStatus::Ok
    })
}

/// The outcome as JSON, in the shape `knapmatch run` prints. Free the string
/// with [`km_string_free`].
///
/// # Safety
/// `outcome` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn km_outcome_to_json(outcome: *const KmOutcome, out: *mut *mut c_char) -> KmStatus {
    guard(|| {
        let (Some(o), false) = (outcome.as_ref(), out.is_null()) else {
            return fail(KmStatus::NullPointer, "outcome and out must be non-null");
        };
        match serde_json::to_string(&o.0) {
            Ok(s) => {
                *out = CString::new(s).expect("JSON has no NUL").into_raw();
                KmStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn km_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn km_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
