//! C ABI for the review-pricing simulator.
//!
//! Instances and episode traces are opaque heap handles owned by the caller
//! and released with the matching `*_free` function. Every fallible call
//! returns an [`RpStatus`]; on failure a description is available from
//! [`rp_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use review_pricing::buyers::{compute_lb, BuyerKind, BuyerModel};
use review_pricing::instances::{build_hard_instance, q_threshold};
use review_pricing::market::{ProblemInstance, TypeSet};
use review_pricing::sellers::{phase1_length, PolicySpec, TwoPhaseConfig};
use review_pricing::sim::{run_episode, RunTrace};
use review_pricing::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidInstance = 4,
    Parse = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Opaque problem instance.
pub struct RpInstance(ProblemInstance);

/// Opaque record of a finished episode.
pub struct RpTrace(RunTrace);

/// One round of an episode. `review` is NaN when the buyer did not purchase.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpRound {
    pub t: u64,
    pub price: f64,
    pub type_index: usize,
    pub threshold: f64,
    pub bought: bool,
    pub revenue: f64,
    pub review: f64,
}

/// Revenue-maximizing posted price over a type set.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpOptimalPrice {
    pub price: f64,
    pub type_index: usize,
    pub revenue: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: RpStatus, msg: impl Into<String>) -> RpStatus {
    set_error(msg.into());
    status
}

fn status_of(err: &Error) -> RpStatus {
    match err {
        Error::InvalidInstance(_) | Error::EmptyTypeSet => RpStatus::InvalidInstance,
        Error::TypeOutOfRange { .. } => RpStatus::OutOfRange,
        Error::Config(_) | Error::TomlDe(_) | Error::TomlSer(_) | Error::Csv(_) => RpStatus::Parse,
        _ => RpStatus::InvalidArgument,
    }
}

fn from_error(err: Error) -> RpStatus {
    fail(status_of(&err), err.to_string())
}

/// Runs `f`, converting panics into [`RpStatus::Panic`].
fn guard(f: impl FnOnce() -> RpStatus) -> RpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(RpStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, RpStatus> {
    if s.is_null() {
        return Err(fail(RpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(RpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(RpStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Message describing the last failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses an instance file (TOML with `d`, `horizon_T`, `theta`, `q`,
/// `value_dists`).
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rp_instance_from_toml(
    toml: *const c_char,
    out: *mut *mut RpInstance,
) -> RpStatus {
    guard(|| {
        non_null!(out);
        let text = try_ffi!(read_str(toml, "toml"));
        match ProblemInstance::from_toml(text) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(RpInstance(inst)));
                RpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Builds the equal-value hard instance for horizon `horizon`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rp_instance_hard(
    horizon: u64,
    d: usize,
    eta: f64,
    out: *mut *mut RpInstance,
) -> RpStatus {
    guard(|| {
        non_null!(out);
        match build_hard_instance(horizon, d, eta) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(RpInstance(inst)));
                RpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `instance` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rp_instance_free(instance: *mut RpInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Number of types, or 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_instance_d(instance: *const RpInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.0.d())
}

/// Horizon, or 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_instance_horizon(instance: *const RpInstance) -> u64 {
    instance.as_ref().map_or(0, |i| i.0.horizon())
}

unsafe fn type_set(d: usize, mask: *const bool, len: usize) -> Result<TypeSet, RpStatus> {
    if mask.is_null() {
        return Err(fail(RpStatus::NullPointer, "mask is null"));
    }
    if len != d {
        return Err(fail(
            RpStatus::OutOfRange,
            format!("mask has {len} entries for {d} types"),
        ));
    }
    Ok(TypeSet::from_mask(
        std::slice::from_raw_parts(mask, len).to_vec(),
    ))
}

/// Expected per-round revenue `p * sum_{i in set, theta_i >= p} q_i`, where
/// `mask[i]` marks membership of type `i`.
///
/// # Safety
/// `instance` must be live, `mask` must point to `len` bools and `out` must
/// be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_instance_rev(
    instance: *const RpInstance,
    price: f64,
    mask: *const bool,
    len: usize,
    out: *mut f64,
) -> RpStatus {
    guard(|| {
        non_null!(instance, out);
        let inst = &(*instance).0;
        let set = try_ffi!(type_set(inst.d(), mask, len));
        *out = inst.rev(price, &set);
        RpStatus::Ok
    })
}

/// Revenue-maximizing price over the types selected by `mask`.
///
/// # Safety
/// As for [`rp_instance_rev`].
#[no_mangle]
pub unsafe extern "C" fn rp_instance_optimal_price(
    instance: *const RpInstance,
    mask: *const bool,
    len: usize,
    out: *mut RpOptimalPrice,
) -> RpStatus {
    guard(|| {
        non_null!(instance, out);
        let inst = &(*instance).0;
        let set = try_ffi!(type_set(inst.d(), mask, len));
        match inst.optimal_price(&set) {
            Ok(p) => {
                *out = RpOptimalPrice {
                    price: p.price,
                    type_index: p.index,
                    revenue: p.revenue,
                };
                RpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Plays one episode.
///
/// `policy` is `"two_phase"`, `"fixed:<p>"` or `"oracle"`; `buyer` is
/// `"exact_lb"`, `"lb_plus_slack:<s>"`, `"omniscient"` or `"fixed_confidence"`.
/// A non-positive `lambda` selects the automatic value.
///
/// # Safety
/// `instance` must be live, the strings NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rp_run_episode(
    instance: *const RpInstance,
    policy: *const c_char,
    buyer: *const c_char,
    eta: f64,
    phase1_constant: f64,
    lambda: f64,
    seed: u64,
    out: *mut *mut RpTrace,
) -> RpStatus {
    guard(|| {
        non_null!(instance, out);
        let inst = &(*instance).0;
        let policy: PolicySpec = match try_ffi!(read_str(policy, "policy")).parse() {
            Ok(p) => p,
            Err(e) => return from_error(e),
        };
        let kind: BuyerKind = match try_ffi!(read_str(buyer, "buyer")).parse() {
            Ok(k) => k,
            Err(e) => return from_error(e),
        };
        let config = TwoPhaseConfig {
            lambda: (lambda > 0.0).then_some(lambda),
            phase1_constant,
            eta,
        };
        let result = BuyerModel::new(kind, eta).and_then(|buyer| {
            let built = policy.build(inst, &config)?;
            run_episode(inst, built, buyer, seed)
        });
        match result {
            Ok(trace) => {
                *out = Box::into_raw(Box::new(RpTrace(trace)));
                RpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a trace. Null is ignored.
///
/// # Safety
/// `trace` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rp_trace_free(trace: *mut RpTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of rounds played, or 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_trace_len(trace: *const RpTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.records.len())
}

/// Total revenue, or NaN for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_trace_total_revenue(trace: *const RpTrace) -> f64 {
    trace.as_ref().map_or(f64::NAN, |t| t.0.total_revenue())
}

/// Regret against the instance benchmark, or NaN for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_trace_regret(trace: *const RpTrace) -> f64 {
    trace.as_ref().map_or(f64::NAN, |t| t.0.regret())
}

/// Copies round `index` (0-based) into `out`.
///
/// # Safety
/// `trace` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rp_trace_round(
    trace: *const RpTrace,
    index: usize,
    out: *mut RpRound,
) -> RpStatus {
    guard(|| {
        non_null!(trace, out);
        let records = &(*trace).0.records;
        let Some(r) = records.get(index) else {
            return fail(
                RpStatus::OutOfRange,
                format!("round {index} out of range for {} rounds", records.len()),
            );
        };
        *out = RpRound {
            t: r.t,
            price: r.price,
            type_index: r.type_index,
            threshold: r.threshold,
            bought: r.bought,
            revenue: r.revenue,
            review: r.review.unwrap_or(f64::NAN),
        };
        RpStatus::Ok
    })
}

/// Buyer lower confidence bound on round `t` from `n` reviews.
///
/// # Safety
/// `reviews` must point to `n` doubles (it may be null when `n` is 0) and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_compute_lb(
    reviews: *const f64,
    n: usize,
    t: u64,
    eta: f64,
    out: *mut f64,
) -> RpStatus {
    guard(|| {
        non_null!(out);
        if n > 0 && reviews.is_null() {
            return fail(RpStatus::NullPointer, "reviews is null");
        }
        if t == 0 || !(eta > 0.0 && eta <= 1.0) {
            return fail(
                RpStatus::InvalidArgument,
                format!("need t >= 1 and eta in (0, 1], got t = {t}, eta = {eta}"),
            );
        }
        let slice = if n == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(reviews, n)
        };
        *out = compute_lb(slice, t, eta);
        RpStatus::Ok
    })
}

/// Phase-1 length `min(T, ceil(c ln(d T^2) / lambda) + 1)`.
#[no_mangle]
pub extern "C" fn rp_phase1_length(
    d: usize,
    horizon: u64,
    lambda: f64,
    phase1_constant: f64,
) -> u64 {
    phase1_length(d, horizon, lambda, phase1_constant)
}

/// Minimum type probability separating the two regret regimes.
#[no_mangle]
pub extern "C" fn rp_q_threshold(horizon: u64, d: usize, eta: f64) -> f64 {
    q_threshold(horizon, d, eta)
}
