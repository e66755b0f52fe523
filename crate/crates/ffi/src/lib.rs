//! C ABI for `fockledger`.
//!
//! States live behind an opaque `FlState` handle. Every fallible call
//! returns an `FL_*` status code; on failure a message is available from
//! `fl_last_error_message` on the same thread until the next call. Strings
//! returned through out-parameters must be released with `fl_string_free`,
//! handles with `fl_state_free`. Panics never cross the boundary: they are
//! reported as `FL_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fockledger::fock::{CutoffPolicy, FockState};
use fockledger::harness::claims::{run_claims, VerifyConfig, DEFAULT_DRAWS};
use fockledger::harness::{Format, Report};
use fockledger::operators::{apply, OperatorKind};
use fockledger::statistics::{predictions, stats, StatsClass};
use fockledger::Complex64;
use fockledger::{distribution_of, FamilySpec, FockError};

pub const FL_OK: i32 = 0;
pub const FL_NULL_POINTER: i32 = 1;
pub const FL_ZERO_STATE: i32 = 2;
pub const FL_INVALID_PARAMS: i32 = 3;
pub const FL_INVALID_DISTRIBUTION: i32 = 4;
pub const FL_CUTOFF_OVERFLOW: i32 = 5;
pub const FL_NO_REAL_ROOT: i32 = 6;
pub const FL_UNSUPPORTED: i32 = 7;
pub const FL_PARSE: i32 = 8;
pub const FL_UTF8: i32 = 9;
pub const FL_BUFFER_TOO_SMALL: i32 = 10;
pub const FL_PANIC: i32 = 11;

pub const FL_OP_ANNIHILATE: i32 = 0;
pub const FL_OP_CREATE: i32 = 1;
pub const FL_OP_EXP_PHASE_DOWN: i32 = 2;
pub const FL_OP_EXP_PHASE_UP: i32 = 3;

pub const FL_CLASS_UNDEFINED: i32 = -1;
pub const FL_CLASS_SUB_POISSONIAN: i32 = 0;
pub const FL_CLASS_POISSONIAN: i32 = 1;
pub const FL_CLASS_SUPER_POISSONIAN: i32 = 2;
pub const FL_CLASS_SUPER_CHAOTIC: i32 = 3;
pub const FL_CLASS_HYPER_POISSONIAN: i32 = 4;

/// Opaque normalized state.
pub struct FlState {
    inner: FockState,
}

/// Statistics of a state. Quantities undefined for the vacuum are NaN and
/// `klass` is `FL_CLASS_UNDEFINED`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FlStats {
    pub mean: f64,
    pub variance: f64,
    /// n^(1) .. n^(4)
    pub factorial_moments: [f64; 4],
    pub mandel_q: f64,
    pub g2: f64,
    pub klass: i32,
}

/// Closed-form means of the partner states; NaN where undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FlPredictions {
    pub n_minus: f64,
    pub n_plus: f64,
    pub q_minus: f64,
    pub n_tilde_minus: f64,
    pub n_tilde_plus: f64,
    pub q_tilde: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (i32, String);

fn status_of(e: &FockError) -> i32 {
    match e {
        FockError::ZeroState(_) => FL_ZERO_STATE,
        FockError::InvalidDistribution(_) => FL_INVALID_DISTRIBUTION,
        FockError::CutoffOverflow { .. } => FL_CUTOFF_OVERFLOW,
        FockError::InvalidParams(_) => FL_INVALID_PARAMS,
        FockError::NoRealRoot { .. } => FL_NO_REAL_ROOT,
        FockError::UnsupportedSpec(_) => FL_UNSUPPORTED,
        FockError::Parse(_) => FL_PARSE,
    }
}

fn lib_err(e: FockError) -> Failure {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> Failure {
    (FL_NULL_POINTER, format!("{what} is null"))
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> i32 {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FL_OK,
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            FL_PANIC
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (FL_UTF8, format!("{what} is not valid UTF-8")))
}

unsafe fn state_ref<'a>(p: *const FlState) -> Result<&'a FockState, Failure> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("state"))
}

fn policy(tail_tol: f64) -> Result<CutoffPolicy, Failure> {
    let policy = CutoffPolicy::from_env();
    if tail_tol == 0.0 {
        Ok(policy)
    } else if tail_tol > 0.0 && tail_tol < 1.0 {
        Ok(policy.with_tail_tol(tail_tol))
    } else {
        Err((
            FL_INVALID_PARAMS,
            format!("tail_tol must lie in (0, 1) or be 0, got {tail_tol}"),
        ))
    }
}

fn into_handle(state: FockState) -> *mut FlState {
    Box::into_raw(Box::new(FlState { inner: state }))
}

/// Builds a family member from its text spec, e.g. `"negbin:xi=0.5,mu=2"`.
/// `tail_tol = 0` selects the default truncation tolerance.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_state_from_spec(
    spec: *const c_char,
    tail_tol: f64,
    out: *mut *mut FlState,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec: FamilySpec = c_str(spec, "spec")?.parse().map_err(lib_err)?;
        let state = spec.build(&policy(tail_tol)?).map_err(lib_err)?;
        *out = into_handle(state);
        Ok(())
    })
}

/// Normalizes `re[0..len] + i im[0..len]` into a state. `im` may be null
/// for real amplitudes.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fl_state_from_amplitudes(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut FlState,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if re.is_null() {
            return Err(null("re"));
        }
        if len == 0 {
            return Err((FL_INVALID_PARAMS, "len must be at least 1".into()));
        }
        let re = std::slice::from_raw_parts(re, len);
        let amps: Vec<Complex64> = if im.is_null() {
            re.iter().map(|&r| Complex64::new(r, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter()
                .zip(im)
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect()
        };
        if amps.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err((FL_INVALID_PARAMS, "amplitudes must be finite".into()));
        }
        let state = FockState::new(amps).normalize().map_err(lib_err)?;
        *out = into_handle(state);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `state` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fl_state_free(state: *mut FlState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Highest stored Fock index.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fl_state_cutoff(state: *const FlState, out: *mut usize) -> i32 {
    guard(|| {
        let s = state_ref(state)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = s.cutoff();
        Ok(())
    })
}

/// Copies the `cutoff + 1` amplitudes into `re` and `im`. `*needed` always
/// receives the required length; a short buffer gives
/// `FL_BUFFER_TOO_SMALL` and copies nothing.
///
/// # Safety
/// `re` and `im` must hold `len` doubles; `needed` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fl_state_amplitudes(
    state: *const FlState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
    needed: *mut usize,
) -> i32 {
    guard(|| {
        let s = state_ref(state)?;
        if needed.is_null() {
            return Err(null("needed"));
        }
        let amps = s.amplitudes();
        *needed = amps.len();
        if len < amps.len() {
            return Err((
                FL_BUFFER_TOO_SMALL,
                format!("need {} slots, got {len}", amps.len()),
            ));
        }
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        for (i, c) in amps.iter().enumerate() {
            *re.add(i) = c.re;
            *im.add(i) = c.im;
        }
        Ok(())
    })
}

/// Applies one `FL_OP_*` operator. The normalized image is a new handle;
/// `norm_sq` (nullable) receives the squared norm before normalization.
///
/// # Safety
/// Pointers must be valid; `norm_sq` may be null.
#[no_mangle]
pub unsafe extern "C" fn fl_state_apply(
    state: *const FlState,
    op: i32,
    out: *mut *mut FlState,
    norm_sq: *mut f64,
) -> i32 {
    guard(|| {
        let s = state_ref(state)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let op = match op {
            FL_OP_ANNIHILATE => OperatorKind::Annihilate,
            FL_OP_CREATE => OperatorKind::Create,
            FL_OP_EXP_PHASE_DOWN => OperatorKind::ExpPhaseDown,
            FL_OP_EXP_PHASE_UP => OperatorKind::ExpPhaseUp,
            other => return Err((FL_INVALID_PARAMS, format!("unknown operator code {other}"))),
        };
        let applied = apply(s, &op).map_err(lib_err)?;
        if !norm_sq.is_null() {
            *norm_sq = applied.norm_sq;
        }
        *out = into_handle(applied.state);
        Ok(())
    })
}

fn class_code(c: Option<StatsClass>) -> i32 {
    match c {
        None => FL_CLASS_UNDEFINED,
        Some(StatsClass::SubPoissonian) => FL_CLASS_SUB_POISSONIAN,
        Some(StatsClass::Poissonian) => FL_CLASS_POISSONIAN,
        Some(StatsClass::SuperPoissonian) => FL_CLASS_SUPER_POISSONIAN,
        Some(StatsClass::SuperChaotic) => FL_CLASS_SUPER_CHAOTIC,
        Some(StatsClass::HyperPoissonian) => FL_CLASS_HYPER_POISSONIAN,
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fl_state_stats(state: *const FlState, out: *mut FlStats) -> i32 {
    guard(|| {
        let s = state_ref(state)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = stats(&distribution_of(s).map_err(lib_err)?);
        *out = FlStats {
            mean: r.mean,
            variance: r.variance,
            factorial_moments: r.factorial_moments,
            mandel_q: r.mandel_q.unwrap_or(f64::NAN),
            g2: r.g2.unwrap_or(f64::NAN),
            klass: class_code(r.klass),
        };
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fl_state_predictions(
    state: *const FlState,
    out: *mut FlPredictions,
) -> i32 {
    guard(|| {
        let s = state_ref(state)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = predictions(&distribution_of(s).map_err(lib_err)?);
        *out = FlPredictions {
            n_minus: p.n_minus.unwrap_or(f64::NAN),
            n_plus: p.n_plus,
            q_minus: p.q_minus.unwrap_or(f64::NAN),
            n_tilde_minus: p.n_tilde_minus.unwrap_or(f64::NAN),
            n_tilde_plus: p.n_tilde_plus,
            q_tilde: p.q_tilde.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Runs the claim suite and returns the JSON report in `*out_json`.
/// `filter` (nullable) restricts claims by id prefix; `draws = 0` selects
/// the default number of random states per family. `*all_passed`
/// (nullable) is set to 1 when nothing failed.
///
/// # Safety
/// `out_json` must be valid; free the string with `fl_string_free`.
#[no_mangle]
pub unsafe extern "C" fn fl_verify_json(
    filter: *const c_char,
    seed: u64,
    draws: usize,
    out_json: *mut *mut c_char,
    all_passed: *mut i32,
) -> i32 {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let filter = if filter.is_null() {
            None
        } else {
            Some(c_str(filter, "filter")?.to_owned())
        };
        let config = VerifyConfig {
            seed,
            draws: if draws == 0 { DEFAULT_DRAWS } else { draws },
            policy: CutoffPolicy::from_env(),
            filter,
        };
        let report = Report::new(&config, run_claims(&config));
        if !all_passed.is_null() {
            *all_passed = i32::from(report.all_passed());
        }
        let text = CString::new(report.render(Format::Json)).expect("JSON has no NUL");
        *out_json = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn fl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn fl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn fl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
