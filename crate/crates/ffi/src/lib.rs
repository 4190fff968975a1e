//! C ABI over `tsvf-core`.
//!
//! States, observables and two-state vectors are opaque heap handles created
//! by `*_new` functions and released with the matching `*_free`. Every
//! fallible call returns a [`TsvfStatus`]; on failure a description is
//! available from [`tsvf_last_error_message`] on the same thread.
//!
//! The generated header is `include/tsvf_lab.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use tsvf_core::hilbert::{
    inner, spin_observable, tensor_op, tensor_state, Matrix, Observable, StateVector,
};
use tsvf_core::measurement::ProjectiveMeasurement;
use tsvf_core::report::{execute, RunConfig};
use tsvf_core::tsvf::{abl_distribution, weak_value, TwoStateVector};
use tsvf_core::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsvfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    ZeroNorm = 4,
    NotHermitian = 5,
    PostSelectionUnreachable = 6,
    WeakValueUndefined = 7,
    UnknownScenario = 8,
    BufferTooSmall = 9,
    NumericalFailure = 10,
    Panic = 11,
}

/// A normalized state vector.
pub struct TsvfState(StateVector);

/// A Hermitian operator.
pub struct TsvfObservable(Observable);

/// A pre-selected and a post-selected state.
pub struct TsvfTwoState(TwoStateVector);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(TsvfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::DimensionMismatch { .. } => TsvfStatus::DimensionMismatch,
            Error::EmptyState | Error::ZeroNorm => TsvfStatus::ZeroNorm,
            Error::NotHermitian(_) => TsvfStatus::NotHermitian,
            Error::PostSelectionUnreachable
            | Error::ImpossibleOutcome
            | Error::EmptyPostSelection => TsvfStatus::PostSelectionUnreachable,
            Error::WeakValueUndefined => TsvfStatus::WeakValueUndefined,
            Error::UnknownScenario { .. } => TsvfStatus::UnknownScenario,
            Error::NoConvergence(_) | Error::ProbabilityDrift(_) => TsvfStatus::NumericalFailure,
            _ => TsvfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: TsvfStatus, msg: &str) -> Result<T, Failure> {
    Err(Failure(status, msg.to_string()))
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TsvfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TsvfStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            TsvfStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: caller passes a handle from the matching constructor or null.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(TsvfStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return fail(TsvfStatus::NullPointer, &format!("{what} is null"));
    }
    // SAFETY: non-null, caller guarantees it is valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

/// Reads `len` complex numbers from split real/imaginary arrays; `im` may be null.
unsafe fn read_complex(
    re: *const f64,
    im: *const f64,
    len: usize,
) -> Result<Vec<Complex64>, Failure> {
    if re.is_null() {
        return fail(TsvfStatus::NullPointer, "real part is null");
    }
    // SAFETY: caller guarantees `len` readable values behind each non-null pointer.
    let re = unsafe { std::slice::from_raw_parts(re, len) };
    let im = if im.is_null() {
        None
    } else {
        Some(unsafe { std::slice::from_raw_parts(im, len) })
    };
    Ok((0..len)
        .map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i])))
        .collect())
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tsvf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tsvf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds and normalizes a state from `len` amplitudes. `im` may be null for real amplitudes.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_state_new(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut TsvfState,
) -> TsvfStatus {
    guard(|| {
        let amps = unsafe { read_complex(re, im, len)? };
        let s = StateVector::new(amps)?;
        unsafe { write_out(out, Box::into_raw(Box::new(TsvfState(s))), "out") }
    })
}

/// Spin-1/2 state pointing up along the direction `(theta, phi)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_state_spin_up(
    theta: f64,
    phi: f64,
    out: *mut *mut TsvfState,
) -> TsvfStatus {
    guard(|| {
        if !(theta.is_finite() && phi.is_finite()) {
            return fail(TsvfStatus::InvalidArgument, "angles must be finite");
        }
        let s = StateVector::spin_up(theta, phi);
        unsafe { write_out(out, Box::into_raw(Box::new(TsvfState(s))), "out") }
    })
}

/// # Safety
/// `state` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsvf_state_free(state: *mut TsvfState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Dimension of the state, 0 for null.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsvf_state_dim(state: *const TsvfState) -> usize {
    unsafe { state.as_ref() }.map_or(0, |s| s.0.dim())
}

/// Copies the amplitudes into `re`/`im`, each with room for `capacity` values.
///
/// # Safety
/// `re` and `im` must be writable for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn tsvf_state_amplitudes(
    state: *const TsvfState,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
) -> TsvfStatus {
    guard(|| {
        let s = unsafe { borrow(state, "state")? };
        if re.is_null() || im.is_null() {
            return fail(TsvfStatus::NullPointer, "output buffer is null");
        }
        if capacity < s.0.dim() {
            return fail(
                TsvfStatus::BufferTooSmall,
                &format!("need {} values", s.0.dim()),
            );
        }
        for (i, a) in s.0.amplitudes().iter().enumerate() {
            unsafe {
                re.add(i).write(a.re);
                im.add(i).write(a.im);
            }
        }
        Ok(())
    })
}

/// Kronecker product `a ⊗ b`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_state_tensor(
    a: *const TsvfState,
    b: *const TsvfState,
    out: *mut *mut TsvfState,
) -> TsvfStatus {
    guard(|| {
        let (a, b) = unsafe { (borrow(a, "a")?, borrow(b, "b")?) };
        let s = tensor_state(&a.0, &b.0);
        unsafe { write_out(out, Box::into_raw(Box::new(TsvfState(s))), "out") }
    })
}

/// `⟨bra|ket⟩`.
///
/// # Safety
/// `bra`, `ket` must be live handles; `out_re`, `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_state_inner(
    bra: *const TsvfState,
    ket: *const TsvfState,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TsvfStatus {
    guard(|| {
        let (bra, ket) = unsafe { (borrow(bra, "bra")?, borrow(ket, "ket")?) };
        let z = inner(&bra.0, &ket.0)?;
        unsafe {
            write_out(out_re, z.re, "out_re")?;
            write_out(out_im, z.im, "out_im")
        }
    })
}

/// Builds an observable from a row-major `dim × dim` matrix; `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `dim * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_observable_new(
    re: *const f64,
    im: *const f64,
    dim: usize,
    out: *mut *mut TsvfObservable,
) -> TsvfStatus {
    guard(|| {
        let len = dim
            .checked_mul(dim)
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure(TsvfStatus::InvalidArgument, "dim must be positive".into()))?;
        let data = unsafe { read_complex(re, im, len)? };
        let obs = Observable::new(Matrix::from_row_major(dim, data)?)?;
        unsafe { write_out(out, Box::into_raw(Box::new(TsvfObservable(obs))), "out") }
    })
}

/// Spin component `n·σ` along `(theta, phi)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_observable_spin(
    theta: f64,
    phi: f64,
    out: *mut *mut TsvfObservable,
) -> TsvfStatus {
    guard(|| {
        if !(theta.is_finite() && phi.is_finite()) {
            return fail(TsvfStatus::InvalidArgument, "angles must be finite");
        }
        let obs = spin_observable(theta, phi);
        unsafe { write_out(out, Box::into_raw(Box::new(TsvfObservable(obs))), "out") }
    })
}

/// `a ⊗ b`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_observable_tensor(
    a: *const TsvfObservable,
    b: *const TsvfObservable,
    out: *mut *mut TsvfObservable,
) -> TsvfStatus {
    guard(|| {
        let (a, b) = unsafe { (borrow(a, "a")?, borrow(b, "b")?) };
        let obs = tensor_op(&a.0, &b.0);
        unsafe { write_out(out, Box::into_raw(Box::new(TsvfObservable(obs))), "out") }
    })
}

/// # Safety
/// `obs` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsvf_observable_free(obs: *mut TsvfObservable) {
    if !obs.is_null() {
        drop(unsafe { Box::from_raw(obs) });
    }
}

/// Copies both states into a new two-state handle.
///
/// # Safety
/// `pre`, `post` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_two_state_new(
    pre: *const TsvfState,
    post: *const TsvfState,
    out: *mut *mut TsvfTwoState,
) -> TsvfStatus {
    guard(|| {
        let (pre, post) = unsafe { (borrow(pre, "pre")?, borrow(post, "post")?) };
        let tsv = TwoStateVector::new(pre.0.clone(), post.0.clone())?;
        unsafe { write_out(out, Box::into_raw(Box::new(TsvfTwoState(tsv))), "out") }
    })
}

/// # Safety
/// `tsv` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsvf_two_state_free(tsv: *mut TsvfTwoState) {
    if !tsv.is_null() {
        drop(unsafe { Box::from_raw(tsv) });
    }
}

/// ABL probabilities for an ideal measurement of `obs`, one per distinct
/// eigenvalue in ascending order. `out_len` always receives the number of
/// outcomes; if `capacity` is smaller the call fails with `BufferTooSmall`.
/// `eigenvalues` may be null.
///
/// # Safety
/// `probabilities` (and `eigenvalues` when non-null) must be writable for
/// `capacity` doubles; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_abl_probabilities(
    tsv: *const TsvfTwoState,
    obs: *const TsvfObservable,
    probabilities: *mut f64,
    eigenvalues: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> TsvfStatus {
    guard(|| {
        let (tsv, obs) = unsafe { (borrow(tsv, "tsv")?, borrow(obs, "observable")?) };
        let m = ProjectiveMeasurement::from_observable("ffi", &obs.0)?;
        let p = abl_distribution(&tsv.0, &m)?;
        unsafe { write_out(out_len, p.len(), "out_len")? };
        if probabilities.is_null() {
            return fail(TsvfStatus::NullPointer, "probabilities is null");
        }
        if capacity < p.len() {
            return fail(
                TsvfStatus::BufferTooSmall,
                &format!("need {} values", p.len()),
            );
        }
        for (i, (pi, o)) in p.iter().zip(m.outcomes()).enumerate() {
            unsafe {
                probabilities.add(i).write(*pi);
                if !eigenvalues.is_null() {
                    eigenvalues.add(i).write(o.eigenvalue);
                }
            }
        }
        Ok(())
    })
}

/// Weak value `⟨post|A|pre⟩ / ⟨post|pre⟩`.
///
/// # Safety
/// `tsv`, `obs` must be live handles; `out_re`, `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_weak_value(
    tsv: *const TsvfTwoState,
    obs: *const TsvfObservable,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TsvfStatus {
    guard(|| {
        let (tsv, obs) = unsafe { (borrow(tsv, "tsv")?, borrow(obs, "observable")?) };
        let w = weak_value(&tsv.0, &obs.0)?.value();
        unsafe {
            write_out(out_re, w.re, "out_re")?;
            write_out(out_im, w.im, "out_im")
        }
    })
}

/// Runs catalog scenarios and returns the JSON report. `names` is a
/// comma-separated list, or null/empty for the whole catalog. The string must
/// be released with [`tsvf_string_free`]. `all_passed` may be null.
///
/// # Safety
/// `names` must be null or NUL-terminated; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsvf_run_scenarios_json(
    names: *const c_char,
    trials: u64,
    seed: u64,
    sigma: f64,
    out_json: *mut *mut c_char,
    all_passed: *mut bool,
) -> TsvfStatus {
    guard(|| {
        let scenarios = if names.is_null() {
            Vec::new()
        } else {
            let s = unsafe { CStr::from_ptr(names) }
                .to_str()
                .map_err(|_| Failure(TsvfStatus::InvalidArgument, "names is not UTF-8".into()))?;
            s.split(',')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .map(String::from)
                .collect()
        };
        let cfg = RunConfig {
            scenarios,
            trials,
            seed,
            sigma,
            ..RunConfig::default()
        };
        let report = execute(&cfg)?;
        let json = CString::new(report.to_json()?)
            .map_err(|_| Failure(TsvfStatus::NumericalFailure, "report contains NUL".into()))?;
        if !all_passed.is_null() {
            unsafe { all_passed.write(report.passed()) };
        }
        unsafe { write_out(out_json, json.into_raw(), "out_json") }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsvf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
