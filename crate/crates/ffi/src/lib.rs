//! C interface to `sdc-core`.
//!
//! States and channels cross the boundary as opaque handles that the caller
//! releases with the matching `_free` function. Every entry point returns an
//! [`SdcStatus`]; on failure the message is available from
//! [`sdc_last_error_message`] on the same thread. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sdc_core::capacity::{capacity_via_min_entropy, holevo_chi, optimal_ensemble};
use sdc_core::cases::{closed_form, Case, CaseParams, NoiseKind, StateKind};
use sdc_core::channels::{KrausChannel, PauliChannel, QuantumChannel, Side};
use sdc_core::optimize::roots::{
    crossover_eta_tilde, crossover_mu_tilde, depolarising_transition_threshold,
};
use sdc_core::optimize::{
    min_output_entropy_cptp, min_output_entropy_unitary, OptOptions, Structure,
};
use sdc_core::qlin::DensityMatrix;
use sdc_core::{states, SdcError};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    DimensionOverflow = 4,
    UnknownCase = 5,
    NoBracket = 6,
    Unsupported = 7,
    Panic = 99,
}

/// Density matrix with its subsystem layout.
pub struct SdcState(DensityMatrix);

/// Weyl-Pauli channel on a fixed subsystem layout.
pub struct SdcChannel(PauliChannel);

/// Noise family used by the `d`-dimensional cases.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdcNoise {
    Depolarising = 0,
    Quasiclassical = 1,
}

/// Input state for the cases that accept one.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdcStateKind {
    Bell = 0,
    Werner = 1,
    BellDiagonal = 2,
    Product = 3,
}

/// Case parameters. Fill with [`sdc_params_default`] and override fields.
/// `q` is ignored when NaN; `q4` and `p4` only when their `has_` flag is set.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SdcParams {
    pub d: usize,
    pub k: usize,
    pub p: f64,
    pub mu: f64,
    pub eta: f64,
    pub q: f64,
    pub q4: [f64; 4],
    pub has_q4: bool,
    pub p4: [f64; 4],
    pub has_p4: bool,
    pub noise: SdcNoise,
    pub state: SdcStateKind,
    /// Noise on the receiver instead of the sender for one-sided cases.
    pub receiver_side: bool,
}

impl From<&SdcParams> for CaseParams {
    fn from(p: &SdcParams) -> Self {
        CaseParams {
            d: p.d,
            k: p.k,
            p: p.p,
            mu: p.mu,
            eta: p.eta,
            q: (!p.q.is_nan()).then_some(p.q),
            q4: p.has_q4.then_some(p.q4),
            p4: p.has_p4.then_some(p.p4),
            noise: match p.noise {
                SdcNoise::Depolarising => NoiseKind::Depolarising,
                SdcNoise::Quasiclassical => NoiseKind::Quasiclassical,
            },
            state: match p.state {
                SdcStateKind::Bell => StateKind::Bell,
                SdcStateKind::Werner => StateKind::Werner,
                SdcStateKind::BellDiagonal => StateKind::BellDiagonal,
                SdcStateKind::Product => StateKind::Product,
            },
            side: if p.receiver_side {
                Side::Receiver
            } else {
                Side::Sender
            },
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &SdcError) -> SdcStatus {
    match e {
        SdcError::DimensionMismatch(_) | SdcError::SubsystemOutOfRange { .. } => {
            SdcStatus::DimensionMismatch
        }
        SdcError::DimensionOverflow { .. } => SdcStatus::DimensionOverflow,
        SdcError::UnknownCase(_) => SdcStatus::UnknownCase,
        SdcError::NoBracket { .. } => SdcStatus::NoBracket,
        SdcError::UnsupportedCorrelation(_) => SdcStatus::Unsupported,
        _ => SdcStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Core(SdcError),
    Arg(String),
}

impl From<SdcError> for Fail {
    fn from(e: SdcError) -> Self {
        Fail::Core(e)
    }
}

/// Runs `f`, records any failure for [`sdc_last_error_message`] and maps it to a status.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> SdcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SdcStatus::Ok,
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            SdcStatus::NullPointer
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            SdcStatus::InvalidArgument
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            SdcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    // SAFETY: caller guarantees p is null or points to a live T
    unsafe { p.as_ref() }.ok_or(Fail::Null(name))
}

unsafe fn write<T>(out: *mut T, name: &'static str, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: non-null and the caller guarantees it is writable
    unsafe { out.write(v) };
    Ok(())
}

unsafe fn quad(p: *const f64, name: &'static str) -> Result<[f64; 4], Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: caller passes at least four doubles
    Ok(unsafe { [*p, *p.add(1), *p.add(2), *p.add(3)] })
}

unsafe fn boxed<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    // SAFETY: forwarded from the caller's contract on `out`
    unsafe { write(out, "out", Box::into_raw(Box::new(v))) }
}

/// Message of the last failed call on this thread, or null if it succeeded.
/// Release with [`sdc_string_free`].
#[no_mangle]
pub extern "C" fn sdc_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn sdc_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by CString::into_raw in this crate
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sdc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_params_default(out: *mut SdcParams) -> SdcStatus {
    guard(|| unsafe {
        write(
            out,
            "out",
            SdcParams {
                d: 2,
                k: 1,
                p: 0.0,
                mu: 0.0,
                eta: 1.0,
                q: f64::NAN,
                q4: [0.0; 4],
                has_q4: false,
                p4: [0.0; 4],
                has_p4: false,
                noise: SdcNoise::Depolarising,
                state: SdcStateKind::Bell,
                receiver_side: false,
            },
        )
    })
}

/// Closed-form capacity in bits of the case with id `case_id`.
///
/// # Safety
/// `case_id` must be a NUL-terminated string, `params` readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_capacity(
    case_id: *const c_char,
    params: *const SdcParams,
    out: *mut f64,
) -> SdcStatus {
    guard(|| unsafe {
        if case_id.is_null() {
            return Err(Fail::Null("case_id"));
        }
        let id = CStr::from_ptr(case_id)
            .to_str()
            .map_err(|_| Fail::Arg("case id is not UTF-8".into()))?;
        let case = Case::from_id(id)?;
        let params = CaseParams::from(deref(params, "params")?);
        write(out, "out", closed_form(case, &params)?)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_state_bell(d: usize, out: *mut *mut SdcState) -> SdcStatus {
    guard(|| unsafe { boxed(out, SdcState(states::bell_state(d, 0, 0)?)) })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_state_werner(
    d: usize,
    eta: f64,
    out: *mut *mut SdcState,
) -> SdcStatus {
    guard(|| unsafe { boxed(out, SdcState(states::werner_state(d, eta)?)) })
}

/// Qubit Bell-diagonal state from four weights.
///
/// # Safety
/// `p4` must point to four doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_state_bell_diagonal(
    p4: *const f64,
    out: *mut *mut SdcState,
) -> SdcStatus {
    guard(|| unsafe { boxed(out, SdcState(states::bell_diagonal(quad(p4, "p4")?)?)) })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_state_ghz(parties: usize, out: *mut *mut SdcState) -> SdcStatus {
    guard(|| unsafe { boxed(out, SdcState(states::ghz_state(parties)?)) })
}

/// `k` copies of a bipartite state with all sender halves first.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_state_k_copies(
    state: *const SdcState,
    k: usize,
    out: *mut *mut SdcState,
) -> SdcStatus {
    guard(|| unsafe {
        let s = deref(state, "state")?;
        boxed(out, SdcState(states::k_copies(&s.0, k)?))
    })
}

/// Total dimension, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sdc_state_dim(state: *const SdcState) -> usize {
    unsafe { state.as_ref() }.map_or(0, |s| s.0.dim())
}

/// Von Neumann entropy in bits.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_state_entropy(state: *const SdcState, out: *mut f64) -> SdcStatus {
    guard(|| unsafe { write(out, "out", deref(state, "state")?.0.entropy()) })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sdc_state_free(state: *mut SdcState) {
    if !state.is_null() {
        // SAFETY: handle came from Box::into_raw in this crate
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Independent depolarising noise on both halves of a `d x d` system.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_channel_depolarising(
    d: usize,
    p: f64,
    out: *mut *mut SdcChannel,
) -> SdcStatus {
    guard(|| unsafe { boxed(out, SdcChannel(PauliChannel::depolarising_two_sided(d, p)?)) })
}

/// Qubit quasi-classical noise on both sides with correlation degree `mu`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_channel_quasiclassical(
    p: f64,
    mu: f64,
    out: *mut *mut SdcChannel,
) -> SdcStatus {
    guard(|| unsafe {
        boxed(
            out,
            SdcChannel(PauliChannel::quasiclassical_correlated(p, mu)?),
        )
    })
}

/// The same qubit Pauli error on all `parties` qubits.
///
/// # Safety
/// `q4` must point to four doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_channel_fully_correlated(
    q4: *const f64,
    parties: usize,
    out: *mut *mut SdcChannel,
) -> SdcStatus {
    guard(|| unsafe {
        boxed(
            out,
            SdcChannel(PauliChannel::fully_correlated(quad(q4, "q4")?, parties)?),
        )
    })
}

/// Channel output as a new state handle.
///
/// # Safety
/// `channel` and `state` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_channel_apply(
    channel: *const SdcChannel,
    state: *const SdcState,
    out: *mut *mut SdcState,
) -> SdcStatus {
    guard(|| unsafe {
        let ch = deref(channel, "channel")?;
        let s = deref(state, "state")?;
        boxed(out, SdcState(ch.0.apply(&s.0)?))
    })
}

/// Largest covariance residual under sender-side Weyl operators on `samples` random states.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_channel_covariance(
    channel: *const SdcChannel,
    senders: usize,
    samples: usize,
    seed: u64,
    out: *mut f64,
) -> SdcStatus {
    guard(|| unsafe {
        let ch = deref(channel, "channel")?;
        let r = sdc_core::channels::verify_covariance(&ch.0, ch.0.dims(), senders, samples, seed)?;
        write(out, "out", r)
    })
}

/// # Safety
/// `channel` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sdc_channel_free(channel: *mut SdcChannel) {
    if !channel.is_null() {
        // SAFETY: handle came from Box::into_raw in this crate
        drop(unsafe { Box::from_raw(channel) });
    }
}

/// Holevo quantity of the uniform Weyl ensemble on the leading `sender_dim` block.
///
/// # Safety
/// `state` and `channel` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_holevo_chi_weyl(
    state: *const SdcState,
    channel: *const SdcChannel,
    sender_dim: usize,
    out: *mut f64,
) -> SdcStatus {
    guard(|| unsafe {
        let s = deref(state, "state")?;
        let ch = deref(channel, "channel")?;
        let ens = optimal_ensemble(&s.0, &KrausChannel::identity(sender_dim))?;
        write(out, "out", holevo_chi(&ens, &s.0, &ch.0)?)
    })
}

/// Restart search for the smallest output entropy over sender encodings, unitary
/// or (when `cptp` is set) general CPTP. Writes the entropy, the implied
/// capacity, and whether the best restart converged.
///
/// # Safety
/// `state` and `channel` must be live handles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_min_output_entropy(
    state: *const SdcState,
    channel: *const SdcChannel,
    sender_dim: usize,
    cptp: bool,
    restarts: usize,
    seed: u64,
    out_entropy: *mut f64,
    out_capacity: *mut f64,
    out_converged: *mut bool,
) -> SdcStatus {
    guard(|| unsafe {
        let s = deref(state, "state")?;
        let ch = deref(channel, "channel")?;
        let opts = OptOptions {
            restarts,
            seed,
            ..OptOptions::default()
        };
        let res = if cptp {
            min_output_entropy_cptp(&s.0, &ch.0, sender_dim, &opts)?
        } else {
            min_output_entropy_unitary(&s.0, &ch.0, &Structure::Global(sender_dim), &opts)?
        };
        let cap = capacity_via_min_entropy(&s.0, &ch.0, res.best_value, sender_dim)?;
        write(out_entropy, "out_entropy", res.best_value)?;
        write(out_capacity, "out_capacity", cap)?;
        write(out_converged, "out_converged", res.converged)
    })
}

/// Noise level where a Bell pair under two-sided depolarising noise stops beating separable inputs.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_depolarising_threshold(tol: f64, out: *mut f64) -> SdcStatus {
    guard(|| unsafe { write(out, "out", depolarising_transition_threshold(tol)?) })
}

/// Correlation degree where unitary encoding catches up with reset
/// pre-processing at noise `p`. `found` is false when there is none.
///
/// # Safety
/// `out` and `found` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_crossover_mu(
    p: f64,
    tol: f64,
    out: *mut f64,
    found: *mut bool,
) -> SdcStatus {
    guard(|| unsafe {
        let mu = crossover_mu_tilde(p, tol)?;
        write(found, "found", mu.is_some())?;
        write(out, "out", mu.unwrap_or(f64::NAN))
    })
}

/// Werner parameter where `2 - S(rho_w)` meets `1 - H2(q)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdc_crossover_eta(q: f64, tol: f64, out: *mut f64) -> SdcStatus {
    guard(|| unsafe { write(out, "out", crossover_eta_tilde(q, tol)?) })
}
