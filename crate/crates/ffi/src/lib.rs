//! C ABI over `qsig-core`.
//!
//! Every fallible function returns a [`QsigStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be read with [`qsig_last_error_message`]. Objects are opaque handles that
//! must be released with their `_free` function. Panics never cross the
//! boundary; they are reported as [`QsigStatus::Internal`].
//!
//! Safety contract for every function: pointer arguments are either null or
//! valid for the access their name implies (`out_*` for one write, arrays for
//! the stated length), and handles are live and not shared across threads
//! while a call is in progress. Null pointers are reported, never
//! dereferenced.

// The contract above applies uniformly; per-function copies would add nothing.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qsig_core::analysis::{self, OutcomeDistribution, SettingsOptions};
use qsig_core::conjecture::{self, Monotonicity};
use qsig_core::fingerprint::{self, BitString};
use qsig_core::gc::{self, GcParams};
use qsig_core::protocol::{self, Engine, Scenario, SchemeParams, TrialReport};
use qsig_core::{adversary, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsigStatus {
    Ok = 0,
    Dimension = 1,
    Parameter = 2,
    Insecure = 3,
    Domain = 4,
    Resource = 5,
    Degenerate = 6,
    Usage = 7,
    Sweep = 8,
    NullPointer = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsigScenario {
    Genuine = 0,
    Forgery = 1,
    TunedRepudiation = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsigEngine {
    Aggregate = 0,
    Full = 1,
}

/// Derived scheme parameters.
pub struct QsigParams(SchemeParams);

/// Result of a Monte Carlo campaign.
pub struct QsigTrialReport(TrialReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QsigFigures {
    pub g: f64,
    pub j: f64,
    pub gap: f64,
    pub p1: f64,
    pub qubits_per_bit: f64,
    pub qubits_per_bit_asymptotic: f64,
    pub repudiation_bound: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QsigRepudiation {
    pub exact: f64,
    pub bound_pow: f64,
    pub bound_lin: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QsigTrialSummary {
    pub trials: u64,
    pub mismatched: u64,
    pub q_reject: f64,
    pub q_reject_se: f64,
    pub q_zero: f64,
    pub q_zero_se: f64,
    pub q_one: f64,
    pub q_one_se: f64,
    pub rej: u64,
    pub acc0: u64,
    pub acc1: u64,
    pub repudiation: f64,
    pub repudiation_se: f64,
    pub mean_tally: f64,
    pub mean_tally_se: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QsigGcReport {
    pub delta: f64,
    pub embedded_len: f64,
    pub p_forge1: f64,
    pub j_gc: f64,
    pub d_min_solved: u64,
    pub d_min_approx: u64,
    pub n_min: f64,
    pub qubits_per_bit: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QsigConjectureResult {
    pub holds: bool,
    pub largest_checked: u64,
    /// Counterexample `(x, r)`; zero when the conjecture holds.
    pub x: u64,
    pub r: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QsigStatus {
    match e {
        Error::Dimension(_) => QsigStatus::Dimension,
        Error::Parameter(_) => QsigStatus::Parameter,
        Error::InsecureParameters(_) => QsigStatus::Insecure,
        Error::Domain(_) => QsigStatus::Domain,
        Error::Resource(_) => QsigStatus::Resource,
        Error::Degenerate(_) => QsigStatus::Degenerate,
        Error::Usage(_) => QsigStatus::Usage,
        Error::Sweep(_) => QsigStatus::Sweep,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), QsigError>>(f: F) -> QsigStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QsigStatus::Ok,
        Ok(Err(QsigError::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(QsigError::Null(name))) => {
            set_last_error(format!("null pointer passed as {name}"));
            QsigStatus::NullPointer
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal panic".into());
            set_last_error(msg);
            QsigStatus::Internal
        }
    }
}

enum QsigError {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for QsigError {
    fn from(e: Error) -> Self {
        QsigError::Lib(e)
    }
}

fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, QsigError> {
    // SAFETY: the caller guarantees that non-null out-pointers are valid for writes.
    unsafe { p.as_mut() }.ok_or(QsigError::Null(name))
}

fn input<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, QsigError> {
    // SAFETY: the caller guarantees that non-null handles are live.
    unsafe { p.as_ref() }.ok_or(QsigError::Null(name))
}

fn bits(p: *const u8, len: usize, name: &'static str) -> Result<BitString, QsigError> {
    if p.is_null() {
        return Err(QsigError::Null(name));
    }
    // SAFETY: the caller guarantees `len` readable bytes at `p`.
    let slice: &[u8] = unsafe { std::slice::from_raw_parts(p, len) };
    Ok(BitString::from_bits(slice.iter().map(|&b| b != 0)))
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `cap`) and returns the full message length
/// excluding the terminator. Returns 0 when there is no error.
#[no_mangle]
pub unsafe extern "C" fn qsig_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            // SAFETY: the caller guarantees `cap` writable bytes at `buf`.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Derives secure parameters; on success `*out` owns a new handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_new(
    alpha: f64,
    d: u64,
    verifiers: u32,
    nu: f64,
    eps_c: f64,
    eps_f: f64,
    include_correction: bool,
    out_params: *mut *mut QsigParams,
) -> QsigStatus {
    guard(|| {
        let slot = out(out_params, "out_params")?;
        *slot = ptr::null_mut();
        let p = analysis::set_parameters_with(
            alpha,
            d,
            verifiers,
            nu,
            eps_c,
            eps_f,
            SettingsOptions {
                include_correction,
                code_seed: 0,
            },
        )?;
        *slot = Box::into_raw(Box::new(QsigParams(p)));
        Ok(())
    })
}

/// Parameters with a user-chosen synthetic code and thresholds, for simulation.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_custom(
    alpha: f64,
    d: u64,
    verifiers: u32,
    codeword_len: u64,
    theta: f64,
    z_acc: u64,
    z_rej: u64,
    out_params: *mut *mut QsigParams,
) -> QsigStatus {
    guard(|| {
        let slot = out(out_params, "out_params")?;
        *slot = ptr::null_mut();
        let s = adversary::alphabet_size(alpha)?;
        let code =
            qsig_core::coding::CodeSpec::synthetic(s as u32, codeword_len as usize, theta, 0)?;
        let p = SchemeParams::custom(d, alpha, verifiers, code, z_acc, z_rej)?;
        *slot = Box::into_raw(Box::new(QsigParams(p)));
        Ok(())
    })
}

/// Releases a handle from `qsig_params_new`; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_free(params: *mut QsigParams) {
    if !params.is_null() {
        // SAFETY: the handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(params) });
    }
}

fn with_params<T: Default>(params: *const QsigParams, f: impl FnOnce(&SchemeParams) -> T) -> T {
    // SAFETY: the caller guarantees the handle is live.
    unsafe { params.as_ref() }.map_or_else(T::default, |p| f(&p.0))
}

/// Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_codeword_len(params: *const QsigParams) -> u64 {
    with_params(params, |p| p.codeword_len())
}

/// Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_message_len(params: *const QsigParams) -> u64 {
    with_params(params, |p| p.code.message_len as u64)
}

/// Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_alphabet_size(params: *const QsigParams) -> u64 {
    with_params(params, |p| p.alphabet_size)
}

/// Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_revealed(params: *const QsigParams) -> u64 {
    with_params(params, |p| p.revealed)
}

/// Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_z_acc(params: *const QsigParams) -> u64 {
    with_params(params, |p| p.z_acc)
}

/// Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_z_rej(params: *const QsigParams) -> u64 {
    with_params(params, |p| p.z_rej)
}

/// Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_theta(params: *const QsigParams) -> f64 {
    with_params(params, |p| p.theta)
}

/// Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_p1(params: *const QsigParams) -> f64 {
    with_params(params, |p| p.p1)
}

/// Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_gap(params: *const QsigParams) -> f64 {
    with_params(params, |p| p.gap)
}

/// Returns 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_phi(params: *const QsigParams) -> f64 {
    with_params(params, |p| p.phi)
}

#[no_mangle]
pub unsafe extern "C" fn qsig_params_figures(
    params: *const QsigParams,
    out_figures: *mut QsigFigures,
) -> QsigStatus {
    guard(|| {
        let p = &input(params, "params")?.0;
        let f = analysis::figures_of_merit(p)?;
        *out(out_figures, "out_figures")? = QsigFigures {
            g: f.g,
            j: f.j,
            gap: f.gap,
            p1: f.p1,
            qubits_per_bit: f.qubits_per_bit,
            qubits_per_bit_asymptotic: f.qubits_per_bit_asymptotic,
            repudiation_bound: f.repudiation_bound,
        };
        Ok(())
    })
}

/// Lower bound on the probability that a forgery is rejected.
#[no_mangle]
pub unsafe extern "C" fn qsig_params_forgery_reject_bound(
    params: *const QsigParams,
    out_value: *mut f64,
) -> QsigStatus {
    guard(|| {
        let p = &input(params, "params")?.0;
        *out(out_value, "out_value")? = analysis::forgery_reject_probability(p)?;
        Ok(())
    })
}

/// Runs `trials` trials. `forged_positions < 0` selects `round(2 theta N)`.
#[no_mangle]
pub unsafe extern "C" fn qsig_simulate(
    params: *const QsigParams,
    scenario: QsigScenario,
    forged_positions: i64,
    trials: u64,
    engine: QsigEngine,
    seed: u64,
    out_report: *mut *mut QsigTrialReport,
) -> QsigStatus {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        *slot = ptr::null_mut();
        let p = &input(params, "params")?.0;
        let scenario = match scenario {
            QsigScenario::Genuine => Scenario::Genuine,
            QsigScenario::Forgery => Scenario::Forgery {
                mismatched: (forged_positions >= 0).then_some(forged_positions as u64),
            },
            QsigScenario::TunedRepudiation => Scenario::TunedRepudiation,
        };
        let engine = match engine {
            QsigEngine::Aggregate => Engine::Aggregate,
            QsigEngine::Full => Engine::Full,
        };
        let report = protocol::run_trials(scenario, p, trials, engine, seed)?;
        *slot = Box::into_raw(Box::new(QsigTrialReport(report)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qsig_report_free(report: *mut QsigTrialReport) {
    if !report.is_null() {
        // SAFETY: the handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(report) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn qsig_report_summary(
    report: *const QsigTrialReport,
    out_summary: *mut QsigTrialSummary,
) -> QsigStatus {
    guard(|| {
        let r = &input(report, "report")?.0;
        *out(out_summary, "out_summary")? = QsigTrialSummary {
            trials: r.trials,
            mismatched: r.mismatched,
            q_reject: r.q_reject.value,
            q_reject_se: r.q_reject.std_error,
            q_zero: r.q_zero.value,
            q_zero_se: r.q_zero.std_error,
            q_one: r.q_one.value,
            q_one_se: r.q_one.std_error,
            rej: r.verdicts.rej,
            acc0: r.verdicts.acc0,
            acc1: r.verdicts.acc1,
            repudiation: r.repudiation.value,
            repudiation_se: r.repudiation.std_error,
            mean_tally: r.mean_tally.value,
            mean_tally_se: r.mean_tally.std_error,
        };
        Ok(())
    })
}

/// Number of distinct tally values in the histogram; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn qsig_report_histogram_len(report: *const QsigTrialReport) -> usize {
    // SAFETY: the caller guarantees the handle is live.
    unsafe { report.as_ref() }.map_or(0, |r| r.0.histogram.len())
}

/// Writes up to `cap` `(tally, count)` pairs in increasing tally order and
/// stores the number written in `*out_written`.
#[no_mangle]
pub unsafe extern "C" fn qsig_report_histogram(
    report: *const QsigTrialReport,
    tallies: *mut u64,
    counts: *mut u64,
    cap: usize,
    out_written: *mut usize,
) -> QsigStatus {
    guard(|| {
        let r = &input(report, "report")?.0;
        if tallies.is_null() || counts.is_null() {
            return Err(QsigError::Null("tallies/counts"));
        }
        let mut n = 0;
        for (i, (&z, &c)) in r.histogram.iter().take(cap).enumerate() {
            // SAFETY: the caller guarantees `cap` writable slots in each array.
            unsafe {
                *tallies.add(i) = z;
                *counts.add(i) = c;
            }
            n += 1;
        }
        *out(out_written, "out_written")? = n;
        Ok(())
    })
}

/// `1 - 2|x xor y|/d` for two strings of `d` bits given one byte per bit.
#[no_mangle]
pub unsafe extern "C" fn qsig_inner_product(
    x: *const u8,
    y: *const u8,
    d: usize,
    out_value: *mut f64,
) -> QsigStatus {
    guard(|| {
        let (x, y) = (bits(x, d, "x")?, bits(y, d, "y")?);
        *out(out_value, "out_value")? = fingerprint::inner_product(&x, &y)?;
        Ok(())
    })
}

/// Single-position acceptance probability `(l - 2w)^2 / (l d)`.
#[no_mangle]
pub unsafe extern "C" fn qsig_accept_probability(
    revealed: usize,
    d: usize,
    w: usize,
    out_value: *mut f64,
) -> QsigStatus {
    guard(|| {
        let r = fingerprint::accept_probability_from_distance(revealed, d, w)?;
        *out(out_value, "out_value")? = *r.numer() as f64 / *r.denom() as f64;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qsig_p1_bound(
    alpha: f64,
    d: u64,
    verifiers: u32,
    out_p1: *mut f64,
    out_gap: *mut f64,
) -> QsigStatus {
    guard(|| {
        let b = adversary::p1_bound(alpha, d, verifiers)?;
        *out(out_p1, "out_p1")? = b.p1;
        *out(out_gap, "out_gap")? = b.gap;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qsig_binary_entropy(p: f64, out_value: *mut f64) -> QsigStatus {
    guard(|| {
        *out(out_value, "out_value")? = analysis::binary_entropy(p)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qsig_entropy_inverse(y: f64, out_value: *mut f64) -> QsigStatus {
    guard(|| {
        *out(out_value, "out_value")? = analysis::entropy_inverse(y)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qsig_repudiation_probability(
    q_reject: f64,
    q_zero: f64,
    q_one: f64,
    verifiers: u32,
    out_value: *mut QsigRepudiation,
) -> QsigStatus {
    guard(|| {
        let dist = OutcomeDistribution::new(q_reject, q_zero, q_one)?;
        let r = analysis::repudiation_probability(&dist, verifiers)?;
        *out(out_value, "out_value")? = QsigRepudiation {
            exact: r.exact,
            bound_pow: r.bound_pow,
            bound_lin: r.bound_lin,
        };
        Ok(())
    })
}

/// `Pr[Binomial(n, g) <= z_acc]`.
#[no_mangle]
pub unsafe extern "C" fn qsig_genuine_accept_probability(
    n: u64,
    g: f64,
    z_acc: u64,
    out_value: *mut f64,
) -> QsigStatus {
    guard(|| {
        *out(out_value, "out_value")? = analysis::genuine_accept_probability(n, g, z_acc)?;
        Ok(())
    })
}

/// Exact monotonicity check for every `x <= x_max`.
#[no_mangle]
pub unsafe extern "C" fn qsig_check_conjecture(
    x_max: u64,
    out_result: *mut QsigConjectureResult,
) -> QsigStatus {
    guard(|| {
        let slot = out(out_result, "out_result")?;
        let report = conjecture::check_range(x_max);
        *slot = match report.outcome {
            Monotonicity::Holds => QsigConjectureResult {
                holds: true,
                largest_checked: report.largest_checked,
                x: 0,
                r: 0,
            },
            Monotonicity::Counterexample { x, r, .. } => QsigConjectureResult {
                holds: false,
                largest_checked: report.largest_checked,
                x,
                r,
            },
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qsig_gc_report(
    d: u64,
    gamma: f64,
    beta: f64,
    verifiers: u32,
    reuse: bool,
    qr_target: f64,
    out_report: *mut QsigGcReport,
) -> QsigStatus {
    guard(|| {
        let r = gc::gc_report(GcParams {
            d,
            gamma,
            beta,
            verifiers,
            reuse,
            qr_target,
        })?;
        *out(out_report, "out_report")? = QsigGcReport {
            delta: r.delta,
            embedded_len: r.embedded_len,
            p_forge1: r.p_forge1,
            j_gc: r.j_gc,
            d_min_solved: r.d_min.solved,
            d_min_approx: r.d_min.approx,
            n_min: r.n_min,
            qubits_per_bit: r.qubits_per_bit,
        };
        Ok(())
    })
}
