//! C ABI for the `rydberg-cz` simulator.
//!
//! Objects are exposed as opaque handles created by `rcz_*_new`-style
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`RczStatus`]; the message of the last failure on the calling
//! thread is available through [`rcz_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rydberg_cz::cli::RunConfig;
use rydberg_cz::dynamics::{DecayConstants, ErrorSample, IntegratorOptions};
use rydberg_cz::metrics::{simulate_gate, FidelityConvention, FidelityMeasure, GateResult, PaperMode};
use rydberg_cz::noise::monte_carlo_fidelity;
use rydberg_cz::pulses::{mhz, Preset, PulseParams};
use rydberg_cz::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RczStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Integrator = 3,
    Io = 4,
    Internal = 5,
    Panic = 6,
}

/// Figure of merit selectable through [`rcz_gate_result_fidelity`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RczMeasure {
    /// Square root of the superposition-state overlap.
    PhaseRoot = 0,
    /// Superposition-state overlap.
    PhaseSquared = 1,
    /// Mean of the square roots of the four return fidelities.
    TruthTableSqrtTrace = 2,
    /// Mean of the four return fidelities.
    TruthTableAverage = 3,
}

impl RczMeasure {
    fn measure(self) -> FidelityMeasure {
        match self {
            RczMeasure::PhaseRoot => FidelityMeasure::Phase(FidelityConvention::Root),
            RczMeasure::PhaseSquared => FidelityMeasure::Phase(FidelityConvention::Squared),
            RczMeasure::TruthTableSqrtTrace => FidelityMeasure::TruthTable(PaperMode::SqrtTrace),
            RczMeasure::TruthTableAverage => FidelityMeasure::TruthTable(PaperMode::Average),
        }
    }
}

/// Opaque pulse parameters.
pub struct RczPulse(PulseParams);

/// Opaque simulation result.
pub struct RczGateResult(GateResult);

/// Opaque run configuration.
pub struct RczConfig(RunConfig);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RczStatus {
    match e {
        Error::Io(_) => RczStatus::Io,
        Error::Config(_) | Error::InvalidParameter(_) => RczStatus::InvalidArgument,
        e if e.is_integrator_failure() => RczStatus::Integrator,
        _ => RczStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), (RczStatus, String)>>(f: F) -> RczStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RczStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("panic inside rydberg-cz");
            RczStatus::Panic
        }
    }
}

fn lib<T>(r: rydberg_cz::Result<T>) -> Result<T, (RczStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (RczStatus, String) {
    (RczStatus::NullPointer, "null pointer argument".into())
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (RczStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| (RczStatus::InvalidArgument, "string is not UTF-8".into()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rcz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of the calling thread into `buf` (truncated
/// and always NUL-terminated when `len > 0`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rcz_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates a pulse from a preset name (`to`, `to_printed`, `der`,
/// `der_i_gauss`, `der_i_uniform`).
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rcz_pulse_preset(name: *const c_char, out: *mut *mut RczPulse) -> RczStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let name = read_str(name)?;
        let p = Preset::parse(name).ok_or_else(|| (RczStatus::InvalidArgument, format!("unknown preset '{name}'")))?;
        *out = Box::into_raw(Box::new(RczPulse(p.params())));
        Ok(())
    })
}

/// Creates a pulse from its timing (μs) with the default amplitudes,
/// intermediate detuning and blockade.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rcz_pulse_custom(t1: f64, t2: f64, width: f64, out: *mut *mut RczPulse) -> RczStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let p = PulseParams::with_timing(t1, t2, width);
        lib(p.validate())?;
        *out = Box::into_raw(Box::new(RczPulse(p)));
        Ok(())
    })
}

/// Writes `(t1, t2, width)` in μs to `out[0..3]`.
///
/// # Safety
/// `pulse` must come from this library; `out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn rcz_pulse_timing(pulse: *const RczPulse, out: *mut f64) -> RczStatus {
    guard(|| {
        if pulse.is_null() || out.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping((*pulse).0.timing().as_ptr(), out, 3);
        Ok(())
    })
}

/// Gate duration in μs, or NaN for a null handle.
///
/// # Safety
/// `pulse` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn rcz_pulse_gate_time(pulse: *const RczPulse) -> f64 {
    if pulse.is_null() {
        return f64::NAN;
    }
    (*pulse).0.gate_time()
}

/// # Safety
/// `pulse` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rcz_pulse_free(pulse: *mut RczPulse) {
    if !pulse.is_null() {
        drop(Box::from_raw(pulse));
    }
}

/// Simulates the gate under a static two-photon detuning error.
///
/// # Safety
/// `pulse` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rcz_simulate(
    pulse: *const RczPulse,
    eps_delta_mhz: f64,
    with_decay: bool,
    out: *mut *mut RczGateResult,
) -> RczStatus {
    guard(|| {
        if pulse.is_null() || out.is_null() {
            return Err(null());
        }
        let decay = if with_decay { DecayConstants::rubidium() } else { DecayConstants::none() };
        let e = ErrorSample::with_eps_delta(mhz(eps_delta_mhz));
        let r = lib(simulate_gate(&(*pulse).0, &e, &decay, &IntegratorOptions::default(), PaperMode::SqrtTrace))?;
        *out = Box::into_raw(Box::new(RczGateResult(r)));
        Ok(())
    })
}

/// Writes the return fidelities of `|00>, |01>, |10>, |11>` to `out[0..4]`.
///
/// # Safety
/// `res` must come from this library; `out` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn rcz_gate_result_truth_table(res: *const RczGateResult, out: *mut f64) -> RczStatus {
    guard(|| {
        if res.is_null() || out.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping((*res).0.truth_table.as_ptr(), out, 4);
        Ok(())
    })
}

/// Writes the phases `φ01, φ10, φ11` in radians to `out[0..3]`.
///
/// # Safety
/// `res` must come from this library; `out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn rcz_gate_result_phases(res: *const RczGateResult, out: *mut f64) -> RczStatus {
    guard(|| {
        if res.is_null() || out.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping((*res).0.phases.as_ptr(), out, 3);
        Ok(())
    })
}

/// # Safety
/// `res` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rcz_gate_result_fidelity(
    res: *const RczGateResult,
    measure: RczMeasure,
    out: *mut f64,
) -> RczStatus {
    guard(|| {
        if res.is_null() || out.is_null() {
            return Err(null());
        }
        *out = (*res).0.measure(measure.measure());
        Ok(())
    })
}

/// # Safety
/// `res` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rcz_gate_result_free(res: *mut RczGateResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Parses a TOML run configuration (the format accepted by the command-line tool).
///
/// # Safety
/// `toml` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rcz_config_parse(toml: *const c_char, out: *mut *mut RczConfig) -> RczStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let cfg = lib(RunConfig::parse(read_str(toml)?))?;
        *out = Box::into_raw(Box::new(RczConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rcz_config_free(cfg: *mut RczConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Monte-Carlo average of the configured fidelity measure over the
/// configured noise model, pulse and decay setting.
///
/// # Safety
/// `cfg` must come from this library; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rcz_monte_carlo(
    cfg: *const RczConfig,
    mean: *mut f64,
    stderr: *mut f64,
    n_failed: *mut usize,
) -> RczStatus {
    guard(|| {
        if cfg.is_null() || mean.is_null() || stderr.is_null() || n_failed.is_null() {
            return Err(null());
        }
        let c = &(*cfg).0;
        let p = lib(c.pulse_params())?;
        let mc = lib(c.monte_carlo())?;
        let r = lib(monte_carlo_fidelity(&p, &c.noise.model(), &c.decay(), &c.integrator, &mc))?;
        *mean = r.mean;
        *stderr = r.stderr;
        *n_failed = r.n_failed;
        Ok(())
    })
}
