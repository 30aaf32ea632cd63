//! C ABI for `fujita-lab`.
//!
//! Every fallible function returns an [`FlStatus`]. On failure the message is
//! kept in thread-local storage and read with [`fl_last_error_message`].
//! Objects are opaque handles released by their `_free` function; strings
//! returned through `char **` are released with [`fl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fujita_lab::exponents::{self, Regime};
use fujita_lab::lab::{parse_json, to_json};
use fujita_lab::oracles::mittag_leffler::{mittag_leffler, MLParams};
use fujita_lab::solver::{self, TrajectoryRecord, Verdict};
use fujita_lab::{Error, GridGeometry, ProblemSpec, SolverConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Invalid = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlRegime {
    Blowup = 0,
    GlobalSmallData = 1,
    Gap = 2,
    Inadmissible = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlVerdict {
    Completed = 0,
    BlowupDetected = 1,
    StepUnderflow = 2,
}

/// Closed-form exponents at one parameter point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlExponents {
    pub delta: f64,
    pub threshold: f64,
    pub p_c: f64,
    pub ell: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub window_nonempty: bool,
    pub blowup_holds: bool,
    pub certificate_exponent: f64,
}

/// A validated problem.
pub struct FlProblem {
    spec: ProblemSpec,
}

/// A finished simulation.
pub struct FlTrajectory {
    record: TrajectoryRecord,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FlStatus {
    match e {
        Error::Domain(_) => FlStatus::Domain,
        Error::Invalid(_) | Error::Resource(_) | Error::GeometryMismatch { .. } => FlStatus::Invalid,
        Error::NonFinite(_) | Error::NonContraction { .. } | Error::IterationCap(_) => FlStatus::Numerical,
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => FlStatus::Parse,
        Error::Io(_) => FlStatus::Io,
    }
}

struct Fail(FlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, records any error or panic, and maps the outcome to a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FlStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FlStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(FlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(FlStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(FlStatus::Invalid, "string contains NUL".into()))?;
    write_out(out, c.into_raw(), "out")
}

/// Message of the last failure on this thread, or null. Valid until the next
/// call into this library on the same thread.
#[no_mangle]
pub extern "C" fn fl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and checks a problem from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fl_problem_from_json(json: *const c_char, out: *mut *mut FlProblem) -> FlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(json, "json")?;
        let spec: ProblemSpec = parse_json(text, "problem")?;
        spec.check()?;
        write_out(out, Box::into_raw(Box::new(FlProblem { spec })), "out")
    })
}

/// # Safety
/// `problem` must come from [`fl_problem_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fl_problem_free(problem: *mut FlProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

unsafe fn problem_ref<'a>(problem: *const FlProblem) -> Result<&'a ProblemSpec, Fail> {
    problem.as_ref().map(|p| &p.spec).ok_or_else(|| null("problem"))
}

/// Full exponent report as JSON.
///
/// # Safety
/// `problem` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fl_problem_exponents_json(problem: *const FlProblem, out: *mut *mut c_char) -> FlStatus {
    guard(|| {
        let spec = problem_ref(problem)?;
        write_string(out, to_json(&exponents::exponent_report(spec))?)
    })
}

/// # Safety
/// `problem` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fl_problem_classify(problem: *const FlProblem, out: *mut FlRegime) -> FlStatus {
    guard(|| {
        let r = match exponents::classify(problem_ref(problem)?) {
            Regime::Blowup => FlRegime::Blowup,
            Regime::GlobalSmallData => FlRegime::GlobalSmallData,
            Regime::Gap => FlRegime::Gap,
            Regime::Inadmissible => FlRegime::Inadmissible,
        };
        write_out(out, r, "out")
    })
}

/// Scalar exponents at `(N, p, q, α, ϱ)`. Fails with a domain error where
/// a denominator is not positive.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fl_exponents(
    dim: usize,
    p: f64,
    q: f64,
    alpha: f64,
    rho: f64,
    out: *mut FlExponents,
) -> FlStatus {
    guard(|| {
        let delta = exponents::delta(alpha, q)?;
        let g = exponents::gep_exponents(dim, p, q, alpha, rho)?;
        let w = exponents::r_window(dim, p, q, alpha, rho, g.p_c)?;
        let c = exponents::blowup_criterion(dim, p, q, alpha, rho)?;
        let value = FlExponents {
            delta,
            threshold: g.threshold,
            p_c: g.p_c,
            ell: g.ell,
            window_lo: w.lo,
            window_hi: w.hi,
            window_nonempty: w.nonempty,
            blowup_holds: c.holds,
            certificate_exponent: exponents::certificate_exponent(dim, p, q, alpha, rho)?,
        };
        write_out(out, value, "out")
    })
}

/// Runs the time stepper. `config_json` is a solver configuration;
/// `geometry_json` may be null for the default grid of the problem dimension.
///
/// # Safety
/// `problem` must be a live handle; string arguments NUL-terminated or null
/// where allowed; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_simulate(
    problem: *const FlProblem,
    config_json: *const c_char,
    geometry_json: *const c_char,
    out: *mut *mut FlTrajectory,
) -> FlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = problem_ref(problem)?;
        let config: SolverConfig = parse_json(read_str(config_json, "config_json")?, "config")?;
        let geometry = if geometry_json.is_null() {
            GridGeometry::default_for(spec.dim)?
        } else {
            parse_json(read_str(geometry_json, "geometry_json")?, "geometry")?
        };
        let record = solver::run(spec, &config, geometry)?;
        write_out(out, Box::into_raw(Box::new(FlTrajectory { record })), "out")
    })
}

/// # Safety
/// `traj` must come from [`fl_simulate`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_free(traj: *mut FlTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

unsafe fn traj_ref<'a>(traj: *const FlTrajectory) -> Result<&'a TrajectoryRecord, Fail> {
    traj.as_ref().map(|t| &t.record).ok_or_else(|| null("trajectory"))
}

/// Number of samples.
///
/// # Safety
/// `traj` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_len(traj: *const FlTrajectory, out: *mut usize) -> FlStatus {
    guard(|| write_out(out, traj_ref(traj)?.times.len(), "out"))
}

/// Borrowed pointers to the sample columns, each of length
/// [`fl_trajectory_len`]. Any output pointer may be null. The arrays live as
/// long as the handle.
///
/// # Safety
/// `traj` must be a live handle; non-null outputs writable.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_columns(
    traj: *const FlTrajectory,
    times: *mut *const f64,
    q_norms: *mut *const f64,
    sup_norms: *mut *const f64,
) -> FlStatus {
    guard(|| {
        let r = traj_ref(traj)?;
        for (out, col) in [(times, &r.times), (q_norms, &r.q_norms), (sup_norms, &r.sup_norms)] {
            if !out.is_null() {
                out.write(col.as_ptr());
            }
        }
        Ok(())
    })
}

/// Verdict and blow-up time estimate; the estimate is NaN when absent.
///
/// # Safety
/// `traj` must be a live handle; `verdict` writable; `blowup_time` writable or null.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_verdict(
    traj: *const FlTrajectory,
    verdict: *mut FlVerdict,
    blowup_time: *mut f64,
) -> FlStatus {
    guard(|| {
        let r = traj_ref(traj)?;
        let v = match r.verdict {
            Verdict::Completed => FlVerdict::Completed,
            Verdict::BlowupDetected => FlVerdict::BlowupDetected,
            Verdict::StepUnderflow => FlVerdict::StepUnderflow,
        };
        write_out(verdict, v, "verdict")?;
        if !blowup_time.is_null() {
            blowup_time.write(r.blowup_time_estimate.unwrap_or(f64::NAN));
        }
        Ok(())
    })
}

/// The whole record as JSON.
///
/// # Safety
/// `traj` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_to_json(traj: *const FlTrajectory, out: *mut *mut c_char) -> FlStatus {
    guard(|| write_string(out, to_json(traj_ref(traj)?)?))
}

/// `E_a(z)` for `a ∈ (0, 1]`, `z ≥ 0`, with a bound on the omitted tail.
///
/// # Safety
/// `value` writable; `remainder_bound` writable or null.
#[no_mangle]
pub unsafe extern "C" fn fl_mittag_leffler(
    order: f64,
    argument: f64,
    value: *mut f64,
    remainder_bound: *mut f64,
) -> FlStatus {
    guard(|| {
        let v = mittag_leffler(MLParams::new(order, argument))?;
        write_out(value, v.value, "value")?;
        if !remainder_bound.is_null() {
            remainder_bound.write(v.remainder_bound);
        }
        Ok(())
    })
}
