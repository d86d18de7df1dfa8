//! C ABI for `gptlab`.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every fallible call returns a [`GptStatus`]; on failure a message is
//! available from [`gpt_last_error_message`] on the same thread. Output
//! pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use gptlab::jointopt::{exact_joint_feasible, noise_sum, optimize_noise, Feasibility, JointMeasurement};
use gptlab::theory::DEFAULT_TOL;
use gptlab::{
    gamma, ideal_measurement, pur_bound, GptError, IdealMeasurement, LogBase, Measurement, Order, OptimizerConfig,
    Site, Theory, VecV,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IndexOutOfRange = 3,
    TheoryMismatch = 4,
    /// An object failed validation (see the error message for the violations).
    InvalidObject = 5,
    Unsupported = 6,
    NoFeasibleCandidate = 7,
    Parse = 8,
    Io = 9,
    /// A Rust panic was caught at the boundary.
    Internal = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GptLogBase {
    Bits = 0,
    Nats = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GptVerdict {
    Feasible = 0,
    Infeasible = 1,
    Undetermined = 2,
}

/// A polygon, disc or finite theory.
pub struct GptTheory {
    inner: Arc<Theory>,
}

/// A binary ideal measurement.
pub struct GptMeasurement {
    inner: IdealMeasurement,
}

/// A 2 x 2 joint measurement.
pub struct GptJoint {
    inner: JointMeasurement,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &GptError) -> GptStatus {
    match e {
        GptError::DimensionMismatch { .. } | GptError::NonFinite | GptError::InvalidOrder(_) => {
            GptStatus::InvalidArgument
        }
        GptError::ProbabilityOutOfRange(_) | GptError::GammaOutOfRange(_) | GptError::NotTotal(_) => {
            GptStatus::InvalidArgument
        }
        GptError::InvalidGroupElement(_) => GptStatus::InvalidArgument,
        GptError::IndexOutOfRange(_) => GptStatus::IndexOutOfRange,
        GptError::TheoryMismatch(_) => GptStatus::TheoryMismatch,
        GptError::Unsupported(_) => GptStatus::Unsupported,
        GptError::Invalid { .. } => GptStatus::InvalidObject,
        GptError::NoFeasibleCandidate => GptStatus::NoFeasibleCandidate,
        GptError::Parse(_) | GptError::Json(_) => GptStatus::Parse,
        GptError::Io(_) => GptStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), GptStatus>) -> GptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GptStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            GptStatus::Internal
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, GptStatus>;
}

impl<T> OrStatus<T> for gptlab::Result<T> {
    fn or_status(self) -> Result<T, GptStatus> {
        self.map_err(|e| {
            let mut msg = e.to_string();
            if !e.violations().is_empty() {
                if let Ok(j) = serde_json::to_string(e.violations()) {
                    msg = format!("{msg}: {j}");
                }
            }
            set_error(msg);
            status_of(&e)
        })
    }
}

fn null_arg(name: &str) -> GptStatus {
    set_error(format!("{name} is null"));
    GptStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, GptStatus> {
    // SAFETY: caller passes either null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| null_arg(name))
}

unsafe fn write<T>(p: *mut T, v: T, name: &str) -> Result<(), GptStatus> {
    if p.is_null() {
        return Err(null_arg(name));
    }
    // SAFETY: non-null and, per the caller contract, valid for writes.
    unsafe { p.write(v) };
    Ok(())
}

unsafe fn string<'a>(p: *const c_char, name: &str) -> Result<&'a str, GptStatus> {
    if p.is_null() {
        return Err(null_arg(name));
    }
    // SAFETY: non-null NUL-terminated string per the caller contract.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        set_error(format!("{name} is not UTF-8"));
        GptStatus::Parse
    })
}

fn base_of(b: GptLogBase) -> LogBase {
    match b {
        GptLogBase::Bits => LogBase::Bits,
        GptLogBase::Nats => LogBase::Nats,
    }
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gpt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gpt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates the `n`-gon theory, or the disc when `n == 0`. A nonpositive
/// `tol` selects the default tolerance.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_theory_new(n: u32, tol: f64, out: *mut *mut GptTheory) -> GptStatus {
    guard(|| {
        let order = if n == 0 { Order::Disc } else { Order::Polygon(n as usize) };
        let tol = if tol > 0.0 { tol } else { DEFAULT_TOL };
        let inner = Theory::for_order_with_tol(order, tol).or_status()?;
        unsafe { write(out, boxed(GptTheory { inner }), "out") }
    })
}

/// Loads a finite theory from its JSON descriptor.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_theory_from_json(json: *const c_char, out: *mut *mut GptTheory) -> GptStatus {
    guard(|| {
        let text = unsafe { string(json, "json") }?;
        let inner = Theory::from_json(text).or_status()?;
        unsafe { write(out, boxed(GptTheory { inner }), "out") }
    })
}

/// # Safety
/// `t` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gpt_theory_free(t: *mut GptTheory) {
    if !t.is_null() {
        // SAFETY: allocated by `boxed` and not yet freed.
        drop(unsafe { Box::from_raw(t) });
    }
}

/// Number of stored pure states (0 for the disc).
///
/// # Safety
/// `t` must be a live theory handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_theory_pure_state_count(t: *const GptTheory, out: *mut usize) -> GptStatus {
    guard(|| {
        let t = unsafe { deref(t, "theory") }?;
        let n = match t.inner.order() {
            Some(Order::Disc) => 0,
            _ => t.inner.pure_states().len(),
        };
        unsafe { write(out, n, "out") }
    })
}

/// # Safety
/// `t` must be a live theory handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_theory_is_self_dual(t: *const GptTheory, out: *mut bool) -> GptStatus {
    guard(|| {
        let t = unsafe { deref(t, "theory") }?;
        unsafe { write(out, t.inner.check_self_duality().is_self_dual(), "out") }
    })
}

/// # Safety
/// `t` must be a live theory handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_theory_is_transitive(t: *const GptTheory, out: *mut bool) -> GptStatus {
    guard(|| {
        let t = unsafe { deref(t, "theory") }?;
        unsafe { write(out, t.inner.is_transitive(), "out") }
    })
}

/// Ideal measurement `{e(i), u - e(i)}` of a polygon theory.
///
/// # Safety
/// `t` must be a live theory handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_measurement_vertex(
    t: *const GptTheory,
    index: usize,
    out: *mut *mut GptMeasurement,
) -> GptStatus {
    guard(|| {
        let t = unsafe { deref(t, "theory") }?;
        let inner = IdealMeasurement::new(&t.inner, Site::Index(index)).or_status()?;
        unsafe { write(out, boxed(GptMeasurement { inner }), "out") }
    })
}

/// Ideal measurement of the disc at `angle` radians in `[0, 2π)`.
///
/// # Safety
/// `t` must be a live theory handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_measurement_angle(
    t: *const GptTheory,
    angle: f64,
    out: *mut *mut GptMeasurement,
) -> GptStatus {
    guard(|| {
        let t = unsafe { deref(t, "theory") }?;
        let inner = IdealMeasurement::new(&t.inner, Site::Angle(angle)).or_status()?;
        unsafe { write(out, boxed(GptMeasurement { inner }), "out") }
    })
}

/// Ideal measurement from an address such as `"12:3"` or `"inf:1.5"`, in
/// a theory of its own with the default tolerance.
///
/// # Safety
/// `addr` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_measurement_parse(addr: *const c_char, out: *mut *mut GptMeasurement) -> GptStatus {
    guard(|| {
        let s = unsafe { string(addr, "addr") }?;
        let inner = s.parse().and_then(ideal_measurement).or_status()?;
        unsafe { write(out, boxed(GptMeasurement { inner }), "out") }
    })
}

/// # Safety
/// `m` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gpt_measurement_free(m: *mut GptMeasurement) {
    if !m.is_null() {
        // SAFETY: allocated by `boxed` and not yet freed.
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Writes effect `x` (0 or 1) as three doubles.
///
/// # Safety
/// `m` must be a live measurement handle; `out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn gpt_measurement_effect(m: *const GptMeasurement, x: usize, out: *mut f64) -> GptStatus {
    guard(|| {
        let m = unsafe { deref(m, "measurement") }?;
        if x > 1 {
            set_error(format!("outcome {x} of a binary measurement"));
            return Err(GptStatus::IndexOutOfRange);
        }
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let v = m.inner.effect(x).as_array();
        // SAFETY: `out` holds 3 doubles per the contract.
        unsafe { std::ptr::copy_nonoverlapping(v.as_ptr(), out, 3) };
        Ok(())
    })
}

/// Landau–Pollak constant `γ` of two measurements of the same theory.
///
/// # Safety
/// `a` and `b` must be live measurement handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_gamma(a: *const GptMeasurement, b: *const GptMeasurement, out: *mut f64) -> GptStatus {
    guard(|| {
        let (a, b) = unsafe { (deref(a, "a")?, deref(b, "b")?) };
        let g = gamma(&a.inner, &b.inner).or_status()?;
        unsafe { write(out, g.gamma, "out") }
    })
}

/// Preparation bound `-2 log(γ/2)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_pur_bound(gamma: f64, base: GptLogBase, out: *mut f64) -> GptStatus {
    guard(|| {
        let v = pur_bound(gamma, base_of(base)).or_status()?;
        unsafe { write(out, v, "out") }
    })
}

/// Noise `H(E|M)` of the measurement with `n_effects` effects given as
/// `3 * n_effects` doubles, with respect to the ideal measurement `e`.
///
/// # Safety
/// `e` must be a live measurement handle, `effects` must hold
/// `3 * n_effects` doubles and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_noise(
    e: *const GptMeasurement,
    effects: *const f64,
    n_effects: usize,
    base: GptLogBase,
    out: *mut f64,
) -> GptStatus {
    guard(|| {
        let e = unsafe { deref(e, "e") }?;
        if effects.is_null() {
            return Err(null_arg("effects"));
        }
        // SAFETY: `effects` holds 3 * n_effects doubles per the contract.
        let raw = unsafe { std::slice::from_raw_parts(effects, 3 * n_effects) };
        let vs = raw
            .chunks_exact(3)
            .map(VecV::try_from_slice)
            .collect::<gptlab::Result<Vec<_>>>()
            .or_status()?;
        let m = Measurement::new(e.inner.theory(), vs).or_status()?;
        let v = gptlab::noise(&e.inner, &m, base_of(base)).or_status()?;
        unsafe { write(out, v, "out") }
    })
}

/// Decides joint measurability. When feasible and `joint` is non-null, a
/// witness joint measurement is stored there.
///
/// # Safety
/// `a` and `b` must be live measurement handles, `verdict` valid for writes,
/// `joint` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_joint_feasible(
    a: *const GptMeasurement,
    b: *const GptMeasurement,
    verdict: *mut GptVerdict,
    joint: *mut *mut GptJoint,
) -> GptStatus {
    guard(|| {
        let (a, b) = unsafe { (deref(a, "a")?, deref(b, "b")?) };
        if verdict.is_null() {
            return Err(null_arg("verdict"));
        }
        let r = exact_joint_feasible(&a.inner, &b.inner).or_status()?;
        let v = match r.verdict {
            Feasibility::Feasible(m) => {
                if !joint.is_null() {
                    unsafe { joint.write(boxed(GptJoint { inner: m })) };
                }
                GptVerdict::Feasible
            }
            Feasibility::Infeasible => GptVerdict::Infeasible,
            Feasibility::Undetermined => GptVerdict::Undetermined,
        };
        unsafe { write(verdict, v, "verdict") }
    })
}

/// Minimises the noise sum over joint measurements. Zero `restarts` or
/// `max_iters` select the defaults. When `joint` is non-null the best joint
/// measurement is stored there.
///
/// # Safety
/// `a` and `b` must be live measurement handles, `noise_sum_out` valid for
/// writes, `joint` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_optimize(
    a: *const GptMeasurement,
    b: *const GptMeasurement,
    restarts: usize,
    max_iters: usize,
    seed: u64,
    base: GptLogBase,
    noise_sum_out: *mut f64,
    joint: *mut *mut GptJoint,
) -> GptStatus {
    guard(|| {
        let (a, b) = unsafe { (deref(a, "a")?, deref(b, "b")?) };
        if noise_sum_out.is_null() {
            return Err(null_arg("noise_sum_out"));
        }
        let d = OptimizerConfig::default();
        let cfg = OptimizerConfig {
            restarts: if restarts == 0 { d.restarts } else { restarts },
            max_iters: if max_iters == 0 { d.max_iters } else { max_iters },
            seed,
            tol: a.inner.theory().tol(),
        };
        let r = optimize_noise(&a.inner, &b.inner, &cfg, base_of(base)).or_status()?;
        if !joint.is_null() {
            unsafe { joint.write(boxed(GptJoint { inner: r.best })) };
        }
        unsafe { write(noise_sum_out, r.noise_sum, "noise_sum_out") }
    })
}

/// Writes cell `(x, y)` as three doubles.
///
/// # Safety
/// `j` must be a live joint handle; `out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn gpt_joint_cell(j: *const GptJoint, x: usize, y: usize, out: *mut f64) -> GptStatus {
    guard(|| {
        let j = unsafe { deref(j, "joint") }?;
        if x > 1 || y > 1 {
            set_error(format!("cell ({x}, {y}) of a 2 x 2 grid"));
            return Err(GptStatus::IndexOutOfRange);
        }
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let v = j.inner.cell(x, y).as_array();
        // SAFETY: `out` holds 3 doubles per the contract.
        unsafe { std::ptr::copy_nonoverlapping(v.as_ptr(), out, 3) };
        Ok(())
    })
}

/// `N(M^A; A) + N(M^B; B)` for a joint measurement.
///
/// # Safety
/// All handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gpt_joint_noise_sum(
    j: *const GptJoint,
    a: *const GptMeasurement,
    b: *const GptMeasurement,
    base: GptLogBase,
    out: *mut f64,
) -> GptStatus {
    guard(|| {
        let j = unsafe { deref(j, "joint") }?;
        let (a, b) = unsafe { (deref(a, "a")?, deref(b, "b")?) };
        let v = noise_sum(&j.inner, &a.inner, &b.inner, base_of(base)).or_status()?;
        unsafe { write(out, v, "out") }
    })
}

/// # Safety
/// `j` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gpt_joint_free(j: *mut GptJoint) {
    if !j.is_null() {
        // SAFETY: allocated by `boxed` and not yet freed.
        drop(unsafe { Box::from_raw(j) });
    }
}
