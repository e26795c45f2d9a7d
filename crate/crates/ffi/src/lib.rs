//! C ABI over polyskel. Every function returns a [`PsStatus`] and writes its
//! result through an out-parameter; objects are opaque handles released with
//! the matching `_free` function. On failure the message is available from
//! [`ps_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use polyskel::complex::Complex;
use polyskel::driver::{run, ProblemSpec, RunReport, Verdict};
use polyskel::geometry::Vec3;
use polyskel::grid::{build_dyadic, DyadicGridSpec};
use polyskel::io::write_report_jsonl;
use polyskel::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    DimensionMismatch = 4,
    Geometry = 5,
    NotConverged = 6,
    Io = 7,
    Parse = 8,
    Panic = 9,
}

/// Cell complex.
pub struct PsComplex(Complex);

/// Parsed and validated problem.
pub struct PsProblem(ProblemSpec);

/// Result of a minimizing run.
pub struct PsReport(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PsStatus {
    match e {
        Error::Config(_) => PsStatus::Config,
        Error::DimensionMismatch(_) => PsStatus::DimensionMismatch,
        Error::NotConverged { .. } => PsStatus::NotConverged,
        Error::Io(_) => PsStatus::Io,
        Error::Parse { .. } => PsStatus::Parse,
        _ => PsStatus::Geometry,
    }
}

/// Runs `f`, recording errors and panics for `ps_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), PsStatus>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned());
            set_error(format!("panic: {}", msg.unwrap_or_else(|| "unknown".into())));
            PsStatus::Panic
        }
    }
}

fn fail(e: Error) -> PsStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn invalid(msg: &str) -> PsStatus {
    set_error(msg.to_string());
    PsStatus::InvalidArgument
}

fn null_arg() -> PsStatus {
    set_error("null pointer argument".into());
    PsStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, PsStatus> {
    p.as_ref().ok_or_else(null_arg)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), PsStatus> {
    if out.is_null() {
        set_error("null out pointer".into());
        return Err(PsStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ps_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ps_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Block of `counts[i]` cubes of side `stride` per axis from `origin`, in
/// dimension `n` (2 or 3). `origin` and `counts` hold `n` entries.
///
/// # Safety
/// `origin` and `counts` must point to `n` readable values.
#[no_mangle]
pub unsafe extern "C" fn ps_complex_dyadic(
    n: usize,
    stride: f64,
    origin: *const f64,
    counts: *const usize,
    out: *mut *mut PsComplex,
) -> PsStatus {
    guard(|| {
        if !(2..=3).contains(&n) {
            return Err(invalid("n must be 2 or 3"));
        }
        if !(stride > 0.0) || !stride.is_finite() {
            return Err(invalid("stride must be positive"));
        }
        if origin.is_null() || counts.is_null() {
            return Err(null_arg());
        }
        let o = std::slice::from_raw_parts(origin, n);
        let k = std::slice::from_raw_parts(counts, n);
        if k.iter().any(|&c| c == 0 || c > 4096) {
            return Err(invalid("counts must be in 1..=4096"));
        }
        let mut origin3 = Vec3::zeros();
        let mut counts3 = [1usize; 3];
        for i in 0..n {
            origin3[i] = o[i];
            counts3[i] = k[i];
        }
        let c = build_dyadic(&DyadicGridSpec::block(n, stride, origin3, counts3)).map_err(fail)?;
        write(out, Box::into_raw(Box::new(PsComplex(c))))
    })
}

/// # Safety
/// `c` must come from `ps_complex_dyadic` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ps_complex_free(c: *mut PsComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of top-dimensional cells.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_complex_cell_count(c: *const PsComplex, out: *mut usize) -> PsStatus {
    guard(|| write(out, deref(c)?.0.cells().len()))
}

/// Number of faces of dimension `dim`.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_complex_face_count(c: *const PsComplex, dim: usize, out: *mut usize) -> PsStatus {
    guard(|| {
        let c = deref(c)?;
        if dim > c.0.dim {
            return Err(invalid("dim exceeds the complex dimension"));
        }
        write(out, c.0.faces_of_dim(dim).len())
    })
}

/// Smallest rotondity over all faces.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_complex_min_rotondity(c: *const PsComplex, out: *mut f64) -> PsStatus {
    guard(|| write(out, deref(c)?.0.stats.min_rotondity))
}

/// Checks that face relative interiors are pairwise disjoint.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_complex_validate(c: *const PsComplex, out_valid: *mut bool) -> PsStatus {
    guard(|| write(out_valid, deref(c)?.0.validate().passed()))
}

/// Parses a problem from TOML text.
///
/// # Safety
/// `text` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ps_problem_from_toml(text: *const c_char, out: *mut *mut PsProblem) -> PsStatus {
    guard(|| {
        if text.is_null() {
            return Err(null_arg());
        }
        let s = CStr::from_ptr(text).to_str().map_err(|_| invalid("text is not UTF-8"))?;
        let spec = ProblemSpec::from_toml(s).map_err(fail)?;
        write(out, Box::into_raw(Box::new(PsProblem(spec))))
    })
}

/// Replaces the problem's seed.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_problem_set_seed(p: *mut PsProblem, seed: u64) -> PsStatus {
    guard(|| {
        let p = p.as_mut().ok_or_else(null_arg)?;
        p.0.seed.value = seed;
        Ok(())
    })
}

/// # Safety
/// `p` must come from `ps_problem_from_toml` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ps_problem_free(p: *mut PsProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs the minimizing sequence. A run that does not converge still
/// produces a report; check `ps_report_converged`.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_minimize(p: *const PsProblem, out: *mut *mut PsReport) -> PsStatus {
    guard(|| {
        let r = run(&deref(p)?.0).map_err(fail)?;
        write(out, Box::into_raw(Box::new(PsReport(r))))
    })
}

/// # Safety
/// `r` must come from `ps_minimize` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ps_report_free(r: *mut PsReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Weighted measure of the final skeleton.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_report_final_value(r: *const PsReport, out: *mut f64) -> PsStatus {
    guard(|| write(out, deref(r)?.0.final_value))
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_report_stride_count(r: *const PsReport, out: *mut usize) -> PsStatus {
    guard(|| write(out, deref(r)?.0.strides.len()))
}

/// Stride length and optimized value at stride `index`.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_report_stride(r: *const PsReport, index: usize, out_stride: *mut f64, out_value: *mut f64) -> PsStatus {
    guard(|| {
        let s = deref(r)?.0.strides.get(index).ok_or_else(|| invalid("stride index out of range"))?;
        write(out_stride, s.stride)?;
        write(out_value, s.value)
    })
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_report_converged(r: *const PsReport, out: *mut bool) -> PsStatus {
    guard(|| write(out, deref(r)?.0.verdict == Verdict::Converged))
}

/// Whether the final skeleton satisfies the problem's constraint.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_report_oracle_holds(r: *const PsReport, out: *mut bool) -> PsStatus {
    guard(|| write(out, deref(r)?.0.oracle_holds))
}

/// The report as JSON lines; release with `ps_string_free`.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_report_to_json(r: *const PsReport, out: *mut *mut c_char) -> PsStatus {
    guard(|| {
        let mut buf = Vec::new();
        write_report_jsonl(&mut buf, &deref(r)?.0).map_err(fail)?;
        let s = CString::new(buf).map_err(|_| invalid("report contains a NUL byte"))?;
        write(out, s.into_raw())
    })
}
