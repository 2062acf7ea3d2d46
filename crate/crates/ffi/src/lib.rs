//! C interface to `poissonsym`.
//!
//! Objects cross the boundary as opaque handles created by `ps_*_new`/`_from_*`
//! functions and released with the matching `ps_*_free`. Fallible calls return
//! a [`PsStatus`]; on failure `ps_last_error` holds a message for the calling
//! thread until its next call into the library.
//!
//! # Safety
//!
//! Handles must come from this library and be freed at most once. Array
//! arguments must point to at least the stated number of elements, and
//! strings must be NUL-terminated UTF-8.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use poissonsym::actions::PoissonAction;
use poissonsym::cli::{build_action, build_manifold, run_scenario, ActionSpec, ManifoldSpec, Report, ScenarioConfig};
use poissonsym::momentum::{check_cocycle, lifted_momentum};
use poissonsym::numerics::{parse_expression, Expression};
use poissonsym::paths::{concatenate, integrate_base, CotangentPath};
use poissonsym::poisson::{ChartPoissonManifold, OneForm};
use poissonsym::Error;

/// Result code of every fallible call. Values are stable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Eval = 4,
    Dimension = 5,
    InvalidArgument = 6,
    Precondition = 7,
    Unknown = 8,
    Config = 9,
    Io = 10,
    Panic = 11,
}

/// Chart Poisson manifold.
pub struct PsManifold(ChartPoissonManifold);
/// Parsed scalar expression in `x0, x1, …` and `t`.
pub struct PsExpression(Expression);
/// Infinitesimal Poisson action with its Lie algebra.
pub struct PsAction(PoissonAction);
/// Cotangent path sampled on a uniform grid over `[0, 1]`.
pub struct PsPath(CotangentPath);
/// Scenario report.
pub struct PsReport(Report);

/// Numeric fields of one report record.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PsRecord {
    pub residual: f64,
    pub tolerance: f64,
    pub runtime_ms: f64,
    pub pass: bool,
}

struct Failure {
    status: PsStatus,
    message: String,
}

impl Failure {
    fn new(status: PsStatus, message: impl Into<String>) -> Self {
        Failure { status, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Eval(_) | Error::Integration { .. } => PsStatus::Eval,
            Error::Parse { .. } => PsStatus::Parse,
            Error::Dimension { .. } => PsStatus::Dimension,
            Error::Grid(_) | Error::Invalid(_) => PsStatus::InvalidArgument,
            Error::EndpointMismatch { .. } | Error::NotComposable { .. } | Error::Precondition(_) => {
                PsStatus::Precondition
            }
            Error::Unknown { .. } => PsStatus::Unknown,
            Error::Config(_) => PsStatus::Config,
            Error::Io(_) => PsStatus::Io,
        };
        Failure::new(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn call(f: impl FnOnce() -> FfiResult<()>) -> PsStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsStatus::Ok,
        Ok(Err(fail)) => {
            set_error(&fail.message);
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            PsStatus::Panic
        }
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Failure::new(PsStatus::NullPointer, format!("`{what}` is null")))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> FfiResult<&'a [f64]> {
    if n == 0 {
        return Ok(&[]);
    }
    handle(p, what)?;
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn slice_mut<'a>(p: *mut f64, n: usize, what: &str) -> FfiResult<&'a mut [f64]> {
    if n == 0 {
        return Ok(&mut []);
    }
    handle(p, what)?;
    Ok(std::slice::from_raw_parts_mut(p, n))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    handle(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::new(PsStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn optional_string<'a>(p: *const c_char, what: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        string(p, what).map(Some)
    }
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure::new(PsStatus::NullPointer, format!("`{what}` is null")));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, v: T) -> FfiResult<()> {
    put(out, Box::into_raw(Box::new(v)), "out")
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn dim_check(expected: usize, found: usize) -> FfiResult<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found }.into())
    }
}

fn json<T: serde::de::DeserializeOwned>(src: &str, what: &str) -> FfiResult<T> {
    serde_json::from_str(src).map_err(|e| Failure::new(PsStatus::Config, format!("`{what}`: {e}")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ps_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ps_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an s-expression such as `(+ (* x0 x1) (sin t))`.
#[no_mangle]
pub unsafe extern "C" fn ps_expression_parse(src: *const c_char, out: *mut *mut PsExpression) -> PsStatus {
    call(|| {
        let e = parse_expression(string(src, "src")?)?;
        put_handle(out, PsExpression(e))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_expression_free(e: *mut PsExpression) {
    free(e)
}

/// Evaluates at `x[0..n]` (time `t = 0`).
#[no_mangle]
pub unsafe extern "C" fn ps_expression_eval(
    e: *const PsExpression,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> PsStatus {
    call(|| {
        let e = handle(e, "expression")?;
        let v = e.0.eval(slice(x, n, "x")?).map_err(Error::from)?;
        put(out, v, "out")
    })
}

/// Builds a manifold from its JSON description, e.g.
/// `{"type": "lie-poisson", "algebra": {"type": "so3"}}`.
#[no_mangle]
pub unsafe extern "C" fn ps_manifold_from_json(spec: *const c_char, out: *mut *mut PsManifold) -> PsStatus {
    call(|| {
        let spec: ManifoldSpec = json(string(spec, "spec")?, "spec")?;
        put_handle(out, PsManifold(build_manifold(&spec, "spec")?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_manifold_free(m: *mut PsManifold) {
    free(m)
}

/// Chart dimension, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ps_manifold_dim(m: *const PsManifold) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Writes the `n × n` bivector matrix at `x` in row-major order.
#[no_mangle]
pub unsafe extern "C" fn ps_manifold_bivector(
    m: *const PsManifold,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> PsStatus {
    call(|| {
        let m = &handle(m, "manifold")?.0;
        dim_check(m.dim(), n)?;
        let pi = m.pi_at(slice(x, n, "x")?).map_err(Error::from)?;
        let dst = slice_mut(out, n * n, "out")?;
        for i in 0..n {
            for j in 0..n {
                dst[i * n + j] = pi[(i, j)];
            }
        }
        Ok(())
    })
}

/// `{f, g}(x)`.
#[no_mangle]
pub unsafe extern "C" fn ps_manifold_bracket(
    m: *const PsManifold,
    f: *const PsExpression,
    g: *const PsExpression,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> PsStatus {
    call(|| {
        let m = &handle(m, "manifold")?.0;
        dim_check(m.dim(), n)?;
        let v = m.bracket(&handle(f, "f")?.0, &handle(g, "g")?.0, slice(x, n, "x")?)?;
        put(out, v, "out")
    })
}

/// Largest Jacobiator over coordinate triples at `x`.
#[no_mangle]
pub unsafe extern "C" fn ps_manifold_jacobiator(
    m: *const PsManifold,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> PsStatus {
    call(|| {
        let m = &handle(m, "manifold")?.0;
        dim_check(m.dim(), n)?;
        put(out, m.coordinate_jacobiator(slice(x, n, "x")?)?, "out")
    })
}

/// `out = Π(x) a`.
#[no_mangle]
pub unsafe extern "C" fn ps_manifold_sharp(
    m: *const PsManifold,
    x: *const f64,
    a: *const f64,
    n: usize,
    out: *mut f64,
) -> PsStatus {
    call(|| {
        let m = &handle(m, "manifold")?.0;
        dim_check(m.dim(), n)?;
        let v = m.sharp_covector(slice(x, n, "x")?, slice(a, n, "a")?)?;
        slice_mut(out, n, "out")?.copy_from_slice(&v);
        Ok(())
    })
}

/// Builds an action from its JSON description. Builtin actions such as
/// `{"type": "c2-circle"}` carry their own manifold and ignore `manifold`,
/// which may be null; `trivial` and `generators` require it.
#[no_mangle]
pub unsafe extern "C" fn ps_action_from_json(
    spec: *const c_char,
    manifold: *const PsManifold,
    out: *mut *mut PsAction,
) -> PsStatus {
    call(|| {
        let spec: ActionSpec = json(string(spec, "spec")?, "spec")?;
        let m = manifold.as_ref().map(|m| &m.0);
        put_handle(out, PsAction(build_action(&spec, m)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_action_free(a: *mut PsAction) {
    free(a)
}

/// Lie algebra dimension, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ps_action_algebra_dim(a: *const PsAction) -> usize {
    a.as_ref().map_or(0, |a| a.0.algebra().dim())
}

/// New handle to the manifold the action lives on.
#[no_mangle]
pub unsafe extern "C" fn ps_action_manifold(a: *const PsAction, out: *mut *mut PsManifold) -> PsStatus {
    call(|| {
        let a = handle(a, "action")?;
        put_handle(out, PsManifold(a.0.manifold().clone()))
    })
}

/// Integrates `ẋ = Π(x) a(x, t)` from `x0` over `steps` RK4 steps, with the
/// covector given by `n` expression handles.
#[no_mangle]
pub unsafe extern "C" fn ps_path_integrate(
    m: *const PsManifold,
    covector: *const *const PsExpression,
    x0: *const f64,
    n: usize,
    steps: usize,
    out: *mut *mut PsPath,
) -> PsStatus {
    call(|| {
        let m = &handle(m, "manifold")?.0;
        dim_check(m.dim(), n)?;
        handle(covector, "covector")?;
        let comps = std::slice::from_raw_parts(covector, n)
            .iter()
            .enumerate()
            .map(|(i, e)| handle(*e, &format!("covector[{i}]")).map(|e| e.0.clone()))
            .collect::<FfiResult<Vec<_>>>()?;
        let path = integrate_base(m, &OneForm::new(comps), slice(x0, n, "x0")?, steps)?;
        put_handle(out, PsPath(path))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_path_free(p: *mut PsPath) {
    free(p)
}

/// Number of grid steps, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ps_path_steps(p: *const PsPath) -> usize {
    p.as_ref().map_or(0, |p| p.0.steps())
}

/// Copies the base point at the start and end of the path. Either output may be null.
#[no_mangle]
pub unsafe extern "C" fn ps_path_endpoints(
    p: *const PsPath,
    start: *mut f64,
    end: *mut f64,
    n: usize,
) -> PsStatus {
    call(|| {
        let p = &handle(p, "path")?.0;
        dim_check(p.manifold().dim(), n)?;
        if !start.is_null() {
            slice_mut(start, n, "start")?.copy_from_slice(p.start());
        }
        if !end.is_null() {
            slice_mut(end, n, "end")?.copy_from_slice(p.end());
        }
        Ok(())
    })
}

/// Concatenation `a` then `b`; `b` must start where `a` ends.
#[no_mangle]
pub unsafe extern "C" fn ps_path_concatenate(
    a: *const PsPath,
    b: *const PsPath,
    out: *mut *mut PsPath,
) -> PsStatus {
    call(|| {
        let c = concatenate(&handle(a, "a")?.0, &handle(b, "b")?.0)?;
        put_handle(out, PsPath(c))
    })
}

/// Lifted momentum of a path: `out[k] = ∫ ⟨a, X_k⟩ dt` for each generator.
#[no_mangle]
pub unsafe extern "C" fn ps_momentum_lifted(
    action: *const PsAction,
    path: *const PsPath,
    out: *mut f64,
    n: usize,
) -> PsStatus {
    call(|| {
        let act = &handle(action, "action")?.0;
        dim_check(act.algebra().dim(), n)?;
        let v = lifted_momentum(act, &handle(path, "path")?.0)?;
        slice_mut(out, n, "out")?.copy_from_slice(v.components());
        Ok(())
    })
}

/// Cocycle defect of the lifted momentum on a composable pair.
#[no_mangle]
pub unsafe extern "C" fn ps_momentum_cocycle(
    action: *const PsAction,
    a: *const PsPath,
    b: *const PsPath,
    out: *mut f64,
) -> PsStatus {
    call(|| {
        let act = &handle(action, "action")?.0;
        let r = check_cocycle(act, &handle(a, "a")?.0, &handle(b, "b")?.0)?;
        put(out, r, "out")
    })
}

/// Runs a builtin scenario (or `all`) and/or a JSON config. Either argument
/// may be null but not both.
#[no_mangle]
pub unsafe extern "C" fn ps_scenario_run(
    name: *const c_char,
    config_json: *const c_char,
    out: *mut *mut PsReport,
) -> PsStatus {
    call(|| {
        let name = optional_string(name, "name")?;
        let cfg = match optional_string(config_json, "config_json")? {
            Some(src) => ScenarioConfig::from_json_str(src)?,
            None => ScenarioConfig::default(),
        };
        put_handle(out, PsReport(run_scenario(name, &cfg)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_report_free(r: *mut PsReport) {
    free(r)
}

/// Number of records, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ps_report_len(r: *const PsReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.records.len())
}

/// Number of failed records, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ps_report_failures(r: *const PsReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.failures().count())
}

#[no_mangle]
pub unsafe extern "C" fn ps_report_record(r: *const PsReport, index: usize, out: *mut PsRecord) -> PsStatus {
    call(|| {
        let rec = handle(r, "report")?.0.records.get(index).ok_or_else(|| {
            Failure::new(PsStatus::InvalidArgument, format!("record index {index} out of range"))
        })?;
        let v = PsRecord { residual: rec.residual, tolerance: rec.tolerance, runtime_ms: rec.runtime_ms, pass: rec.pass };
        put(out, v, "out")
    })
}

/// Serializes the report as JSON (or CSV when `csv` is set); release the
/// string with `ps_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ps_report_serialize(
    r: *const PsReport,
    csv: bool,
    no_timing: bool,
    out: *mut *mut c_char,
) -> PsStatus {
    call(|| {
        let mut rep = handle(r, "report")?.0.clone();
        if no_timing {
            rep = rep.without_timing();
        }
        let text = if csv { rep.to_csv() } else { rep.to_json() };
        let c = CString::new(text).map_err(|e| Failure::new(PsStatus::InvalidArgument, e.to_string()))?;
        put(out, c.into_raw(), "out")
    })
}
