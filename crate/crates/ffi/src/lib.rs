//! C interface to `emdof`.
//!
//! Every fallible function returns an [`EmdofStatus`]; on failure the
//! message is available from [`emdof_last_error`] on the same thread until
//! the next failing call. Handles are opaque and must be released with the
//! matching `*_free` function. Array outputs use the caller-buffer pattern:
//! pass `len` slots and receive the number written in `*written`; a null
//! buffer with `len == 0` queries the required size.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use emdof::dof::{fdof, Scale};
use emdof::kernels::KernelSpec;
use emdof::quadrature::{box_grid, AxisRule, Grid};
use emdof::scenarios::{run_scenario, ScenarioConfig, ScenarioResult};
use emdof::spectrum::{assemble_with_cap, eigendecompose, DiscreteOperator, PatternSet, Spectrum};
use emdof::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmdofStatus {
    Ok = 0,
    Config = 1,
    InvalidRegion = 2,
    Capacity = 3,
    Numeric = 4,
    Unsupported = 5,
    Io = 6,
    NullPointer = 7,
    InvalidArgument = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Per-axis quadrature rule for [`emdof_grid_box`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmdofAxisRule {
    Uniform = 0,
    GaussLegendre = 1,
}

/// Node grid over a region.
pub struct EmdofGrid(Grid);

/// Assembled operator with its eigendecomposition.
pub struct EmdofOperator {
    op: DiscreteOperator,
    spectrum: Spectrum,
    patterns: PatternSet,
}

/// Completed scenario run.
pub struct EmdofScenario(ScenarioResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EmdofStatus {
    match e {
        Error::Config(_) => EmdofStatus::Config,
        Error::InvalidRegion(_) => EmdofStatus::InvalidRegion,
        Error::Capacity { .. } => EmdofStatus::Capacity,
        Error::Numeric { .. } => EmdofStatus::Numeric,
        Error::Unsupported(_) => EmdofStatus::Unsupported,
        Error::Io(_) => EmdofStatus::Io,
    }
}

struct Failure(EmdofStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail(status: EmdofStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

/// Runs `f`, converting errors and panics into a status plus last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EmdofStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EmdofStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EmdofStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(EmdofStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(EmdofStatus::NullPointer, format!("{what} is null")))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(EmdofStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        fail(
            EmdofStatus::InvalidArgument,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(EmdofStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Copies `src` into a caller buffer; `written` always receives the full
/// length so callers can size a retry.
unsafe fn copy_out(
    src: &[f64],
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> Result<(), Failure> {
    *out_ptr(written, "written")? = src.len();
    if buf.is_null() && len == 0 {
        return Ok(());
    }
    if len < src.len() {
        return Err(fail(
            EmdofStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    if buf.is_null() {
        return Err(fail(EmdofStatus::NullPointer, "buf is null"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

fn parse_kernel(json: &str) -> Result<KernelSpec, Failure> {
    let spec: KernelSpec = serde_json::from_str(json)
        .map_err(|e| fail(EmdofStatus::Config, format!("kernel: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

fn parse_scale(normalized: bool) -> Scale {
    if normalized {
        Scale::Normalized
    } else {
        Scale::Raw
    }
}

/// Message of the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn emdof_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Clears the last error of this thread.
#[no_mangle]
pub extern "C" fn emdof_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn emdof_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or come from an `emdof_*` function documented as
/// returning an owned string, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn emdof_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Tensor-product box grid. `extents` holds `dim` pairs `(lo, hi)`;
/// `counts` and `rules` hold `dim` entries, each rule an
/// [`EmdofAxisRule`] value.
///
/// # Safety
/// Array arguments must point to `dim` (or `2 dim` for `extents`) readable
/// values and `out` to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn emdof_grid_box(
    dim: usize,
    extents: *const f64,
    counts: *const usize,
    rules: *const i32,
    node_cap: usize,
    out: *mut *mut EmdofGrid,
) -> EmdofStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let e = slice(extents, 2 * dim, "extents")?;
        let c = slice(counts, dim, "counts")?;
        let r = slice(rules, dim, "rules")?;
        let ext: Vec<[f64; 2]> = e.chunks_exact(2).map(|p| [p[0], p[1]]).collect();
        let rules: Vec<AxisRule> = r
            .iter()
            .map(|&x| match x {
                x if x == EmdofAxisRule::Uniform as i32 => Ok(AxisRule::Uniform),
                x if x == EmdofAxisRule::GaussLegendre as i32 => Ok(AxisRule::GaussLegendre),
                other => Err(fail(
                    EmdofStatus::InvalidArgument,
                    format!("unknown axis rule {other}"),
                )),
            })
            .collect::<Result<_, _>>()?;
        let grid = box_grid(&ext, c, &rules, node_cap)?;
        *out = Box::into_raw(Box::new(EmdofGrid(grid)));
        Ok(())
    })
}

/// Number of nodes.
///
/// # Safety
/// `grid` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn emdof_grid_len(grid: *const EmdofGrid, out: *mut usize) -> EmdofStatus {
    guard(|| {
        *out_ptr(out, "out")? = borrow(grid, "grid")?.0.len();
        Ok(())
    })
}

/// Sum of the quadrature weights.
///
/// # Safety
/// `grid` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn emdof_grid_measure(grid: *const EmdofGrid, out: *mut f64) -> EmdofStatus {
    guard(|| {
        *out_ptr(out, "out")? = borrow(grid, "grid")?.0.measure();
        Ok(())
    })
}

/// Releases a grid.
///
/// # Safety
/// `grid` must be null or a handle from [`emdof_grid_box`], not used again.
#[no_mangle]
pub unsafe extern "C" fn emdof_grid_free(grid: *mut EmdofGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Evaluates a kernel given as JSON (for example
/// `{"type":"ball3d","k0":62.8}`) at two points of dimension `dim`.
///
/// # Safety
/// `kernel_json` must be a nul-terminated string, `x` and `y` must hold
/// `dim` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn emdof_kernel_eval(
    kernel_json: *const c_char,
    x: *const f64,
    y: *const f64,
    dim: usize,
    out: *mut f64,
) -> EmdofStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let spec = parse_kernel(c_str(kernel_json, "kernel_json")?)?;
        let (x, y) = (slice(x, dim, "x")?, slice(y, dim, "y")?);
        let ok = match spec {
            KernelSpec::Time1d { .. } => dim == 1,
            KernelSpec::Disk2d { .. } => dim == 2,
            KernelSpec::Spacetime { .. } => (2..=4).contains(&dim),
            _ => dim == 3,
        };
        if !ok {
            return Err(fail(
                EmdofStatus::InvalidArgument,
                format!(
                    "kernel {} does not take {dim}-dimensional points",
                    spec.name()
                ),
            ));
        }
        *out = spec.eval(x, y);
        Ok(())
    })
}

/// Assembles the operator of a JSON kernel on `grid` and decomposes it.
///
/// # Safety
/// `kernel_json` must be a nul-terminated string, `grid` a live handle and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn emdof_operator_new(
    kernel_json: *const c_char,
    grid: *const EmdofGrid,
    node_cap: usize,
    out: *mut *mut EmdofOperator,
) -> EmdofStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let spec = parse_kernel(c_str(kernel_json, "kernel_json")?)?;
        let op = assemble_with_cap(&spec, &borrow(grid, "grid")?.0, node_cap)?;
        let (spectrum, patterns) = eigendecompose(&op)?;
        *out = Box::into_raw(Box::new(EmdofOperator {
            op,
            spectrum,
            patterns,
        }));
        Ok(())
    })
}

/// Eigenvalues in descending order.
///
/// # Safety
/// `op` must be a live handle, `buf` must hold `len` values (or be null
/// with `len == 0`) and `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn emdof_operator_eigenvalues(
    op: *const EmdofOperator,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> EmdofStatus {
    guard(|| copy_out(borrow(op, "op")?.spectrum.eigenvalues(), buf, len, written))
}

/// Values of pattern `mode` at the grid nodes, orthonormal under the grid
/// weights.
///
/// # Safety
/// As for [`emdof_operator_eigenvalues`].
#[no_mangle]
pub unsafe extern "C" fn emdof_operator_pattern(
    op: *const EmdofOperator,
    mode: usize,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> EmdofStatus {
    guard(|| {
        let p = &borrow(op, "op")?.patterns;
        if mode >= p.n_modes() {
            return Err(fail(
                EmdofStatus::InvalidArgument,
                format!("mode {mode} out of range ({} modes)", p.n_modes()),
            ));
        }
        copy_out(p.mode(mode), buf, len, written)
    })
}

/// Discrete trace `sum_i w_i D(p_i, p_i)`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn emdof_operator_trace(
    op: *const EmdofOperator,
    out: *mut f64,
) -> EmdofStatus {
    guard(|| {
        *out_ptr(out, "out")? = borrow(op, "op")?.op.trace();
        Ok(())
    })
}

/// `#{lambda >= eps^2}` on the raw or normalized scale.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn emdof_operator_fdof(
    op: *const EmdofOperator,
    eps: f64,
    normalized: bool,
    out: *mut usize,
) -> EmdofStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(fail(
                EmdofStatus::InvalidArgument,
                format!("eps must lie in (0, 1), got {eps}"),
            ));
        }
        *out = fdof(&borrow(op, "op")?.spectrum, eps, parse_scale(normalized));
        Ok(())
    })
}

/// Releases an operator.
///
/// # Safety
/// `op` must be null or a handle from [`emdof_operator_new`], not used again.
#[no_mangle]
pub unsafe extern "C" fn emdof_operator_free(op: *mut EmdofOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Runs one scenario given as a JSON config object.
///
/// # Safety
/// `config_json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn emdof_scenario_run(
    config_json: *const c_char,
    out: *mut *mut EmdofScenario,
) -> EmdofStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let mut configs = ScenarioConfig::parse_many(c_str(config_json, "config_json")?)?;
        if configs.len() != 1 {
            return Err(fail(
                EmdofStatus::Config,
                format!("expected one scenario, got {}", configs.len()),
            ));
        }
        let result = run_scenario(&configs.remove(0))?;
        *out = Box::into_raw(Box::new(EmdofScenario(result)));
        Ok(())
    })
}

/// Scenario eigenvalues in descending order.
///
/// # Safety
/// As for [`emdof_operator_eigenvalues`].
#[no_mangle]
pub unsafe extern "C" fn emdof_scenario_eigenvalues(
    s: *const EmdofScenario,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> EmdofStatus {
    guard(|| {
        copy_out(
            borrow(s, "scenario")?.0.spectrum.eigenvalues(),
            buf,
            len,
            written,
        )
    })
}

/// Count of eigenvalues at or above half the leading one.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn emdof_scenario_shannon_count(
    s: *const EmdofScenario,
    out: *mut usize,
) -> EmdofStatus {
    guard(|| {
        *out_ptr(out, "out")? = borrow(s, "scenario")?.0.dof.shannon_count;
        Ok(())
    })
}

/// JSON summary of the run (grid, DoF report, trace). Release with
/// [`emdof_string_free`].
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn emdof_scenario_summary_json(
    s: *const EmdofScenario,
    out: *mut *mut c_char,
) -> EmdofStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let r = &borrow(s, "scenario")?.0;
        let value = serde_json::json!({
            "name": r.name(),
            "kernel": r.kernel,
            "grid": r.resolved,
            "dof": r.dof,
            "runtime_seconds": r.runtime_seconds,
        });
        let text =
            CString::new(value.to_string()).map_err(|e| fail(EmdofStatus::Io, e.to_string()))?;
        *out = text.into_raw();
        Ok(())
    })
}

/// Releases a scenario result.
///
/// # Safety
/// `s` must be null or a handle from [`emdof_scenario_run`], not used again.
#[no_mangle]
pub unsafe extern "C" fn emdof_scenario_free(s: *mut EmdofScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
