//! C ABI for the `parajc` simulator.
//!
//! Every fallible call returns a [`ParajcStatus`]; on failure the message is
//! kept per thread and can be read with [`parajc_last_error_message`].
//! Handles are opaque and must be released with their `_free` function.
//! Array outputs take a caller buffer and its capacity, always report the
//! required length, and fail with `PARAJC_STATUS_BUFFER_TOO_SMALL` when the
//! buffer is short.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use parajc::analysis::{concurrence, extract_beats};
use parajc::dynamics::{evolve_lindblad, evolve_schrodinger, TimeGrid, TimeSeries};
use parajc::linalg::{eigvalsh, CMatrix, C64};
use parajc::model::{excited_vacuum, hamiltonian, locate_crossing};
use parajc::wigner::{wigner_even_analytic, wigner_numeric, wigner_odd_analytic, PhaseSpaceGrid};
use parajc::{CompositeSpace, CrossingLabel, Error, FockSpace, QuantumState, Space, SystemParams};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParajcStatus {
    Ok = 0,
    NullPointer = 1,
    BufferTooSmall = 2,
    InvalidParameter = 3,
    OutOfRange = 4,
    ShapeMismatch = 5,
    SeriesTooShort = 6,
    Eigensolver = 7,
    ZeroProbability = 8,
    ConvergenceGate = 9,
    Invariant = 10,
    GridTooSmall = 11,
    Config = 12,
    Io = 13,
    Panic = 14,
}

impl From<&Error> for ParajcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Self::InvalidParameter,
            Error::OutOfRange { .. } => Self::OutOfRange,
            Error::ShapeMismatch(_) => Self::ShapeMismatch,
            Error::SeriesTooShort { .. } => Self::SeriesTooShort,
            Error::Eigensolver(_) => Self::Eigensolver,
            Error::ZeroProbability(_) => Self::ZeroProbability,
            Error::ConvergenceGate(_) => Self::ConvergenceGate,
            Error::Invariant(_) => Self::Invariant,
            Error::GridTooSmall(_) => Self::GridTooSmall,
            Error::Config(_) => Self::Config,
            Error::Io(_) | Error::Json(_) => Self::Io,
        }
    }
}

/// Which Wigner closed form to evaluate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParajcTarget {
    Even = 0,
    Odd = 1,
}

/// Qubit–cavity system: parameters plus the truncated space.
pub struct ParajcSystem {
    params: SystemParams,
    space: CompositeSpace,
}

/// Sampled observables of one evolution from |e,0⟩.
pub struct ParajcSeries {
    series: TimeSeries,
}

/// Quantities extracted from the excited-state population.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParajcBeats {
    pub fast_period: f64,
    /// NaN when no slow modulation was found.
    pub slow_period: f64,
    /// NaN when there is no quiet spot.
    pub quiet_time: f64,
    pub quiet_excited_population: f64,
    pub contrast: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn failure(status: ParajcStatus, message: impl Into<String>) -> ParajcStatus {
    set_error(message.into());
    status
}

/// Run `body`, mapping errors and panics to a status.
fn guard(body: impl FnOnce() -> Result<(), ParajcStatus>) -> ParajcStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ParajcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => failure(ParajcStatus::Panic, "panic inside parajc"),
    }
}

fn check(result: parajc::Result<()>) -> Result<(), ParajcStatus> {
    result.map_err(|e| lift(&e))
}

fn lift(e: &Error) -> ParajcStatus {
    failure(e.into(), e.to_string())
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), ParajcStatus> {
    if p.is_null() {
        Err(failure(
            ParajcStatus::NullPointer,
            format!("{what} is null"),
        ))
    } else {
        Ok(())
    }
}

/// Copy `values` into a caller buffer, reporting the required length.
///
/// # Safety
/// `out` must be valid for `capacity` writes; `len` must be null or valid.
unsafe fn copy_out(
    values: &[f64],
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> Result<(), ParajcStatus> {
    if !len.is_null() {
        *len = values.len();
    }
    if capacity < values.len() {
        return Err(failure(
            ParajcStatus::BufferTooSmall,
            format!("buffer holds {capacity}, need {}", values.len()),
        ));
    }
    non_null(out, "output buffer")?;
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn parajc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the last error message of this thread into `buf` (nul-terminated,
/// truncated to `capacity`). Returns the full message length in bytes, or 0
/// if the last call succeeded.
///
/// # Safety
/// `buf` must be null or valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn parajc_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Create a system with Fock cutoff `n_max`. Rates are in units of g.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn parajc_system_new(
    detuning: f64,
    coupling: f64,
    parametric: f64,
    kappa: f64,
    gamma: f64,
    n_max: usize,
    out: *mut *mut ParajcSystem,
) -> ParajcStatus {
    guard(|| {
        non_null(out, "out")?;
        let params = SystemParams::new(detuning, coupling, parametric).with_decay(kappa, gamma);
        check(params.validate())?;
        let space = CompositeSpace::with_n_max(n_max).map_err(|e| lift(&e))?;
        *out = Box::into_raw(Box::new(ParajcSystem { params, space }));
        Ok(())
    })
}

/// Release a system; null is ignored.
///
/// # Safety
/// `system` must come from [`parajc_system_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn parajc_system_free(system: *mut ParajcSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Dimension 2(n_max+1) of the qubit–field space; 0 for null.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn parajc_system_dim(system: *const ParajcSystem) -> usize {
    system.as_ref().map_or(0, |s| s.space.dim())
}

/// Ascending eigenvalues of H.
///
/// # Safety
/// `system` must be a live handle; `out` valid for `capacity` writes; `len`
/// null or valid.
#[no_mangle]
pub unsafe extern "C" fn parajc_system_eigenvalues(
    system: *const ParajcSystem,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> ParajcStatus {
    guard(|| {
        non_null(system, "system")?;
        let s = &*system;
        let h = hamiltonian(&s.params, s.space).map_err(|e| lift(&e))?;
        let values = eigvalsh(h.matrix()).map_err(|e| lift(&e))?;
        copy_out(&values, out, capacity, len)
    })
}

/// Locate crossing I (`label` = 1) or II (`label` = 2) for the system's g
/// and G; the system's own detuning is ignored.
///
/// # Safety
/// `system` must be a live handle; `delta_star` and `gap` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn parajc_locate_crossing(
    system: *const ParajcSystem,
    label: u32,
    delta_star: *mut f64,
    gap: *mut f64,
) -> ParajcStatus {
    guard(|| {
        non_null(system, "system")?;
        non_null(delta_star, "delta_star")?;
        non_null(gap, "gap")?;
        let label = match label {
            1 => CrossingLabel::I,
            2 => CrossingLabel::II,
            other => {
                return Err(failure(
                    ParajcStatus::InvalidParameter,
                    format!("crossing label must be 1 or 2, got {other}"),
                ))
            }
        };
        let s = &*system;
        let record = locate_crossing(&s.params, label, s.space).map_err(|e| lift(&e))?;
        *delta_star = record.delta_star;
        *gap = record.gap;
        Ok(())
    })
}

/// Evolve |e,0⟩ to `t_end`: Schrödinger when κ = γ = 0, Lindblad otherwise.
///
/// # Safety
/// `system` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn parajc_evolve(
    system: *const ParajcSystem,
    t_end: f64,
    dt_out: f64,
    dt_int: f64,
    out: *mut *mut ParajcSeries,
) -> ParajcStatus {
    guard(|| {
        non_null(system, "system")?;
        non_null(out, "out")?;
        let s = &*system;
        let grid = TimeGrid::new(t_end, dt_out, dt_int);
        let psi0 = excited_vacuum(s.space);
        let series = if s.params.kappa > 0.0 || s.params.gamma > 0.0 {
            evolve_lindblad(&s.params, &psi0.into_density(), &grid)
        } else {
            hamiltonian(&s.params, s.space).and_then(|h| evolve_schrodinger(&h, &psi0, &grid))
        }
        .map_err(|e| lift(&e))?;
        *out = Box::into_raw(Box::new(ParajcSeries { series }));
        Ok(())
    })
}

/// Release a series; null is ignored.
///
/// # Safety
/// `series` must come from [`parajc_evolve`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn parajc_series_free(series: *mut ParajcSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of samples; 0 for null.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn parajc_series_len(series: *const ParajcSeries) -> usize {
    series.as_ref().map_or(0, |s| s.series.len())
}

/// Sample times.
///
/// # Safety
/// As for [`parajc_system_eigenvalues`].
#[no_mangle]
pub unsafe extern "C" fn parajc_series_times(
    series: *const ParajcSeries,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> ParajcStatus {
    guard(|| {
        non_null(series, "series")?;
        copy_out(&(*series).series.times, out, capacity, len)
    })
}

/// Excited-state population P_e per sample.
///
/// # Safety
/// As for [`parajc_system_eigenvalues`].
#[no_mangle]
pub unsafe extern "C" fn parajc_series_excited_population(
    series: *const ParajcSeries,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> ParajcStatus {
    guard(|| {
        non_null(series, "series")?;
        copy_out(&(*series).series.excited_population, out, capacity, len)
    })
}

/// Mean photon number per sample.
///
/// # Safety
/// As for [`parajc_system_eigenvalues`].
#[no_mangle]
pub unsafe extern "C" fn parajc_series_mean_photons(
    series: *const ParajcSeries,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> ParajcStatus {
    guard(|| {
        non_null(series, "series")?;
        copy_out(&(*series).series.mean_photons, out, capacity, len)
    })
}

/// Fast and slow periods and the first quiet spot of P_e.
///
/// # Safety
/// `series` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn parajc_series_beats(
    series: *const ParajcSeries,
    out: *mut ParajcBeats,
) -> ParajcStatus {
    guard(|| {
        non_null(series, "series")?;
        non_null(out, "out")?;
        let report = extract_beats(&(*series).series, None).map_err(|e| lift(&e))?;
        let spot = report.quiet_spots.first();
        *out = ParajcBeats {
            fast_period: report.fast_period,
            slow_period: report.slow_period.unwrap_or(f64::NAN),
            quiet_time: spot.map_or(f64::NAN, |q| q.time),
            quiet_excited_population: spot.map_or(f64::NAN, |q| q.excited_population_mean),
            contrast: report.contrast,
        };
        Ok(())
    })
}

fn square_grid(half_width: f64, step: f64) -> Result<PhaseSpaceGrid, ParajcStatus> {
    let grid = PhaseSpaceGrid::square(half_width, step);
    check(grid.validate())?;
    Ok(grid)
}

/// Closed-form Wigner function of the even or odd target state on the square
/// grid [−half_width, half_width]², Im α outer and Re α fastest.
///
/// # Safety
/// As for [`parajc_system_eigenvalues`].
#[no_mangle]
pub unsafe extern "C" fn parajc_wigner_target(
    target: ParajcTarget,
    half_width: f64,
    step: f64,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> ParajcStatus {
    guard(|| {
        let grid = square_grid(half_width, step)?;
        let map = match target {
            ParajcTarget::Even => wigner_even_analytic(&grid),
            ParajcTarget::Odd => wigner_odd_analytic(&grid),
        }
        .map_err(|e| lift(&e))?;
        copy_out(&map.values, out, capacity, len)
    })
}

/// Numerical Wigner function of a photon density matrix given as separate
/// row-major real and imaginary parts of size `dim`×`dim`. Same grid layout
/// as [`parajc_wigner_target`].
///
/// # Safety
/// `rho_re` and `rho_im` must be valid for `dim*dim` reads; the output
/// arguments as for [`parajc_system_eigenvalues`].
#[no_mangle]
pub unsafe extern "C" fn parajc_wigner_density(
    rho_re: *const f64,
    rho_im: *const f64,
    dim: usize,
    half_width: f64,
    step: f64,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> ParajcStatus {
    guard(|| {
        let rho = read_matrix(rho_re, rho_im, dim)?;
        let fock = FockSpace::new(dim.saturating_sub(1)).map_err(|e| lift(&e))?;
        let state = QuantumState::density(Space::Fock(fock), rho).map_err(|e| lift(&e))?;
        let grid = square_grid(half_width, step)?;
        let map = wigner_numeric(&state, &grid, "ffi").map_err(|e| lift(&e))?;
        copy_out(&map.values, out, capacity, len)
    })
}

/// Wootters concurrence of a 4×4 two-qubit density matrix (row-major real
/// and imaginary parts).
///
/// # Safety
/// `rho_re` and `rho_im` must be valid for 16 reads; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn parajc_concurrence(
    rho_re: *const f64,
    rho_im: *const f64,
    out: *mut f64,
) -> ParajcStatus {
    guard(|| {
        non_null(out, "out")?;
        let rho = read_matrix(rho_re, rho_im, 4)?;
        *out = concurrence(&rho).map_err(|e| lift(&e))?;
        Ok(())
    })
}

unsafe fn read_matrix(re: *const f64, im: *const f64, dim: usize) -> Result<CMatrix, ParajcStatus> {
    non_null(re, "real part")?;
    non_null(im, "imaginary part")?;
    if dim == 0 {
        return Err(failure(
            ParajcStatus::InvalidParameter,
            "matrix dimension is 0",
        ));
    }
    let re = std::slice::from_raw_parts(re, dim * dim);
    let im = std::slice::from_raw_parts(im, dim * dim);
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        C64::new(re[r * dim + c], im[r * dim + c])
    }))
}
