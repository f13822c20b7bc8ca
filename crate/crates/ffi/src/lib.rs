//! C interface to `catswap-core`.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `catswap_*_new`-style constructor and released with the matching
//! `*_free`. Functions return a [`CatswapStatus`]; on failure the message is
//! available from [`catswap_last_error_message`] on the same thread.
//!
//! Complex buffers are interleaved `re, im` pairs of `double`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use catswap::analysis;
use catswap::dynamics::{self, EvolutionSpec, InitialState};
use catswap::runner::{self, RunOptions};
use catswap::states;
use catswap::tomography::{self, WignerGrid};
use catswap::wigner3j::ThreeJSymbol;
use catswap::{DensityMatrix, Error, HilbertConfig, StateVector};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatswapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Truncation = 3,
    DegenerateCat = 4,
    DimensionMismatch = 5,
    IndexOutOfRange = 6,
    InvalidAngularMomentum = 7,
    StepSizeTooLarge = 8,
    PositivityViolation = 9,
    RealityViolation = 10,
    Config = 11,
    Io = 12,
    BufferTooSmall = 13,
    InvalidUtf8 = 14,
    Panic = 15,
}

/// Hilbert-space layout: qubit count, Fock cutoff and coupling.
pub struct CatswapSpace(HilbertConfig);

/// Pure state on the spin, field or composite factor.
pub struct CatswapState(StateVector);

/// Density matrix on the spin, field or composite factor.
pub struct CatswapDensity(DensityMatrix);

/// Sampled Wigner function.
pub struct CatswapGrid(WignerGrid);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CatswapTimescales {
    pub rabi: f64,
    pub collapse: f64,
    pub revival: f64,
    pub first_revival: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: CatswapStatus,
    message: String,
}

impl Failure {
    fn new(status: CatswapStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidConfig(_) => CatswapStatus::InvalidArgument,
            Error::Truncation(_) => CatswapStatus::Truncation,
            Error::DegenerateCat(_) => CatswapStatus::DegenerateCat,
            Error::DimensionMismatch { .. } => CatswapStatus::DimensionMismatch,
            Error::IndexOutOfRange { .. } => CatswapStatus::IndexOutOfRange,
            Error::InvalidAngularMomentum(_) => CatswapStatus::InvalidAngularMomentum,
            Error::StepSizeTooLarge { .. } => CatswapStatus::StepSizeTooLarge,
            Error::PositivityViolation { .. } => CatswapStatus::PositivityViolation,
            Error::RealityViolation { .. } => CatswapStatus::RealityViolation,
            Error::Config { .. } => CatswapStatus::Config,
            Error::Io { .. } => CatswapStatus::Io,
        };
        Failure::new(status, e.to_string())
    }
}

type FfiResult<T = ()> = std::result::Result<T, Failure>;

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult) -> CatswapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CatswapStatus::Ok,
        Ok(Err(fail)) => {
            set_last_error(fail.message);
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            CatswapStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure::new(CatswapStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> FfiResult {
    if out.is_null() {
        return Err(Failure::new(CatswapStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> FfiResult {
    if out.is_null() {
        return Err(Failure::new(CatswapStatus::NullPointer, "output handle pointer is null"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

unsafe fn output_slice<'a>(buf: *mut f64, len: usize, needed: usize) -> FfiResult<&'a mut [f64]> {
    if buf.is_null() {
        return Err(Failure::new(CatswapStatus::NullPointer, "output buffer is null"));
    }
    if len < needed {
        return Err(Failure::new(
            CatswapStatus::BufferTooSmall,
            format!("buffer holds {len} values, {needed} needed"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(buf, needed))
}

unsafe fn c_path(p: *const c_char, what: &str) -> FfiResult<PathBuf> {
    let s = deref(p, what)?;
    let s = CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::new(CatswapStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))?;
    Ok(PathBuf::from(s))
}

unsafe fn free_handle<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn catswap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn catswap_status_name(status: CatswapStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CatswapStatus::Ok => c"ok",
        CatswapStatus::NullPointer => c"null_pointer",
        CatswapStatus::InvalidArgument => c"invalid_argument",
        CatswapStatus::Truncation => c"truncation",
        CatswapStatus::DegenerateCat => c"degenerate_cat",
        CatswapStatus::DimensionMismatch => c"dimension_mismatch",
        CatswapStatus::IndexOutOfRange => c"index_out_of_range",
        CatswapStatus::InvalidAngularMomentum => c"invalid_angular_momentum",
        CatswapStatus::StepSizeTooLarge => c"step_size_too_large",
        CatswapStatus::PositivityViolation => c"positivity_violation",
        CatswapStatus::RealityViolation => c"reality_violation",
        CatswapStatus::Config => c"config",
        CatswapStatus::Io => c"io",
        CatswapStatus::BufferTooSmall => c"buffer_too_small",
        CatswapStatus::InvalidUtf8 => c"invalid_utf8",
        CatswapStatus::Panic => c"panic",
    };
    s.as_ptr()
}

// ---- space ----------------------------------------------------------------

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn catswap_space_new(
    n_qubits: usize,
    fock_cutoff: usize,
    coupling: f64,
    out: *mut *mut CatswapSpace,
) -> CatswapStatus {
    guard(|| {
        let cfg = HilbertConfig::new(n_qubits, fock_cutoff, coupling)?;
        write_handle(out, CatswapSpace(cfg))
    })
}

/// # Safety
/// `space` must be NULL or a handle from `catswap_space_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn catswap_space_free(space: *mut CatswapSpace) {
    free_handle(space)
}

/// Composite dimension `(N+1)(n_max+1)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_space_dim(space: *const CatswapSpace, out: *mut usize) -> CatswapStatus {
    guard(|| write_out(out, deref(space, "space")?.0.dim(), "out"))
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_timescales(
    coupling: f64,
    nbar: f64,
    n_qubits: usize,
    out: *mut CatswapTimescales,
) -> CatswapStatus {
    guard(|| {
        let ts = dynamics::timescales(coupling, nbar, n_qubits)?;
        let value = CatswapTimescales {
            rabi: ts.rabi,
            collapse: ts.collapse,
            revival: ts.revival,
            first_revival: ts.first_revival,
        };
        write_out(out, value, "out")
    })
}

/// Default integration step for the given parameters.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_default_step(
    coupling: f64,
    nbar: f64,
    n_qubits: usize,
    out: *mut f64,
) -> CatswapStatus {
    guard(|| {
        let ts = dynamics::timescales(coupling, nbar, n_qubits)?;
        write_out(out, dynamics::default_step(&ts, coupling), "out")
    })
}

// ---- pure states ----------------------------------------------------------

unsafe fn make_state(
    space: *const CatswapSpace,
    out: *mut *mut CatswapState,
    f: impl FnOnce(HilbertConfig) -> catswap::Result<StateVector>,
) -> CatswapStatus {
    guard(|| {
        let cfg = deref(space, "space")?.0;
        write_handle(out, CatswapState(f(cfg)?))
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_spin_coherent(
    space: *const CatswapSpace,
    z_re: f64,
    z_im: f64,
    out: *mut *mut CatswapState,
) -> CatswapStatus {
    make_state(space, out, |cfg| Ok(states::spin_coherent_state(cfg, Complex64::new(z_re, z_im))))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_spin_cat(
    space: *const CatswapSpace,
    z_re: f64,
    z_im: f64,
    out: *mut *mut CatswapState,
) -> CatswapStatus {
    make_state(space, out, |cfg| states::spin_cat(cfg, Complex64::new(z_re, z_im)))
}

/// Dicke state with `k` ground-state spins.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_dicke(
    space: *const CatswapSpace,
    k: usize,
    out: *mut *mut CatswapState,
) -> CatswapStatus {
    make_state(space, out, |cfg| states::dicke_state(cfg, k))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_coherent(
    space: *const CatswapSpace,
    alpha_re: f64,
    alpha_im: f64,
    out: *mut *mut CatswapState,
) -> CatswapStatus {
    make_state(space, out, |cfg| states::coherent_state(cfg, Complex64::new(alpha_re, alpha_im)))
}

/// `sign` is +1 (even cat) or -1 (odd cat).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_field_cat(
    space: *const CatswapSpace,
    alpha_re: f64,
    alpha_im: f64,
    sign: i8,
    out: *mut *mut CatswapState,
) -> CatswapStatus {
    make_state(space, out, |cfg| states::field_cat(cfg, Complex64::new(alpha_re, alpha_im), sign))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_fock(
    space: *const CatswapSpace,
    n: usize,
    out: *mut *mut CatswapState,
) -> CatswapStatus {
    make_state(space, out, |cfg| states::fock_state(cfg, n))
}

/// Tensor product of a spin state and a field state.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_product(
    spin: *const CatswapState,
    field: *const CatswapState,
    out: *mut *mut CatswapState,
) -> CatswapStatus {
    guard(|| {
        let s = deref(spin, "spin")?;
        let f = deref(field, "field")?;
        write_handle(out, CatswapState(states::product_state(&s.0, &f.0)?))
    })
}

/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn catswap_state_free(state: *mut CatswapState) {
    free_handle(state)
}

/// Number of complex amplitudes.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_state_len(state: *const CatswapState, out: *mut usize) -> CatswapStatus {
    guard(|| write_out(out, deref(state, "state")?.0.dim(), "out"))
}

/// Copies amplitudes into `buf` as `2*len` interleaved doubles. `buf_len`
/// counts doubles.
///
/// # Safety
/// `buf` must point to `buf_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn catswap_state_amplitudes(
    state: *const CatswapState,
    buf: *mut f64,
    buf_len: usize,
) -> CatswapStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let dst = output_slice(buf, buf_len, 2 * s.0.dim())?;
        for (pair, a) in dst.chunks_exact_mut(2).zip(s.0.amplitudes.iter()) {
            pair[0] = a.re;
            pair[1] = a.im;
        }
        Ok(())
    })
}

/// `|ψ⟩⟨ψ|`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_state_projector(
    state: *const CatswapState,
    out: *mut *mut CatswapDensity,
) -> CatswapStatus {
    guard(|| {
        let s = deref(state, "state")?;
        write_handle(out, CatswapDensity(s.0.projector()))
    })
}

// ---- dynamics -------------------------------------------------------------

/// Integrates the master equation with field loss rate `gamma` from the pure
/// composite state `initial` to `t_final` with step `dt` and returns the
/// final density matrix.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_evolve(
    initial: *const CatswapState,
    t_final: f64,
    dt: f64,
    gamma: f64,
    out: *mut *mut CatswapDensity,
) -> CatswapStatus {
    guard(|| {
        let s = deref(initial, "initial")?;
        if out.is_null() {
            return Err(Failure::new(CatswapStatus::NullPointer, "output handle pointer is null"));
        }
        let spec = EvolutionSpec::new(InitialState::Pure(s.0.clone()), t_final, dt, gamma);
        let traj = dynamics::evolve_lindblad(&spec)?;
        write_handle(out, CatswapDensity(traj.final_state))
    })
}

// ---- density matrices -----------------------------------------------------

/// # Safety
/// `rho` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn catswap_density_free(rho: *mut CatswapDensity) {
    free_handle(rho)
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_density_dim(rho: *const CatswapDensity, out: *mut usize) -> CatswapStatus {
    guard(|| write_out(out, deref(rho, "rho")?.0.dim(), "out"))
}

/// Copies the matrix in row-major order as interleaved doubles
/// (`2*dim*dim` values).
///
/// # Safety
/// `buf` must point to `buf_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn catswap_density_entries(
    rho: *const CatswapDensity,
    buf: *mut f64,
    buf_len: usize,
) -> CatswapStatus {
    guard(|| {
        let r = &deref(rho, "rho")?.0;
        let d = r.dim();
        let dst = output_slice(buf, buf_len, 2 * d * d)?;
        for i in 0..d {
            for j in 0..d {
                let z = r.entries[(i, j)];
                dst[2 * (i * d + j)] = z.re;
                dst[2 * (i * d + j) + 1] = z.im;
            }
        }
        Ok(())
    })
}

/// Real part of the trace.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_density_trace(rho: *const CatswapDensity, out: *mut f64) -> CatswapStatus {
    guard(|| write_out(out, deref(rho, "rho")?.0.trace().re, "out"))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_density_purity(rho: *const CatswapDensity, out: *mut f64) -> CatswapStatus {
    guard(|| write_out(out, analysis::purity(&deref(rho, "rho")?.0), "out"))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_density_min_eigenvalue(
    rho: *const CatswapDensity,
    out: *mut f64,
) -> CatswapStatus {
    guard(|| write_out(out, deref(rho, "rho")?.0.min_eigenvalue(), "out"))
}

/// Traces out the field.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_reduce_spins(
    rho: *const CatswapDensity,
    out: *mut *mut CatswapDensity,
) -> CatswapStatus {
    guard(|| {
        let r = tomography::reduce_spins(&deref(rho, "rho")?.0)?;
        write_handle(out, CatswapDensity(r))
    })
}

/// Traces out the spins.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_reduce_field(
    rho: *const CatswapDensity,
    out: *mut *mut CatswapDensity,
) -> CatswapStatus {
    guard(|| {
        let r = tomography::reduce_field(&deref(rho, "rho")?.0)?;
        write_handle(out, CatswapDensity(r))
    })
}

/// `⟨ψ|ρ|ψ⟩`, clamped to [0, 1].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_fidelity(
    rho: *const CatswapDensity,
    target: *const CatswapState,
    out: *mut f64,
) -> CatswapStatus {
    guard(|| {
        let f = analysis::fidelity_pure_target(&deref(rho, "rho")?.0, &deref(target, "target")?.0)?;
        write_out(out, f.value, "out")
    })
}

// ---- Wigner grids ---------------------------------------------------------

/// Field Wigner function of a field density matrix on an `nq × np` grid.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn catswap_field_wigner(
    rho_field: *const CatswapDensity,
    q_min: f64,
    q_max: f64,
    p_min: f64,
    p_max: f64,
    nq: usize,
    np: usize,
    out: *mut *mut CatswapGrid,
) -> CatswapStatus {
    guard(|| {
        let r = &deref(rho_field, "rho_field")?.0;
        let g = tomography::field_wigner(r, (q_min, q_max), (p_min, p_max), (nq, np))?;
        write_handle(out, CatswapGrid(g))
    })
}

/// Spin Wigner function on a `theta_res × phi_res` sphere grid.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_spin_wigner(
    rho_spin: *const CatswapDensity,
    theta_res: usize,
    phi_res: usize,
    out: *mut *mut CatswapGrid,
) -> CatswapStatus {
    guard(|| {
        let r = &deref(rho_spin, "rho_spin")?.0;
        let g = tomography::spin_wigner(r, theta_res, phi_res)?;
        write_handle(out, CatswapGrid(g))
    })
}

/// Resamples a sphere grid onto the Lambert equal-area disk.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_lambert(
    sphere: *const CatswapGrid,
    radial_res: usize,
    angular_res: usize,
    out: *mut *mut CatswapGrid,
) -> CatswapStatus {
    guard(|| {
        let g = tomography::lambert_project(&deref(sphere, "sphere")?.0, radial_res, angular_res)?;
        write_handle(out, CatswapGrid(g))
    })
}

/// # Safety
/// `grid` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn catswap_grid_free(grid: *mut CatswapGrid) {
    free_handle(grid)
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_grid_shape(
    grid: *const CatswapGrid,
    rows: *mut usize,
    cols: *mut usize,
) -> CatswapStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.0;
        write_out(rows, g.rows(), "rows")?;
        write_out(cols, g.cols(), "cols")
    })
}

/// Row-major values, `rows*cols` doubles.
///
/// # Safety
/// `buf` must point to `buf_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn catswap_grid_values(
    grid: *const CatswapGrid,
    buf: *mut f64,
    buf_len: usize,
) -> CatswapStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.0;
        output_slice(buf, buf_len, g.values.len())?.copy_from_slice(&g.values);
        Ok(())
    })
}

/// Coordinates along `axis` (0 for rows, 1 for columns).
///
/// # Safety
/// `buf` must point to `buf_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn catswap_grid_axis(
    grid: *const CatswapGrid,
    axis: u32,
    buf: *mut f64,
    buf_len: usize,
) -> CatswapStatus {
    guard(|| {
        let g = &deref(grid, "grid")?.0;
        let values = match axis {
            0 => &g.axis0,
            1 => &g.axis1,
            _ => {
                return Err(Failure::new(
                    CatswapStatus::IndexOutOfRange,
                    format!("axis {axis} out of range (max 1)"),
                ))
            }
        };
        output_slice(buf, buf_len, values.len())?.copy_from_slice(values);
        Ok(())
    })
}

/// Largest imaginary part discarded when the grid was made real.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_grid_imag_residue(grid: *const CatswapGrid, out: *mut f64) -> CatswapStatus {
    guard(|| write_out(out, deref(grid, "grid")?.0.max_imag_residue, "out"))
}

// ---- misc -----------------------------------------------------------------

/// Wigner 3j symbol with doubled arguments (`two_j1 = 2*j1`, ...), so that
/// half-integers are exact.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn catswap_wigner_3j(
    two_j1: i64,
    two_j2: i64,
    two_j3: i64,
    two_m1: i64,
    two_m2: i64,
    two_m3: i64,
    out: *mut f64,
) -> CatswapStatus {
    guard(|| {
        let s = ThreeJSymbol::from_doubled([two_j1, two_j2, two_j3], [two_m1, two_m2, two_m3])?;
        write_out(out, s.value(), "out")
    })
}

/// Runs an experiment config file. `out_dir` may be NULL to use the
/// directory named in the config.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out_dir` NULL or one.
#[no_mangle]
pub unsafe extern "C" fn catswap_run_config(
    config_path: *const c_char,
    out_dir: *const c_char,
    dry_run: bool,
) -> CatswapStatus {
    guard(|| {
        let path = c_path(config_path, "config_path")?;
        let out_dir = if out_dir.is_null() {
            None
        } else {
            Some(c_path(out_dir, "out_dir")?)
        };
        runner::run_path(&path, &RunOptions { out_dir, dry_run })?;
        Ok(())
    })
}
