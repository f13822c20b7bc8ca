use std::ffi::{CStr, CString};
use std::ptr;

use catswap_ffi::*;

fn ok(status: CatswapStatus) {
    if status != CatswapStatus::Ok {
        let msg = unsafe { CStr::from_ptr(catswap_last_error_message()) };
        panic!("{status:?}: {}", msg.to_string_lossy());
    }
}

struct Space(*mut CatswapSpace);

impl Space {
    fn new(n: usize, cutoff: usize) -> Self {
        let mut p = ptr::null_mut();
        ok(unsafe { catswap_space_new(n, cutoff, 1.0, &mut p) });
        Space(p)
    }
}

impl Drop for Space {
    fn drop(&mut self) {
        unsafe { catswap_space_free(self.0) }
    }
}

fn amplitudes(state: *const CatswapState) -> Vec<f64> {
    let mut len = 0;
    ok(unsafe { catswap_state_len(state, &mut len) });
    let mut buf = vec![0.0; 2 * len];
    ok(unsafe { catswap_state_amplitudes(state, buf.as_mut_ptr(), buf.len()) });
    buf
}

#[test]
fn spin_coherent_amplitudes_cross_the_boundary() {
    let space = Space::new(2, 4);
    let mut s = ptr::null_mut();
    ok(unsafe { catswap_spin_coherent(space.0, 1.0, 0.0, &mut s) });
    let a = amplitudes(s);
    let expect = [0.5, 0.0, 0.5f64.sqrt(), 0.0, 0.5, 0.0];
    for (x, y) in a.iter().zip(expect) {
        assert!((x - y).abs() < 1e-14, "{a:?}");
    }
    unsafe { catswap_state_free(s) };
}

#[test]
fn short_buffer_is_rejected() {
    let space = Space::new(3, 4);
    let mut s = ptr::null_mut();
    ok(unsafe { catswap_dicke(space.0, 1, &mut s) });
    let mut buf = [0.0; 3];
    let st = unsafe { catswap_state_amplitudes(s, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(st, CatswapStatus::BufferTooSmall);
    unsafe { catswap_state_free(s) };
}

#[test]
fn core_errors_map_to_status_codes() {
    let space = Space::new(2, 4);
    let mut s = ptr::null_mut();
    let st = unsafe { catswap_spin_cat(space.0, 0.0, 0.0, &mut s) };
    assert_eq!(st, CatswapStatus::DegenerateCat);
    assert!(s.is_null());

    let st = unsafe { catswap_coherent(space.0, 5.0, 0.0, &mut s) };
    assert_eq!(st, CatswapStatus::Truncation);
    let msg = unsafe { CStr::from_ptr(catswap_last_error_message()) };
    assert!(!msg.to_bytes().is_empty());

    let mut p = ptr::null_mut();
    assert_eq!(unsafe { catswap_space_new(0, 4, 1.0, &mut p) }, CatswapStatus::InvalidArgument);

    let mut v = 0.0;
    let st = unsafe { catswap_wigner_3j(2, 2, 2, 2, 2, 2, &mut v) };
    assert_eq!(st, CatswapStatus::Ok);
    assert_eq!(v, 0.0);
    let st = unsafe { catswap_wigner_3j(-2, 2, 2, 0, 0, 0, &mut v) };
    assert_eq!(st, CatswapStatus::InvalidAngularMomentum);
}

#[test]
fn timescales_match_closed_forms() {
    let mut ts = CatswapTimescales::default();
    ok(unsafe { catswap_timescales(1.0, 25.0, 5, &mut ts) });
    let pi = std::f64::consts::PI;
    assert!((ts.rabi - pi / 5.0).abs() < 1e-14);
    assert!((ts.collapse - 2f64.sqrt()).abs() < 1e-14);
    assert!((ts.revival - 10.0 * pi).abs() < 1e-12);
    assert!((ts.first_revival - 2.0 * pi).abs() < 1e-12);
    assert_eq!(
        unsafe { catswap_timescales(1.0, -1.0, 5, &mut ts) },
        CatswapStatus::InvalidArgument
    );
}

#[test]
fn evolve_reduce_and_sample() {
    let space = Space::new(1, 12);
    let (mut spin, mut field, mut psi) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    ok(unsafe { catswap_dicke(space.0, 0, &mut spin) });
    ok(unsafe { catswap_coherent(space.0, 1.0, 0.0, &mut field) });
    ok(unsafe { catswap_product(spin, field, &mut psi) });

    let mut rho = ptr::null_mut();
    ok(unsafe { catswap_evolve(psi, 0.5, 1e-3, 0.1, &mut rho) });
    let mut tr = 0.0;
    ok(unsafe { catswap_density_trace(rho, &mut tr) });
    assert!((tr - 1.0).abs() < 1e-9);

    let (mut rq, mut rf) = (ptr::null_mut(), ptr::null_mut());
    ok(unsafe { catswap_reduce_spins(rho, &mut rq) });
    ok(unsafe { catswap_reduce_field(rho, &mut rf) });
    let mut d = 0;
    ok(unsafe { catswap_density_dim(rq, &mut d) });
    assert_eq!(d, 2);

    let mut f = 0.0;
    ok(unsafe { catswap_fidelity(rq, spin, &mut f) });
    assert!(f > 0.0 && f < 1.0);

    let mut grid = ptr::null_mut();
    ok(unsafe { catswap_field_wigner(rf, -5.0, 5.0, -5.0, 5.0, 41, 31, &mut grid) });
    let (mut r, mut c) = (0, 0);
    ok(unsafe { catswap_grid_shape(grid, &mut r, &mut c) });
    assert_eq!((r, c), (41, 31));
    let mut vals = vec![0.0; r * c];
    ok(unsafe { catswap_grid_values(grid, vals.as_mut_ptr(), vals.len()) });
    assert!(vals.iter().all(|v| v.is_finite()));
    let mut axis = vec![0.0; c];
    ok(unsafe { catswap_grid_axis(grid, 1, axis.as_mut_ptr(), axis.len()) });
    assert_eq!(axis[0], -5.0);
    assert_eq!(
        unsafe { catswap_grid_axis(grid, 2, axis.as_mut_ptr(), axis.len()) },
        CatswapStatus::IndexOutOfRange
    );

    let (mut sphere, mut disk) = (ptr::null_mut(), ptr::null_mut());
    ok(unsafe { catswap_spin_wigner(rq, 19, 36, &mut sphere) });
    ok(unsafe { catswap_lambert(sphere, 11, 36, &mut disk) });

    // a composite-space matrix is not a spin state
    let mut bad = ptr::null_mut();
    assert_ne!(unsafe { catswap_spin_wigner(rho, 19, 36, &mut bad) }, CatswapStatus::Ok);

    unsafe {
        catswap_grid_free(disk);
        catswap_grid_free(sphere);
        catswap_grid_free(grid);
        catswap_density_free(rf);
        catswap_density_free(rq);
        catswap_density_free(rho);
        catswap_state_free(psi);
        catswap_state_free(field);
        catswap_state_free(spin);
    }
}

#[test]
fn null_arguments_never_crash() {
    let mut out = 0.0;
    assert_eq!(unsafe { catswap_density_purity(ptr::null(), &mut out) }, CatswapStatus::NullPointer);
    let space = Space::new(1, 4);
    assert_eq!(
        unsafe { catswap_fock(space.0, 1, ptr::null_mut()) },
        CatswapStatus::NullPointer
    );
    unsafe {
        catswap_state_free(ptr::null_mut());
        catswap_grid_free(ptr::null_mut());
    }
}

#[test]
fn run_config_dry_run_and_bad_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"scenario":"catswap_snapshots"}"#).unwrap();
    let path = CString::new(cfg.to_str().unwrap()).unwrap();
    let out = CString::new(dir.path().join("out").to_str().unwrap()).unwrap();
    ok(unsafe { catswap_run_config(path.as_ptr(), out.as_ptr(), true) });

    std::fs::write(&cfg, r#"{"scenario":"nope"}"#).unwrap();
    assert_eq!(
        unsafe { catswap_run_config(path.as_ptr(), out.as_ptr(), true) },
        CatswapStatus::Config
    );
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/catswap.h");
    let src = include_str!("../src/lib.rs");
    for line in src.lines() {
        let Some(rest) = line.split("extern \"C\" fn ").nth(1) else { continue };
        let name = rest.split('(').next().unwrap();
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
