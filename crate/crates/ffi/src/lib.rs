//! C ABI over `aalg-core`.
//!
//! Every fallible function returns an [`AalgStatus`]. On failure the message
//! is kept per thread and can be read with [`aalg_last_error`]. Objects are
//! handed out as opaque pointers and must be released with the matching
//! `_free` function. Matrices cross the boundary row-major.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use aalg_core::curvature::{is_flat, is_ricci_flat, ricci_general};
use aalg_core::dynamics::{f_max, integrate_geodesic, GeodesicTrajectory};
use aalg_core::linalg::Mat;
use aalg_core::{AlmostAbelianAlgebra, Error, LorentzianStructure, MetricCase, PetrovSolution};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AalgStatus {
    Ok = 0,
    Input = 2,
    Domain = 3,
    Integration = 4,
    Verification = 5,
    NullPointer = 10,
    Panic = 11,
}

/// Signature of the invariant form: (a) Euclidean, (b) Lorentzian, (c) degenerate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AalgMetricCase {
    A = 0,
    B = 1,
    C = 2,
}

/// A metric Lie algebra.
pub struct AalgStructure(LorentzianStructure);

/// A generalized Petrov solution.
pub struct AalgPetrov(PetrovSolution);

/// An integrated geodesic.
pub struct AalgTrajectory(GeodesicTrajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> AalgStatus {
    let status = match e {
        Error::Input(_) => AalgStatus::Input,
        Error::Domain(_) => AalgStatus::Domain,
        Error::Integration(_) => AalgStatus::Integration,
        Error::Verification(_) => AalgStatus::Verification,
    };
    set_error(e.to_string());
    status
}

fn null(what: &str) -> AalgStatus {
    set_error(format!("null pointer: {what}"));
    AalgStatus::NullPointer
}

fn guard(f: impl FnOnce() -> AalgStatus) -> AalgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            AalgStatus::Panic
        }
    }
}

unsafe fn input<'a>(p: *const f64, len: usize) -> Option<&'a [f64]> {
    if len == 0 {
        Some(&[])
    } else if p.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(p, len))
    }
}

unsafe fn write_matrix(m: &Mat, out: *mut f64) {
    let n = m.ncols();
    for i in 0..m.nrows() {
        for j in 0..n {
            *out.add(i * n + j) = m[(i, j)];
        }
    }
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn aalg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn aalg_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!(),
        };
    VERSION.as_ptr()
}

/// Builds the structure of dimension `n` from the (n-1)x(n-1) matrix `a`.
///
/// # Safety
/// `a` must point to (n-1)^2 doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aalg_structure_new(
    case: AalgMetricCase,
    n: usize,
    a: *const f64,
    out: *mut *mut AalgStructure,
) -> AalgStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        if n < 3 {
            return fail(Error::Input(format!("dimension {n} < 3")));
        }
        let m = n - 1;
        let Some(a) = input(a, m * m) else {
            return null("a");
        };
        let case = match case {
            AalgMetricCase::A => MetricCase::A,
            AalgMetricCase::B => MetricCase::B,
            AalgMetricCase::C => MetricCase::C,
        };
        match AlmostAbelianAlgebra::new(Mat::from_row_slice(m, m, a)) {
            Ok(alg) => {
                *out = Box::into_raw(Box::new(AalgStructure(LorentzianStructure::new(alg, case))));
                AalgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn aalg_structure_free(s: *mut AalgStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Dimension n of the group, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aalg_structure_dim(s: *const AalgStructure) -> usize {
    s.as_ref().map_or(0, |s| s.0.dim())
}

/// Ricci tensor in the X-basis, written as n*n doubles.
///
/// # Safety
/// `s` must be a live handle and `out` must hold n*n doubles.
#[no_mangle]
pub unsafe extern "C" fn aalg_structure_ricci(
    s: *const AalgStructure,
    out: *mut f64,
) -> AalgStatus {
    guard(|| {
        let Some(s) = s.as_ref() else {
            return null("structure");
        };
        if out.is_null() {
            return null("out");
        }
        write_matrix(&ricci_general(&s.0), out);
        AalgStatus::Ok
    })
}

/// Ricci-flatness and flatness at tolerance `tol`.
///
/// # Safety
/// `s` must be a live handle; the flags may be NULL if not wanted.
#[no_mangle]
pub unsafe extern "C" fn aalg_structure_flatness(
    s: *const AalgStructure,
    tol: f64,
    ricci_flat: *mut bool,
    flat: *mut bool,
) -> AalgStatus {
    guard(|| {
        let Some(s) = s.as_ref() else {
            return null("structure");
        };
        if !(tol > 0.0) {
            return fail(Error::Input("tolerance must be positive".into()));
        }
        if let Some(r) = ricci_flat.as_mut() {
            *r = is_ricci_flat(&s.0, tol).ricci_flat;
        }
        if let Some(f) = flat.as_mut() {
            *f = is_flat(&s.0, tol).flat;
        }
        AalgStatus::Ok
    })
}

/// Petrov solution for eigenvalues `lambdas`. With `allow_minkowski` the
/// all-zero (flat) case is accepted.
///
/// # Safety
/// `lambdas` must point to `len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aalg_petrov_new(
    lambdas: *const f64,
    len: usize,
    allow_minkowski: bool,
    out: *mut *mut AalgPetrov,
) -> AalgStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let Some(l) = input(lambdas, len) else {
            return null("lambdas");
        };
        let built = if allow_minkowski {
            PetrovSolution::build_allowing_minkowski(l)
        } else {
            PetrovSolution::build(l)
        };
        match built {
            Ok(sol) => {
                *out = Box::into_raw(Box::new(AalgPetrov(sol)));
                AalgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `p` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn aalg_petrov_free(p: *mut AalgPetrov) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Dimension n, alpha and beta. Any output may be NULL.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn aalg_petrov_params(
    p: *const AalgPetrov,
    n: *mut usize,
    alpha: *mut f64,
    beta: *mut f64,
) -> AalgStatus {
    let Some(p) = p.as_ref() else {
        return null("petrov");
    };
    if let Some(n) = n.as_mut() {
        *n = p.0.dim();
    }
    if let Some(a) = alpha.as_mut() {
        *a = p.0.alpha();
    }
    if let Some(b) = beta.as_mut() {
        *b = p.0.beta();
    }
    AalgStatus::Ok
}

/// Coordinate metric at the point `x` (n doubles), written as n*n doubles.
///
/// # Safety
/// `p` must be a live handle, `x` must hold n doubles and `out` n*n.
#[no_mangle]
pub unsafe extern "C" fn aalg_petrov_metric(
    p: *const AalgPetrov,
    x: *const f64,
    out: *mut f64,
) -> AalgStatus {
    guard(|| {
        let Some(p) = p.as_ref() else {
            return null("petrov");
        };
        let Some(x) = input(x, p.0.dim()) else {
            return null("x");
        };
        if out.is_null() {
            return null("out");
        }
        match p.0.metric_at(x) {
            Ok(g) => {
                write_matrix(&g, out);
                AalgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// The metric Lie algebra underlying the solution, as a new handle.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aalg_petrov_structure(
    p: *const AalgPetrov,
    out: *mut *mut AalgStructure,
) -> AalgStatus {
    guard(|| {
        let Some(p) = p.as_ref() else {
            return null("petrov");
        };
        if out.is_null() {
            return null("out");
        }
        *out = Box::into_raw(Box::new(AalgStructure(p.0.structure())));
        AalgStatus::Ok
    })
}

/// Integrates the left-invariant geodesic equation from `u0` (n doubles) to `t_end`.
///
/// # Safety
/// `p` must be a live handle, `u0` must hold n doubles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aalg_geodesic_integrate(
    p: *const AalgPetrov,
    u0: *const f64,
    t_end: f64,
    tol: f64,
    out: *mut *mut AalgTrajectory,
) -> AalgStatus {
    guard(|| {
        let Some(p) = p.as_ref() else {
            return null("petrov");
        };
        let Some(u0) = input(u0, p.0.dim()) else {
            return null("u0");
        };
        if out.is_null() {
            return null("out");
        }
        match integrate_geodesic(&p.0, u0, t_end, tol) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(AalgTrajectory(t)));
                AalgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `t` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn aalg_trajectory_free(t: *mut AalgTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of accepted samples, or 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aalg_trajectory_len(t: *const AalgTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.0.samples.len())
}

/// Largest deviation of the conserved quantity from its initial value.
///
/// # Safety
/// `t` must be NULL or a live handle. Returns NaN for NULL.
#[no_mangle]
pub unsafe extern "C" fn aalg_trajectory_max_drift(t: *const AalgTrajectory) -> f64 {
    t.as_ref().map_or(f64::NAN, |t| t.0.max_q_drift)
}

/// Sample `index`: its time and the n components of u.
///
/// # Safety
/// `t` must be a live handle, `time` writable and `u` must hold n doubles.
#[no_mangle]
pub unsafe extern "C" fn aalg_trajectory_sample(
    t: *const AalgTrajectory,
    index: usize,
    time: *mut f64,
    u: *mut f64,
) -> AalgStatus {
    let Some(t) = t.as_ref() else {
        return null("trajectory");
    };
    let Some(s) = t.0.samples.get(index) else {
        return fail(Error::Input(format!("sample {index} out of range")));
    };
    if let Some(time) = time.as_mut() {
        *time = s.t;
    }
    if !u.is_null() {
        ptr::copy_nonoverlapping(s.u.as_ptr(), u, s.u.len());
    }
    AalgStatus::Ok
}

/// Dense-output value of u at time `at` (n doubles).
///
/// # Safety
/// `t` must be a live handle and `u` must hold n doubles.
#[no_mangle]
pub unsafe extern "C" fn aalg_trajectory_interpolate(
    t: *const AalgTrajectory,
    at: f64,
    u: *mut f64,
) -> AalgStatus {
    guard(|| {
        let Some(t) = t.as_ref() else {
            return null("trajectory");
        };
        if u.is_null() {
            return null("u");
        }
        match t.0.interpolate(at) {
            Ok(v) => {
                ptr::copy_nonoverlapping(v.as_ptr(), u, v.len());
                AalgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Maximum of f on (0, pi) and where it is attained.
///
/// # Safety
/// `t_star` and `f_star` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aalg_f_max(
    search_tol: f64,
    t_star: *mut f64,
    f_star: *mut f64,
) -> AalgStatus {
    guard(|| {
        if t_star.is_null() || f_star.is_null() {
            return null("out");
        }
        match f_max(search_tol) {
            Ok(m) => {
                *t_star = m.t_star;
                *f_star = m.f_star;
                AalgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let p = aalg_last_error();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn structure_roundtrip() {
        let a = [0.0, 1.0, -1.0, 0.0];
        let mut s = ptr::null_mut();
        unsafe {
            assert_eq!(
                aalg_structure_new(AalgMetricCase::A, 3, a.as_ptr(), &mut s),
                AalgStatus::Ok
            );
            assert_eq!(aalg_structure_dim(s), 3);
            let mut ric = [1.0; 9];
            assert_eq!(aalg_structure_ricci(s, ric.as_mut_ptr()), AalgStatus::Ok);
            assert!(ric.iter().all(|x| x.abs() < 1e-14));
            let (mut rf, mut fl) = (false, false);
            assert_eq!(
                aalg_structure_flatness(s, 1e-10, &mut rf, &mut fl),
                AalgStatus::Ok
            );
            assert!(rf && fl);
            aalg_structure_free(s);
        }
    }

    #[test]
    fn errors_carry_codes_and_messages() {
        let mut p = ptr::null_mut();
        let l = [-1.0];
        unsafe {
            assert_eq!(
                aalg_petrov_new(l.as_ptr(), 1, false, &mut p),
                AalgStatus::Domain
            );
            assert!(p.is_null());
            assert!(last_error().contains("negate"));
            assert_eq!(
                aalg_petrov_new(ptr::null(), 2, false, &mut p),
                AalgStatus::NullPointer
            );
            assert_eq!(
                aalg_structure_new(AalgMetricCase::B, 2, ptr::null(), &mut ptr::null_mut()),
                AalgStatus::Input
            );
            assert_eq!(
                aalg_structure_ricci(ptr::null(), ptr::null_mut()),
                AalgStatus::NullPointer
            );
            aalg_petrov_free(ptr::null_mut());
        }
    }

    #[test]
    fn petrov_through_the_abi() {
        let l = [1.0];
        let mut p = ptr::null_mut();
        unsafe {
            assert_eq!(
                aalg_petrov_new(l.as_ptr(), 1, false, &mut p),
                AalgStatus::Ok
            );
            let (mut n, mut a, mut b) = (0, 0.0, 0.0);
            assert_eq!(
                aalg_petrov_params(p, &mut n, &mut a, &mut b),
                AalgStatus::Ok
            );
            assert_eq!((n, a), (4, -0.5));
            assert!((b - 3f64.sqrt() / 2.0).abs() < 1e-15);

            let mut g = [0.0; 16];
            let x = [0.0; 4];
            assert_eq!(
                aalg_petrov_metric(p, x.as_ptr(), g.as_mut_ptr()),
                AalgStatus::Ok
            );
            let expected = PetrovSolution::build(&l).unwrap().metric_at(&x).unwrap();
            for (k, gk) in g.iter().enumerate() {
                assert_eq!(*gk, expected[(k / 4, k % 4)]);
            }

            let mut s = ptr::null_mut();
            assert_eq!(aalg_petrov_structure(p, &mut s), AalgStatus::Ok);
            let mut rf = false;
            assert_eq!(
                aalg_structure_flatness(s, 1e-10, &mut rf, ptr::null_mut()),
                AalgStatus::Ok
            );
            assert!(rf);
            aalg_structure_free(s);

            let u0 = [0.6, 0.0, 0.0, 0.8];
            let mut t = ptr::null_mut();
            assert_eq!(
                aalg_geodesic_integrate(p, u0.as_ptr(), 10.0, 1e-10, &mut t),
                AalgStatus::Ok
            );
            let len = aalg_trajectory_len(t);
            assert!(len > 2);
            assert!(aalg_trajectory_max_drift(t) < 1e-8);
            let (mut time, mut u) = (0.0, [0.0; 4]);
            assert_eq!(
                aalg_trajectory_sample(t, len - 1, &mut time, u.as_mut_ptr()),
                AalgStatus::Ok
            );
            assert_eq!(time, 10.0);
            assert_eq!(
                aalg_trajectory_sample(t, len, &mut time, u.as_mut_ptr()),
                AalgStatus::Input
            );
            assert_eq!(
                aalg_trajectory_interpolate(t, 5.0, u.as_mut_ptr()),
                AalgStatus::Ok
            );
            aalg_trajectory_free(t);
            aalg_petrov_free(p);
        }
    }

    #[test]
    fn f_max_matches_core() {
        let (mut t, mut f) = (0.0, 0.0);
        unsafe {
            assert_eq!(aalg_f_max(1e-12, &mut t, &mut f), AalgStatus::Ok);
        }
        assert!((-2.73..-2.71).contains(&f));
        assert!(f < -std::f64::consts::PI.powi(2) / 4.0);
    }

    #[test]
    fn version_is_a_c_string() {
        let v = unsafe { CStr::from_ptr(aalg_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
