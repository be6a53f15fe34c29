//! C interface to `hyperspline`.
//!
//! Objects are opaque handles created by `hs_*_new`/`hs_*_build` and
//! released with the matching `hs_*_free`. Fallible calls return an
//! [`HsStatus`]; the message of the most recent failure on the calling
//! thread is available from [`hs_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hyperspline::geometry::{poincare_to_klein, DiskPoint};
use hyperspline::group::BolzaGroup;
use hyperspline::partition::{default_triangulation, Partition};
use hyperspline::spline::{conformality_dim_formula, SplineBasis, SplineError, SplineSpace};
use libc::size_t;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

pub struct HsGroup(BolzaGroup);
pub struct HsPartition(Partition);
pub struct HsBasis(SplineBasis);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: HsStatus, msg: impl Into<String>) -> HsStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> HsStatus) -> HsStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(HsStatus::Panic, "internal panic"))
}

fn spline_status(e: &SplineError) -> HsStatus {
    match e {
        SplineError::Group(_) => HsStatus::Numerical,
        _ => HsStatus::Validation,
    }
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn hs_group_new() -> *mut HsGroup {
    Box::into_raw(Box::new(HsGroup(BolzaGroup::new())))
}

/// # Safety
/// `group` must be NULL or a handle from [`hs_group_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_group_free(group: *mut HsGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Maps a Klein point into the fundamental octagon. `word` receives up to
/// `word_capacity` generator indices of the applied element (outermost
/// first) and `word_len` its full length.
///
/// # Safety
/// Pointers must be valid; `word` may be NULL when `word_capacity` is 0.
#[no_mangle]
pub unsafe extern "C" fn hs_canonicalize(
    group: *const HsGroup,
    x: f64,
    y: f64,
    out_x: *mut f64,
    out_y: *mut f64,
    word: *mut u8,
    word_capacity: size_t,
    word_len: *mut size_t,
) -> HsStatus {
    guard(|| {
        if group.is_null() || out_x.is_null() || out_y.is_null() || (word.is_null() && word_capacity > 0) {
            return fail(HsStatus::NullPointer, "null pointer argument");
        }
        let c = match (*group).0.canonicalize(&DiskPoint::klein(x, y)) {
            Ok(c) => c,
            Err(e) => return fail(HsStatus::Numerical, e.to_string()),
        };
        *out_x = c.point.x;
        *out_y = c.point.y;
        if !word_len.is_null() {
            *word_len = c.word.len();
        }
        let n = c.word.len().min(word_capacity);
        if n > 0 {
            ptr::copy_nonoverlapping(c.word.as_ptr(), word, n);
        }
        HsStatus::Ok
    })
}

/// # Safety
/// `out_x` and `out_y` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_poincare_to_klein(x: f64, y: f64, out_x: *mut f64, out_y: *mut f64) -> HsStatus {
    guard(|| {
        if out_x.is_null() || out_y.is_null() {
            return fail(HsStatus::NullPointer, "null pointer argument");
        }
        match poincare_to_klein(&DiskPoint::poincare(x, y)) {
            Ok(p) => {
                *out_x = p.x;
                *out_y = p.y;
                HsStatus::Ok
            }
            Err(e) => fail(HsStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Conformality solution-space dimension for `lines` generic concurrent
/// lines, `degree` and `smoothness`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_conformality_dim(lines: size_t, degree: size_t, smoothness: size_t, out: *mut size_t) -> HsStatus {
    guard(|| {
        if out.is_null() {
            return fail(HsStatus::NullPointer, "null pointer argument");
        }
        match conformality_dim_formula(lines, degree, smoothness) {
            Ok(d) => {
                *out = d;
                HsStatus::Ok
            }
            Err(e) => fail(HsStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// The eight-triangle star triangulation of the octagon.
///
/// # Safety
/// `group` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_partition_default(group: *const HsGroup) -> *mut HsPartition {
    if group.is_null() {
        set_error("null pointer argument");
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(HsPartition(default_triangulation(&(*group).0))))
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_partition_from_json(
    group: *const HsGroup,
    json: *const c_char,
    out: *mut *mut HsPartition,
) -> HsStatus {
    guard(|| {
        if group.is_null() || json.is_null() || out.is_null() {
            return fail(HsStatus::NullPointer, "null pointer argument");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(HsStatus::InvalidArgument, "partition JSON is not UTF-8");
        };
        match Partition::from_json(text, &(*group).0) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(HsPartition(p)));
                HsStatus::Ok
            }
            Err(e) => fail(HsStatus::Validation, e.to_string()),
        }
    })
}

/// # Safety
/// `partition` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_partition_cell_count(partition: *const HsPartition) -> size_t {
    if partition.is_null() {
        return 0;
    }
    (*partition).0.cells().len()
}

/// # Safety
/// `partition` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_partition_free(partition: *mut HsPartition) {
    if !partition.is_null() {
        drop(Box::from_raw(partition));
    }
}

/// Assembles and solves for a basis of periodic splines of `degree` and
/// `smoothness` (−1 for none) on `partition`.
///
/// # Safety
/// Handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_basis_build(
    group: *const HsGroup,
    partition: *const HsPartition,
    degree: size_t,
    smoothness: i64,
    tolerance: f64,
    out: *mut *mut HsBasis,
) -> HsStatus {
    guard(|| {
        if group.is_null() || partition.is_null() || out.is_null() {
            return fail(HsStatus::NullPointer, "null pointer argument");
        }
        let result = SplineSpace::new((*group).0.clone(), (*partition).0.clone(), degree, smoothness)
            .and_then(|space| space.assemble().and_then(|sys| space.solve_basis(&sys, tolerance)));
        match result {
            Ok(b) if !b.residual_ok() => fail(
                HsStatus::Numerical,
                format!("max residual {:e} exceeds bound", b.diagnostics.max_residual),
            ),
            Ok(b) => {
                *out = Box::into_raw(Box::new(HsBasis(b)));
                HsStatus::Ok
            }
            Err(e) => fail(spline_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `basis` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_basis_dimension(basis: *const HsBasis) -> size_t {
    if basis.is_null() {
        return 0;
    }
    (*basis).0.dimension()
}

/// # Safety
/// `basis` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_basis_max_residual(basis: *const HsBasis) -> f64 {
    if basis.is_null() {
        return f64::NAN;
    }
    (*basis).0.diagnostics.max_residual
}

/// Writes the value of every basis spline at the Klein point `(x, y)`.
///
/// # Safety
/// `values` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn hs_basis_eval(
    basis: *const HsBasis,
    x: f64,
    y: f64,
    values: *mut f64,
    capacity: size_t,
) -> HsStatus {
    guard(|| {
        if basis.is_null() || values.is_null() {
            return fail(HsStatus::NullPointer, "null pointer argument");
        }
        let b = &(*basis).0;
        if capacity < b.dimension() {
            return fail(HsStatus::BufferTooSmall, format!("need {} values", b.dimension()));
        }
        let p = DiskPoint::klein(x, y);
        if !(x.is_finite() && y.is_finite()) || !p.is_interior() {
            return fail(HsStatus::InvalidArgument, format!("point ({x}, {y}) is not inside the open unit disk"));
        }
        match b.eval(&p) {
            Ok(v) => {
                ptr::copy_nonoverlapping(v.as_ptr(), values, v.len());
                HsStatus::Ok
            }
            Err(e) => fail(spline_status(&e), e.to_string()),
        }
    })
}

/// Basis as JSON. Release with [`hs_string_free`]. NULL on failure.
///
/// # Safety
/// `basis` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_basis_to_json(basis: *const HsBasis) -> *mut c_char {
    if basis.is_null() {
        set_error("null pointer argument");
        return ptr::null_mut();
    }
    CString::new((*basis).0.to_json()).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `basis` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_basis_free(basis: *mut HsBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn hs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
