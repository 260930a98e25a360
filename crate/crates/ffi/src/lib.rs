//! C ABI over `kflat-core`.
//!
//! Objects are opaque handles created by `kflat_*_new`-style constructors and
//! released with the matching `kflat_*_free`. Every fallible call returns a
//! [`KflatStatus`]; on failure a message is available from
//! [`kflat_last_error_message`] on the same thread. Vectors are passed as
//! `(pointer, dim)` and lists of vectors as row-major arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kflat_core::cli::{self, Common, Format};
use kflat_core::distance::{dist_body_body, dist_body_flat};
use kflat_core::helly::{colorful_bound, helly_bound, kflat_bound};
use kflat_core::kflat::{reduce_and_lift, FlatCertificate};
use kflat_core::{AffineFlat, ConvexBody, Direction, Error, Family, SolverConfig, Vector};

/// Status codes returned by every fallible call.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KflatStatus {
    Ok = 0,
    NullPointer = 1,
    Dimension = 2,
    Domain = 3,
    UnsupportedProjection = 4,
    IterationLimit = 5,
    Indeterminate = 6,
    Input = 7,
    InvalidUtf8 = 8,
    Panic = 9,
}

/// A convex body: ball, segment, V-polytope or half-space.
pub struct KflatBody(ConvexBody);

/// An affine flat `p + span(basis)`.
pub struct KflatFlat(AffineFlat);

/// A finite family of convex bodies.
pub struct KflatFamily(Family);

/// Result of the projection-reduction solver.
pub struct KflatCertificate(FlatCertificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> KflatStatus {
    match err {
        Error::Dimension { .. } => KflatStatus::Dimension,
        Error::Domain(_) => KflatStatus::Domain,
        Error::UnsupportedProjection(_) => KflatStatus::UnsupportedProjection,
        Error::IterationLimit { .. } => KflatStatus::IterationLimit,
        Error::Indeterminate { .. } => KflatStatus::Indeterminate,
        Error::Input(_) => KflatStatus::Input,
    }
}

struct Fail(KflatStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(KflatStatus::NullPointer, format!("null pointer: {what}"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KflatStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KflatStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            KflatStatus::Panic
        }
    }
}

unsafe fn vector(p: *const f64, dim: usize, what: &str) -> Result<Vector, Fail> {
    if dim == 0 {
        return Err(Fail(KflatStatus::Domain, format!("{what}: dimension must be positive")));
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(Vector::from_column_slice(std::slice::from_raw_parts(p, dim)))
}

unsafe fn rows(p: *const f64, count: usize, dim: usize, what: &str) -> Result<Vec<Vector>, Fail> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(null(what));
    }
    let data = std::slice::from_raw_parts(p, count * dim);
    Ok(data.chunks(dim).map(Vector::from_column_slice).collect())
}

unsafe fn out<T>(dst: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if dst.is_null() {
        return Err(null(what));
    }
    dst.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(KflatStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn kflat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kflat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `√((n−r)/(r(n−1)))`.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kflat_helly_bound(n: usize, r: usize, result: *mut f64) -> KflatStatus {
    guard(|| out(result, helly_bound(n, r)?, "result"))
}

/// `1/√r`.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kflat_colorful_bound(r: usize, result: *mut f64) -> KflatStatus {
    guard(|| out(result, colorful_bound(r)?, "result"))
}

/// `1/√(r−k)`.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kflat_kflat_bound(r: usize, k: usize, result: *mut f64) -> KflatStatus {
    guard(|| out(result, kflat_bound(r, k)?, "result"))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Closed ball of `radius` around `center`.
///
/// # Safety
/// `center` must point to `dim` doubles and `body` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kflat_body_ball(
    dim: usize,
    center: *const f64,
    radius: f64,
    body: *mut *mut KflatBody,
) -> KflatStatus {
    guard(|| {
        let b = ConvexBody::ball(vector(center, dim, "center")?, radius)?;
        out(body, boxed(KflatBody(b)), "body")
    })
}

/// Segment `[a, b]`.
///
/// # Safety
/// `a` and `b` must point to `dim` doubles and `body` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kflat_body_segment(
    dim: usize,
    a: *const f64,
    b: *const f64,
    body: *mut *mut KflatBody,
) -> KflatStatus {
    guard(|| {
        let s = ConvexBody::segment(vector(a, dim, "a")?, vector(b, dim, "b")?)?;
        out(body, boxed(KflatBody(s)), "body")
    })
}

/// Convex hull of `count` points stored row-major in `vertices`.
///
/// # Safety
/// `vertices` must point to `count * dim` doubles and `body` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kflat_body_polytope(
    dim: usize,
    count: usize,
    vertices: *const f64,
    body: *mut *mut KflatBody,
) -> KflatStatus {
    guard(|| {
        if dim == 0 {
            return Err(Fail(KflatStatus::Domain, "dimension must be positive".into()));
        }
        let p = ConvexBody::vpolytope(rows(vertices, count, dim, "vertices")?)?;
        out(body, boxed(KflatBody(p)), "body")
    })
}

/// Half-space `{x : ⟨n, x⟩ ≥ offset}` with `n` the normalized `normal`.
///
/// # Safety
/// `normal` must point to `dim` doubles and `body` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kflat_body_halfspace(
    dim: usize,
    normal: *const f64,
    offset: f64,
    body: *mut *mut KflatBody,
) -> KflatStatus {
    guard(|| {
        let h = ConvexBody::halfspace(vector(normal, dim, "normal")?, offset)?;
        out(body, boxed(KflatBody(h)), "body")
    })
}

/// Ambient dimension of a body, 0 for null.
///
/// # Safety
/// `body` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kflat_body_dim(body: *const KflatBody) -> usize {
    body.as_ref().map_or(0, |b| b.0.dim())
}

/// Distance from the point `q` to the body.
///
/// # Safety
/// `q` must point to the body's dimension of doubles and `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kflat_body_distance_to_point(
    body: *const KflatBody,
    q: *const f64,
    result: *mut f64,
) -> KflatStatus {
    guard(|| {
        let b = handle(body, "body")?;
        let q = vector(q, b.0.dim(), "q")?;
        out(result, b.0.distance_to_point(&q)?, "result")
    })
}

/// # Safety
/// `body` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kflat_body_free(body: *mut KflatBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Flat through `point` spanned by `k` row-major vectors in `basis`
/// (orthonormalized internally; `k = 0` gives a point).
///
/// # Safety
/// `point` must hold `dim` doubles, `basis` `k * dim` doubles, and `flat` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kflat_flat_new(
    dim: usize,
    point: *const f64,
    k: usize,
    basis: *const f64,
    flat: *mut *mut KflatFlat,
) -> KflatStatus {
    guard(|| {
        let p = vector(point, dim, "point")?;
        let f = AffineFlat::new(p, &rows(basis, k, dim, "basis")?)?;
        out(flat, boxed(KflatFlat(f)), "flat")
    })
}

/// Ambient dimension of a flat, 0 for null.
///
/// # Safety
/// `flat` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kflat_flat_ambient_dim(flat: *const KflatFlat) -> usize {
    flat.as_ref().map_or(0, |f| f.0.ambient_dim())
}

/// Dimension `k` of a flat, 0 for null.
///
/// # Safety
/// `flat` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kflat_flat_k(flat: *const KflatFlat) -> usize {
    flat.as_ref().map_or(0, |f| f.0.k())
}

/// Copies the base point (the point of the flat closest to the origin) into
/// `buffer`, which must hold the ambient dimension of doubles.
///
/// # Safety
/// `buffer` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kflat_flat_base(flat: *const KflatFlat, buffer: *mut f64, len: usize) -> KflatStatus {
    guard(|| {
        let f = handle(flat, "flat")?;
        copy_into(f.0.base(), buffer, len)
    })
}

/// Copies the orthonormal basis, row-major, into `buffer` of `len ≥ k * dim` doubles.
///
/// # Safety
/// `buffer` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kflat_flat_basis(flat: *const KflatFlat, buffer: *mut f64, len: usize) -> KflatStatus {
    guard(|| {
        let f = handle(flat, "flat")?;
        let d = f.0.ambient_dim();
        let need = d * f.0.k();
        if len < need {
            return Err(Fail(
                KflatStatus::Dimension,
                format!("buffer holds {len} doubles, need {need}"),
            ));
        }
        for (i, b) in f.0.basis().iter().enumerate() {
            copy_into(b, buffer.add(i * d), d)?;
        }
        Ok(())
    })
}

unsafe fn copy_into(v: &Vector, buffer: *mut f64, len: usize) -> Result<(), Fail> {
    if len < v.len() {
        return Err(Fail(
            KflatStatus::Dimension,
            format!("buffer holds {len} doubles, need {}", v.len()),
        ));
    }
    if buffer.is_null() {
        return Err(null("buffer"));
    }
    ptr::copy_nonoverlapping(v.as_slice().as_ptr(), buffer, v.len());
    Ok(())
}

/// # Safety
/// `flat` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kflat_flat_free(flat: *mut KflatFlat) {
    if !flat.is_null() {
        drop(Box::from_raw(flat));
    }
}

/// Empty family named `name` (may be null).
///
/// # Safety
/// `name` must be null or a NUL-terminated string, and `family` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kflat_family_new(name: *const c_char, family: *mut *mut KflatFamily) -> KflatStatus {
    guard(|| {
        let n = if name.is_null() { "" } else { text(name, "name")? };
        out(family, boxed(KflatFamily(Family::new(n, Vec::new())?)), "family")
    })
}

/// Appends a copy of `body`.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn kflat_family_push(family: *mut KflatFamily, body: *const KflatBody) -> KflatStatus {
    guard(|| {
        let f = family.as_mut().ok_or_else(|| null("family"))?;
        let b = handle(body, "body")?;
        if let Some(d) = f.0.dim() {
            if d != b.0.dim() {
                return Err(Error::Dimension {
                    expected: d,
                    got: b.0.dim(),
                }
                .into());
            }
        }
        f.0.bodies.push(b.0.clone());
        Ok(())
    })
}

/// Number of bodies, 0 for null.
///
/// # Safety
/// `family` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kflat_family_len(family: *const KflatFamily) -> usize {
    family.as_ref().map_or(0, |f| f.0.len())
}

/// # Safety
/// `family` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kflat_family_free(family: *mut KflatFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Distance between a body and a flat.
///
/// # Safety
/// Handles must be live and `result` valid.
#[no_mangle]
pub unsafe extern "C" fn kflat_dist_body_flat(
    body: *const KflatBody,
    flat: *const KflatFlat,
    result: *mut f64,
) -> KflatStatus {
    guard(|| {
        let d = dist_body_flat(&handle(body, "body")?.0, &handle(flat, "flat")?.0)?;
        out(result, d, "result")
    })
}

/// Distance between two bodies.
///
/// # Safety
/// Handles must be live and `result` valid.
#[no_mangle]
pub unsafe extern "C" fn kflat_dist_body_body(
    a: *const KflatBody,
    b: *const KflatBody,
    tol: f64,
    result: *mut f64,
) -> KflatStatus {
    guard(|| {
        let cfg = SolverConfig {
            tol,
            ..SolverConfig::default()
        };
        let d = dist_body_body(&handle(a, "a")?.0, &handle(b, "b")?.0, &cfg)?;
        out(result, d, "result")
    })
}

/// Projects families `k..r` orthogonally to the `k` row-major `directions`,
/// solves the colorful point problem there and lifts the answer to a k-flat.
///
/// # Safety
/// `families` must hold `r` live handles, `directions` `k * dim` doubles, and
/// `certificate` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kflat_reduce_and_lift(
    families: *const *const KflatFamily,
    r: usize,
    directions: *const f64,
    k: usize,
    tol: f64,
    seed: u64,
    certificate: *mut *mut KflatCertificate,
) -> KflatStatus {
    guard(|| {
        if families.is_null() {
            return Err(null("families"));
        }
        let fams: Vec<Family> = std::slice::from_raw_parts(families, r)
            .iter()
            .map(|p| handle(*p, "family").map(|f| f.0.clone()))
            .collect::<Result<_, _>>()?;
        let dim = fams.iter().find_map(Family::dim).unwrap_or(0);
        let dirs = rows(directions, k, dim, "directions")?
            .into_iter()
            .map(Direction::new)
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = SolverConfig {
            tol,
            seed,
            ..SolverConfig::default()
        };
        let cert = reduce_and_lift(&fams, &dirs, &cfg)?;
        out(certificate, boxed(KflatCertificate(cert)), "certificate")
    })
}

/// Largest distance from the certified flat to a body of the winning family.
///
/// # Safety
/// `certificate` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kflat_certificate_max_distance(certificate: *const KflatCertificate) -> f64 {
    certificate.as_ref().map_or(f64::NAN, |c| c.0.max_distance)
}

/// The bound `1/√(r−k)` the certificate is measured against.
///
/// # Safety
/// `certificate` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kflat_certificate_bound(certificate: *const KflatCertificate) -> f64 {
    certificate.as_ref().map_or(f64::NAN, |c| c.0.bound)
}

/// 0-based index of the winning family, `SIZE_MAX` for null.
///
/// # Safety
/// `certificate` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kflat_certificate_family(certificate: *const KflatCertificate) -> usize {
    certificate.as_ref().map_or(usize::MAX, |c| c.0.family_index)
}

/// New flat handle holding a copy of the certified flat.
///
/// # Safety
/// `certificate` must be live and `flat` valid.
#[no_mangle]
pub unsafe extern "C" fn kflat_certificate_flat(
    certificate: *const KflatCertificate,
    flat: *mut *mut KflatFlat,
) -> KflatStatus {
    guard(|| {
        let c = handle(certificate, "certificate")?;
        out(flat, boxed(KflatFlat(c.0.flat.clone())), "flat")
    })
}

/// # Safety
/// `certificate` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kflat_certificate_free(certificate: *mut KflatCertificate) {
    if !certificate.is_null() {
        drop(Box::from_raw(certificate));
    }
}

/// Runs the full `solve` pipeline on an instance file given as JSON text and
/// returns the JSON report in `report` (free with [`kflat_string_free`]).
/// `truncation = 0` keeps the per-family truncations; `passed` receives 1 when
/// every claim holds.
///
/// # Safety
/// `instance_json` must be NUL-terminated; `report` and `passed` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kflat_solve_json(
    instance_json: *const c_char,
    truncation: usize,
    tol: f64,
    seed: u64,
    report: *mut *mut c_char,
    passed: *mut i32,
) -> KflatStatus {
    guard(|| {
        let json = text(instance_json, "instance_json")?;
        let common = Common {
            tol,
            seed,
            format: Format::Json,
        };
        let outcome = cli::solve_json(json, (truncation > 0).then_some(truncation), &common)?;
        let s = CString::new(outcome.output).map_err(|_| Fail(KflatStatus::Input, "report contains NUL".into()))?;
        out(passed, outcome.passed as i32, "passed")?;
        out(report, s.into_raw(), "report")
    })
}
