//! C ABI over `geolattice`.
//!
//! Lattices are opaque `GlLattice` handles created by the `gl_lattice_*`
//! constructors and released with `gl_lattice_free`. Every function returns a
//! `GlStatus`; results go through out-pointers. Exact values (rationals,
//! polynomials) are returned as JSON strings owned by the caller and released
//! with `gl_string_free`. Floating-point arrays use caller-provided buffers:
//! the required length is always written to `*len`, and `GL_STATUS_BUFFER_TOO_SMALL`
//! is returned when `capacity` is short.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use geolattice::diamond::hamiltonian;
use geolattice::lattice::{
    build_affine, build_boolean, build_product, build_projective, build_uniform, parse_lattice, FiniteLattice,
    LatticeError,
};
use geolattice::radial::{jacobi_from_compression, JacobiData};
use geolattice::spectral::{eigendecompose, resolvent, vacuum_moments_radial};
use serde_json::json;

/// Result code of every exported function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NotGeometric = 4,
    TooLarge = 5,
    NoConvergence = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// Opaque lattice handle.
pub struct GlLattice {
    lattice: FiniteLattice,
}

impl GlLattice {
    fn jacobi(&self) -> Result<JacobiData, GlStatus> {
        jacobi_from_compression(&self.lattice, &hamiltonian(&self.lattice)).map_err(|_| GlStatus::NotGeometric)
    }
}

fn guard(f: impl FnOnce() -> Result<(), GlStatus>) -> GlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GlStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => GlStatus::Internal,
    }
}

fn lattice_status(e: LatticeError) -> GlStatus {
    match e {
        LatticeError::SizeBound { .. } => GlStatus::TooLarge,
        LatticeError::NotPrime(_) | LatticeError::InvalidParameters(_) => GlStatus::InvalidArgument,
    }
}

unsafe fn handle<'a>(l: *const GlLattice) -> Result<&'a GlLattice, GlStatus> {
    l.as_ref().ok_or(GlStatus::NullPointer)
}

unsafe fn emit_handle(out: *mut *mut GlLattice, build: impl FnOnce() -> Result<FiniteLattice, GlStatus>) -> GlStatus {
    if out.is_null() {
        return GlStatus::NullPointer;
    }
    guard(|| {
        let lattice = build()?;
        *out = Box::into_raw(Box::new(GlLattice { lattice }));
        Ok(())
    })
}

unsafe fn emit_string(out: *mut *mut c_char, value: serde_json::Value) -> Result<(), GlStatus> {
    let text = CString::new(value.to_string()).map_err(|_| GlStatus::Internal)?;
    *out = text.into_raw();
    Ok(())
}

unsafe fn emit_floats(values: &[f64], out: *mut f64, capacity: usize, len: *mut usize) -> Result<(), GlStatus> {
    *len = values.len();
    if values.len() > capacity {
        return Err(GlStatus::BufferTooSmall);
    }
    if !values.is_empty() {
        if out.is_null() {
            return Err(GlStatus::NullPointer);
        }
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    }
    Ok(())
}

/// Boolean lattice B_n.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_boolean(n: u32, out: *mut *mut GlLattice) -> GlStatus {
    emit_handle(out, || build_boolean(n).map_err(lattice_status))
}

/// Uniform matroid lattice U(r, m).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_uniform(r: u32, m: u32, out: *mut *mut GlLattice) -> GlStatus {
    emit_handle(out, || build_uniform(r, m).map_err(lattice_status))
}

/// Subspace lattice of F_q^r (rank r); `q` must be prime.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_projective(r: u32, q: u32, out: *mut *mut GlLattice) -> GlStatus {
    emit_handle(out, || build_projective(r, q).map_err(lattice_status))
}

/// Affine flats of F_q^r with an adjoined bottom; `q` must be prime.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_affine(r: u32, q: u32, out: *mut *mut GlLattice) -> GlStatus {
    emit_handle(out, || build_affine(r, q).map_err(lattice_status))
}

/// Direct product of two lattices. The factors stay owned by the caller.
///
/// # Safety
/// `left` and `right` must be live handles or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_product(
    left: *const GlLattice,
    right: *const GlLattice,
    out: *mut *mut GlLattice,
) -> GlStatus {
    emit_handle(out, || {
        let (a, b) = (handle(left)?, handle(right)?);
        build_product(&a.lattice, &b.lattice).map_err(lattice_status)
    })
}

/// Parses a lattice document (`{"elements": [...], "covers": [...]}`).
/// Documents that parse but fail a geometric-lattice check are rejected
/// with `GL_STATUS_NOT_GEOMETRIC`.
///
/// # Safety
/// `json` must be a NUL-terminated string or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_from_json(json: *const c_char, out: *mut *mut GlLattice) -> GlStatus {
    emit_handle(out, || {
        if json.is_null() {
            return Err(GlStatus::NullPointer);
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| GlStatus::ParseError)?;
        let parsed = parse_lattice(text).map_err(|e| match e {
            geolattice::lattice::ParseError::TooLarge { .. } => GlStatus::TooLarge,
            _ => GlStatus::ParseError,
        })?;
        if parsed.report.all_passed() {
            Ok(parsed.lattice)
        } else {
            Err(GlStatus::NotGeometric)
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `l` must come from a `gl_lattice_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_free(l: *mut GlLattice) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Number of elements.
///
/// # Safety
/// `l` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_size(l: *const GlLattice, out: *mut usize) -> GlStatus {
    if out.is_null() {
        return GlStatus::NullPointer;
    }
    guard(|| {
        *out = handle(l)?.lattice.len();
        Ok(())
    })
}

/// Rank of the top element.
///
/// # Safety
/// `l` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_rank(l: *const GlLattice, out: *mut u32) -> GlStatus {
    if out.is_null() {
        return GlStatus::NullPointer;
    }
    guard(|| {
        *out = handle(l)?.lattice.top_rank();
        Ok(())
    })
}

/// Off-diagonal Jacobi coefficients β_0..β_{r−1} as doubles.
///
/// # Safety
/// `l` must be a live handle, `len` valid for writes and `beta` valid for
/// `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn gl_jacobi_beta(
    l: *const GlLattice,
    beta: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> GlStatus {
    if len.is_null() {
        return GlStatus::NullPointer;
    }
    guard(|| {
        let j = handle(l)?.jacobi()?;
        emit_floats(&j.beta, beta, capacity, len)
    })
}

/// Exact Jacobi data as JSON: layer sizes, cover weights and β² as `"p/q"` strings.
///
/// # Safety
/// `l` must be a live handle; `out` must be valid for writes. Free the
/// result with `gl_string_free`.
#[no_mangle]
pub unsafe extern "C" fn gl_jacobi_json(l: *const GlLattice, out: *mut *mut c_char) -> GlStatus {
    if out.is_null() {
        return GlStatus::NullPointer;
    }
    guard(|| {
        let j = handle(l)?.jacobi()?;
        emit_string(out, serde_json::to_value(&j).map_err(|_| GlStatus::Internal)?)
    })
}

/// Vacuum spectral measure: nodes ascending, with their weights.
///
/// # Safety
/// `l` must be a live handle, `len` valid for writes, and `nodes`/`weights`
/// each valid for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn gl_spectrum(
    l: *const GlLattice,
    nodes: *mut f64,
    weights: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> GlStatus {
    if len.is_null() {
        return GlStatus::NullPointer;
    }
    guard(|| {
        let mu = eigendecompose(&handle(l)?.jacobi()?).map_err(|_| GlStatus::NoConvergence)?;
        let (xs, ws): (Vec<f64>, Vec<f64>) = mu.atoms.iter().copied().unzip();
        emit_floats(&xs, nodes, capacity, len)?;
        emit_floats(&ws, weights, capacity, len)
    })
}

/// Vacuum resolvent G(t) as JSON `{"numerator": [...], "denominator": [...]}`
/// with exact coefficients in increasing degree.
///
/// # Safety
/// `l` must be a live handle; `out` must be valid for writes. Free the
/// result with `gl_string_free`.
#[no_mangle]
pub unsafe extern "C" fn gl_resolvent_json(l: *const GlLattice, out: *mut *mut c_char) -> GlStatus {
    if out.is_null() {
        return GlStatus::NullPointer;
    }
    guard(|| {
        let g = resolvent(&handle(l)?.jacobi()?).reduce();
        let value = json!({
            "numerator": g.numerator().coefficient_strings(),
            "denominator": g.denominator().coefficient_strings(),
        });
        emit_string(out, value)
    })
}

/// Exact vacuum moments m_0..m_{max_k} as a JSON array of `"p/q"` strings.
///
/// # Safety
/// `l` must be a live handle; `out` must be valid for writes. Free the
/// result with `gl_string_free`.
#[no_mangle]
pub unsafe extern "C" fn gl_moments_json(l: *const GlLattice, max_k: usize, out: *mut *mut c_char) -> GlStatus {
    if out.is_null() {
        return GlStatus::NullPointer;
    }
    guard(|| {
        let m = vacuum_moments_radial(&handle(l)?.jacobi()?, max_k);
        let values: Vec<String> = m.values.iter().map(ToString::to_string).collect();
        emit_string(out, json!(values))
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn gl_status_message(status: GlStatus) -> *const c_char {
    let text: &'static CStr = match status {
        GlStatus::Ok => c"ok",
        GlStatus::NullPointer => c"null pointer argument",
        GlStatus::InvalidArgument => c"invalid lattice parameters",
        GlStatus::ParseError => c"malformed lattice document",
        GlStatus::NotGeometric => c"not a geometric lattice",
        GlStatus::TooLarge => c"lattice exceeds the size limit",
        GlStatus::NoConvergence => c"eigensolver did not converge",
        GlStatus::BufferTooSmall => c"output buffer too small",
        GlStatus::Internal => c"internal error",
    };
    text.as_ptr()
}
