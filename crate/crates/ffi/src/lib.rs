//! C ABI over `affine_fractals`.
//!
//! Meshes live behind the opaque `AfMesh` handle. Every fallible call returns
//! an `AfStatus`; on failure `af_last_error_message` describes the error for
//! the calling thread. Strings handed out by the library are released with
//! `af_string_free`, meshes with `af_mesh_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use affine_fractals::generator::{
    assemble_mesh, assemble_mesh_by_transport, default_frame, generate_points_recurrence,
};
use affine_fractals::index_sets::is_member;
use affine_fractals::rational::to_f64;
use affine_fractals::{
    count_closed_form, export_json, export_obj, export_svg, import_frame, Artifact,
    Error, ExportStyle, Family, FractalKind, FractalMesh, Geometry,
};
use num_traits::ToPrimitive;

pub const AF_FAMILY_SPONGE: u32 = 0;
pub const AF_FAMILY_SIMPLEX: u32 = 1;

pub const AF_FORMAT_SVG: u32 = 0;
pub const AF_FORMAT_OBJ: u32 = 1;
pub const AF_FORMAT_JSON: u32 = 2;

/// Largest point box or cell count a single call will build.
pub const AF_MAX_ELEMENTS: u64 = 10_000_000;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AfStatus {
    Ok = 0,
    InvalidArgument = 2,
    Validation = 3,
    Io = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque mesh handle.
pub struct AfMesh {
    mesh: FractalMesh,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(AfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DegenerateFrame(_) | Error::Precondition(_) => AfStatus::Validation,
            Error::Io(_) => AfStatus::Io,
            Error::Structure(_) | Error::Domain(_) | Error::Parse { .. } => AfStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(AfStatus::InvalidArgument, msg.into())
}

fn null(what: &str) -> Fail {
    Fail(AfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard<F>(body: F) -> AfStatus
where
    F: FnOnce() -> Result<(), Fail>,
{
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AfStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AfStatus::Panic
        }
    }
}

fn family(code: u32) -> Result<Family, Fail> {
    match code {
        AF_FAMILY_SPONGE => Ok(Family::Sponge),
        AF_FAMILY_SIMPLEX => Ok(Family::Simplex),
        _ => Err(invalid(format!("unknown family code {code}"))),
    }
}

fn kind(family_code: u32, n: usize, m: usize) -> Result<FractalKind, Fail> {
    if n > 6 || m > 6 {
        return Err(invalid(format!("n and m must be at most 6, got n={n}, m={m}")));
    }
    Ok(FractalKind::new(family(family_code)?, n, m)?)
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn mesh_ref<'a>(mesh: *const AfMesh) -> Result<&'a AfMesh, Fail> {
    mesh.as_ref().ok_or_else(|| null("mesh"))
}

fn build(kind: &FractalKind, frame: &affine_fractals::Frame) -> Result<FractalMesh, Fail> {
    let points = (kind.point_extent() as u128).pow(kind.n() as u32);
    if points <= AF_MAX_ELEMENTS as u128 {
        let lattice = generate_points_recurrence(frame, &vec![kind.point_extent(); kind.n()])?;
        return Ok(assemble_mesh(kind, &lattice)?);
    }
    let cells = count_closed_form(kind).to_u128().unwrap_or(u128::MAX);
    if cells > AF_MAX_ELEMENTS as u128 {
        return Err(invalid(format!("{cells} cells exceed the limit of {AF_MAX_ELEMENTS}")));
    }
    Ok(assemble_mesh_by_transport(kind, frame)?)
}

fn hand_out(mesh: FractalMesh, out: *mut *mut AfMesh) {
    let handle = Box::into_raw(Box::new(AfMesh { mesh }));
    // SAFETY: caller checked `out` for null.
    unsafe { *out = handle };
}

/// Builds a mesh from the default frame of `family` in dimension `n`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn af_mesh_generate(
    family: u32,
    n: usize,
    m: usize,
    out: *mut *mut AfMesh,
) -> AfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let k = kind(family, n, m)?;
        let frame = default_frame(k.family(), n)?;
        hand_out(build(&k, &frame)?, out);
        Ok(())
    })
}

/// Builds a mesh from a frame given as a JSON document; `n` is taken from
/// the frame.
///
/// # Safety
/// `frame_json` must be a NUL-terminated string; `out` as in
/// `af_mesh_generate`.
#[no_mangle]
pub unsafe extern "C" fn af_mesh_generate_with_frame_json(
    family: u32,
    m: usize,
    frame_json: *const c_char,
    out: *mut *mut AfMesh,
) -> AfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = c_str(frame_json, "frame_json")?;
        let frame = import_frame(text.as_bytes())?;
        let k = kind(family, frame.dimension(), m)?;
        hand_out(build(&k, &frame)?, out);
        Ok(())
    })
}

/// Releases a mesh. Null is ignored.
///
/// # Safety
/// `mesh` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn af_mesh_free(mesh: *mut AfMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// # Safety
/// `mesh` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn af_mesh_cell_count(mesh: *const AfMesh, out: *mut usize) -> AfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = m.mesh.cells().len();
        Ok(())
    })
}

/// Number of coordinates per vertex.
///
/// # Safety
/// `mesh` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn af_mesh_ambient_dim(mesh: *const AfMesh, out: *mut usize) -> AfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = m.mesh.ambient_dim();
        Ok(())
    })
}

/// Vertices per cell: `2^n` for sponges, `n + 1` for simplices.
///
/// # Safety
/// `mesh` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn af_mesh_cell_vertex_count(mesh: *const AfMesh, out: *mut usize) -> AfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = m.mesh.kind().cell_vertex_count();
        Ok(())
    })
}

/// Copies the vertices of cell `cell` (0-based) into `buffer`, row by row.
/// `len` must be at least vertex count times ambient dimension.
///
/// # Safety
/// `buffer` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn af_mesh_cell_vertices(
    mesh: *const AfMesh,
    cell: usize,
    buffer: *mut f64,
    len: usize,
) -> AfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let cells = m.mesh.cells();
        let c = cells
            .get(cell)
            .ok_or_else(|| invalid(format!("cell {cell} out of range (0..{})", cells.len())))?;
        let need = c.vertices.len() * m.mesh.ambient_dim();
        if len < need {
            return Err(invalid(format!("buffer holds {len} values, {need} needed")));
        }
        let out = std::slice::from_raw_parts_mut(buffer, need);
        for (slot, x) in out.iter_mut().zip(c.vertices.iter().flat_map(|v| v.coords())) {
            *slot = to_f64(x);
        }
        Ok(())
    })
}

/// Writes the mesh to `path` as SVG (n = 2), OBJ (n = 3) or JSON.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn af_mesh_export(mesh: *const AfMesh, format: u32, path: *const c_char) -> AfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let path = c_str(path, "path")?;
        let mut buf = Vec::new();
        match format {
            AF_FORMAT_SVG => export_svg(Geometry::Mesh(&m.mesh), &ExportStyle::default(), &mut buf)?,
            AF_FORMAT_OBJ => export_obj(Geometry::Mesh(&m.mesh), &mut buf)?,
            AF_FORMAT_JSON => export_json(&Artifact::Mesh(m.mesh.clone()), &mut buf)?,
            _ => return Err(invalid(format!("unknown format code {format}"))),
        }
        std::fs::write(path, buf).map_err(|e| Fail(AfStatus::Io, format!("cannot write {path}: {e}")))
    })
}

/// Serializes the mesh as a JSON document. Release with `af_string_free`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn af_mesh_to_json(mesh: *const AfMesh, out: *mut *mut c_char) -> AfStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut buf = Vec::new();
        export_json(&Artifact::Mesh(m.mesh.clone()), &mut buf)?;
        let s = CString::new(buf).map_err(|_| invalid("document contains NUL"))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn af_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Closed-form cell count. Fails with `InvalidArgument` if it overflows
/// 64 bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn af_count_closed_form(family: u32, n: usize, m: usize, out: *mut u64) -> AfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let k = FractalKind::new(self::family(family)?, n, m)?;
        let count = count_closed_form(&k);
        *out = count.to_u64().ok_or_else(|| invalid(format!("count {count} overflows 64 bits")))?;
        Ok(())
    })
}

/// Membership of the cell index `coords[0..n]` (1-based) at level `m`.
///
/// # Safety
/// `coords` must point to `n` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn af_is_member(
    family: u32,
    coords: *const usize,
    n: usize,
    m: usize,
    out: *mut bool,
) -> AfStatus {
    guard(|| {
        if coords.is_null() {
            return Err(null("coords"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let k = FractalKind::new(self::family(family)?, n, m)?;
        *out = is_member(&k, std::slice::from_raw_parts(coords, n))?;
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn af_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
