//! C ABI over `pathhodge`.
//!
//! Every fallible function returns a [`PhStatus`] and writes results through
//! out-pointers. On failure a message is kept per thread and can be read with
//! [`ph_last_error_message`]. Forms are passed as `double` arrays in the
//! coordinates of the allowed paths of the given degree, ordered as reported
//! by [`ph_allowed_path`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use pathhodge::complex::{self, Cochain, PathBasis, PathComplex};
use pathhodge::digraph::{self, Digraph, ElementaryPath};
use pathhodge::heat;
use pathhodge::hodge::LaplacianBundle;
use pathhodge::nalgebra::DVector;
use pathhodge::walk::{self, OrientedState};
use pathhodge::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    NotAllowed = 4,
    NotInSubspace = 5,
    BufferTooSmall = 6,
    NonConvergent = 7,
    Panic = 8,
}

/// Opaque digraph handle. Create with [`ph_digraph_new`] or
/// [`ph_digraph_parse`], release with [`ph_digraph_free`].
pub struct PhDigraph {
    graph: Digraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(err: &Error) -> PhStatus {
    match err {
        Error::Parse { .. } | Error::Io(_) => PhStatus::Parse,
        Error::NotAllowed { .. } | Error::ZeroValence { .. } => PhStatus::NotAllowed,
        Error::NotInSubspace { .. } | Error::NotClosed { .. } => PhStatus::NotInSubspace,
        Error::NonConvergent(_) => PhStatus::NonConvergent,
        _ => PhStatus::InvalidArgument,
    }
}

/// Runs `f`, translating library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (PhStatus, String)>) -> PhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PhStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            PhStatus::Panic
        }
    }
}

fn lib<T>(r: pathhodge::Result<T>) -> Result<T, (PhStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (PhStatus, String) {
    (PhStatus::NullPointer, format!("{name} is null"))
}

fn invalid(msg: impl Into<String>) -> (PhStatus, String) {
    (PhStatus::InvalidArgument, msg.into())
}

unsafe fn graph_ref<'a>(g: *const PhDigraph) -> Result<&'a Digraph, (PhStatus, String)> {
    g.as_ref().map(|h| &h.graph).ok_or_else(|| null("graph"))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, (PhStatus, String)> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn in_slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], (PhStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(p, len))
}

/// Copies `values` into `buf` when it fits; `len` always receives the count.
unsafe fn write_buffer(values: &[f64], buf: *mut f64, cap: usize, len: *mut usize) -> Result<(), (PhStatus, String)> {
    *out_ref(len, "len")? = values.len();
    if values.len() > cap {
        return Err((PhStatus::BufferTooSmall, format!("need {} entries, buffer holds {cap}", values.len())));
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn ph_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ph_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a digraph on `n_vertices` vertices from `n_edges` pairs stored
/// flat in `edges` (`2 * n_edges` entries, tail then head).
///
/// # Safety
/// `edges` must point to `2 * n_edges` readable values (it may be null when
/// `n_edges` is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ph_digraph_new(
    n_vertices: usize,
    edges: *const usize,
    n_edges: usize,
    out: *mut *mut PhDigraph,
) -> PhStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let flat = in_slice(edges, n_edges.checked_mul(2).ok_or_else(|| invalid("edge count overflows"))?, "edges")?;
        let graph = lib(Digraph::new(n_vertices, flat.chunks_exact(2).map(|e| (e[0], e[1]))))?;
        *out = Box::into_raw(Box::new(PhDigraph { graph }));
        Ok(())
    })
}

/// Parses the edge-list text format (or its JSON form).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ph_digraph_parse(text: *const c_char, out: *mut *mut PhDigraph) -> PhStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|e| (PhStatus::Parse, format!("input is not UTF-8: {e}")))?;
        let graph = lib(digraph::parse_digraph(text))?;
        *out = Box::into_raw(Box::new(PhDigraph { graph }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `g` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ph_digraph_free(g: *mut PhDigraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn ph_digraph_vertex_count(g: *const PhDigraph) -> usize {
    g.as_ref().map_or(0, |h| h.graph.n_vertices())
}

/// # Safety
/// `g` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn ph_digraph_edge_count(g: *const PhDigraph) -> usize {
    g.as_ref().map_or(0, |h| h.graph.n_edges())
}

/// Number of allowed `p`-paths, the length of a `p`-form array.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_allowed_count(g: *const PhDigraph, p: usize, out: *mut usize) -> PhStatus {
    guard(|| {
        let g = graph_ref(g)?;
        *out_ref(out, "out")? = PathBasis::allowed(g, p).len();
        Ok(())
    })
}

/// Writes the `p + 1` vertices of allowed path `index` into `vertices`.
///
/// # Safety
/// `g` must be a live handle and `vertices` must hold `p + 1` values.
#[no_mangle]
pub unsafe extern "C" fn ph_allowed_path(
    g: *const PhDigraph,
    p: usize,
    index: usize,
    vertices: *mut usize,
) -> PhStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let basis = PathBasis::allowed(g, p);
        if index >= basis.len() {
            return Err(invalid(format!("index {index} out of range ({} allowed {p}-paths)", basis.len())));
        }
        if vertices.is_null() {
            return Err(null("vertices"));
        }
        let path = basis.path(index);
        ptr::copy_nonoverlapping(path.0.as_ptr(), vertices, path.0.len());
        Ok(())
    })
}

/// `dim Ω^p`.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_omega_dim(g: *const PhDigraph, p: usize, out: *mut usize) -> PhStatus {
    guard(|| {
        let g = graph_ref(g)?;
        *out_ref(out, "out")? = complex::omega_subspace(g, p).dim();
        Ok(())
    })
}

/// Dimension of the `p`-th path cohomology.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_cohomology_dim(g: *const PhDigraph, p: usize, out: *mut usize) -> PhStatus {
    guard(|| {
        let g = graph_ref(g)?;
        *out_ref(out, "out")? = complex::cohomology_dim(g, p);
        Ok(())
    })
}

/// `p`-th Betti number of the path chain complex.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_chain_betti(g: *const PhDigraph, p: usize, out: *mut usize) -> PhStatus {
    guard(|| {
        let g = graph_ref(g)?;
        *out_ref(out, "out")? = complex::chain_homology_dim(g, p);
        Ok(())
    })
}

/// Ascending eigenvalues of the Hodge Laplacian on `Ω^p`. `len` receives
/// `dim Ω^p`; when `cap` is smaller the call fails with
/// `PH_STATUS_BUFFER_TOO_SMALL` and nothing is written.
///
/// # Safety
/// `g` must be a live handle, `buf` must hold `cap` values, `len` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_laplacian_eigenvalues(
    g: *const PhDigraph,
    p: usize,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> PhStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let b = LaplacianBundle::new(&PathComplex::new(g, p), p);
        write_buffer(b.spectral.eigenvalues.as_slice(), buf, cap, len)
    })
}

/// Evolves `u0 ∈ Ω^p` under the heat semigroup for time `t`. Both arrays
/// have one entry per allowed `p`-path.
///
/// # Safety
/// `g` must be a live handle; `u0` and `out` must hold `len` values each.
#[no_mangle]
pub unsafe extern "C" fn ph_heat_apply(
    g: *const PhDigraph,
    p: usize,
    t: f64,
    u0: *const f64,
    len: usize,
    out: *mut f64,
) -> PhStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let b = LaplacianBundle::new(&PathComplex::new(g, p), p);
        let input = in_slice(u0, len, "u0")?;
        let u = lib(Cochain::new(b.basis().clone(), DVector::from_column_slice(input)))?;
        let ut = lib(lib(heat::heat_operator(&b, t))?.apply(&b, &u))?;
        let mut n = 0;
        write_buffer(ut.coeffs.as_slice(), out, len, &mut n)
    })
}

/// Expectation process `E_steps` of the lazy signed walk on allowed
/// `d`-paths, started at `start` (`d + 1` vertices) with orientation
/// `sign = ±1`. A negative `laziness` selects the default `M/(M+1) + 0.01`.
/// `out` receives one entry per allowed `d`-path.
///
/// # Safety
/// `g` must be a live handle, `start` must hold `d + 1` values and `out`
/// must hold `len` values.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ph_walk_expectation(
    g: *const PhDigraph,
    d: usize,
    start: *const usize,
    sign: c_int,
    laziness: f64,
    steps: usize,
    out: *mut f64,
    len: usize,
) -> PhStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let path = ElementaryPath::new(in_slice(start, d + 1, "start")?.to_vec());
        let sign: i8 = match sign {
            1 => 1,
            -1 => -1,
            s => return Err(invalid(format!("sign must be 1 or -1, got {s}"))),
        };
        let table = lib(walk::signed_neighbors(g, d))?;
        let lazy = if laziness < 0.0 { walk::default_laziness(table.max_valence()) } else { laziness };
        let forms = lib(walk::expectation_by_powers(&table, &OrientedState { path, sign }, steps, lazy))?;
        let mut n = 0;
        write_buffer(forms[steps].as_slice(), out, len, &mut n)
    })
}
