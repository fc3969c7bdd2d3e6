//! C ABI over `hgnn-core`.
//!
//! Every fallible function returns an [`HgnnStatus`]. On failure a message is
//! kept per thread and can be read with [`hgnn_last_error_message`]. Objects
//! are opaque handles created by `*_new` / `*_load` functions and released
//! with the matching `*_free`. Matrices are dense, row-major `double` buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use hgnn_core::construction::{knn_hyperedges, FeatureMatrix};
use hgnn_core::data::{load_checkpoint, load_hypergraph, save_hypergraph};
use hgnn_core::error::HgnnError;
use hgnn_core::hypergraph::{concat_modalities, Hypergraph, NormalizedOperator};
use hgnn_core::nn::HgnnModel as CoreModel;
use hgnn_core::spectral::regularizer_omega;
use ndarray::{Array2, ArrayView2};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HgnnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidHypergraph = 3,
    DimensionMismatch = 4,
    IoError = 5,
    ParseError = 6,
    TooLarge = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Opaque hypergraph handle.
pub struct HgnnHypergraph {
    graph: Hypergraph,
    op: OnceLock<NormalizedOperator>,
}

impl HgnnHypergraph {
    fn boxed(graph: Hypergraph) -> *mut HgnnHypergraph {
        Box::into_raw(Box::new(HgnnHypergraph {
            graph,
            op: OnceLock::new(),
        }))
    }

    fn operator(&self) -> &NormalizedOperator {
        self.op.get_or_init(|| self.graph.normalized_theta())
    }
}

/// Opaque model handle.
pub struct HgnnModel {
    model: CoreModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &HgnnError) -> HgnnStatus {
    use HgnnError::*;
    match e {
        EmptyHyperedge { .. }
        | IndexOutOfRange { .. }
        | NonPositiveWeight { .. }
        | DuplicateVertexInEdge { .. }
        | WeightCountMismatch { .. } => HgnnStatus::InvalidHypergraph,
        VertexCountMismatch { .. } | ShapeMismatch(_) | DimMismatch(_) | InconsistentNodeCount(_) => {
            HgnnStatus::DimensionMismatch
        }
        Io { .. } | MissingFile(_) => HgnnStatus::IoError,
        Parse { .. } | Json(_) | VersionMismatch { .. } => HgnnStatus::ParseError,
        TooLarge { .. } => HgnnStatus::TooLarge,
        _ => HgnnStatus::InvalidArgument,
    }
}

struct Fail(HgnnStatus, String);

impl From<HgnnError> for Fail {
    fn from(e: HgnnError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> HgnnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            HgnnStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HgnnStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(HgnnStatus::NullPointer, format!("{what} is null"))
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Fail(HgnnStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn out_ptr<T>(out: *mut *mut T, value: *mut T) -> Result<(), Fail> {
    if out.is_null() {
        drop(Box::from_raw(value));
        return Err(null("out"));
    }
    *out = value;
    Ok(())
}

fn checked_len(a: usize, b: usize) -> Result<usize, Fail> {
    a.checked_mul(b)
        .ok_or_else(|| Fail(HgnnStatus::TooLarge, format!("{a} x {b} overflows")))
}

fn features(data: &[f64], rows: usize, cols: usize) -> Result<FeatureMatrix, Fail> {
    let values = Array2::from_shape_vec((rows, cols), data.to_vec())
        .map_err(|e| Fail(HgnnStatus::DimensionMismatch, e.to_string()))?;
    Ok(FeatureMatrix::new(values)?)
}

fn copy_into(dst: &mut [f64], src: impl IntoIterator<Item = f64>) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = s;
    }
}

fn need(len: usize, want: usize) -> Result<(), Fail> {
    if len < want {
        return Err(Fail(
            HgnnStatus::BufferTooSmall,
            format!("buffer holds {len} values, {want} required"),
        ));
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hgnn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn hgnn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Build a hypergraph from compressed edge lists: edge `e` holds
/// `vertices[offsets[e] .. offsets[e + 1]]`. `offsets` has `n_edges + 1`
/// entries. `weights` may be null for unit weights.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_new(
    n_vertices: usize,
    n_edges: usize,
    offsets: *const usize,
    vertices: *const usize,
    weights: *const f64,
    out: *mut *mut HgnnHypergraph,
) -> HgnnStatus {
    guard(|| {
        let count = n_edges
            .checked_add(1)
            .ok_or_else(|| Fail(HgnnStatus::TooLarge, "too many edges".into()))?;
        let offsets = slice(offsets, count, "offsets")?;
        if offsets[0] != 0 || offsets.windows(2).any(|w| w[1] < w[0]) {
            return Err(Fail(
                HgnnStatus::InvalidArgument,
                "offsets must start at 0 and be non-decreasing".into(),
            ));
        }
        let vertices = slice(vertices, offsets[n_edges], "vertices")?;
        let edges: Vec<Vec<usize>> = offsets
            .windows(2)
            .map(|w| vertices[w[0]..w[1]].to_vec())
            .collect();
        let w = if weights.is_null() {
            None
        } else {
            Some(slice(weights, n_edges, "weights")?)
        };
        let g = Hypergraph::new(&edges, n_vertices, w)?;
        out_ptr(out, HgnnHypergraph::boxed(g))
    })
}

/// Read a hyperedge file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_load(
    path: *const c_char,
    out: *mut *mut HgnnHypergraph,
) -> HgnnStatus {
    guard(|| {
        let g = load_hypergraph(path_arg(path)?)?;
        out_ptr(out, HgnnHypergraph::boxed(g))
    })
}

/// Write a hyperedge file.
///
/// # Safety
/// `graph` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_save(
    graph: *const HgnnHypergraph,
    path: *const c_char,
) -> HgnnStatus {
    guard(|| {
        let g = reference(graph, "graph")?;
        save_hypergraph(&g.graph, path_arg(path)?)?;
        Ok(())
    })
}

/// One hyperedge per vertex: the vertex and its `k` nearest neighbours.
///
/// # Safety
/// `features` must hold `n_vertices * dim` values.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_knn(
    features_ptr: *const f64,
    n_vertices: usize,
    dim: usize,
    k: usize,
    out: *mut *mut HgnnHypergraph,
) -> HgnnStatus {
    guard(|| {
        let data = slice(features_ptr, checked_len(n_vertices, dim)?, "features")?;
        let g = knn_hyperedges(&features(data, n_vertices, dim)?, k)?;
        out_ptr(out, HgnnHypergraph::boxed(g))
    })
}

/// Concatenate the hyperedges of `count` hypergraphs on the same vertex set.
///
/// # Safety
/// `graphs` must point to `count` live handles.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_concat(
    graphs: *const *const HgnnHypergraph,
    count: usize,
    out: *mut *mut HgnnHypergraph,
) -> HgnnStatus {
    guard(|| {
        let handles = slice(graphs, count, "graphs")?;
        let parts = handles
            .iter()
            .map(|&h| reference(h, "graph").map(|g| g.graph.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let g = concat_modalities(&parts)?;
        out_ptr(out, HgnnHypergraph::boxed(g))
    })
}

/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_n_vertices(
    graph: *const HgnnHypergraph,
    out: *mut usize,
) -> HgnnStatus {
    guard(|| {
        let n = reference(graph, "graph")?.graph.n_vertices();
        *out.as_mut().ok_or_else(|| null("out"))? = n;
        Ok(())
    })
}

/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_n_edges(
    graph: *const HgnnHypergraph,
    out: *mut usize,
) -> HgnnStatus {
    guard(|| {
        let e = reference(graph, "graph")?.graph.n_edges();
        *out.as_mut().ok_or_else(|| null("out"))? = e;
        Ok(())
    })
}

/// Weighted vertex degrees into `out[0 .. n_vertices]`.
///
/// # Safety
/// `out` must be writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_vertex_degrees(
    graph: *const HgnnHypergraph,
    out: *mut f64,
    len: usize,
) -> HgnnStatus {
    guard(|| {
        let g = &reference(graph, "graph")?.graph;
        need(len, g.n_vertices())?;
        copy_into(slice_mut(out, len, "out")?, g.degrees().vertex_degrees);
        Ok(())
    })
}

/// Hyperedge sizes into `out[0 .. n_edges]`.
///
/// # Safety
/// `out` must be writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_edge_degrees(
    graph: *const HgnnHypergraph,
    out: *mut usize,
    len: usize,
) -> HgnnStatus {
    guard(|| {
        let g = &reference(graph, "graph")?.graph;
        need(len, g.n_edges())?;
        let dst = slice_mut(out, len, "out")?;
        for (d, s) in dst.iter_mut().zip(g.degrees().edge_degrees) {
            *d = s;
        }
        Ok(())
    })
}

/// Dense normalized propagation operator, `n_vertices²` values row-major.
///
/// # Safety
/// `out` must be writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_theta_dense(
    graph: *const HgnnHypergraph,
    out: *mut f64,
    len: usize,
) -> HgnnStatus {
    guard(|| {
        let h = reference(graph, "graph")?;
        let n = h.graph.n_vertices();
        need(len, checked_len(n, n)?)?;
        copy_into(slice_mut(out, len, "out")?, h.operator().to_dense().into_iter());
        Ok(())
    })
}

/// `out = Θ x` for an `n_vertices × cols` matrix `x`.
///
/// # Safety
/// `x` and `out` must each hold `n_vertices * cols` values.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_propagate(
    graph: *const HgnnHypergraph,
    x: *const f64,
    cols: usize,
    out: *mut f64,
) -> HgnnStatus {
    guard(|| {
        let h = reference(graph, "graph")?;
        let len = checked_len(h.graph.n_vertices(), cols)?;
        let data = slice(x, len, "x")?;
        let view = ArrayView2::from_shape((h.graph.n_vertices(), cols), data)
            .map_err(|e| Fail(HgnnStatus::DimensionMismatch, e.to_string()))?;
        let y = h.operator().theta().mul_dense(view)?;
        copy_into(slice_mut(out, len, "out")?, y.into_iter());
        Ok(())
    })
}

/// Hypergraph smoothness regularizer of a signal with one value per vertex.
///
/// # Safety
/// `signal` must hold `len` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_regularizer(
    graph: *const HgnnHypergraph,
    signal: *const f64,
    len: usize,
    out: *mut f64,
) -> HgnnStatus {
    guard(|| {
        let g = &reference(graph, "graph")?.graph;
        let v = regularizer_omega(g, slice(signal, len, "signal")?)?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// Release a hypergraph handle. Null is ignored.
///
/// # Safety
/// `graph` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hgnn_hypergraph_free(graph: *mut HgnnHypergraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Load a trained model from a checkpoint file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hgnn_model_load(
    path: *const c_char,
    out: *mut *mut HgnnModel,
) -> HgnnStatus {
    guard(|| {
        let (model, _) = load_checkpoint(path_arg(path)?)?;
        out_ptr(out, Box::into_raw(Box::new(HgnnModel { model })))
    })
}

/// Input feature width and number of classes.
///
/// # Safety
/// `model` must be a live handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn hgnn_model_dims(
    model: *const HgnnModel,
    input_dim: *mut usize,
    n_classes: *mut usize,
) -> HgnnStatus {
    guard(|| {
        let m = &reference(model, "model")?.model;
        *input_dim.as_mut().ok_or_else(|| null("input_dim"))? = m.input_dim();
        *n_classes.as_mut().ok_or_else(|| null("n_classes"))? = m.n_classes();
        Ok(())
    })
}

/// Eval-mode logits, `n_vertices × n_classes` row-major.
///
/// # Safety
/// `features` must hold `n_vertices * input_dim` values and `out` be
/// writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn hgnn_model_predict(
    model: *const HgnnModel,
    graph: *const HgnnHypergraph,
    features_ptr: *const f64,
    dim: usize,
    out: *mut f64,
    len: usize,
) -> HgnnStatus {
    guard(|| {
        let m = &reference(model, "model")?.model;
        let h = reference(graph, "graph")?;
        let n = h.graph.n_vertices();
        let data = slice(features_ptr, checked_len(n, dim)?, "features")?;
        let x = features(data, n, dim)?;
        need(len, checked_len(n, m.n_classes())?)?;
        let logits = m.predict(h.operator(), x.view())?;
        copy_into(slice_mut(out, len, "out")?, logits.into_iter());
        Ok(())
    })
}

/// Release a model handle. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hgnn_model_free(model: *mut HgnnModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
