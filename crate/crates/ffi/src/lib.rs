//! C interface to `signclust`.
//!
//! Every fallible function returns an [`ScStatus`]; on failure the message
//! is available from [`sc_last_error_message`] on the same thread. Graphs
//! are opaque handles created by the library and released with
//! [`sc_graph_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use signclust::graph::{build_from_edges, read_graph, SignedGraph};
use signclust::metrics::{ari, misclustering_rate};
use signclust::pipeline::{run_pipeline, Method, PipelineConfig};
use signclust::ssbm::{sample, Partition, SsbmParams};
use signclust::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IndexOutOfRange = 3,
    BadEdge = 4,
    IsolatedNode = 5,
    IndefinitePencil = 6,
    TooLarge = 7,
    Parse = 8,
    Io = 9,
    Internal = 10,
    Panic = 11,
}

/// Opaque signed graph.
pub struct ScGraph {
    inner: SignedGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ScStatus {
    match e {
        Error::IndexOutOfRange { .. } => ScStatus::IndexOutOfRange,
        Error::SelfLoop(_) | Error::DuplicateEdge(..) | Error::BadWeight(..) => ScStatus::BadEdge,
        Error::IsolatedNode { .. } => ScStatus::IsolatedNode,
        Error::InvalidParams(_) | Error::DimensionMismatch(_) => ScStatus::InvalidArgument,
        Error::TooLarge { .. } => ScStatus::TooLarge,
        Error::IndefinitePencil(_) => ScStatus::IndefinitePencil,
        Error::Parse { .. } => ScStatus::Parse,
        Error::Io(_) => ScStatus::Io,
        _ => ScStatus::Internal,
    }
}

struct Fail(ScStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ScStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ScStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ScStatus::Panic
        }
    }
}

unsafe fn slice_or<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(ScStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn boxed(g: SignedGraph) -> *mut ScGraph {
    Box::into_raw(Box::new(ScGraph { inner: g }))
}

/// Build a graph on `n` nodes from `m` undirected edges `(src[e], dst[e], weight[e])`.
///
/// # Safety
/// `src`, `dst` and `weight` must each point to `m` readable values (they
/// may be null when `m == 0`). `out` must be a valid pointer; on success it
/// receives a handle to free with [`sc_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn sc_graph_from_edges(
    n: usize,
    src: *const usize,
    dst: *const usize,
    weight: *const f64,
    m: usize,
    out: *mut *mut ScGraph,
) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (s, d, w) = (
            slice_or(src, m, "src")?,
            slice_or(dst, m, "dst")?,
            slice_or(weight, m, "weight")?,
        );
        let edges: Vec<(usize, usize, f64)> = (0..m).map(|e| (s[e], d[e], w[e])).collect();
        *out = boxed(build_from_edges(n, &edges)?);
        Ok(())
    })
}

/// Read a graph from an edge-list file (`j j' w` per line, `#` comments).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_read_edge_list(path: *const c_char, out: *mut *mut ScGraph) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let file = File::open(path).map_err(Error::from)?;
        *out = boxed(read_graph(BufReader::new(file))?);
        Ok(())
    })
}

/// Release a graph. Null is ignored.
///
/// # Safety
/// `g` must be null or a handle from this library not already freed.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_free(g: *mut ScGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Node count, 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_node_count(g: *const ScGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// Undirected edge count, 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_edge_count(g: *const ScGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// Sample from the signed stochastic block model with `k` equal-sized
/// clusters. When `labels` is non-null it receives the `n` true labels.
///
/// # Safety
/// `out` must be valid; `labels` must be null or point to `n` writable values.
#[no_mangle]
pub unsafe extern "C" fn sc_ssbm_sample(
    n: usize,
    k: usize,
    p: f64,
    eta: f64,
    seed: u64,
    out: *mut *mut ScGraph,
    labels: *mut usize,
) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = SsbmParams::equal(n, k, p, eta)?;
        let (g, truth) = sample(&params, seed)?;
        if !labels.is_null() {
            slice::from_raw_parts_mut(labels, n).copy_from_slice(&truth.labels);
        }
        *out = boxed(g);
        Ok(())
    })
}

/// Cluster `g` into `k` groups with the named method (`"SPONGE_sym"`,
/// `"Lbar_sym_reg"`, ...). `labels` receives one label per node, -1 for
/// nodes outside the largest connected component.
///
/// # Safety
/// `g` must be a live handle, `method` a NUL-terminated string, and
/// `labels` must point to `sc_graph_node_count(g)` writable values.
#[no_mangle]
pub unsafe extern "C" fn sc_cluster(
    g: *const ScGraph,
    method: *const c_char,
    k: usize,
    tau_plus: f64,
    tau_minus: f64,
    seed: u64,
    labels: *mut i64,
) -> ScStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let method: Method = str_arg(method, "method")?.parse()?;
        if labels.is_null() {
            return Err(null("labels"));
        }
        let cfg = PipelineConfig {
            method,
            k,
            tau_plus,
            tau_minus,
            seed,
            ..PipelineConfig::default()
        };
        let res = run_pipeline(&g.inner, None, &cfg)?;
        let out = slice::from_raw_parts_mut(labels, g.inner.n());
        for (o, l) in out.iter_mut().zip(&res.labels) {
            *o = l.map_or(-1, |x| x as i64);
        }
        Ok(())
    })
}

fn partition(labels: &[usize]) -> Result<Partition, Fail> {
    let k = labels.iter().max().map_or(1, |&m| m + 1);
    Ok(Partition::new(labels.to_vec(), k)?)
}

/// Adjusted Rand index between two labelings of `n` nodes.
///
/// # Safety
/// `a` and `b` must point to `n` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sc_ari(a: *const usize, b: *const usize, n: usize, out: *mut f64) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let pa = partition(slice_or(a, n, "a")?)?;
        let pb = partition(slice_or(b, n, "b")?)?;
        *out = ari(&pa, &pb)?;
        Ok(())
    })
}

/// Fraction of misassigned nodes under the best matching of `k` labels.
///
/// # Safety
/// `pred` and `truth` must point to `n` values below `k`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sc_misclustering_rate(
    pred: *const usize,
    truth: *const usize,
    n: usize,
    k: usize,
    out: *mut f64,
) -> ScStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = Partition::new(slice_or(pred, n, "pred")?.to_vec(), k)?;
        let t = Partition::new(slice_or(truth, n, "truth")?.to_vec(), k)?;
        *out = misclustering_rate(&p, &t)?.0;
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn sc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn sc_status_string(status: ScStatus) -> *const c_char {
    let s: &'static CStr = match status {
        ScStatus::Ok => c"ok",
        ScStatus::NullPointer => c"null pointer",
        ScStatus::InvalidArgument => c"invalid argument",
        ScStatus::IndexOutOfRange => c"index out of range",
        ScStatus::BadEdge => c"bad edge",
        ScStatus::IsolatedNode => c"isolated node",
        ScStatus::IndefinitePencil => c"indefinite pencil",
        ScStatus::TooLarge => c"problem too large",
        ScStatus::Parse => c"parse error",
        ScStatus::Io => c"i/o error",
        ScStatus::Internal => c"internal error",
        ScStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sc_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(c) => c,
        Err(_) => c"unknown",
    };
    V.as_ptr()
}
