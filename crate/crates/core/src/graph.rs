//! Sparse signed graphs.
//!
//! A [`SignedGraph`] stores the full symmetric adjacency in CSR form together
//! with its positive and negative parts, which are split once at construction
//! and shared by reference with every operator built on the graph.

use std::collections::VecDeque;
use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetric sparse matrix in compressed-sparse-row form, both triangles
/// stored, column indices sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from upper-triangle entries `(i, j, w)` with `i < j`, mirroring
    /// each one. Entries must be unique.
    fn from_upper(n: usize, upper: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n];
        for &(i, j, _) in upper {
            counts[i] += 1;
            counts[j] += 1;
        }
        let mut indptr = vec![0usize; n + 1];
        for i in 0..n {
            indptr[i + 1] = indptr[i] + counts[i];
        }
        let nnz = indptr[n];
        let mut indices = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        let mut fill = indptr.clone();
        for &(i, j, w) in upper {
            indices[fill[i]] = j;
            values[fill[i]] = w;
            fill[i] += 1;
            indices[fill[j]] = i;
            values[fill[j]] = w;
            fill[j] += 1;
        }
        for i in 0..n {
            let (lo, hi) = (indptr[i], indptr[i + 1]);
            let mut row: Vec<(usize, f64)> = indices[lo..hi]
                .iter()
                .copied()
                .zip(values[lo..hi].iter().copied())
                .collect();
            row.sort_unstable_by_key(|e| e.0);
            for (slot, (c, v)) in row.into_iter().enumerate() {
                indices[lo + slot] = c;
                values[lo + slot] = v;
            }
        }
        Self {
            n,
            indptr,
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries (twice the number of undirected edges).
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    /// `y = self * x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                m[(i, c)] = v;
            }
        }
        m
    }

    /// Upper-triangle entries `(i, j, w)`, `i < j`, in row-major order.
    pub fn upper_entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz() / 2);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                if c > i {
                    out.push((i, c, v));
                }
            }
        }
        out
    }
}

/// Undirected signed graph with real edge weights.
#[derive(Debug, Clone)]
pub struct SignedGraph {
    adjacency: Arc<CsrMatrix>,
    positive: Arc<CsrMatrix>,
    negative: Arc<CsrMatrix>,
}

/// Positive, negative and signed (absolute) degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVectors {
    pub dplus: Vec<f64>,
    pub dminus: Vec<f64>,
    pub dbar: Vec<f64>,
}

/// Rank-one regularization amounts for the positive and negative graphs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Regularization {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

impl Regularization {
    pub fn new(gamma_plus: f64, gamma_minus: f64) -> Result<Self> {
        if !(gamma_plus >= 0.0 && gamma_minus >= 0.0)
            || !gamma_plus.is_finite()
            || !gamma_minus.is_finite()
        {
            return crate::error::invalid(format!(
                "regularization must be finite and nonnegative, got ({gamma_plus}, {gamma_minus})"
            ));
        }
        Ok(Self {
            gamma_plus,
            gamma_minus,
        })
    }

    pub fn none() -> Self {
        Self {
            gamma_plus: 0.0,
            gamma_minus: 0.0,
        }
    }

    /// Split `gamma` evenly between the two sides.
    pub fn even(gamma: f64) -> Result<Self> {
        Self::new(gamma / 2.0, gamma / 2.0)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_plus + self.gamma_minus
    }
}

/// Map between node ids of a graph and one of its induced subgraphs.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMap {
    /// `old_to_new[v]` is the id of original node `v` in the subgraph.
    pub old_to_new: Vec<Option<usize>>,
    /// `new_to_old[u]` is the original id of subgraph node `u`.
    pub new_to_old: Vec<usize>,
}

impl NodeMap {
    pub fn identity(n: usize) -> Self {
        Self {
            old_to_new: (0..n).map(Some).collect(),
            new_to_old: (0..n).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.old_to_new.len() == self.new_to_old.len()
    }
}

/// Build a graph from undirected weighted edges.
///
/// Each pair may appear once in either orientation. Zero and non-finite
/// weights are rejected, since they carry no sign.
pub fn build_from_edges(n: usize, triples: &[(usize, usize, f64)]) -> Result<SignedGraph> {
    let mut upper = Vec::with_capacity(triples.len());
    for &(a, b, w) in triples {
        for v in [a, b] {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
        }
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        if w == 0.0 || !w.is_finite() {
            return Err(Error::BadWeight(a, b));
        }
        upper.push((a.min(b), a.max(b), w));
    }
    upper.sort_unstable_by_key(|x| (x.0, x.1));
    if let Some(w) = upper.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
        return Err(Error::DuplicateEdge(w[0].0, w[0].1));
    }
    Ok(SignedGraph::from_sorted_upper(n, &upper))
}

impl SignedGraph {
    fn from_sorted_upper(n: usize, upper: &[(usize, usize, f64)]) -> Self {
        let pos: Vec<_> = upper.iter().copied().filter(|e| e.2 > 0.0).collect();
        let neg: Vec<_> = upper
            .iter()
            .filter(|e| e.2 < 0.0)
            .map(|&(i, j, w)| (i, j, -w))
            .collect();
        Self {
            adjacency: Arc::new(CsrMatrix::from_upper(n, upper)),
            positive: Arc::new(CsrMatrix::from_upper(n, &pos)),
            negative: Arc::new(CsrMatrix::from_upper(n, &neg)),
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_upper(n, &[])
    }

    pub fn n(&self) -> usize {
        self.adjacency.dim()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    pub fn adjacency(&self) -> &Arc<CsrMatrix> {
        &self.adjacency
    }

    pub fn positive(&self) -> &Arc<CsrMatrix> {
        &self.positive
    }

    pub fn negative(&self) -> &Arc<CsrMatrix> {
        &self.negative
    }

    /// Upper-triangle edges `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.adjacency.upper_entries()
    }

    /// Empirical edge density `2 m / (n (n - 1))` computed from `|A|`.
    pub fn density(&self) -> f64 {
        let n = self.n() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let total: f64 = self.edges().iter().map(|e| e.2.abs()).sum();
        2.0 * total / (n * (n - 1.0))
    }

    /// Subgraph induced by `nodes` (original ids, any order); new ids follow
    /// the order of `nodes`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<(SignedGraph, NodeMap)> {
        let n = self.n();
        let mut old_to_new = vec![None; n];
        for (new, &old) in nodes.iter().enumerate() {
            if old >= n {
                return Err(Error::IndexOutOfRange { index: old, n });
            }
            if old_to_new[old].replace(new).is_some() {
                return crate::error::invalid(format!("node {old} listed twice"));
            }
        }
        let mut upper = Vec::new();
        for (new_i, &old_i) in nodes.iter().enumerate() {
            let (cols, vals) = self.adjacency.row(old_i);
            for (&c, &w) in cols.iter().zip(vals) {
                if let Some(new_j) = old_to_new[c] {
                    if new_i < new_j {
                        upper.push((new_i, new_j, w));
                    }
                }
            }
        }
        upper.sort_unstable_by_key(|x| (x.0, x.1));
        let map = NodeMap {
            old_to_new,
            new_to_old: nodes.to_vec(),
        };
        Ok((Self::from_sorted_upper(nodes.len(), &upper), map))
    }
}

/// Positive and negative parts, `A = A⁺ − A⁻`, both nonnegative.
pub fn split_pos_neg(g: &SignedGraph) -> (Arc<CsrMatrix>, Arc<CsrMatrix>) {
    (g.positive.clone(), g.negative.clone())
}

pub fn degrees(g: &SignedGraph) -> DegreeVectors {
    let dplus = g.positive.row_sums();
    let dminus = g.negative.row_sums();
    let dbar = dplus.iter().zip(&dminus).map(|(a, b)| a + b).collect();
    DegreeVectors {
        dplus,
        dminus,
        dbar,
    }
}

/// Connected components of the unsigned support, each sorted ascending,
/// listed in order of their smallest node.
pub fn connected_components(g: &SignedGraph) -> Vec<Vec<usize>> {
    support_components(&g.adjacency)
}

/// Connected components of the nonzero pattern of a symmetric matrix.
pub fn support_components(m: &CsrMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &u in m.row(v).0 {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Largest connected component, ignoring edge signs. Ties go to the
/// component holding the smallest original index. Node order is preserved.
pub fn largest_connected_component(g: &SignedGraph) -> (SignedGraph, NodeMap) {
    let comps = connected_components(g);
    let mut best: Option<&Vec<usize>> = None;
    for c in &comps {
        if best.is_none_or(|b| c.len() > b.len()) {
            best = Some(c);
        }
    }
    match best {
        Some(c) if c.len() < g.n() => g
            .induced_subgraph(c)
            .expect("component ids are valid and distinct"),
        _ => (g.clone(), NodeMap::identity(g.n())),
    }
}

/// Parsed edge list: node count and triples.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

/// Read the whitespace-separated `j j' w` format. Lines starting with `#`
/// or `%` are comments; a comment of the form `# n <count>` fixes the node
/// count, otherwise it is one more than the largest index seen.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<EdgeList> {
    let mut edges = Vec::new();
    let mut declared: Option<usize> = None;
    let mut max_index: Option<usize> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#').or_else(|| t.strip_prefix('%')) {
            let mut it = rest.split_whitespace();
            if let (Some("n"), Some(v), None) = (it.next(), it.next(), it.next()) {
                if let Ok(v) = v.parse() {
                    declared = Some(v);
                }
            }
            continue;
        }
        let parse_err = |msg: &str| Error::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err("expected three fields `j j' w`"));
        }
        let a: usize = fields[0].parse().map_err(|_| parse_err("bad node index"))?;
        let b: usize = fields[1].parse().map_err(|_| parse_err("bad node index"))?;
        let w: f64 = fields[2].parse().map_err(|_| parse_err("bad weight"))?;
        max_index = Some(max_index.map_or(a.max(b), |m| m.max(a).max(b)));
        edges.push((a, b, w));
    }
    let inferred = max_index.map_or(0, |m| m + 1);
    let n = match declared {
        Some(d) if d < inferred => {
            return Err(Error::IndexOutOfRange {
                index: inferred - 1,
                n: d,
            })
        }
        Some(d) => d,
        None => inferred,
    };
    Ok(EdgeList { n, edges })
}

pub fn read_graph<R: BufRead>(reader: R) -> Result<SignedGraph> {
    let el = read_edge_list(reader)?;
    build_from_edges(el.n, &el.edges)
}

/// Write one line per undirected edge, preceded by a `# n <count>` comment.
pub fn write_edge_list<W: Write>(g: &SignedGraph, mut w: W) -> Result<()> {
    writeln!(w, "# n {}", g.n())?;
    for (i, j, v) in g.edges() {
        writeln!(w, "{i} {j} {v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_positive_edge() {
        let g = build_from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let (p, m) = split_pos_neg(&g);
        assert_eq!(p.nnz(), 2);
        assert_eq!(m.nnz(), 0);
        assert_eq!(degrees(&g).dbar, vec![1.0, 1.0]);
    }

    #[test]
    fn hand_counted_degrees() {
        let g = build_from_edges(3, &[(0, 1, 1.0), (1, 2, -1.0)]).unwrap();
        let d = degrees(&g);
        assert_eq!(d.dplus, vec![1.0, 1.0, 0.0]);
        assert_eq!(d.dminus, vec![0.0, 1.0, 1.0]);
        assert_eq!(d.dbar, vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            build_from_edges(2, &[(0, 0, 1.0)]),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            build_from_edges(3, &[(0, 1, 1.0), (1, 0, -1.0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            build_from_edges(2, &[(0, 2, 1.0)]),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
        assert!(matches!(
            build_from_edges(2, &[(0, 1, 0.0)]),
            Err(Error::BadWeight(0, 1))
        ));
    }

    #[test]
    fn empty_and_complete_degrees() {
        let d = degrees(&SignedGraph::empty(4));
        assert!(d.dbar.iter().all(|&x| x == 0.0));
        let n = 5;
        let edges: Vec<_> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j, 1.0)))
            .collect();
        let d = degrees(&build_from_edges(n, &edges).unwrap());
        assert!(d.dplus.iter().all(|&x| x == (n - 1) as f64));
    }

    #[test]
    fn lcc_picks_larger_component_and_breaks_ties_low() {
        let g = build_from_edges(5, &[(3, 4, 1.0), (0, 1, -1.0), (1, 2, 1.0)]).unwrap();
        let (sub, map) = largest_connected_component(&g);
        assert_eq!(sub.n(), 3);
        assert_eq!(map.new_to_old, vec![0, 1, 2]);
        assert_eq!(map.old_to_new[4], None);

        let g = build_from_edges(4, &[(2, 3, 1.0), (0, 1, 1.0)]).unwrap();
        let (_, map) = largest_connected_component(&g);
        assert_eq!(map.new_to_old, vec![0, 1]);

        let g = build_from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let (sub, map) = largest_connected_component(&g);
        assert!(map.is_identity());
        assert_eq!(sub.edges(), g.edges());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = build_from_edges(6, &[(0, 1, 1.0), (1, 3, -2.5), (2, 4, 0.125)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_graph(&buf[..]).unwrap();
        assert_eq!(back.n(), 6);
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn edge_list_comments_and_errors() {
        let text = "% header\n# another\n0 1 1\n\n2 1 -1\n";
        let el = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(el.n, 3);
        assert_eq!(el.edges.len(), 2);
        assert!(matches!(
            read_edge_list("0 1\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
