//! Finite digraphs, elementary paths and the graph metric.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite digraph on the dense vertex set `0..n`.
///
/// Edges are kept sorted, so adjacency lists (and therefore every path
/// enumeration built on them) come out in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    self_loops: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept edges `(v, v)`. Vertex degrees then count `v` as its own
    /// neighbour and the 0-form Laplacian no longer matches the classical
    /// `2(m(x)f(x) - Σ f(y))` shape.
    pub allow_self_loops: bool,
}

#[derive(Deserialize)]
struct DigraphJson {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

impl Digraph {
    pub fn new<I>(n_vertices: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::with_options(n_vertices, edges, ParseOptions::default())
    }

    pub fn with_options<I>(n_vertices: usize, edges: I, opts: ParseOptions) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n_vertices {
                    return Err(Error::VertexOutOfRange { vertex: x, n_vertices });
                }
            }
            if u == v && !opts.allow_self_loops {
                return Err(Error::SelfLoop(u));
            }
            if !set.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
        }
        Ok(Self::from_edge_set(n_vertices, set, opts.allow_self_loops))
    }

    fn from_edge_set(n: usize, edges: BTreeSet<(usize, usize)>, self_loops: bool) -> Self {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        for list in in_adj.iter_mut() {
            list.sort_unstable();
        }
        Digraph { n, edges, out_adj, in_adj, self_loops }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out_adj[u]
    }

    pub fn in_neighbors(&self, u: usize) -> &[usize] {
        &self.in_adj[u]
    }

    pub fn allows_self_loops(&self) -> bool {
        self.self_loops
    }

    /// True when every edge is matched by its reverse.
    pub fn is_symmetric(&self) -> bool {
        self.edges.iter().all(|&(u, v)| self.has_edge(v, u))
    }

    /// Adds the reverse of every edge.
    pub fn symmetrized(&self) -> Digraph {
        let mut edges = self.edges.clone();
        for &(u, v) in &self.edges {
            edges.insert((v, u));
        }
        Self::from_edge_set(self.n, edges, self.self_loops)
    }

    /// Connectivity of the underlying undirected graph. The empty digraph
    /// counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let dist = graph_distance(self);
        (0..self.n).all(|y| dist.get(0, y).is_some())
    }

    /// Image of the digraph under the vertex map `v -> perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Digraph> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: perm.len() });
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v]));
        Digraph::with_options(self.n, edges, ParseOptions { allow_self_loops: self.self_loops })
    }

    /// Vertex-disjoint union; vertices of `other` are shifted by `self.n_vertices()`.
    pub fn disjoint_union(&self, other: &Digraph) -> Digraph {
        let shift = self.n;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        Self::from_edge_set(self.n + other.n, edges, self.self_loops || other.self_loops)
    }

    /// Edge-list text with a `vertices N` header, accepted back by [`parse_digraph`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("vertices {}\n", self.n);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, edges=[", self.n)?;
        for (i, (u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}->{v}")?;
        }
        write!(f, "])")
    }
}

/// Parses the edge-list format (or its JSON alternative) with default options.
pub fn parse_digraph(text: &str) -> Result<Digraph> {
    parse_digraph_with(text, ParseOptions::default())
}

/// Edge-list grammar: one `u v` pair per line separated by a single space,
/// `#` comment lines, blank lines ignored, and an optional `vertices N`
/// header. A document whose first non-blank character is `{` is read as
/// `{"vertices": N, "edges": [[u, v], ...]}` instead.
pub fn parse_digraph_with(text: &str, opts: ParseOptions) -> Result<Digraph> {
    if text.trim_start().starts_with('{') {
        let doc: DigraphJson =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        return Digraph::with_options(doc.vertices, doc.edges.into_iter().map(|[u, v]| (u, v)), opts);
    }

    let mut header: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vertices ") {
            if header.is_some() || !edges.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "`vertices` header must appear once, before any edge".into(),
                });
            }
            header = Some(parse_id(rest, line_no)?);
            continue;
        }
        let mut parts = line.split(' ');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse { line: line_no, message: format!("expected `u v`, found {line:?}") });
        };
        edges.push((parse_id(a, line_no)?, parse_id(b, line_no)?));
    }

    let n = match header {
        Some(n) => n,
        None => edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0),
    };
    Digraph::with_options(n, edges, opts)
}

fn parse_id(token: &str, line: usize) -> Result<usize> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse { line, message: format!("not a vertex id: {token:?}") });
    }
    token.parse().map_err(|_| Error::Parse { line, message: format!("vertex id overflows: {token:?}") })
}

/// An elementary `p`-path: a sequence of `p + 1` vertex ids, repeats allowed.
/// Ordering is lexicographic on the tuple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementaryPath(pub Vec<usize>);

impl ElementaryPath {
    pub fn new(vertices: impl Into<Vec<usize>>) -> Self {
        ElementaryPath(vertices.into())
    }

    /// `p` for a path of `p + 1` vertices. The empty tuple has no dimension.
    pub fn dim(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Drops the vertex at position `q`.
    pub fn omit(&self, q: usize) -> ElementaryPath {
        let mut v = self.0.clone();
        v.remove(q);
        ElementaryPath(v)
    }

    /// Inserts `k` so that it ends up at position `q`.
    pub fn insert(&self, q: usize, k: usize) -> ElementaryPath {
        let mut v = self.0.clone();
        v.insert(q, k);
        ElementaryPath(v)
    }
}

impl fmt::Display for ElementaryPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl From<Vec<usize>> for ElementaryPath {
    fn from(v: Vec<usize>) -> Self {
        ElementaryPath(v)
    }
}

/// Allowedness on raw vertex slices, without range checks.
pub(crate) fn allowed_slice(g: &Digraph, path: &[usize]) -> bool {
    path.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

/// A path is allowed when every consecutive pair is an edge; 0-paths always are.
pub fn is_allowed(g: &Digraph, path: &ElementaryPath) -> Result<bool> {
    if let Some(&bad) = path.0.iter().find(|&&v| v >= g.n) {
        return Err(Error::VertexOutOfRange { vertex: bad, n_vertices: g.n });
    }
    Ok(allowed_slice(g, &path.0))
}

/// All allowed elementary `p`-paths in lexicographic order.
pub fn enumerate_allowed(g: &Digraph, p: usize) -> Vec<ElementaryPath> {
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(p + 1);
    for v in 0..g.n {
        stack.push(v);
        extend_paths(g, p, &mut stack, &mut out);
        stack.pop();
    }
    out
}

fn extend_paths(g: &Digraph, p: usize, stack: &mut Vec<usize>, out: &mut Vec<ElementaryPath>) {
    if stack.len() == p + 1 {
        out.push(ElementaryPath(stack.clone()));
        return;
    }
    let last = *stack.last().expect("non-empty");
    for &w in g.out_neighbors(last) {
        stack.push(w);
        extend_paths(g, p, stack, out);
        stack.pop();
    }
}

/// Number of distinct vertices adjacent to `x` in either direction.
pub fn degree(g: &Digraph, x: usize) -> Result<usize> {
    if x >= g.n {
        return Err(Error::VertexOutOfRange { vertex: x, n_vertices: g.n });
    }
    let mut nb: BTreeSet<usize> = g.out_adj[x].iter().copied().collect();
    nb.extend(g.in_adj[x].iter().copied());
    Ok(nb.len())
}

/// Hop distances over the symmetrized adjacency; `None` means unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<Option<usize>>,
}

impl DistanceTable {
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> Option<usize> {
        self.dist[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[Option<usize>] {
        &self.dist[x * self.n..(x + 1) * self.n]
    }
}

impl Serialize for DistanceTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<serde_json::Value>> = (0..self.n)
            .map(|x| {
                self.row(x)
                    .iter()
                    .map(|d| match d {
                        Some(d) => serde_json::Value::from(*d),
                        None => serde_json::Value::from("inf"),
                    })
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

pub fn graph_distance(g: &Digraph) -> DistanceTable {
    let n = g.n;
    let mut dist = vec![None; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist[s * n + s] = Some(0);
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            let dx = dist[s * n + x].expect("queued vertices are reached");
            for &y in g.out_adj[x].iter().chain(g.in_adj[x].iter()) {
                if dist[s * n + y].is_none() {
                    dist[s * n + y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
    }
    DistanceTable { n, dist }
}

/// The adjoint-based 0-form Laplacian on all vertex functions:
/// `(Δf)(x) = Σ_{x→y} (f(x) - f(y)) + Σ_{y→x} (f(x) - f(y))`.
///
/// On a symmetric digraph this is `2(m(x)f(x) - Σ_{y~x} f(y))`.
pub fn vertex_laplacian(g: &Digraph, f: &[f64]) -> Vec<f64> {
    (0..g.n).map(|x| g.out_adj[x].iter().chain(g.in_adj[x].iter()).map(|&y| f[x] - f[y]).sum()).collect()
}

/// `C = max(0, -min_x Δρ(x))` with `ρ = dist(·, x0)`.
pub fn curvature_bound(g: &Digraph, x0: usize) -> Result<f64> {
    if x0 >= g.n {
        return Err(Error::VertexOutOfRange { vertex: x0, n_vertices: g.n });
    }
    let dist = graph_distance(g);
    let rho =
        (0..g.n).map(|x| dist.get(x, x0).map(|d| d as f64).ok_or(Error::Disconnected)).collect::<Result<Vec<_>>>()?;
    let lap = vertex_laplacian(g, &rho);
    let min = lap.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((-min).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t3() -> Digraph {
        Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn parses_single_edge_and_cycle() {
        let g = parse_digraph("0 1").unwrap();
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(parse_digraph("0 1\n1 2\n2 0").unwrap(), t3());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse_digraph("0 1\n0 1"), Err(Error::DuplicateEdge(0, 1)));
        assert_eq!(parse_digraph("2 2"), Err(Error::SelfLoop(2)));
        assert!(matches!(parse_digraph("0  1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_digraph("0 1\nx 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_digraph("vertices 2\n0 5"), Err(Error::VertexOutOfRange { vertex: 5, n_vertices: 2 })));
        let loops = parse_digraph_with("1 1", ParseOptions { allow_self_loops: true }).unwrap();
        assert!(loops.has_edge(1, 1));
    }

    #[test]
    fn header_comments_and_json() {
        let g = parse_digraph("# c\nvertices 4\n\n0 1\n").unwrap();
        assert_eq!(g.n_vertices(), 4);
        let j = parse_digraph(r#"{"vertices": 3, "edges": [[0,1],[1,2],[2,0]]}"#).unwrap();
        assert_eq!(j, t3());
        assert_eq!(parse_digraph(&t3().to_edge_list()).unwrap(), t3());
        assert_eq!(parse_digraph("").unwrap().n_vertices(), 0);
    }

    #[test]
    fn allowedness() {
        let g1 = Digraph::new(2, [(0, 1)]).unwrap();
        assert!(is_allowed(&g1, &ElementaryPath::new([0, 1])).unwrap());
        assert!(!is_allowed(&g1, &ElementaryPath::new([1, 0])).unwrap());
        assert!(is_allowed(&g1, &ElementaryPath::new([1])).unwrap());
        assert!(is_allowed(&g1, &ElementaryPath::new([0, 7])).is_err());
    }

    #[test]
    fn enumerates_allowed_paths() {
        let g1 = Digraph::new(2, [(0, 1)]).unwrap();
        assert_eq!(enumerate_allowed(&g1, 1), vec![ElementaryPath::new([0, 1])]);
        let expect: Vec<_> = [[0, 1, 2], [1, 2, 0], [2, 0, 1]].iter().map(|p| ElementaryPath::new(*p)).collect();
        assert_eq!(enumerate_allowed(&t3(), 2), expect);
        let tr = Digraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(enumerate_allowed(&tr, 2), vec![ElementaryPath::new([0, 1, 2])]);
    }

    #[test]
    fn degrees_and_distances() {
        let g1 = Digraph::new(2, [(0, 1)]).unwrap();
        assert_eq!(degree(&g1, 0).unwrap(), 1);
        assert_eq!(degree(&t3(), 1).unwrap(), 2);
        let iso = Digraph::new(2, []).unwrap();
        assert_eq!(degree(&iso, 0).unwrap(), 0);
        assert_eq!(graph_distance(&g1).get(0, 1), Some(1));
        let path = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(graph_distance(&path).get(0, 2), Some(2));
        assert_eq!(graph_distance(&iso).get(0, 1), None);
        let js = serde_json::to_string(&graph_distance(&iso)).unwrap();
        assert_eq!(js, r#"[[0,"inf"],["inf",0]]"#);
    }

    #[test]
    fn curvature_bounds() {
        // ρ = (0, 1): Δρ(0) = -1, Δρ(1) = 1.
        let g1 = Digraph::new(2, [(0, 1)]).unwrap();
        assert_eq!(curvature_bound(&g1, 0).unwrap(), 1.0);
        assert_eq!(curvature_bound(&g1.symmetrized(), 0).unwrap(), 2.0);
        assert_eq!(curvature_bound(&Digraph::new(1, []).unwrap(), 0).unwrap(), 0.0);
        // ρ = (0, 1, 1): Δρ = (-2, 1, 1).
        assert_eq!(curvature_bound(&t3(), 0).unwrap(), 2.0);
        assert_eq!(curvature_bound(&Digraph::new(2, []).unwrap(), 0), Err(Error::Disconnected));
    }

    #[test]
    fn vertex_laplacian_matches_classical_form_on_symmetric_graphs() {
        let g = Digraph::new(3, [(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
        let f = [1.0, -2.0, 0.5];
        let lap = vertex_laplacian(&g, &f);
        for x in 0..3 {
            let m = degree(&g, x).unwrap() as f64;
            let nb: f64 = g.out_neighbors(x).iter().map(|&y| f[y]).sum();
            assert!((lap[x] - 2.0 * (m * f[x] - nb)).abs() < 1e-12);
        }
    }
}
