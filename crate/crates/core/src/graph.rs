//! Undirected simple graphs, vertex sets, and brute-force triangle statistics.
//!
//! The brute-force counts here are the ground truth that every estimator is
//! checked against. They read the graph directly and never go through the
//! query oracle.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sorted, duplicate-free set of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct VertexSet(Vec<u32>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// Builds a set from an already sorted, duplicate-free vector.
    pub fn from_sorted(v: Vec<u32>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]), "vertex set must be strictly sorted");
        VertexSet(v)
    }

    /// All vertices `0..n`.
    pub fn full(n: usize) -> Self {
        VertexSet((0..n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Splits into halves of sizes `⌈len/2⌉` and `⌊len/2⌋`; the half holding
    /// the smaller ids gets the ceiling.
    pub fn split_halves(&self) -> (VertexSet, VertexSet) {
        let mid = self.0.len().div_ceil(2);
        (
            VertexSet(self.0[..mid].to_vec()),
            VertexSet(self.0[mid..].to_vec()),
        )
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }
}

impl FromIterator<u32> for VertexSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut v: Vec<u32> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl From<Vec<u32>> for VertexSet {
    fn from(v: Vec<u32>) -> Self {
        v.into_iter().collect()
    }
}

impl From<VertexSet> for Vec<u32> {
    fn from(s: VertexSet) -> Self {
        s.0
    }
}

impl<const K: usize> From<[u32; K]> for VertexSet {
    fn from(a: [u32; K]) -> Self {
        a.into_iter().collect()
    }
}

/// Checks that three vertex sets are pairwise disjoint and inside `[0, n)`.
pub fn check_tripartition(n: usize, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<()> {
    for s in [a, b, c] {
        if let Some(&v) = s.as_slice().last() {
            if v as usize >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
        }
    }
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::Contract("vertex sets must be pairwise disjoint".into()));
    }
    Ok(())
}

/// An undirected simple graph on vertices `0..n`.
///
/// Stores the edge list (each pair once, `u < v`, sorted) and sorted
/// per-vertex neighbor lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, out-of-range ids and duplicate
    /// pairs (in either orientation).
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            Self::check_pair(n, u, v)?;
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge { u: w[0].0, v: w[0].1 });
        }
        Ok(Self::from_canonical(n, list))
    }

    /// Like [`Graph::new`] but silently drops repeated pairs.
    pub fn from_edges_dedup<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            Self::check_pair(n, u, v)?;
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_canonical(n, list))
    }

    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    fn check_pair(n: usize, u: u32, v: u32) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop { u, v });
        }
        for x in [u, v] {
            if x as usize >= n {
                return Err(Error::VertexOutOfRange { vertex: x, n });
            }
        }
        Ok(())
    }

    fn from_canonical(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if u == v || u as usize >= self.n || v as usize >= self.n {
            return false;
        }
        let (x, y) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.adj[x as usize].binary_search(&y).is_ok()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }
}

/// Exact triangle statistics of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleStats {
    /// t(G).
    pub t: u64,
    /// Δ_u for every vertex.
    pub delta_per_vertex: Vec<u64>,
    /// Δ_(u,v), aligned with [`Graph::edges`].
    pub delta_per_edge: Vec<u64>,
    /// Δ_E, the largest entry of `delta_per_edge` (0 when there are no edges).
    pub delta_e: u64,
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut k) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                k += 1;
                i += 1;
                j += 1;
            }
        }
    }
    k
}

/// Exact triangle count with per-vertex and per-edge incidences.
pub fn count_triangles_brute(g: &Graph) -> TriangleStats {
    let delta_per_edge: Vec<u64> = g
        .edges()
        .iter()
        .map(|&(u, v)| sorted_intersection_len(g.neighbors(u), g.neighbors(v)))
        .collect();
    let mut twice_per_vertex = vec![0u64; g.n()];
    for (&(u, v), &d) in g.edges().iter().zip(&delta_per_edge) {
        twice_per_vertex[u as usize] += d;
        twice_per_vertex[v as usize] += d;
    }
    let sum: u64 = delta_per_edge.iter().sum();
    debug_assert_eq!(sum % 3, 0);
    TriangleStats {
        t: sum / 3,
        delta_per_vertex: twice_per_vertex.into_iter().map(|x| x / 2).collect(),
        delta_e: delta_per_edge.iter().copied().max().unwrap_or(0),
        delta_per_edge,
    }
}

/// t(A, B, C): triangles with one vertex in each of the three parts.
/// Edges inside a part are irrelevant.
pub fn count_triangles_tripartite_brute(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
) -> Result<u64> {
    check_tripartition(g.n(), a, b, c)?;
    let mut label = vec![0u8; g.n()];
    for v in b.iter() {
        label[v as usize] = 1;
    }
    for v in c.iter() {
        label[v as usize] = 2;
    }
    let mut count = 0;
    for x in a.iter() {
        let nbrs = g.neighbors(x);
        for &y in nbrs.iter().filter(|&&y| label[y as usize] == 1) {
            count += nbrs
                .iter()
                .filter(|&&z| label[z as usize] == 2 && g.has_edge(y, z))
                .count() as u64;
        }
    }
    Ok(count)
}

/// Parses the edge-list text format: a first line holding `n`, then one
/// whitespace-separated `u v` pair per line. Blank lines and lines starting
/// with `#` are ignored.
pub fn parse_edge_list(text: &str, origin: &Path) -> Result<Graph> {
    let perr = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| perr(1, "missing vertex count".into()))?;
    let n: usize = header
        .parse()
        .map_err(|_| perr(hline, format!("expected vertex count, found {header:?}")))?;

    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let mut it = line.split_whitespace();
        let (Some(su), Some(sv), None) = (it.next(), it.next(), it.next()) else {
            return Err(perr(lineno, format!("expected \"u v\", found {line:?}")));
        };
        let parse = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| perr(lineno, format!("invalid vertex id {s:?}")))
        };
        let (u, v) = (parse(su)?, parse(sv)?);
        if u == v {
            return Err(perr(lineno, format!("self-loop on vertex {u}")));
        }
        if u as usize >= n || v as usize >= n {
            return Err(perr(lineno, format!("vertex id out of range for n = {n}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(perr(lineno, format!("duplicate edge ({u}, {v})")));
        }
        edges.push((u, v));
    }
    Graph::new(n, edges)
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, path)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + g.edge_count() * 12);
    let _ = writeln!(out, "{}", g.n());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_edge_list(g))?;
    Ok(())
}
