//! Seeded graph generators for test families with controlled Δ_E.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Absolute tolerance when deciding that two points are at distance exactly 1.
pub const UNIT_DISTANCE_TOLERANCE: f64 = 1e-9;

/// A graph family plus its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// G(n, p).
    ErdosRenyi { n: usize, p: f64 },
    /// Vertex-disjoint "books": an edge shared by exactly `d` triangles,
    /// repeated `gadgets` times. Δ_E = d, t = d · gadgets.
    Planted { n: usize, d: usize, gadgets: usize },
    /// Edge iff the Euclidean distance is 1. Δ_E ≤ 2.
    UnitDistance { points: Vec<(f64, f64)> },
    /// `cliques` disjoint copies of K_`clique_size`. Δ_E = clique_size − 2.
    CliqueUnion { n: usize, clique_size: usize, cliques: usize },
    /// Circulant graph on Z_n whose connection set is grown greedily while
    /// every edge stays in at most `d` triangles. Degree is capped at
    /// `max_degree`.
    Circulant { n: usize, d: usize, max_degree: usize },
}

impl GeneratorSpec {
    pub fn n(&self) -> usize {
        match self {
            GeneratorSpec::ErdosRenyi { n, .. }
            | GeneratorSpec::Planted { n, .. }
            | GeneratorSpec::CliqueUnion { n, .. }
            | GeneratorSpec::Circulant { n, .. } => *n,
            GeneratorSpec::UnitDistance { points } => points.len(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut p: Vec<u32> = (0..n as u32).collect();
    p.shuffle(rng);
    p
}

/// Generates a graph from `spec`, drawing all randomness from `seed`.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        GeneratorSpec::ErdosRenyi { n, p } => erdos_renyi(*n, *p, &mut rng),
        GeneratorSpec::Planted { n, d, gadgets } => {
            planted_books(*n, *d, *gadgets, &mut rng).map(|(g, _)| g)
        }
        GeneratorSpec::UnitDistance { points } => unit_distance(points),
        GeneratorSpec::CliqueUnion { n, clique_size, cliques } => {
            clique_union(*n, *clique_size, *cliques, &mut rng)
        }
        GeneratorSpec::Circulant { n, d, max_degree } => circulant(*n, *d, *max_degree, &mut rng),
    }
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Planted books plus the natural tripartition (spine endpoints in A and B,
/// apexes in C) under which every triangle is tripartite.
fn planted_books(
    n: usize,
    d: usize,
    gadgets: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Graph, [VertexSet; 3])> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let need = (d + 2)
        .checked_mul(gadgets)
        .ok_or_else(|| invalid("gadget count overflows"))?;
    if need > n {
        return Err(invalid(format!(
            "planted family needs (d+2)·gadgets = {need} vertices but n = {n}"
        )));
    }
    let perm = permutation(n, rng);
    let mut next = perm.into_iter();
    let mut edges = Vec::new();
    let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..gadgets {
        let u = next.next().unwrap();
        let v = next.next().unwrap();
        edges.push((u, v));
        a.push(u);
        b.push(v);
        for _ in 0..d {
            let w = next.next().unwrap();
            edges.push((u, w));
            edges.push((v, w));
            c.push(w);
        }
    }
    let g = Graph::new(n, edges)?;
    Ok((g, [a.into_iter().collect(), b.into_iter().collect(), c.into_iter().collect()]))
}

/// Planted books together with a tripartition (A, B, C) for which
/// t(A, B, C) = t(G) = d · gadgets.
pub fn planted_tripartite(
    n: usize,
    d: usize,
    gadgets: usize,
    seed: u64,
) -> Result<(Graph, [VertexSet; 3])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    planted_books(n, d, gadgets, &mut rng)
}

/// A complete tripartite block K_{sizes[0], sizes[1], sizes[2]} planted on
/// randomly chosen vertices of an otherwise empty graph on `n` vertices.
/// Returns the block's parts, so t(A, B, C) = sizes[0]·sizes[1]·sizes[2].
pub fn complete_tripartite_block(
    n: usize,
    sizes: [usize; 3],
    seed: u64,
) -> Result<(Graph, [VertexSet; 3])> {
    let total: usize = sizes.iter().sum();
    if total > n {
        return Err(invalid(format!("block needs {total} vertices but n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perm = permutation(n, &mut rng);
    let parts: Vec<Vec<u32>> = vec![
        perm[..sizes[0]].to_vec(),
        perm[sizes[0]..sizes[0] + sizes[1]].to_vec(),
        perm[sizes[0] + sizes[1]..total].to_vec(),
    ];
    let mut edges = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            for &u in &parts[i] {
                for &v in &parts[j] {
                    edges.push((u, v));
                }
            }
        }
    }
    let g = Graph::new(n, edges)?;
    let mut it = parts.into_iter().map(|p| p.into_iter().collect::<VertexSet>());
    Ok((g, [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]))
}

fn unit_distance(points: &[(f64, f64)]) -> Result<Graph> {
    if points.is_empty() {
        return Err(invalid("unit-distance family needs at least one point"));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(invalid("points must be finite"));
    }
    let mut edges = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate().skip(i + 1) {
            let dist = (p.0 - q.0).hypot(p.1 - q.1);
            if dist <= UNIT_DISTANCE_TOLERANCE {
                return Err(invalid(format!("points {i} and {j} coincide")));
            }
            if (dist - 1.0).abs() <= UNIT_DISTANCE_TOLERANCE {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Graph::new(points.len(), edges)
}

fn clique_union(n: usize, size: usize, cliques: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if size.checked_mul(cliques).is_none_or(|need| need > n) {
        return Err(invalid(format!(
            "{cliques} cliques of size {size} do not fit in n = {n}"
        )));
    }
    let perm = permutation(n, rng);
    let mut edges = Vec::new();
    for block in perm.chunks(size.max(1)).take(cliques) {
        for (i, &u) in block.iter().enumerate() {
            for &v in &block[i + 1..] {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Number of y in `set` with `y - x` also in `set` (arithmetic mod n).
fn codegree(x: usize, members: &[usize], in_set: &[bool], n: usize) -> usize {
    members
        .iter()
        .filter(|&&y| in_set[(y + n - x) % n])
        .count()
}

fn circulant(n: usize, d: usize, max_degree: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if n < 3 {
        return Err(invalid("circulant family needs n ≥ 3"));
    }
    let mut candidates: Vec<usize> = (1..n.div_ceil(2)).collect();
    candidates.shuffle(rng);
    let mut in_set = vec![false; n];
    let mut members: Vec<usize> = Vec::new();
    for g in candidates {
        if members.len() + 2 > max_degree {
            break;
        }
        in_set[g] = true;
        in_set[n - g] = true;
        members.push(g);
        members.push(n - g);
        let ok = members.iter().all(|&x| codegree(x, &members, &in_set, n) <= d);
        if !ok {
            in_set[g] = false;
            in_set[n - g] = false;
            members.truncate(members.len() - 2);
        }
    }
    let perm = permutation(n, rng);
    let mut edges = Vec::with_capacity(n * members.len() / 2);
    for u in 0..n {
        for &x in members.iter().filter(|&&x| x < n - x) {
            edges.push((perm[u], perm[(u + x) % n]));
        }
    }
    Graph::new(n, edges)
}
