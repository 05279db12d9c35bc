//! Sparsification by random coloring.
//!
//! General form: color V with `3k` colors and keep the k tripartitions
//! `(V_i, V_{k+i}, V_{2k+i})`, scaling their triangle total by `9k²/2`.
//! Tripartite form: split each of A, B, C into k random parts and keep
//! `(A_i, B_i, C_i)`, scaling by `k²`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{check_tripartition, count_triangles_tripartite_brute, Graph, VertexSet};
use crate::scalar::Scalar;

/// A color in `[1, 3k]` for every vertex of a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringAssignment {
    pub k: u32,
    vertices: VertexSet,
    colors: Vec<u32>,
}

impl ColoringAssignment {
    /// Builds an assignment from explicit colors, validating the range.
    pub fn from_colors(k: u32, vertices: VertexSet, colors: Vec<u32>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if vertices.len() != colors.len() {
            return Err(Error::InvalidParameter("one color per vertex required".into()));
        }
        if let Some(c) = colors.iter().find(|&&c| c == 0 || c > 3 * k) {
            return Err(Error::InvalidParameter(format!("color {c} outside [1, {}]", 3 * k)));
        }
        Ok(ColoringAssignment { k, vertices, colors })
    }

    pub fn color_of(&self, v: u32) -> Option<u32> {
        let i = self.vertices.as_slice().binary_search(&v).ok()?;
        Some(self.colors[i])
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    /// The color classes `V_1, …, V_{3k}` (index 0 holds color 1).
    pub fn classes(&self) -> Vec<VertexSet> {
        let mut classes = vec![Vec::new(); 3 * self.k as usize];
        for (v, &c) in self.vertices.iter().zip(&self.colors) {
            classes[c as usize - 1].push(v);
        }
        classes.into_iter().map(VertexSet::from_sorted).collect()
    }
}

/// The color set π(i) = {i, 1 + ((i+k−1) mod 3k), 1 + ((i+2k−1) mod 3k)}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColorTriple {
    pub i: u32,
    pub triple: [u32; 3],
}

impl ColorTriple {
    pub fn new(i: u32, k: u32) -> Self {
        let m = 3 * k;
        ColorTriple {
            i,
            triple: [i, 1 + (i + k - 1) % m, 1 + (i + 2 * k - 1) % m],
        }
    }

    fn sorted(&self) -> [u32; 3] {
        let mut t = self.triple;
        t.sort_unstable();
        t
    }
}

/// Colors every vertex of `vs` independently and uniformly from `[1, 3k]`.
pub fn color_vertices<R: Rng + ?Sized>(vs: &VertexSet, k: u32, rng: &mut R) -> ColoringAssignment {
    assert!(k >= 1, "k must be at least 1");
    let colors = vs.iter().map(|_| rng.gen_range(1..=3 * k)).collect();
    ColoringAssignment { k, vertices: vs.clone(), colors }
}

/// True iff the three colors are exactly π(i) for some i ∈ [3k], one each.
pub fn colors_are_proper(colors: [u32; 3], k: u32) -> bool {
    let mut c = colors;
    c.sort_unstable();
    (1..=3 * k).any(|i| ColorTriple::new(i, k).sorted() == c)
}

/// Whether the triangle `tri` is properly colored under `ca`. Vertices
/// missing from the assignment make it improper.
pub fn is_properly_colored(tri: [u32; 3], ca: &ColoringAssignment) -> bool {
    let mut colors = [0; 3];
    for (slot, v) in colors.iter_mut().zip(tri) {
        match ca.color_of(v) {
            Some(c) => *slot = c,
            None => return false,
        }
    }
    colors_are_proper(colors, ca.k)
}

/// A list of tripartitions plus the multiplier that turns their triangle
/// total into an estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsifyResult<S> {
    pub parts: Vec<[VertexSet; 3]>,
    pub scale: S,
}

impl<S: Scalar> SparsifyResult<S> {
    /// `scale · Σ counts`.
    pub fn scaled(&self, counts: impl IntoIterator<Item = u64>) -> S {
        let sum: u64 = counts.into_iter().sum();
        self.scale.clone() * S::from_count(sum)
    }

    /// Ground-truth Σ t(parts) by brute force. Empty parts contribute 0.
    pub fn properly_colored_count(&self, g: &Graph) -> u64 {
        self.parts
            .iter()
            .filter(|p| p.iter().all(|s| !s.is_empty()))
            .map(|[a, b, c]| count_triangles_tripartite_brute(g, a, b, c).expect("parts are disjoint"))
            .sum()
    }
}

/// The k tripartitions `(V_i, V_{k+i}, V_{2k+i})` of a coloring.
pub fn tripartitions_of(ca: &ColoringAssignment) -> Vec<[VertexSet; 3]> {
    let classes = ca.classes();
    let k = ca.k as usize;
    (0..k)
        .map(|i| [classes[i].clone(), classes[k + i].clone(), classes[2 * k + i].clone()])
        .collect()
}

/// Colors `vertices` with `[3k]`, returning the k tripartitions and the scale
/// `9k²/2`. Parts may be empty.
pub fn general_sparsify<S: Scalar, R: Rng + ?Sized>(
    vertices: &VertexSet,
    k: u32,
    rng: &mut R,
) -> SparsifyResult<S> {
    let ca = color_vertices(vertices, k, rng);
    SparsifyResult {
        parts: tripartitions_of(&ca),
        scale: S::ratio(9 * u64::from(k) * u64::from(k), 2),
    }
}

/// Splits each of A, B, C uniformly at random into k parts and returns the
/// tuples `(A_i, B_i, C_i)` with scale `k²`.
pub fn tripartite_sparsify<S: Scalar, R: Rng + ?Sized>(
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    k: u32,
    rng: &mut R,
) -> Result<SparsifyResult<S>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = [a, b, c]
        .iter()
        .filter_map(|s| s.as_slice().last())
        .max()
        .map_or(0, |&v| v as usize + 1);
    check_tripartition(n, a, b, c)?;
    let k = k as usize;
    let mut split = |s: &VertexSet| {
        let mut buckets = vec![Vec::new(); k];
        for v in s.iter() {
            buckets[rng.gen_range(0..k)].push(v);
        }
        buckets.into_iter().map(VertexSet::from_sorted).collect::<Vec<_>>()
    };
    let (sa, sb, sc) = (split(a), split(b), split(c));
    let parts = sa
        .into_iter()
        .zip(sb)
        .zip(sc)
        .map(|((x, y), z)| [x, y, z])
        .collect();
    Ok(SparsifyResult {
        parts,
        scale: S::from_count((k * k) as u64),
    })
}
