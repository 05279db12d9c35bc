//! Shared fixtures for the acceptance suite.
//!
//! The suite itself lives in `tests/acceptance.rs` and runs with
//! `cargo test -p tis-validation --test acceptance`.

use std::fmt;
use std::time::Duration;

use rand::Rng;
use tis_core::{GeneratorSpec, Graph, Tuple, VertexSet};

/// Result of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Outcome {
    /// Whether both the check and the time limit passed.
    pub fn ok(&self) -> bool {
        self.passed && self.elapsed <= self.limit
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.ok() { "PASS" } else { "FAIL" };
        let slow = if self.elapsed > self.limit { " (over time limit)" } else { "" };
        write!(
            f,
            "[{verdict}] {:>2}. {:<32} {:>8.2}s / {:>4}s{slow}  {}",
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

/// A random graph on 3..=32 vertices with a random tripartition of a
/// subset of its vertices. Every part is non-empty.
pub fn random_case<R: Rng + ?Sized>(rng: &mut R) -> (Graph, [VertexSet; 3]) {
    let n = rng.gen_range(3..=32usize);
    let p: f64 = rng.gen();
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let mut labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let shift = rng.gen_range(0..n);
    for part in 0..3u8 {
        labels[(part as usize + shift) % n] = part;
    }
    let part = |p: u8| (0..n as u32).filter(|&v| labels[v as usize] == p).collect();
    (Graph::new(n, edges).expect("valid edges"), [part(0), part(1), part(2)])
}

/// `r` disjoint books. Book i has spine (x, y) and 1..=8 pages, giving the
/// tuple ({x}, {y}, pages) with t = pages. Weights are uniform in [1, 20]
/// and each estimate is t·U with U log-uniform in [1/4, 4], floored at 1.
///
/// Returns the graph, the tuples and their exact counts.
pub fn book_tuples<R: Rng + ?Sized>(r: usize, rng: &mut R) -> (Graph, Vec<Tuple>, Vec<u64>) {
    let mut edges = Vec::new();
    let mut tuples = Vec::with_capacity(r);
    let mut counts = Vec::with_capacity(r);
    let mut next = 0u32;
    for _ in 0..r {
        let pages = rng.gen_range(1..=8u32);
        let (x, y) = (next, next + 1);
        let apex: Vec<u32> = (next + 2..next + 2 + pages).collect();
        next += 2 + pages;
        edges.push((x, y));
        for &z in &apex {
            edges.push((x, z));
            edges.push((y, z));
        }
        let t = u64::from(pages);
        let u = (rng.gen_range(-2.0f64..2.0)).exp2();
        let e = (t as f64 * u).max(1.0);
        let w = rng.gen_range(1.0..=20.0);
        tuples.push(
            Tuple::new(VertexSet::from_sorted(vec![x]), VertexSet::from_sorted(vec![y]), VertexSet::from_sorted(apex), w)
                .with_estimate(e),
        );
        counts.push(t);
    }
    (Graph::new(next as usize, edges).expect("valid edges"), tuples, counts)
}

/// The end-to-end suite: n from 64 to 2048, Δ_E ≤ 4, t from 168 to 145408.
pub fn end_to_end_suite() -> Vec<GeneratorSpec> {
    vec![
        GeneratorSpec::CliqueUnion { n: 64, clique_size: 6, cliques: 10 },
        GeneratorSpec::CliqueUnion { n: 128, clique_size: 6, cliques: 20 },
        GeneratorSpec::Planted { n: 256, d: 4, gadgets: 42 },
        GeneratorSpec::Planted { n: 512, d: 4, gadgets: 85 },
        GeneratorSpec::Planted { n: 2048, d: 4, gadgets: 341 },
        GeneratorSpec::Circulant { n: 256, d: 4, max_degree: 250 },
        GeneratorSpec::Circulant { n: 512, d: 4, max_degree: 500 },
        GeneratorSpec::Circulant { n: 1024, d: 4, max_degree: 1000 },
        GeneratorSpec::Circulant { n: 2048, d: 4, max_degree: 100 },
        GeneratorSpec::Circulant { n: 2048, d: 4, max_degree: 1000 },
    ]
}

/// C(n, 3).
pub fn choose3(n: usize) -> u64 {
    let n = n as u64;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Empirical mean and sample standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}
