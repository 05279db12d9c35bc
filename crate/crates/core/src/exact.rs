//! Exact counting and threshold decisions over a tripartite triple, and the
//! randomized whole-graph threshold estimator built on them.
//!
//! Both tripartite routines explore the same labelled tree. The root is
//! `(A, B, C)`; every node is queried once. A NO node is a leaf. A YES node
//! whose three sets are singletons is one triangle. Any other YES node splits
//! each set of size > 1 into a `⌈·/2⌉` half (lower ids) and a `⌊·/2⌋` half and
//! gets every combination as a child, so 2, 4 or 8 children.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_tripartition, VertexSet};
use crate::oracle::{Phase, TisOracle};
use crate::scalar::{ceil_log2, Scalar};

/// Default multiplier in the node budget `factor · τ · ⌈log₂ n⌉`.
pub const DEFAULT_NODE_FACTOR: u64 = 16;
/// Default multiplier in the round count `⌈factor · ⌈log₂ n⌉ / ε²⌉`.
pub const DEFAULT_ROUNDS_FACTOR: f64 = 18.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMode {
    Exact,
    Approx,
}

/// Either the count is known to be above the threshold, or a value is
/// reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdOutcome<S> {
    ExceedsThreshold,
    Value { value: S, mode: CountMode },
}

impl<S> ThresholdOutcome<S> {
    pub fn exceeds(&self) -> bool {
        matches!(self, ThresholdOutcome::ExceedsThreshold)
    }

    pub fn value(&self) -> Option<&S> {
        match self {
            ThresholdOutcome::Value { value, .. } => Some(value),
            ThresholdOutcome::ExceedsThreshold => None,
        }
    }
}

fn check_nonempty(a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<()> {
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return Err(Error::Contract("vertex sets must be non-empty".into()));
    }
    Ok(())
}

/// Walks the counting tree. Returns `None` once more than `budget` nodes have
/// been queried.
fn explore_tree(
    o: &TisOracle,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    budget: Option<u64>,
    phase: Phase,
) -> Result<Option<u64>> {
    check_nonempty(a, b, c)?;
    check_tripartition(o.n(), a, b, c)?;
    let mut stack = vec![[a.clone(), b.clone(), c.clone()]];
    let mut nodes = 0u64;
    let mut count = 0u64;
    while let Some(node) = stack.pop() {
        nodes += 1;
        let yes = o.query(&node[0], &node[1], &node[2], phase)?;
        if budget.is_some_and(|limit| nodes > limit) {
            return Ok(None);
        }
        if !yes {
            continue;
        }
        if node.iter().all(|s| s.len() == 1) {
            count += 1;
            continue;
        }
        let halves: Vec<Vec<VertexSet>> = node
            .iter()
            .map(|s| {
                if s.len() > 1 {
                    let (lo, hi) = s.split_halves();
                    vec![lo, hi]
                } else {
                    vec![s.clone()]
                }
            })
            .collect();
        // Pushed in reverse so the lexicographically first child is explored first.
        let mut children = Vec::with_capacity(8);
        for x in &halves[0] {
            for y in &halves[1] {
                for z in &halves[2] {
                    children.push([x.clone(), y.clone(), z.clone()]);
                }
            }
        }
        stack.extend(children.into_iter().rev());
    }
    Ok(Some(count))
}

/// Exact t(A, B, C), charged to [`Phase::ExactCount`].
///
/// Uses at most `16 · max(t, 1) · ⌈log₂ n⌉` queries.
pub fn count_exact_tripartite(o: &TisOracle, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<u64> {
    count_exact_tripartite_in(o, a, b, c, Phase::ExactCount)
}

pub fn count_exact_tripartite_in(
    o: &TisOracle,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    phase: Phase,
) -> Result<u64> {
    Ok(explore_tree(o, a, b, c, None, phase)?.expect("unbounded exploration always completes"))
}

/// The node budget `factor · τ · ⌈log₂ n⌉`.
pub fn node_budget(n: usize, tau: u64, factor: u64) -> u64 {
    factor
        .saturating_mul(tau)
        .saturating_mul(u64::from(ceil_log2(n)))
}

/// Decides whether t(A, B, C) ≤ τ with the default node factor 16, charged to
/// [`Phase::ThresholdDecide`].
///
/// Returns the exact value whenever the tree stays within
/// `16 · τ · ⌈log₂ n⌉` nodes, and `ExceedsThreshold` otherwise. At most
/// `16 · τ · ⌈log₂ n⌉ + 1` queries.
pub fn decide_threshold_tripartite(
    o: &TisOracle,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    tau: u64,
) -> Result<ThresholdOutcome<u64>> {
    decide_threshold_tripartite_with(o, a, b, c, tau, DEFAULT_NODE_FACTOR, Phase::ThresholdDecide)
}

pub fn decide_threshold_tripartite_with(
    o: &TisOracle,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    tau: u64,
    node_factor: u64,
    phase: Phase,
) -> Result<ThresholdOutcome<u64>> {
    if tau == 0 {
        return Err(Error::Contract("threshold τ must be at least 1".into()));
    }
    let budget = node_budget(o.n(), tau, node_factor);
    Ok(match explore_tree(o, a, b, c, Some(budget), phase)? {
        Some(value) => ThresholdOutcome::Value { value, mode: CountMode::Exact },
        None => ThresholdOutcome::ExceedsThreshold,
    })
}

/// Parameters of the whole-graph threshold estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParams {
    pub tau: u64,
    pub eps: f64,
    pub rounds_factor: f64,
    pub node_factor: u64,
}

impl ThresholdParams {
    pub fn new(tau: u64, eps: f64) -> Self {
        ThresholdParams {
            tau,
            eps,
            rounds_factor: DEFAULT_ROUNDS_FACTOR,
            node_factor: DEFAULT_NODE_FACTOR,
        }
    }

    /// `⌈rounds_factor · ⌈log₂ n⌉ / ε²⌉`.
    pub fn rounds(&self, n: usize) -> u64 {
        (self.rounds_factor * f64::from(ceil_log2(n)) / (self.eps * self.eps)).ceil() as u64
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Contract(format!("ε = {} outside (0, 1)", self.eps)));
        }
        if self.tau == 0 {
            return Err(Error::Contract("threshold τ must be at least 1".into()));
        }
        if self.rounds_factor.is_nan() || self.rounds_factor <= 0.0 || self.node_factor == 0 {
            return Err(Error::Contract("round and node factors must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of the threshold estimator together with the per-round counts
/// t(Aᵢ, Bᵢ, Cᵢ) it observed (all rounds, or up to the first exceeding one).
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdTrace<S> {
    pub outcome: ThresholdOutcome<S>,
    pub round_counts: Vec<u64>,
    pub rounds_planned: u64,
}

/// Uniform random 3-partition of `0..n` with all parts non-empty (redrawn
/// otherwise). Requires `n ≥ 3`.
pub fn random_tripartition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> [VertexSet; 3] {
    assert!(n >= 3, "a tripartition with non-empty parts needs n ≥ 3");
    loop {
        let mut parts: [Vec<u32>; 3] = Default::default();
        for v in 0..n as u32 {
            parts[rng.gen_range(0..3)].push(v);
        }
        if parts.iter().all(|p| !p.is_empty()) {
            return parts.map(VertexSet::from_sorted);
        }
    }
}

/// Threshold-Approx-Estimate with the default factors (18 rounds factor,
/// 16 node factor).
pub fn threshold_approx_estimate<S: Scalar, R: Rng + ?Sized>(
    o: &TisOracle,
    tau: u64,
    eps: f64,
    rng: &mut R,
) -> Result<ThresholdOutcome<S>> {
    Ok(threshold_approx_trace(o, &ThresholdParams::new(tau, eps), rng)?.outcome)
}

/// Runs `N` rounds; each draws a uniform 3-partition of V and decides
/// t(Aᵢ, Bᵢ, Cᵢ) against τ. Stops at the first round with t(Aᵢ, Bᵢ, Cᵢ) > τ,
/// whether the decision aborted or counted past τ; otherwise
/// reports `9 · Σᵢ t(Aᵢ, Bᵢ, Cᵢ) / (2N)`. Queries are charged to
/// [`Phase::ThresholdEstimate`].
pub fn threshold_approx_trace<S: Scalar, R: Rng + ?Sized>(
    o: &TisOracle,
    params: &ThresholdParams,
    rng: &mut R,
) -> Result<ThresholdTrace<S>> {
    params.validate()?;
    let n = o.n();
    let rounds = params.rounds(n);
    if n < 3 {
        return Ok(ThresholdTrace {
            outcome: ThresholdOutcome::Value { value: S::zero(), mode: CountMode::Approx },
            round_counts: Vec::new(),
            rounds_planned: rounds,
        });
    }
    let mut round_counts = Vec::with_capacity(rounds as usize);
    for _ in 0..rounds {
        let [a, b, c] = random_tripartition(n, rng);
        match decide_threshold_tripartite_with(
            o,
            &a,
            &b,
            &c,
            params.tau,
            params.node_factor,
            Phase::ThresholdEstimate,
        )? {
            // The tree may fit its budget and still count more than τ; that
            // round exceeds just the same.
            ThresholdOutcome::Value { value, .. } if value <= params.tau => round_counts.push(value),
            _ => {
                return Ok(ThresholdTrace {
                    outcome: ThresholdOutcome::ExceedsThreshold,
                    round_counts,
                    rounds_planned: rounds,
                })
            }
        }
    }
    let sum: u64 = round_counts.iter().sum();
    let value = S::from_count(9 * sum) / S::from_count(2 * rounds);
    Ok(ThresholdTrace {
        outcome: ThresholdOutcome::Value { value, mode: CountMode::Approx },
        round_counts,
        rounds_planned: rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                e.push((u, v));
            }
        }
        Graph::new(n, e).unwrap()
    }

    #[test]
    fn exact_count_k4() {
        let o = TisOracle::new(complete(4));
        let t = count_exact_tripartite(&o, &[0].into(), &[1].into(), &[2, 3].into()).unwrap();
        assert_eq!(t, 2);
        assert!(o.total_queries() <= 16 * 2 * 2);
        // root YES, both children YES
        assert_eq!(o.total_queries(), 3);
        assert_eq!(o.snapshot_ledger().get(Phase::ExactCount), 3);
    }

    #[test]
    fn exact_count_no_triangle_costs_one_query() {
        let o = TisOracle::new(Graph::new(4, [(0, 1), (1, 2), (0, 2)]).unwrap());
        let t = count_exact_tripartite(&o, &[0].into(), &[1].into(), &[3].into()).unwrap();
        assert_eq!(t, 0);
        assert_eq!(o.total_queries(), 1);
    }

    #[test]
    fn exact_count_rejects_bad_sets() {
        let o = TisOracle::new(complete(4));
        assert!(count_exact_tripartite(&o, &[0].into(), &[0].into(), &[1].into()).is_err());
        assert!(count_exact_tripartite(&o, &VertexSet::new(), &[0].into(), &[1].into()).is_err());
    }

    #[test]
    fn decide_examples() {
        let o = TisOracle::new(Graph::new(4, [(0, 1), (1, 2), (0, 2)]).unwrap());
        let r = decide_threshold_tripartite(&o, &[0].into(), &[1].into(), &[3].into(), 5).unwrap();
        assert_eq!(r, ThresholdOutcome::Value { value: 0, mode: CountMode::Exact });

        // K_{8,8,8} has 512 triangles, far past the budget of 80 nodes.
        let o = TisOracle::new(complete(24));
        let (a, b, c): (VertexSet, VertexSet, VertexSet) =
            ((0..8).collect(), (8..16).collect(), (16..24).collect());
        let r = decide_threshold_tripartite(&o, &a, &b, &c, 1).unwrap();
        assert!(r.exceeds());
        assert_eq!(o.total_queries(), node_budget(24, 1, 16) + 1);

        let o = TisOracle::new(complete(4));
        let r = decide_threshold_tripartite(&o, &[0].into(), &[1].into(), &[2, 3].into(), 2).unwrap();
        assert_eq!(r.value(), Some(&2));
    }

    #[test]
    fn decide_rejects_zero_tau() {
        let o = TisOracle::new(complete(4));
        assert!(decide_threshold_tripartite(&o, &[0].into(), &[1].into(), &[2].into(), 0).is_err());
    }

    #[test]
    fn tiny_node_factor_forces_abort() {
        let o = TisOracle::new(complete(6));
        let r = decide_threshold_tripartite_with(
            &o,
            &[0, 1].into(),
            &[2, 3].into(),
            &[4, 5].into(),
            1,
            1,
            Phase::ThresholdDecide,
        )
        .unwrap();
        assert!(r.exceeds());
        // budget = 1 · 1 · 3
        assert_eq!(o.total_queries(), 4);
    }

    #[test]
    fn edgeless_graph_estimates_zero() {
        let o = TisOracle::new(Graph::empty(20));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r: ThresholdOutcome<f64> = threshold_approx_estimate(&o, 10, 0.5, &mut rng).unwrap();
        assert_eq!(r, ThresholdOutcome::Value { value: 0.0, mode: CountMode::Approx });
    }

    #[test]
    fn rounds_formula() {
        let p = ThresholdParams::new(10, 0.5);
        // 18 · 6 / 0.25
        assert_eq!(p.rounds(64), 432);
        assert_eq!(ThresholdParams::new(10, 0.1).rounds(128), 12600);
    }

    #[test]
    fn threshold_estimate_rejects_bad_eps() {
        let o = TisOracle::new(Graph::empty(5));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(threshold_approx_estimate::<f64, _>(&o, 10, 1.0, &mut rng).is_err());
        assert!(threshold_approx_estimate::<f64, _>(&o, 0, 0.5, &mut rng).is_err());
    }

    #[test]
    fn exact_rational_estimate() {
        use num_rational::BigRational;
        let o = TisOracle::new(Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let trace = threshold_approx_trace::<BigRational, _>(&o, &ThresholdParams::new(10, 0.5), &mut rng)
            .unwrap();
        let sum: u64 = trace.round_counts.iter().sum();
        let expected = BigRational::new((9 * sum).into(), (2 * trace.rounds_planned).into());
        assert_eq!(trace.outcome.value(), Some(&expected));
    }

    #[test]
    fn counted_excess_stops_the_estimator() {
        // K6 on all six vertices: every round sees a few triangles, and the
        // generous node budget means the tree always completes.
        let edges = (0..6u32).flat_map(|u| (u + 1..6).map(move |v| (u, v)));
        let o = TisOracle::new(Graph::new(6, edges).unwrap());
        let params = ThresholdParams { node_factor: 10_000, ..ThresholdParams::new(1, 0.5) };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trace = threshold_approx_trace::<f64, _>(&o, &params, &mut rng).unwrap();
        assert!(trace.outcome.exceeds());
        assert!(trace.round_counts.iter().all(|&t| t <= 1));
    }
}
