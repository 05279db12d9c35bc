//! Coarse estimation of t(A, B, C) within a polylogarithmic factor.
//!
//! [`verify_estimate`] probes random subsamples and accepts when a probe hits a
//! triangle; [`coarse_estimate`] walks a halving grid of candidates from `n³`
//! down to 1 and stops at the first one accepted often enough.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_tripartition, VertexSet};
use crate::oracle::{Phase, TisOracle};
use crate::scalar::{ceil_log2, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Repetitions per grid value and the acceptance fraction
/// `accept_num / accept_den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseParams {
    pub gamma: u64,
    pub accept_num: u64,
    pub accept_den: u64,
}

impl CoarseParams {
    /// Γ = 2000·⌈log₂ n⌉, accept at 1/10.
    pub fn theoretical(n: usize) -> Self {
        CoarseParams { gamma: 2000 * u64::from(ceil_log2(n)), accept_num: 1, accept_den: 10 }
    }

    /// Γ = 200, accept at 1/10.
    pub fn practical() -> Self {
        CoarseParams { gamma: 200, accept_num: 1, accept_den: 10 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma == 0 || self.accept_den == 0 || self.accept_num > self.accept_den {
            return Err(Error::InvalidParameter(format!("bad coarse parameters {self:?}")));
        }
        Ok(())
    }

    fn accepted(&self, count: u64) -> bool {
        count * self.accept_den >= self.gamma * self.accept_num
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoarseResult<S> {
    pub t_tilde: S,
    pub accepted_at: S,
    /// The factor `64 · ⌈log₂ n⌉²` the estimate is guaranteed within.
    pub bracket: S,
}

impl<S: Scalar> CoarseResult<S> {
    /// Whether `t / bracket ≤ t̃ ≤ t · bracket`.
    pub fn brackets(&self, t: u64) -> bool {
        let t = S::from_count(t);
        let lo = t.clone() / self.bracket.clone();
        let hi = t * self.bracket.clone();
        lo <= self.t_tilde && self.t_tilde <= hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum CoarseOutcome<S> {
    Estimate(CoarseResult<S>),
    /// No grid value was accepted.
    NoEstimate,
}

impl<S> CoarseOutcome<S> {
    pub fn estimate(&self) -> Option<&CoarseResult<S>> {
        match self {
            CoarseOutcome::Estimate(r) => Some(r),
            CoarseOutcome::NoEstimate => None,
        }
    }

    pub fn into_result(self) -> Result<CoarseResult<S>> {
        match self {
            CoarseOutcome::Estimate(r) => Ok(r),
            CoarseOutcome::NoEstimate => Err(Error::NoCoarseEstimate),
        }
    }
}

/// Keeps each element independently with probability `p`.
pub fn bernoulli_subset<R: Rng + ?Sized>(s: &VertexSet, p: f64, rng: &mut R) -> VertexSet {
    if p >= 1.0 {
        return s.clone();
    }
    if p <= 0.0 {
        return VertexSet::new();
    }
    VertexSet::from_sorted(s.iter().filter(|_| rng.gen_bool(p)).collect())
}

fn check_inputs(o: &TisOracle, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<()> {
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return Err(Error::Contract("vertex sets must be non-empty".into()));
    }
    check_tripartition(o.n(), a, b, c)
}

/// One accept/reject test of the candidate `t_hat` against t(A, B, C).
///
/// For `i = 2L, …, 0` and `j = L, …, 0` (L = ⌈log₂ n⌉) it samples A with
/// `min(2^i / t̂, 1)`, B with `min(2^j / 2^i · L, 1)` and C with `2^-j`, and
/// queries when all three samples are non-empty. The first YES accepts.
pub fn verify_estimate<S: Scalar, R: Rng + ?Sized>(
    o: &TisOracle,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    t_hat: &S,
    rng: &mut R,
) -> Result<Verdict> {
    check_inputs(o, a, b, c)?;
    if *t_hat < S::one() {
        return Err(Error::Contract("candidate estimate must be at least 1".into()));
    }
    verify_unchecked(o, a, b, c, t_hat.to_f64_lossy(), rng)
}

fn verify_unchecked<R: Rng + ?Sized>(
    o: &TisOracle,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    t_hat: f64,
    rng: &mut R,
) -> Result<Verdict> {
    let l = ceil_log2(o.n());
    for i in (0..=2 * l).rev() {
        for j in (0..=l).rev() {
            if probe_unchecked(o, a, b, c, t_hat, i, j, rng)? == Some(true) {
                return Ok(Verdict::Accept);
            }
        }
    }
    Ok(Verdict::Reject)
}

/// The single probe `(i, j)` of [`verify_estimate`]. `None` means a sample
/// came out empty and no query was made.
#[allow(clippy::too_many_arguments)]
pub fn probe<S: Scalar, R: Rng + ?Sized>(
    o: &TisOracle,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    t_hat: &S,
    i: u32,
    j: u32,
    rng: &mut R,
) -> Result<Option<bool>> {
    check_inputs(o, a, b, c)?;
    probe_unchecked(o, a, b, c, t_hat.to_f64_lossy(), i, j, rng)
}

#[allow(clippy::too_many_arguments)]
fn probe_unchecked<R: Rng + ?Sized>(
    o: &TisOracle,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    t_hat: f64,
    i: u32,
    j: u32,
    rng: &mut R,
) -> Result<Option<bool>> {
    let l = f64::from(ceil_log2(o.n()));
    let (i, j) = (i as i32, j as i32);
    let pa = (2f64.powi(i) / t_hat).min(1.0);
    let pb = (2f64.powi(j - i) * l).min(1.0);
    let pc = 2f64.powi(-j);
    let sa = bernoulli_subset(a, pa, rng);
    if sa.is_empty() {
        return Ok(None);
    }
    let sb = bernoulli_subset(b, pb, rng);
    if sb.is_empty() {
        return Ok(None);
    }
    let sc = bernoulli_subset(c, pc, rng);
    if sc.is_empty() {
        return Ok(None);
    }
    o.query(&sa, &sb, &sc, Phase::Coarse).map(Some)
}

/// The candidate grid `n³, n³/2, …, n³/2^{3L}`, each clamped to at least 1.
pub fn candidate_grid<S: Scalar>(n: usize) -> Vec<S> {
    let l = ceil_log2(n);
    let cube = (n as u64).pow(3);
    (0..=3 * l)
        .map(|k| {
            let den = 1u64 << k;
            if den >= cube {
                S::one()
            } else {
                S::ratio(cube, den)
            }
        })
        .collect()
}

/// Runs the halving grid and returns `t̃ = t̂ / ⌈log₂ n⌉` for the first
/// candidate accepted in at least `Γ · accept_num / accept_den` of Γ trials.
///
/// Trials for a candidate stop as soon as the verdict is settled; this does
/// not change the outcome.
pub fn coarse_estimate<S: Scalar, R: Rng + ?Sized>(
    o: &TisOracle,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    params: &CoarseParams,
    rng: &mut R,
) -> Result<CoarseOutcome<S>> {
    check_inputs(o, a, b, c)?;
    params.validate()?;
    let l = u64::from(ceil_log2(o.n()));
    for t_hat in candidate_grid::<S>(o.n()) {
        let th = t_hat.to_f64_lossy();
        let mut accepts = 0u64;
        for trial in 0..params.gamma {
            if verify_unchecked(o, a, b, c, th, rng)? == Verdict::Accept {
                accepts += 1;
            }
            let remaining = params.gamma - trial - 1;
            if params.accepted(accepts) || !params.accepted(accepts + remaining) {
                break;
            }
        }
        if params.accepted(accepts) {
            let ls = S::from_count(l);
            return Ok(CoarseOutcome::Estimate(CoarseResult {
                t_tilde: t_hat.clone() / ls.clone(),
                accepted_at: t_hat,
                bracket: S::from_count(64) * ls.clone() * ls,
            }));
        }
    }
    Ok(CoarseOutcome::NoEstimate)
}

/// Worst-case queries of one [`coarse_estimate`] call:
/// `(3L+1) · Γ · (2L+1)(L+1)`.
pub fn coarse_query_bound(n: usize, gamma: u64) -> u64 {
    let l = u64::from(ceil_log2(n));
    (3 * l + 1) * gamma * (2 * l + 1) * (l + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::complete_tripartite_block;
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parts(n: u32) -> (VertexSet, VertexSet, VertexSet) {
        let k = n / 3;
        ((0..k).collect(), (k..2 * k).collect(), (2 * k..n).collect())
    }

    #[test]
    fn no_triangles_always_rejects() {
        let o = TisOracle::new(Graph::empty(30));
        let (a, b, c) = parts(30);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(verify_estimate(&o, &a, &b, &c, &1.0f64, &mut rng).unwrap(), Verdict::Reject);
        }
        let l = u64::from(ceil_log2(30));
        assert!(o.total_queries() <= 20 * (2 * l + 1) * (l + 1));
    }

    #[test]
    fn verify_rejects_small_candidate() {
        let o = TisOracle::new(Graph::empty(9));
        let (a, b, c) = parts(9);
        let r = verify_estimate(&o, &a, &b, &c, &0.5f64, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(r.is_err());
    }

    #[test]
    fn queries_are_charged_to_coarse() {
        let (g, [a, b, c]) = complete_tripartite_block(30, [4, 4, 4], 3).unwrap();
        let o = TisOracle::new(g);
        verify_estimate(&o, &a, &b, &c, &1.0f64, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let l = o.snapshot_ledger();
        assert!(l.total >= 1);
        assert_eq!(l.get(Phase::Coarse), l.total);
    }

    #[test]
    fn grid_shape() {
        let g: Vec<f64> = candidate_grid(4);
        assert_eq!(g, vec![64.0, 32.0, 16.0, 8.0, 4.0, 2.0, 1.0]);
        let g: Vec<f64> = candidate_grid(64);
        assert_eq!(g.len(), 19);
        assert_eq!(g[0], 262144.0);
        assert_eq!(*g.last().unwrap(), 1.0);
    }

    #[test]
    fn zero_triangles_give_no_estimate() {
        let o = TisOracle::new(Graph::empty(16));
        let (a, b, c) = parts(16);
        let r: CoarseOutcome<f64> =
            coarse_estimate(&o, &a, &b, &c, &CoarseParams::practical(), &mut ChaCha8Rng::seed_from_u64(4))
                .unwrap();
        assert_eq!(r, CoarseOutcome::NoEstimate);
        assert!(matches!(r.into_result(), Err(Error::NoCoarseEstimate)));
        assert!(o.total_queries() <= coarse_query_bound(16, 200));
    }

    #[test]
    fn estimate_is_repeatable_and_brackets() {
        let (g, [a, b, c]) = complete_tripartite_block(64, [5, 5, 4], 9).unwrap();
        let o = TisOracle::new(g);
        let run = |seed| -> CoarseOutcome<f64> {
            coarse_estimate(&o, &a, &b, &c, &CoarseParams::practical(), &mut ChaCha8Rng::seed_from_u64(seed))
                .unwrap()
        };
        let first = run(5);
        assert_eq!(first, run(5));
        let est = first.estimate().expect("accepted");
        assert_eq!(est.bracket, 64.0 * 36.0);
        assert_eq!(est.t_tilde * 6.0, est.accepted_at);
        assert!(est.brackets(100));
    }

    #[test]
    fn bernoulli_extremes() {
        let s: VertexSet = (0..10).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(bernoulli_subset(&s, 1.0, &mut rng), s);
        assert!(bernoulli_subset(&s, 0.0, &mut rng).is_empty());
    }

    #[test]
    fn params_validation() {
        assert!(CoarseParams { gamma: 0, accept_num: 1, accept_den: 10 }.validate().is_err());
        assert!(CoarseParams { gamma: 5, accept_num: 2, accept_den: 1 }.validate().is_err());
        assert_eq!(CoarseParams::theoretical(64).gamma, 12000);
    }
}
