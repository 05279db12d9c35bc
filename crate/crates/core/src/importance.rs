//! Importance sampling of weighted tuples.
//!
//! A list of r tuples `(A, B, C, w)` with coarse estimates `e` is replaced by
//! at most s reweighted copies whose weighted triangle mass matches the
//! original in expectation.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedTuple<S> {
    pub a: VertexSet,
    pub b: VertexSet,
    pub c: VertexSet,
    pub w: S,
    pub e: Option<S>,
}

impl<S: Scalar> WeightedTuple<S> {
    pub fn new(a: VertexSet, b: VertexSet, c: VertexSet, w: S) -> Self {
        WeightedTuple { a, b, c, w, e: None }
    }

    pub fn with_estimate(mut self, e: S) -> Self {
        self.e = Some(e);
        self
    }

    pub fn has_empty_side(&self) -> bool {
        self.a.is_empty() || self.b.is_empty() || self.c.is_empty()
    }

    pub fn sets(&self) -> [&VertexSet; 3] {
        [&self.a, &self.b, &self.c]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerParams {
    pub lambda: f64,
    pub rho: f64,
    pub delta: f64,
    /// Upper bound M on Σ w·t.
    pub m_bound: f64,
    /// Constant in front of the sample-size formula.
    pub c_s: f64,
    /// Fixed output size; overrides the formula when set.
    pub target: Option<usize>,
}

impl SamplerParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lambda > 0.0
            && self.lambda < 1.0
            && self.delta > 0.0
            && self.delta < 1.0
            && self.rho >= 1.0
            && self.m_bound >= 1.0
            && self.c_s > 0.0
            && self.target != Some(0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad sampler parameters {self:?}")))
        }
    }

    /// `⌈c_s · λ⁻² · ρ⁴ · log₂ M · (log₂ log₂ M + log₂(1/δ))⌉`, at least 1.
    pub fn formula_size(&self) -> f64 {
        let lm = self.m_bound.log2().max(1.0);
        let inner = lm.log2().max(0.0) + (1.0 / self.delta).log2();
        (self.c_s * self.rho.powi(4) * lm * inner / (self.lambda * self.lambda))
            .ceil()
            .max(1.0)
    }

    /// Output size for r input tuples.
    pub fn sample_size(&self, r: usize) -> usize {
        let s = match self.target {
            Some(t) => t,
            None => {
                let f = self.formula_size();
                if f >= r as f64 {
                    r
                } else {
                    f as usize
                }
            }
        };
        s.min(r)
    }
}

/// Which of the three input conditions hold, given ground-truth counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conditions {
    /// w ≥ 1 and e ≥ 1 for every tuple.
    pub weights: bool,
    /// e/ρ ≤ t ≤ e·ρ for every tuple.
    pub bracket: bool,
    /// Σ w·t ≤ M.
    pub mass: bool,
}

impl Conditions {
    pub fn all(&self) -> bool {
        self.weights && self.bracket && self.mass
    }
}

/// Evaluates the conditions with `counts[i] = t(A_i, B_i, C_i)`.
pub fn check_conditions<S: Scalar>(
    tuples: &[WeightedTuple<S>],
    counts: &[u64],
    rho: &S,
    m_bound: &S,
) -> Conditions {
    assert_eq!(tuples.len(), counts.len(), "one count per tuple");
    let one = S::one();
    let weights = tuples
        .iter()
        .all(|tp| tp.w >= one && tp.e.as_ref().is_some_and(|e| *e >= one));
    let bracket = tuples.iter().zip(counts).all(|(tp, &t)| match &tp.e {
        Some(e) => {
            let t = S::from_count(t);
            e.clone() <= t.clone() * rho.clone() && t <= e.clone() * rho.clone()
        }
        None => false,
    });
    let mass = weighted_mass(tuples, counts) <= *m_bound;
    Conditions { weights, bracket, mass }
}

/// Σ w_i · counts[i].
pub fn weighted_mass<S: Scalar>(tuples: &[WeightedTuple<S>], counts: &[u64]) -> S {
    tuples
        .iter()
        .zip(counts)
        .fold(S::zero(), |acc, (tp, &t)| acc + tp.w.clone() * S::from_count(t))
}

/// Samples `s = params.sample_size(r)` tuples with probability proportional
/// to `w·e`, with replacement. A tuple drawn `m` times gets weight
/// `m · W / (s · e)` with `W = Σ w·e`, so that `E[w'] = w`. Weights below 1
/// are raised to 1 and the remaining weights are scaled down to keep
/// `Σ w'·e = W`.
///
/// Returns the input unchanged when `r ≤ s`. Output keeps input order.
pub fn importance_sample<S: Scalar, R: Rng + ?Sized>(
    tuples: &[WeightedTuple<S>],
    params: &SamplerParams,
    rng: &mut R,
) -> Result<Vec<WeightedTuple<S>>> {
    params.validate()?;
    let mut es = Vec::with_capacity(tuples.len());
    for tp in tuples {
        match &tp.e {
            Some(e) if *e >= S::one() => es.push(e.clone()),
            Some(_) => return Err(Error::Contract("coarse estimate must be at least 1".into())),
            None => return Err(Error::Contract("tuple is missing its coarse estimate".into())),
        }
        if tp.w < S::one() {
            return Err(Error::Contract("tuple weight must be at least 1".into()));
        }
    }
    let r = tuples.len();
    let s = params.sample_size(r);
    if s >= r {
        return Ok(tuples.to_vec());
    }

    let mass: Vec<S> = tuples.iter().zip(&es).map(|(tp, e)| tp.w.clone() * e.clone()).collect();
    let total = mass.iter().fold(S::zero(), |acc, m| acc + m.clone());
    let dist = WeightedIndex::new(mass.iter().map(Scalar::to_f64_lossy))
        .map_err(|e| Error::InvalidParameter(format!("cannot sample tuples: {e}")))?;
    let mut draws = vec![0u64; r];
    for _ in 0..s {
        draws[dist.sample(rng)] += 1;
    }

    let per_draw = total.clone() / S::from_count(s as u64);
    let picked: Vec<usize> = (0..r).filter(|&i| draws[i] > 0).collect();
    let mut weights: Vec<S> = picked
        .iter()
        .map(|&i| S::from_count(draws[i]) * per_draw.clone() / es[i].clone())
        .collect();
    let picked_es: Vec<S> = picked.iter().map(|&i| es[i].clone()).collect();
    clamp_and_renormalize(&mut weights, &picked_es, &total);

    Ok(picked
        .iter()
        .zip(weights)
        .map(|(&i, w)| WeightedTuple { w, ..tuples[i].clone() })
        .collect())
}

/// Raises weights below 1 to 1 and rescales the others so `Σ w·e` stays at
/// `total`. If everything would need clamping the sum is allowed to grow.
fn clamp_and_renormalize<S: Scalar>(weights: &mut [S], es: &[S], total: &S) {
    let one = S::one();
    let mut fixed = vec![false; weights.len()];
    loop {
        let mut changed = false;
        for (w, f) in weights.iter_mut().zip(fixed.iter_mut()) {
            if !*f && *w < one {
                *w = one.clone();
                *f = true;
                changed = true;
            }
        }
        if !changed {
            return;
        }
        let fixed_mass = es
            .iter()
            .zip(&fixed)
            .filter(|(_, &f)| f)
            .fold(S::zero(), |acc, (e, _)| acc + e.clone());
        let free_mass = weights
            .iter()
            .zip(es)
            .zip(&fixed)
            .filter(|(_, &f)| !f)
            .fold(S::zero(), |acc, ((w, e), _)| acc + w.clone() * e.clone());
        if free_mass <= S::zero() || fixed_mass >= *total {
            return;
        }
        let factor = (total.clone() - fixed_mass) / free_mass;
        if factor >= one {
            return;
        }
        for (w, &f) in weights.iter_mut().zip(&fixed) {
            if !f {
                *w = w.clone() * factor.clone();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tuple<S: Scalar>(base: u32, w: S, e: S) -> WeightedTuple<S> {
        WeightedTuple::new([base].into(), [base + 1].into(), [base + 2].into(), w).with_estimate(e)
    }

    fn params(target: Option<usize>) -> SamplerParams {
        SamplerParams { lambda: 0.2, rho: 4.0, delta: 0.05, m_bound: 1e6, c_s: 1.0, target }
    }

    #[test]
    fn small_input_is_identity() {
        let ts: Vec<_> = (0..5).map(|i| tuple(3 * i, 2.0, 7.0)).collect();
        let out = importance_sample(&ts, &params(None), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(out, ts);
        let out = importance_sample(&ts, &params(Some(5)), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(out, ts);
    }

    #[test]
    fn identical_tuples_preserve_total_weight_exactly() {
        let r = |x: i64| BigRational::from_integer(x.into());
        let ts: Vec<_> = (0..40).map(|i| tuple(3 * i, r(3), r(5))).collect();
        let out = importance_sample(&ts, &params(Some(10)), &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert!(out.len() <= 10);
        let total = out.iter().fold(r(0), |acc, t| acc + t.w.clone());
        assert_eq!(total, r(120));
    }

    #[test]
    fn missing_estimate_is_a_contract_error() {
        let mut ts: Vec<_> = (0..3).map(|i| tuple(3 * i, 1.0, 1.0)).collect();
        ts[1].e = None;
        let err = importance_sample(&ts, &params(Some(1)), &mut ChaCha8Rng::seed_from_u64(2));
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn weights_stay_at_least_one() {
        let ts: Vec<_> = (0..200)
            .map(|i| tuple(3 * i, 1.0 + f64::from(i % 7), 1.0 + f64::from(i % 13) * 50.0))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let out = importance_sample(&ts, &params(Some(30)), &mut rng).unwrap();
            assert!(out.len() <= 30);
            assert!(out.iter().all(|t| t.w >= 1.0 - 1e-12));
        }
    }

    #[test]
    fn clamp_preserves_mass() {
        let mut w = vec![0.25, 10.0, 10.0];
        let es = vec![4.0, 1.0, 1.0];
        clamp_and_renormalize(&mut w, &es, &21.0);
        assert_eq!(w[0], 1.0);
        let mass: f64 = w.iter().zip(&es).map(|(a, b)| a * b).sum();
        assert!((mass - 21.0).abs() < 1e-9);
    }

    #[test]
    fn formula_size_grows_with_rho() {
        let mut p = params(None);
        let s1 = p.formula_size();
        p.rho = 8.0;
        let ratio = p.formula_size() / s1;
        assert!((ratio - 16.0).abs() < 1e-4, "ratio {ratio}");
        assert_eq!(p.sample_size(10), 10);
    }

    #[test]
    fn conditions_checker() {
        let ts = vec![tuple(0, 2.0, 10.0), tuple(3, 1.0, 4.0)];
        let c = check_conditions(&ts, &[12, 2], &4.0, &100.0);
        assert!(c.all());
        let c = check_conditions(&ts, &[50, 2], &4.0, &200.0);
        assert!(!c.bracket && c.mass);
        let c = check_conditions(&ts, &[12, 2], &4.0, &20.0);
        assert!(!c.mass);
        assert_eq!(weighted_mass(&ts, &[12, 2]), 26.0);
    }
}
