//! The full estimator.
//!
//! Step 0 (theoretical preset, tiny ε only) counts exhaustively with singleton
//! queries. Step 1 runs the threshold estimator over the whole graph and
//! returns its value when no round exceeds τ. Otherwise the graph is colored
//! once into a single weighted tuple and the loop starts: every tuple is
//! decided against τ, resolved tuples add `w · t` to ψ, and the survivors are
//! either split three ways (weight ×9) or, when there are too many of them,
//! coarse-estimated and compacted by importance sampling. Tuples still alive
//! after the last iteration are counted exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coarse::{coarse_estimate, CoarseOutcome, CoarseParams};
use crate::error::{Error, Result};
use crate::exact::{
    count_exact_tripartite_in, decide_threshold_tripartite_with, threshold_approx_trace, ThresholdOutcome,
    ThresholdParams, DEFAULT_NODE_FACTOR, DEFAULT_ROUNDS_FACTOR,
};
use crate::graph::VertexSet;
use crate::importance::{importance_sample, SamplerParams, WeightedTuple};
use crate::oracle::{Phase, QueryLedger, TisOracle};
use crate::scalar::{ceil_log2, Scalar};
use crate::sparsify::{general_sparsify, tripartite_sparsify};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// The constants used in the analysis. Budgets are astronomical at any
    /// size that can be run.
    Theoretical,
    /// Reduced constants that keep desk-scale runs fast.
    Practical,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theoretical" => Ok(Preset::Theoretical),
            "practical" => Ok(Preset::Practical),
            other => Err(Error::InvalidParameter(format!("unknown preset `{other}`"))),
        }
    }
}

/// Practical threshold `⌈PRACTICAL_TAU_FACTOR · d² / ε²⌉`: the analysed
/// threshold without its `κ² · log⁴ n` factor.
pub const PRACTICAL_TAU_FACTOR: f64 = 1.0;
/// Practical Step 1 round count factor (the analysis uses 18).
pub const PRACTICAL_ROUNDS_FACTOR: f64 = 0.25;
/// Practical cap on the compaction size N.
pub const PRACTICAL_N_CAP: u64 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub eps: f64,
    /// Asserted bound on the number of triangles per edge.
    pub d: u64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub preset: Preset,
    pub gamma_override: Option<u64>,
    pub n_cap_override: Option<u64>,
    pub tau_override: Option<u64>,
    pub rounds_factor_override: Option<f64>,
    pub seed: u64,
    /// Defaults to `3⌈log₂ n⌉ + 2`.
    pub max_iterations: Option<u32>,
    /// Compaction triggers when more than `compaction_factor · N` tuples remain.
    pub compaction_factor: u64,
    pub node_factor: u64,
    /// Constant of the importance sampler's size formula.
    pub c_s: f64,
}

impl EstimatorConfig {
    pub fn practical(eps: f64, d: u64, seed: u64) -> Self {
        EstimatorConfig {
            eps,
            d,
            kappa1: 2.0,
            kappa2: 2.0,
            kappa3: 1.0,
            preset: Preset::Practical,
            gamma_override: None,
            n_cap_override: None,
            tau_override: None,
            rounds_factor_override: None,
            seed,
            max_iterations: None,
            compaction_factor: 10,
            node_factor: DEFAULT_NODE_FACTOR,
            c_s: 1.0,
        }
    }

    pub fn theoretical(eps: f64, d: u64, seed: u64) -> Self {
        EstimatorConfig {
            kappa1: 271.0,
            kappa2: 271.0,
            preset: Preset::Theoretical,
            ..Self::practical(eps, d, seed)
        }
    }

    pub fn with_preset(preset: Preset, eps: f64, d: u64, seed: u64) -> Self {
        match preset {
            Preset::Theoretical => Self::theoretical(eps, d, seed),
            Preset::Practical => Self::practical(eps, d, seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter(format!("ε = {} outside (0, 1)", self.eps)));
        }
        if self.d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        if !(self.kappa1 > 0.0 && self.kappa2 > 0.0 && self.kappa3 > 0.0 && self.c_s > 0.0) {
            return Err(Error::InvalidParameter("constants must be positive".into()));
        }
        if self.compaction_factor == 0 || self.node_factor == 0 {
            return Err(Error::InvalidParameter("compaction and node factors must be positive".into()));
        }
        if matches!(self.gamma_override, Some(0))
            || matches!(self.n_cap_override, Some(0))
            || matches!(self.tau_override, Some(0))
            || self.rounds_factor_override.is_some_and(|f| f.is_nan() || f <= 0.0)
        {
            return Err(Error::InvalidParameter("overrides must be positive".into()));
        }
        Ok(())
    }

    /// Resolves every size-dependent parameter for an `n`-vertex graph.
    pub fn derive(&self, n: usize) -> DerivedParams {
        let l = ceil_log2(n);
        let lf = f64::from(l);
        let eps2 = self.eps * self.eps;
        let d = self.d as f64;
        let theoretical = self.preset == Preset::Theoretical;
        let formula_tau = {
            let t1 = 36.0 * self.kappa1.powi(2) * d * d * lf.powi(4) / eps2;
            let t2 = 324.0 * self.kappa2.powi(2) * d * d * lf.powi(4) / eps2;
            t1.max(t2).ceil()
        };
        let tau = self.tau_override.unwrap_or_else(|| {
            if theoretical {
                to_count(formula_tau)
            } else {
                to_count((PRACTICAL_TAU_FACTOR * d * d / eps2).ceil())
            }
        });
        let formula_n = to_count((self.kappa3 * lf.powi(12) / eps2).ceil()).max(1);
        let n_cap = self.n_cap_override.unwrap_or(if theoretical {
            formula_n
        } else {
            formula_n.min(PRACTICAL_N_CAP)
        });
        let gamma = self.gamma_override.unwrap_or(if theoretical {
            CoarseParams::theoretical(n).gamma
        } else {
            CoarseParams::practical().gamma
        });
        let rounds_factor = self.rounds_factor_override.unwrap_or(if theoretical {
            DEFAULT_ROUNDS_FACTOR
        } else {
            PRACTICAL_ROUNDS_FACTOR
        });
        let exhaustive = theoretical
            && n >= 3
            && self.eps <= d.sqrt() * lf.powf(4.5) / (n as f64).powf(0.75);
        DerivedParams {
            log_n: l,
            tau,
            rounds_factor,
            threshold_rounds: (rounds_factor * lf / eps2).ceil() as u64,
            n_cap,
            gamma,
            max_iterations: self.max_iterations.unwrap_or(3 * l + 2),
            lambda: self.eps / (6.0 * lf),
            rho: 64.0 * lf * lf,
            delta: (n.max(2) as f64).powi(-10),
            exhaustive,
        }
    }
}

fn to_count(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x as u64
    }
}

/// Parameters of one run, resolved from an [`EstimatorConfig`] and n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub log_n: u32,
    pub tau: u64,
    pub rounds_factor: f64,
    pub threshold_rounds: u64,
    pub n_cap: u64,
    pub gamma: u64,
    pub max_iterations: u32,
    pub lambda: f64,
    pub rho: f64,
    pub delta: f64,
    pub exhaustive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    Exhaustive,
    Threshold,
    FullPipeline,
}

/// Queries spent in each step of the estimator.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepQueries {
    pub exhaustive: u64,
    pub threshold: u64,
    pub decide: u64,
    pub coarse: u64,
    pub final_exact: u64,
}

impl StepQueries {
    pub fn total(&self) -> u64 {
        self.exhaustive + self.threshold + self.decide + self.coarse + self.final_exact
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport<S> {
    pub t_hat: S,
    pub mode: EstimateMode,
    pub iterations: u32,
    pub ledger: QueryLedger,
    pub steps: StepQueries,
    pub params: DerivedParams,
    /// Coarse estimates that had to be rerun with a fresh seed.
    pub coarse_retries: u32,
    /// Largest tuple list seen before a compaction.
    pub peak_tuples: usize,
}

/// Loop state: the accumulator ψ and the live tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineState<S> {
    pub psi: S,
    pub tuples: Vec<WeightedTuple<S>>,
    pub iteration: u32,
}

/// Callbacks into the loop, for audits that need ground truth.
pub trait PipelineObserver<S> {
    /// After every tuple of an iteration was decided; `state.tuples` holds
    /// the unresolved ones.
    fn after_decide(&mut self, _state: &PipelineState<S>) {}
    /// After the survivors were split three ways.
    fn after_split(&mut self, _state: &PipelineState<S>) {}
    /// After coarse estimation and importance sampling.
    fn after_compaction(&mut self, _state: &PipelineState<S>) {}
    /// A tuple left the list with exact count `t`; `psi` already includes it.
    fn on_resolved(&mut self, _tuple: &WeightedTuple<S>, _t: u64, _psi: &S) {}
}

/// Observer that ignores everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoObserver;

impl<S> PipelineObserver<S> for NoObserver {}

/// Queries every triple of distinct singletons and counts the YES answers.
/// Uses exactly C(n, 3) queries, charged to [`Phase::PipelineMisc`].
pub fn exhaustive_singleton_count(o: &TisOracle) -> Result<u64> {
    let n = o.n() as u32;
    let mut t = 0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if o.query(&[a].into(), &[b].into(), &[c].into(), Phase::PipelineMisc)? {
                    t += 1;
                }
            }
        }
    }
    Ok(t)
}

/// Estimates t(G) using only TIS queries.
pub fn estimate_triangles<S: Scalar>(o: &TisOracle, cfg: &EstimatorConfig) -> Result<EstimateReport<S>> {
    estimate_triangles_observed(o, cfg, &mut NoObserver)
}

pub fn estimate_triangles_observed<S: Scalar>(
    o: &TisOracle,
    cfg: &EstimatorConfig,
    observer: &mut dyn PipelineObserver<S>,
) -> Result<EstimateReport<S>> {
    cfg.validate()?;
    let n = o.n();
    let params = cfg.derive(n);
    let start = o.snapshot_ledger();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut steps = StepQueries::default();
    let spent = |since: &QueryLedger| o.snapshot_ledger().since(since).total;

    let finish = |t_hat: S, mode, iterations, steps, coarse_retries, peak_tuples| EstimateReport {
        t_hat,
        mode,
        iterations,
        ledger: o.snapshot_ledger().since(&start),
        steps,
        params: params.clone(),
        coarse_retries,
        peak_tuples,
    };

    if params.exhaustive {
        let t = exhaustive_singleton_count(o)?;
        steps.exhaustive = spent(&start);
        return Ok(finish(S::from_count(t), EstimateMode::Exhaustive, 0, steps, 0, 0));
    }

    // Step 1.
    let mark = o.snapshot_ledger();
    let threshold = ThresholdParams {
        tau: params.tau,
        eps: cfg.eps,
        rounds_factor: params.rounds_factor,
        node_factor: cfg.node_factor,
    };
    let trace = threshold_approx_trace::<S, _>(o, &threshold, &mut rng)?;
    steps.threshold = spent(&mark);
    if let ThresholdOutcome::Value { value, .. } = trace.outcome {
        return Ok(finish(value, EstimateMode::Threshold, 0, steps, 0, 0));
    }

    // Step 2.
    let first = general_sparsify::<S, _>(&VertexSet::full(n), 1, &mut rng);
    let [a, b, c] = first.parts.into_iter().next().expect("k = 1 yields one tripartition");
    let mut state = PipelineState {
        psi: S::zero(),
        tuples: vec![WeightedTuple::new(a, b, c, first.scale)],
        iteration: 0,
    };
    let mut coarse_retries = 0;
    let mut peak_tuples = 1;
    let limit = (cfg.compaction_factor as usize).saturating_mul(params.n_cap as usize);

    while !state.tuples.is_empty() && state.iteration < params.max_iterations {
        state.iteration += 1;

        // Steps 3 and 4.
        let mark = o.snapshot_ledger();
        let mut alive = Vec::with_capacity(state.tuples.len());
        for tp in std::mem::take(&mut state.tuples) {
            if tp.has_empty_side() {
                continue;
            }
            match decide_threshold_tripartite_with(
                o,
                &tp.a,
                &tp.b,
                &tp.c,
                params.tau,
                cfg.node_factor,
                Phase::ThresholdDecide,
            )? {
                ThresholdOutcome::Value { value, .. } => {
                    state.psi = state.psi.clone() + tp.w.clone() * S::from_count(value);
                    observer.on_resolved(&tp, value, &state.psi);
                }
                ThresholdOutcome::ExceedsThreshold => alive.push(tp),
            }
        }
        steps.decide += spent(&mark);
        state.tuples = alive;
        observer.after_decide(&state);
        if state.tuples.is_empty() || state.iteration == params.max_iterations {
            break;
        }

        peak_tuples = peak_tuples.max(state.tuples.len());
        if state.tuples.len() > limit {
            // Steps 5 and 6.
            let mark = o.snapshot_ledger();
            let cp = CoarseParams { gamma: params.gamma, ..CoarseParams::practical() };
            let mut max_w = S::zero();
            for tp in state.tuples.iter_mut() {
                let est = match coarse_estimate::<S, _>(o, &tp.a, &tp.b, &tp.c, &cp, &mut rng)? {
                    CoarseOutcome::Estimate(r) => r,
                    CoarseOutcome::NoEstimate => {
                        coarse_retries += 1;
                        let mut fresh = ChaCha8Rng::seed_from_u64(rng.gen());
                        coarse_estimate::<S, _>(o, &tp.a, &tp.b, &tp.c, &cp, &mut fresh)?.into_result()?
                    }
                };
                let e = if est.t_tilde < S::one() { S::one() } else { est.t_tilde };
                tp.e = Some(e);
                if tp.w > max_w {
                    max_w = tp.w.clone();
                }
            }
            steps.coarse += spent(&mark);
            let cube = (n as f64).powi(3);
            let sampler = SamplerParams {
                lambda: params.lambda,
                rho: params.rho,
                delta: params.delta,
                m_bound: (cube * max_w.to_f64_lossy()).max(1.0),
                c_s: cfg.c_s,
                target: Some(params.n_cap as usize),
            };
            state.tuples = importance_sample(&state.tuples, &sampler, &mut rng)?;
            for tp in state.tuples.iter_mut() {
                tp.e = None;
            }
            observer.after_compaction(&state);
        } else {
            // Step 7.
            let mut children = Vec::with_capacity(3 * state.tuples.len());
            for tp in &state.tuples {
                let split = tripartite_sparsify::<S, _>(&tp.a, &tp.b, &tp.c, 3, &mut rng)?;
                let w = tp.w.clone() * split.scale.clone();
                children.extend(
                    split.parts.into_iter().map(|[a, b, c]| WeightedTuple::new(a, b, c, w.clone())),
                );
            }
            state.tuples = children;
            observer.after_split(&state);
        }
    }

    // Step 8.
    let mark = o.snapshot_ledger();
    for tp in std::mem::take(&mut state.tuples) {
        if tp.has_empty_side() {
            continue;
        }
        let t = count_exact_tripartite_in(o, &tp.a, &tp.b, &tp.c, Phase::ExactCount)?;
        state.psi = state.psi.clone() + tp.w.clone() * S::from_count(t);
        observer.on_resolved(&tp, t, &state.psi);
    }
    steps.final_exact = spent(&mark);

    Ok(finish(
        state.psi,
        EstimateMode::FullPipeline,
        state.iteration,
        steps,
        coarse_retries,
        peak_tuples,
    ))
}
