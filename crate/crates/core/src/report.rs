//! The machine-readable run report shared by the CLI and the test suites.
//! Field names are frozen; `docs/report-schema.json` describes them.

use serde::{Deserialize, Serialize};

use crate::graph::{count_triangles_brute, Graph};
use crate::oracle::QueryLedger;
use crate::pipeline::{DerivedParams, EstimateMode, EstimateReport, EstimatorConfig, StepQueries};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub n: usize,
    pub edges: usize,
    pub t_brute: u64,
    pub delta_e: u64,
}

impl GraphMeta {
    pub fn of(g: &Graph) -> Self {
        let s = count_triangles_brute(g);
        GraphMeta { n: g.n(), edges: g.edge_count(), t_brute: s.t, delta_e: s.delta_e }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    RunFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub status: RunStatus,
    pub graph: GraphMeta,
    pub config: EstimatorConfig,
    pub seed: u64,
    pub estimate: Option<f64>,
    pub mode: Option<EstimateMode>,
    pub relative_error: Option<f64>,
    pub iterations: u32,
    pub ledger: QueryLedger,
    pub steps: StepQueries,
    pub params: DerivedParams,
    /// Absent unless timing was requested, so reports can be compared byte for byte.
    pub wall_time_ms: Option<f64>,
    pub failure: Option<String>,
}

/// `|estimate − t| / max(t, 1)`.
pub fn relative_error(estimate: f64, t: u64) -> f64 {
    (estimate - t as f64).abs() / (t.max(1) as f64)
}

impl RunReport {
    pub fn success<S: Scalar>(graph: GraphMeta, cfg: &EstimatorConfig, r: &EstimateReport<S>, wall_time_ms: Option<f64>) -> Self {
        let estimate = r.t_hat.to_f64_lossy();
        RunReport {
            status: RunStatus::Ok,
            relative_error: Some(relative_error(estimate, graph.t_brute)),
            graph,
            config: cfg.clone(),
            seed: cfg.seed,
            estimate: Some(estimate),
            mode: Some(r.mode),
            iterations: r.iterations,
            ledger: r.ledger.clone(),
            steps: r.steps.clone(),
            params: r.params.clone(),
            wall_time_ms,
            failure: None,
        }
    }

    pub fn failure(
        graph: GraphMeta,
        cfg: &EstimatorConfig,
        ledger: QueryLedger,
        reason: String,
        wall_time_ms: Option<f64>,
    ) -> Self {
        RunReport {
            status: RunStatus::RunFailure,
            params: cfg.derive(graph.n),
            graph,
            config: cfg.clone(),
            seed: cfg.seed,
            estimate: None,
            mode: None,
            relative_error: None,
            iterations: 0,
            ledger,
            steps: StepQueries::default(),
            wall_time_ms,
            failure: Some(reason),
        }
    }
}
