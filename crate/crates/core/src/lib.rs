//! Triangle counting in graphs that can only be accessed through tripartite
//! independent set (TIS) queries.
//!
//! A [`TisOracle`] hides a graph and answers, for three disjoint vertex sets,
//! whether some triangle has one vertex in each. The estimators here use only
//! those answers, and every query is counted in a per-phase ledger.
//!
//! Weights and estimates are generic over [`Scalar`]; [`Estimate`] uses `f64`
//! and [`ExactEstimate`] uses arbitrary-precision rationals.
//!
//! ```
//! use tis_core::{estimate_triangles, generate, EstimatorConfig, GeneratorSpec, TisOracle};
//!
//! // Ten disjoint copies of K6: 200 triangles, 4 per edge.
//! let g = generate(&GeneratorSpec::CliqueUnion { n: 64, clique_size: 6, cliques: 10 }, 1).unwrap();
//! let oracle = TisOracle::new(g);
//! let report: tis_core::Estimate = estimate_triangles(&oracle, &EstimatorConfig::practical(0.2, 4, 7)).unwrap();
//! assert!((report.t_hat - 200.0).abs() <= 40.0);
//! ```

pub mod budget;
pub mod coarse;
pub mod error;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod importance;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod sparsify;

pub use error::{Error, Result};
pub use exact::{count_exact_tripartite, decide_threshold_tripartite, threshold_approx_estimate, ThresholdOutcome};
pub use generate::{generate, GeneratorSpec};
pub use graph::{count_triangles_brute, count_triangles_tripartite_brute, Graph, TriangleStats, VertexSet};
pub use oracle::{Phase, QueryLedger, TisOracle};
pub use pipeline::{estimate_triangles, EstimateMode, EstimateReport, EstimatorConfig, Preset};
pub use report::RunReport;
pub use scalar::Scalar;

/// Exact weights and estimates.
pub type Exact = num_rational::BigRational;

pub type Estimate = EstimateReport<f64>;
pub type ExactEstimate = EstimateReport<Exact>;
pub type Tuple = importance::WeightedTuple<f64>;
pub type ExactTuple = importance::WeightedTuple<Exact>;
pub type Coarse = coarse::CoarseResult<f64>;
