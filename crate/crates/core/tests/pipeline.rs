use proptest::prelude::*;
use tis_core::importance::WeightedTuple;
use tis_core::pipeline::*;
use tis_core::*;

fn suite_graph() -> Graph {
    generate(&GeneratorSpec::Circulant { n: 512, d: 4, max_degree: 500 }, 1).unwrap()
}

fn tuple_count(g: &Graph, tp: &WeightedTuple<f64>) -> u64 {
    count_triangles_tripartite_brute(g, &tp.a, &tp.b, &tp.c).unwrap()
}

/// Records ground-truth audits of every loop transition.
struct Audit<'g> {
    g: &'g Graph,
    n_cap: usize,
    limit: usize,
    last_psi: f64,
    resolved_mismatches: usize,
    psi_decreases: usize,
    splits: usize,
    halvings: usize,
    compactions: usize,
    oversized: usize,
    weight_errors: usize,
    before_split: u64,
}

impl<'g> Audit<'g> {
    fn new(g: &'g Graph, p: &DerivedParams, cfg: &EstimatorConfig) -> Self {
        Audit {
            g,
            n_cap: p.n_cap as usize,
            limit: p.n_cap as usize * cfg.compaction_factor as usize,
            last_psi: 0.0,
            resolved_mismatches: 0,
            psi_decreases: 0,
            splits: 0,
            halvings: 0,
            compactions: 0,
            oversized: 0,
            weight_errors: 0,
            before_split: 0,
        }
    }

    fn mass(&self, s: &PipelineState<f64>) -> u64 {
        s.tuples.iter().map(|tp| tuple_count(self.g, tp)).sum()
    }
}

impl PipelineObserver<f64> for Audit<'_> {
    fn after_decide(&mut self, s: &PipelineState<f64>) {
        self.before_split = self.mass(s);
    }

    fn after_split(&mut self, s: &PipelineState<f64>) {
        self.splits += 1;
        if 2 * self.mass(s) <= self.before_split {
            self.halvings += 1;
        }
        if s.tuples.len() > 3 * self.limit {
            self.oversized += 1;
        }
        if self.compactions == 0 {
            // Without compaction every weight is 9/2 · 9^(iteration).
            let expect = 4.5 * 9f64.powi(s.iteration as i32);
            self.weight_errors += s.tuples.iter().filter(|tp| tp.w != expect).count();
        }
    }

    fn after_compaction(&mut self, s: &PipelineState<f64>) {
        self.compactions += 1;
        if s.tuples.len() > self.n_cap {
            self.oversized += 1;
        }
    }

    fn on_resolved(&mut self, tp: &WeightedTuple<f64>, t: u64, psi: &f64) {
        if tuple_count(self.g, tp) != t {
            self.resolved_mismatches += 1;
        }
        if *psi < self.last_psi {
            self.psi_decreases += 1;
        }
        self.last_psi = *psi;
    }
}

#[test]
fn loop_invariants_hold_against_ground_truth() {
    let g = suite_graph();
    let mut splits = 0;
    let mut halvings = 0;
    for seed in 0..10 {
        let cfg = EstimatorConfig::practical(0.2, 4, seed);
        let p = cfg.derive(g.n());
        let o = TisOracle::new(g.clone());
        let mut audit = Audit::new(&g, &p, &cfg);
        let r: Estimate = estimate_triangles_observed(&o, &cfg, &mut audit).unwrap();
        assert_eq!(r.mode, EstimateMode::FullPipeline);
        assert!(r.iterations <= p.max_iterations);
        assert_eq!(audit.resolved_mismatches, 0);
        assert_eq!(audit.psi_decreases, 0);
        assert_eq!(audit.oversized, 0);
        assert_eq!(audit.weight_errors, 0);
        assert_eq!(r.t_hat, audit.last_psi);
        splits += audit.splits;
        halvings += audit.halvings;
    }
    assert!(splits > 0);
    assert!(halvings * 100 >= splits * 95, "{halvings} of {splits} splits halved the mass");
}

#[test]
fn compaction_keeps_lists_bounded() {
    let g = suite_graph();
    let mut cfg = EstimatorConfig::practical(0.2, 4, 3);
    cfg.n_cap_override = Some(2);
    cfg.tau_override = Some(1);
    cfg.compaction_factor = 1;
    let p = cfg.derive(g.n());
    let o = TisOracle::new(g.clone());
    let mut audit = Audit::new(&g, &p, &cfg);
    let r: Estimate = estimate_triangles_observed(&o, &cfg, &mut audit).unwrap();
    assert!(audit.compactions > 0, "{:?} {} {} {}", r.mode, r.iterations, r.peak_tuples, audit.splits);
    assert_eq!(audit.oversized, 0);
    assert_eq!(audit.resolved_mismatches, 0);
    assert!(r.steps.coarse > 0);
    assert!(r.peak_tuples > 2);
}

#[test]
fn clique_union_lands_within_tolerance() {
    let g = generate(&GeneratorSpec::CliqueUnion { n: 64, clique_size: 6, cliques: 10 }, 7).unwrap();
    assert_eq!(count_triangles_brute(&g).t, 200);
    let o = TisOracle::new(g);
    let hits = (0..100)
        .filter(|&seed| {
            let r: Estimate = estimate_triangles(&o, &EstimatorConfig::practical(0.2, 4, seed)).unwrap();
            assert_eq!(r.mode, EstimateMode::Threshold);
            (r.t_hat - 200.0).abs() <= 0.2 * 200.0
        })
        .count();
    assert!(hits >= 90, "{hits} of 100");
}

#[test]
fn report_ledger_matches_oracle_and_steps() {
    let g = suite_graph();
    let o = TisOracle::new(g);
    let r: Estimate = estimate_triangles(&o, &EstimatorConfig::practical(0.2, 4, 9)).unwrap();
    assert_eq!(r.ledger, o.snapshot_ledger());
    assert_eq!(r.ledger.total, r.steps.total());
    assert!(r.ledger.is_consistent());
    assert_eq!(r.ledger.get(Phase::ThresholdEstimate), r.steps.threshold);
    assert_eq!(r.ledger.get(Phase::ExactCount), r.steps.final_exact);
}

#[test]
fn same_seed_same_report() {
    let g = suite_graph();
    let run = |seed| -> Estimate {
        estimate_triangles(&TisOracle::new(g.clone()), &EstimatorConfig::practical(0.2, 4, seed)).unwrap()
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5).ledger, run(6).ledger);
}

#[test]
fn scalar_types_agree() {
    let g = generate(&GeneratorSpec::CliqueUnion { n: 64, clique_size: 6, cliques: 10 }, 2).unwrap();
    let cfg = EstimatorConfig::practical(0.2, 4, 11);
    let f64_run: Estimate = estimate_triangles(&TisOracle::new(g.clone()), &cfg).unwrap();
    let f32_run: EstimateReport<f32> = estimate_triangles(&TisOracle::new(g.clone()), &cfg).unwrap();
    let exact_run: ExactEstimate = estimate_triangles(&TisOracle::new(g), &cfg).unwrap();
    assert_eq!(f64_run.ledger, exact_run.ledger);
    assert_eq!(f64_run.ledger, f32_run.ledger);
    let exact = exact_run.t_hat.to_f64_lossy();
    assert!((f64_run.t_hat - exact).abs() <= 1e-9 * exact.max(1.0));
    assert!((f64::from(f32_run.t_hat) - exact).abs() <= 1e-4 * exact.max(1.0));
}

#[test]
fn library_example_runs() {
    let g = generate(&GeneratorSpec::CliqueUnion { n: 64, clique_size: 6, cliques: 10 }, 1).unwrap();
    let oracle = TisOracle::new(g);
    let report: Estimate = estimate_triangles(&oracle, &EstimatorConfig::practical(0.2, 4, 7)).unwrap();
    assert!((report.t_hat - 200.0).abs() <= 40.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn theoretical_preset_is_exact_on_small_graphs(
        n in 3usize..=16,
        p in 0.0f64..1.0,
        graph_seed in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let g = generate(&GeneratorSpec::ErdosRenyi { n, p }, graph_seed).unwrap();
        let t = count_triangles_brute(&g).t;
        let o = TisOracle::new(g);
        let r: Estimate = estimate_triangles(&o, &EstimatorConfig::theoretical(0.3, 2, seed)).unwrap();
        prop_assert_eq!(r.mode, EstimateMode::Exhaustive);
        prop_assert_eq!(r.t_hat, t as f64);
        let c3 = (n * (n - 1) * (n - 2) / 6) as u64;
        prop_assert_eq!(r.ledger.total, c3);
    }
}
