use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tis_core::generate::planted_tripartite;
use tis_core::sparsify::*;
use tis_core::*;

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[test]
fn proper_fraction_is_exact_for_small_k() {
    for k in 1..=3u32 {
        let m = 3 * k;
        let mut proper = 0u32;
        for x in 1..=m {
            for y in 1..=m {
                for z in 1..=m {
                    proper += u32::from(colors_are_proper([x, y, z], k));
                }
            }
        }
        // 2 / (9k²) of all (3k)³ colorings, i.e. 6k of them.
        assert_eq!(proper * 9 * k * k, 2 * m * m * m, "k = {k}");
        assert_eq!(proper, 6 * k);
    }
}

#[test]
fn color_frequencies_are_uniform() {
    let draws = 100_000;
    let k = 2;
    let ca = color_vertices(&VertexSet::full(draws), k, &mut ChaCha8Rng::seed_from_u64(11));
    let mut freq = [0f64; 6];
    for &c in ca.colors() {
        freq[c as usize - 1] += 1.0;
    }
    let p = 1.0 / 6.0;
    let expect = draws as f64 * p;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for f in freq {
        assert!((f - expect).abs() <= 3.0 * sigma, "{freq:?}");
    }
}

#[test]
fn triangle_indicator_matches_class_membership() {
    // A triangle is counted by the k tripartitions exactly when it is
    // properly colored.
    let g = generate(&GeneratorSpec::CliqueUnion { n: 30, clique_size: 5, cliques: 6 }, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 1..=3 {
        for _ in 0..20 {
            let ca = color_vertices(&g.vertices(), k, &mut rng);
            let parts = tripartitions_of(&ca);
            let counted: u64 = parts
                .iter()
                .map(|[a, b, c]| count_triangles_tripartite_brute(&g, a, b, c).unwrap())
                .sum();
            let mut proper = 0;
            for &(u, v) in g.edges() {
                for w in g.neighbors(v) {
                    if *w > v && g.has_edge(u, *w) && is_properly_colored([u, v, *w], &ca) {
                        proper += 1;
                    }
                }
            }
            assert_eq!(counted, proper);
        }
    }
}

fn general_mean(g: &Graph, k: u32, trials: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..trials)
        .map(|_| {
            let r: SparsifyResult<f64> = general_sparsify(&g.vertices(), k, &mut rng);
            r.scaled([r.properly_colored_count(g)])
        })
        .collect();
    mean_sd(&xs)
}

#[test]
fn general_sparsifier_is_unbiased() {
    let graphs = [
        generate(&GeneratorSpec::Planted { n: 1000, d: 2, gadgets: 250 }, 2).unwrap(),
        generate(&GeneratorSpec::CliqueUnion { n: 64, clique_size: 6, cliques: 10 }, 2).unwrap(),
    ];
    let trials = 4000;
    for g in &graphs {
        let t = count_triangles_brute(g).t as f64;
        for k in 1..=2 {
            let (mean, sd) = general_mean(g, k, trials, 100 + u64::from(k));
            let se = sd / (trials as f64).sqrt();
            assert!((mean - t).abs() <= 3.0 * se, "k = {k}: mean {mean}, t {t}, se {se}");
        }
    }
}

#[test]
fn tripartite_sparsifier_is_unbiased() {
    let (g, [a, b, c]) = planted_tripartite(600, 2, 150, 5).unwrap();
    assert_eq!(count_triangles_tripartite_brute(&g, &a, &b, &c).unwrap(), 300);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let trials = 3000;
    let xs: Vec<f64> = (0..trials)
        .map(|_| {
            let r: SparsifyResult<f64> = tripartite_sparsify(&a, &b, &c, 3, &mut rng).unwrap();
            r.scaled([r.properly_colored_count(&g)])
        })
        .collect();
    let (mean, sd) = mean_sd(&xs);
    let se = sd / (trials as f64).sqrt();
    assert!((mean - 300.0).abs() <= 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn concentration_on_a_triangle_rich_graph() {
    // A loose stand-in for the high-count regime: with 1.45e5 triangles and
    // four per edge, a single k = 1 coloring rarely misses by more than 5%.
    let g = generate(&GeneratorSpec::Circulant { n: 2048, d: 4, max_degree: 1000 }, 1).unwrap();
    let t = count_triangles_brute(&g).t as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let runs = 200;
    let misses = (0..runs)
        .filter(|_| {
            let r: SparsifyResult<f64> = general_sparsify(&g.vertices(), 1, &mut rng);
            (r.scaled([r.properly_colored_count(&g)]) - t).abs() > 0.05 * t
        })
        .count();
    assert!(misses * 20 <= runs, "{misses} of {runs} runs missed");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn general_parts_partition_a_subset(n in 3usize..200, k in 1u32..5, seed in any::<u64>()) {
        let vs = VertexSet::full(n);
        let r: SparsifyResult<f64> = general_sparsify(&vs, k, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(r.parts.len(), k as usize);
        let mut seen = vec![false; n];
        for v in r.parts.iter().flatten().flat_map(|s| s.iter()) {
            prop_assert!(!seen[v as usize]);
            seen[v as usize] = true;
        }
        prop_assert_eq!(r.scale, 4.5 * f64::from(k * k));
    }

    #[test]
    fn tripartite_parts_are_exhaustive(sizes in proptest::array::uniform3(1u32..40), k in 1u32..6, seed in any::<u64>()) {
        let a: VertexSet = (0..sizes[0]).collect();
        let b: VertexSet = (sizes[0]..sizes[0] + sizes[1]).collect();
        let c: VertexSet = (sizes[0] + sizes[1]..sizes.iter().sum()).collect();
        let r: SparsifyResult<f64> = tripartite_sparsify(&a, &b, &c, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        for (side, orig) in [&a, &b, &c].into_iter().enumerate() {
            let mut got: Vec<u32> = r.parts.iter().flat_map(|p| p[side].iter()).collect();
            got.sort_unstable();
            prop_assert_eq!(got.as_slice(), orig.as_slice());
        }
    }
}
