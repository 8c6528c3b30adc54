use fbod::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> FeatureMatrix64 {
    let values = (0..dim * n).map(|_| rng.random_range(-5.0..5.0)).collect();
    FeatureMatrix64::from_column_major(dim, n, values).unwrap()
}

// explicit A with A[j][i] = 1 for each neighbor j of i, plus the diagonal
fn dense_adjacency(graph: &NeighborTable) -> Vec<Vec<f64>> {
    let n = graph.n();
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in graph.rows().enumerate() {
        a[i][i] = 1.0;
        for &j in row {
            a[j as usize][i] = 1.0;
        }
    }
    a
}

#[test]
fn gather_matches_dense_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200u64 {
        let n = rng.random_range(2..=50);
        let dim = rng.random_range(1..=8);
        let k = rng.random_range(1..=10usize.min(n - 1));
        let x = random_matrix(&mut rng, dim, n);
        let g = generate_graph(n, k, case % 3, case).unwrap();
        let a = dense_adjacency(&g);
        let p = propagate(&x, &g).unwrap();
        for d in 0..dim {
            for (i, _) in a.iter().enumerate() {
                let dense: f64 = (0..n).map(|j| x.get(d, j) * a[j][i]).sum();
                assert!(
                    (p.get(d, i) - dense).abs() <= 1e-12 * (1.0 + dense.abs()),
                    "case {case}"
                );
            }
        }
    }
}

#[test]
fn identical_objects_hit_the_closed_form() {
    let ds = Dataset64::from_columns(&vec![vec![3.0, 0.25, 7.5]; 100]).unwrap();
    let params = FbodParams64::new(4, 2, 5, 9);
    for (_, f) in fluctuation_trace(&ds, &params).unwrap() {
        assert!(f.iter().all(|&v| (v - 0.6).abs() < 1e-12));
    }
    let report = detect(&ds, &params).unwrap();
    assert!(report.outlier_factors().iter().all(|&v| v == 0.0));
}

#[test]
fn trace_reproduces_detect() {
    let ds: Dataset64 = synth::make_clusters(&synth::ClusterSpec::planted(3)).unwrap();
    let params = FbodParams64::new(5, 3, 4, 3);
    let (graphs, fl): (Vec<_>, Vec<_>) = fluctuation_trace(&ds, &params).unwrap().into_iter().unzip();
    let of = outlier_factor(&fl, &graphs).unwrap();
    assert_eq!(of, detect(&ds, &params).unwrap().outlier_factors());
}

#[test]
fn thread_count_does_not_change_scores() {
    let spec = synth::ClusterSpec {
        n_normal: 30_000,
        n_outliers: 50,
        center: vec![10.0; 6],
        spread: 1.0,
        outlier_offset: 12.0,
        seed: 4,
    };
    let ds: Dataset64 = synth::make_clusters(&spec).unwrap();
    let params = FbodParams64::new(12, 3, 50, 77);
    let runs: Vec<_> = [1, 2, 5]
        .iter()
        .map(|&threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| detect(&ds, &params).unwrap())
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn f32_and_f64_agree_on_ranking_of_planted_data() {
    let spec = synth::ClusterSpec::planted(11);
    let a: Dataset64 = synth::make_clusters(&spec).unwrap();
    let b: Dataset32 = synth::make_clusters(&spec).unwrap();
    let ra = detect(&a, &FbodParams64::new(5, 3, 4, 1)).unwrap();
    let rb = detect(&b, &FbodParams32::new(5, 3, 4, 1)).unwrap();
    let mut ta = ra.top().to_vec();
    let mut tb = rb.top().to_vec();
    ta.sort_unstable();
    tb.sort_unstable();
    assert_eq!(ta, tb);
}

#[test]
fn minmax_normalization_handles_negative_features() {
    // raw values straddle zero; scaled onto [0, 1] the planted point stands out
    let mut columns: Vec<Vec<f64>> = (0..40)
        .map(|i| vec![-1.0 + 0.01 * i as f64, 0.5 - 0.01 * i as f64])
        .collect();
    columns.push(vec![30.0, -30.0]);
    let ds = Dataset64::from_columns(&columns).unwrap();
    let params = FbodParams64::new(8, 4, 1, 2).with_normalization(Normalization::MinMax);
    assert_eq!(detect(&ds, &params).unwrap().top(), &[40]);
}

#[test]
fn detect_rejects_bad_input() {
    let ds = Dataset64::from_columns(&[[1.0], [2.0], [3.0]]).unwrap();
    assert!(matches!(
        detect(&ds, &FbodParams64::new(3, 1, 1, 0)),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        detect(&ds, &FbodParams64::new(2, 0, 1, 0)),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        detect(&ds, &FbodParams64::new(2, 1, 4, 0)),
        Err(Error::InvalidParameter(_))
    ));
    assert!(detect(&ds, &FbodParams64::new(2, 1, 1, 0).with_guard(0.0)).is_err());
}

fn matrix_strategy() -> impl Strategy<Value = (FeatureMatrix64, usize, u64)> {
    (2usize..40, 1usize..6)
        .prop_flat_map(|(n, dim)| {
            (
                prop::collection::vec(0.5f64..50.0, n * dim),
                Just(n),
                Just(dim),
                1usize..n,
                any::<u64>(),
            )
        })
        .prop_map(|(v, n, dim, k, seed)| (FeatureMatrix64::from_column_major(dim, n, v).unwrap(), k, seed))
}

proptest! {
    #[test]
    fn propagation_is_linear((x, k, seed) in matrix_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = generate_graph(x.len(), k, 0, seed).unwrap();
        let y = x.map(|v| v.sin() * 10.0);
        let combo = FeatureMatrix64::from_column_major(
            x.dim(),
            x.len(),
            x.as_slice().iter().zip(y.as_slice()).map(|(p, q)| a * p + b * q).collect(),
        ).unwrap();
        let lhs = propagate(&combo, &g).unwrap();
        let (px, py) = (propagate(&x, &g).unwrap(), propagate(&y, &g).unwrap());
        for ((l, p), q) in lhs.as_slice().iter().zip(px.as_slice()).zip(py.as_slice()) {
            let r = a * p + b * q;
            prop_assert!((l - r).abs() <= 1e-10 * (1.0 + r.abs()));
        }
    }

    #[test]
    fn scores_are_scale_invariant((x, k, seed) in matrix_strategy(), c in 0.01f64..100.0) {
        let params = FbodParams64::new(k, 2, 1, seed);
        let base = detect(&Dataset64::new(x.clone()).unwrap(), &params).unwrap();
        let scaled = detect(&Dataset64::new(x.map(|v| v * c)).unwrap(), &params).unwrap();
        for (p, q) in base.outlier_factors().iter().zip(scaled.outlier_factors()) {
            prop_assert!((p - q).abs() <= 1e-9 * (1.0 + p.abs()));
        }
    }

    #[test]
    fn outlier_factors_are_non_negative((x, k, seed) in matrix_strategy(), t in 1usize..4) {
        let report = detect(&Dataset64::new(x.map(|v| v - 20.0)).unwrap(), &FbodParams64::new(k, t, 0, seed)).unwrap();
        prop_assert!(report.outlier_factors().iter().all(|&v| v >= 0.0 && v.is_finite()));
    }

    #[test]
    fn fixed_seed_is_reproducible((x, k, seed) in matrix_strategy()) {
        let ds = Dataset64::new(x).unwrap();
        let params = FbodParams64::new(k, 3, 1, seed);
        prop_assert_eq!(detect(&ds, &params).unwrap(), detect(&ds, &params).unwrap());
    }
}
