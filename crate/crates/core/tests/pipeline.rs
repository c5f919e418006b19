use proptest::prelude::*;

use fusedlogit::io::{load_matrix, load_ucr, write_dataset, LabelMap, RunHeader};
use fusedlogit::metrics::MeanSd;
use fusedlogit::simulation::{generate_dataset, make_beta_star, make_sigma, run_experiment, BetaVariant, CaseSpec};
use fusedlogit::{Dataset, HyperConfig, ModelKind};

#[test]
fn single_replication_table_has_zero_sds() {
    let spec = CaseSpec {
        n: 120,
        test_size: 80,
        replications: 1,
        ..CaseSpec::standard(2, BetaVariant::B2, 0.0, 4)
    };
    let hyper = HyperConfig {
        iterations: 400,
        burnin: 200,
        ..HyperConfig::default()
    };
    let r = run_experiment(&spec, ModelKind::Lbfl, &hyper).unwrap();
    assert_eq!(r.table.completed, 1);
    assert_eq!(r.table.mse.sd, 0.0);
    assert_eq!(r.table.el.sd, 0.0);
    assert_eq!(r.table.av.sd, 0.0);
    let again = run_experiment(&spec, ModelKind::Lbfl, &hyper).unwrap();
    assert_eq!(r.table, again.table);
}

#[test]
fn experiment_independent_of_thread_count() {
    let spec = CaseSpec {
        n: 80,
        test_size: 50,
        replications: 3,
        ..CaseSpec::standard(3, BetaVariant::B1, 0.0, 12)
    };
    let hyper = HyperConfig {
        iterations: 300,
        burnin: 150,
        ..HyperConfig::default()
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| run_experiment(&spec, ModelKind::Lbfh, &hyper).unwrap());
    let parallel = run_experiment(&spec, ModelKind::Lbfh, &hyper).unwrap();
    assert_eq!(serial.table, parallel.table);
}

#[test]
fn simulated_data_round_trips_through_files() {
    let spec = CaseSpec {
        n: 60,
        test_size: 10,
        ..CaseSpec::standard(1, BetaVariant::B1, 0.3, 8)
    };
    let (train, _) = generate_dataset(&spec, 0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("train.csv");
    let header = RunHeader {
        seed: 8,
        model: "none".into(),
        config_hash: "abc".into(),
    };
    write_dataset(&path, &train, Some(&header)).unwrap();
    let (back, std) = load_matrix(&path, 0, false).unwrap();
    assert!(std.is_none());
    assert_eq!(back, train);
}

#[test]
fn ucr_whitespace_and_comma_agree() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.csv");
    std::fs::write(&a, "  1   0.25  -1.5e-3  2\n -1  3  4  5\n").unwrap();
    std::fs::write(&b, "1,0.25,-1.5e-3,2\n-1,3,4,5\n").unwrap();
    let da = load_ucr(&a, &LabelMap::default()).unwrap();
    let db = load_ucr(&b, &LabelMap::default()).unwrap();
    assert_eq!(da, db);
    assert_eq!(da.y(), &[1, 0]);
}

#[test]
fn case2_block_structure_visible_in_data() {
    let spec = CaseSpec {
        n: 4000,
        ..CaseSpec::standard(2, BetaVariant::B1, 0.0, 21)
    };
    let (train, _) = generate_dataset(&spec, 0).unwrap();
    let x = train.x();
    let corr = |i: usize, j: usize| {
        let (a, b) = (x.column(i), x.column(j));
        let n = x.nrows() as f64;
        let (ma, mb) = (a.mean(), b.mean());
        let cov = a.iter().zip(b.iter()).map(|(u, v)| (u - ma) * (v - mb)).sum::<f64>() / n;
        cov / (a.variance().sqrt() * b.variance().sqrt())
    };
    assert!((corr(0, 3) - 0.5).abs() < 0.06);
    assert!(corr(4, 5).abs() < 0.06);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sigma_symmetric_unit_diagonal(case in 1u8..=3, rho in 0.0f64..0.95, b2 in any::<bool>()) {
        let v = if b2 { BetaVariant::B2 } else { BetaVariant::B1 };
        let beta = make_beta_star(case, v).unwrap();
        let s = make_sigma(case, &beta, rho).unwrap();
        prop_assert_eq!(&s, &s.transpose());
        for i in 0..beta.len() {
            prop_assert_eq!(s[(i, i)], 1.0);
        }
    }

    #[test]
    fn dataset_csv_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..20), seed in any::<u64>()) {
        let y: Vec<u8> = (0..rows.len()).map(|i| ((seed >> (i % 64)) & 1) as u8).collect();
        let d = Dataset::from_rows(&rows, y).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        write_dataset(&path, &d, None).unwrap();
        let (back, _) = load_matrix(&path, 0, false).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn mean_sd_matches_two_pass(values in prop::collection::vec(-100.0f64..100.0, 2..50)) {
        let m = MeanSd::of(&values);
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        prop_assert!((m.mean - mean).abs() < 1e-9);
        prop_assert!((m.sd - var.sqrt()).abs() < 1e-9);
    }
}
