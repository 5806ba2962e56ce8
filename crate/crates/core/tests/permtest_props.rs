use kir_core::estimators::{xi_n, Statistic};
use kir_core::permtest::{permutation_test, permutation_test_many, replicate_p_values, PowerDesign, StatisticFn};
use kir_core::simgen::gen_heteroscedastic;
use kir_core::{KernelChoice, SampleSet};

fn knn_stat(s: &SampleSet) -> kir_core::Result<f64> {
    Statistic::DKnn { k: 5, kernel_y: KernelChoice::gaussian_median() }.evaluate(s, 3)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let data = gen_heteroscedastic(80, 0.3, 1).unwrap();
    let one = in_pool(1, || permutation_test(&knn_stat, &data, 64, 9).unwrap());
    let four = in_pool(4, || permutation_test(&knn_stat, &data, 64, 9).unwrap());
    assert_eq!(one, four);
    assert_eq!(one.permutation_stats.len(), 64);

    let scen = |n: usize, l: f64, s: u64| gen_heteroscedastic(n, l, s);
    let design = PowerDesign { n: 40, lambda: 0.5, replications: 6, permutations: 20, alpha: 0.05, seed: 2 };
    let stats: [&StatisticFn<'_>; 1] = [&knn_stat];
    let p1 = in_pool(1, || replicate_p_values(&scen, &stats, &design).unwrap());
    let p3 = in_pool(3, || replicate_p_values(&scen, &stats, &design).unwrap());
    assert_eq!(p1, p3);
}

#[test]
fn shared_permutations_match_individual_runs() {
    let data = gen_heteroscedastic(60, 0.0, 5).unwrap();
    let xi = |s: &SampleSet| xi_n(s, 0);
    let both = permutation_test_many(&[&knn_stat, &xi], &data, 30, 4).unwrap();
    assert_eq!(both[0], permutation_test(&knn_stat, &data, 30, 4).unwrap());
    assert_eq!(both[1], permutation_test(&xi, &data, 30, 4).unwrap());
}

#[test]
fn null_p_values_are_super_uniform() {
    let scen = |n: usize, l: f64, s: u64| gen_heteroscedastic(n, l, s);
    let xi = |s: &SampleSet| xi_n(s, 0);
    let design = PowerDesign { n: 50, lambda: 1.0, replications: 500, permutations: 99, alpha: 0.05, seed: 17 };
    let p = replicate_p_values(&scen, &[&xi], &design).unwrap();
    let r = p.len() as f64;
    for t in [0.01, 0.05, 0.1] {
        let frac = p.iter().filter(|row| row[0] <= t).count() as f64 / r;
        let se = (t * (1.0 - t) / r).sqrt();
        assert!(frac <= t + 3.0 * se, "threshold {t}: {frac}");
    }
}
