mod common;

use graphit::metrics::rmse;
use graphit::{
    default_init, generate_sparse_a, graphem, graphit, mlem, objective, simulate, EstimatorConfig, KnownParams, Potential,
};
use nalgebra::{DMatrix, DVector};

fn data(n: usize, support: usize, sigma_r: f64, steps: usize, seed: u64) -> (KnownParams, DMatrix<f64>, Vec<DVector<f64>>) {
    let known = KnownParams::isotropic(n, 0.1, sigma_r, 1e-4);
    let a = generate_sparse_a(n, support, 0.9, seed).unwrap();
    let obs = simulate(&known.with_transition(a.clone()), steps, seed + 1000).unwrap().observations;
    (known, a, obs)
}

#[test]
fn mlem_error_shrinks_with_horizon() {
    let cfg = EstimatorConfig { epsilon: 1e-6, max_outer: 200, ..EstimatorConfig::default() };
    for seed in 0..3 {
        let errs: Vec<f64> = [100, 1000, 10_000]
            .iter()
            .map(|&k| {
                let (known, a, obs) = data(3, 5, 0.01, k, seed);
                let est = mlem(&obs, &known, &default_init(3), &cfg).unwrap();
                (est.a_hat - a).norm()
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "seed {seed}: {errs:?}");
    }
}

#[test]
fn true_matrix_scores_below_random_one() {
    let mut wins = 0;
    let mut rng = common::rng(500);
    for seed in 0..20 {
        let (known, a, obs) = data(4, 6, 0.1, 500, seed);
        let mut other = common::gaussian_matrix(&mut rng, 4, 4);
        other *= 0.9 / other.singular_values().max();
        let p = Potential::log_sum(10.0, 0.1).unwrap();
        if objective(&a, &known, &obs, Some(&p)).unwrap() < objective(&other, &known, &obs, Some(&p)).unwrap() {
            wins += 1;
        }
    }
    assert!(wins >= 19, "{wins}/20");
}

#[test]
fn every_estimator_descends() {
    let (known, _, obs) = data(4, 5, 0.1, 200, 7);
    let a0 = default_init(4);
    let runs = [
        graphit(&obs, &known, &a0, &EstimatorConfig::with_potential(Potential::atan(20.0, 0.2).unwrap())).unwrap(),
        graphit(&obs, &known, &a0, &EstimatorConfig::with_potential(Potential::scad(20.0, 3.7).unwrap())).unwrap(),
        graphem(&obs, &known, &a0, &EstimatorConfig::with_potential(Potential::l1(20.0).unwrap())).unwrap(),
        mlem(&obs, &known, &a0, &EstimatorConfig::default()).unwrap(),
    ];
    for r in &runs {
        assert_eq!(r.objective_trace.len(), r.outer_iterations + 1);
        for w in r.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-8, "{} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn graphem_is_constant_weight_graphit() {
    let (known, _, obs) = data(5, 6, 0.1, 300, 3);
    let cfg = EstimatorConfig::with_potential(Potential::l1(30.0).unwrap());
    let em = graphem(&obs, &known, &default_init(5), &cfg).unwrap();
    let it = graphit(&obs, &known, &default_init(5), &cfg).unwrap();
    assert_eq!(em.iterates.len(), it.iterates.len());
    for (x, y) in em.iterates.iter().zip(&it.iterates) {
        assert!((x - y).norm() <= 1e-12);
        assert_eq!(cfg.potential.unwrap().weight_matrix(x), DMatrix::from_element(5, 5, 30.0));
    }
    // GraphEM ignores the shape of a non-l1 potential.
    let logsum = EstimatorConfig::with_potential(Potential::log_sum(30.0, 0.1).unwrap());
    let em2 = graphem(&obs, &known, &default_init(5), &logsum).unwrap();
    assert!((em2.a_hat - em.a_hat).norm() <= 1e-12);
}

#[test]
fn penalized_estimates_beat_maximum_likelihood() {
    let (known, a, obs) = data(8, 4, 0.1, 1000, 11);
    let a0 = default_init(8);
    let it = graphit(&obs, &known, &a0, &EstimatorConfig::with_potential(Potential::log_sum(40.0, 0.1).unwrap())).unwrap();
    let ml = mlem(&obs, &known, &a0, &EstimatorConfig::default()).unwrap();
    assert!(rmse(&it.a_hat, &a).unwrap() < rmse(&ml.a_hat, &a).unwrap());
    let zeros = |m: &DMatrix<f64>| m.iter().filter(|v| **v == 0.0).count();
    assert!(zeros(&it.a_hat) > zeros(&ml.a_hat));
}
