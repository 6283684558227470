//! Monte Carlo consistency checks for the training-window estimators.

use rca_monitor::dgp::{generate_rca, Case};
use rca_monitor::{fit_wls, fit_wls_covariates, Regime};

const SEEDS: u64 = 50;

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[test]
fn beta_hat_is_consistent_in_case_one() {
    // The per-seed standard deviation at m = 2000 is about 0.02, so a
    // +-0.05 band is a 2.5 sigma band: check the average tightly and the
    // individual fits loosely.
    let fits: Vec<f64> = (0..SEEDS)
        .map(|seed| fit_wls(&generate_rca(&Case::I.params().dgp(2000, seed)).unwrap()).unwrap().beta_hat)
        .collect();
    let (mean, _) = mean_sd(&fits);
    assert!((mean - 0.5).abs() < 0.01, "{mean}");
    let inside = fits.iter().filter(|b| (*b - 0.5).abs() < 0.05).count();
    assert!(inside as u64 >= SEEDS * 95 / 100, "{inside}");
}

#[test]
fn irrelevant_covariate_gets_small_loading() {
    // lambda0 = 0 but x_i is still drawn: regenerate with a tiny loading and
    // check the estimate stays near zero.
    for seed in 0..SEEDS {
        let s = generate_rca(&Case::I.params().with_covariates(1e-9).dgp(2000, seed)).unwrap();
        let fit = fit_wls_covariates(&s).unwrap();
        let l = fit.lambda_hat.unwrap()[0];
        assert!(l.abs() < 0.05, "seed {seed}: {l}");
    }
}

#[test]
fn covariate_scales_are_stable() {
    let mut sxd2 = Vec::new();
    let mut sx2 = Vec::new();
    for seed in 0..SEEDS {
        let s = generate_rca(&Case::I.params().with_covariates(1.0).dgp(2000, seed)).unwrap();
        let fit = fit_wls_covariates(&s).unwrap();
        let (a, d) = fit.boundary_scales(Regime::Stationary).unwrap();
        assert!(a > 0.0 && d > 0.0);
        sx2.push(a);
        sxd2.push(d);
    }
    for v in [&sx2, &sxd2] {
        let (mean, sd) = mean_sd(v);
        assert!(sd / mean < 0.10, "cv {}", sd / mean);
    }
}

#[test]
fn explosive_covariate_branch_uses_score_scale() {
    let s = generate_rca(&Case::II.params().with_covariates(1.0).dgp(200, 4)).unwrap();
    let fit = fit_wls_covariates(&s).unwrap();
    assert!(fit.scales.is_some());
    assert_eq!(fit.boundary_scales(Regime::Explosive), Some((fit.s_hat(), 1.0)));
}

#[test]
fn lrv_spread_shrinks_with_training_length() {
    let spread = |m: usize| {
        let v: Vec<f64> = (0..SEEDS)
            .map(|seed| fit_wls(&generate_rca(&Case::I.params().dgp(m, 100 + seed)).unwrap()).unwrap().s2_hat)
            .collect();
        mean_sd(&v).1.powi(2)
    };
    let ratio = spread(5000) / spread(500);
    assert!(ratio < 0.25, "{ratio}");
}
