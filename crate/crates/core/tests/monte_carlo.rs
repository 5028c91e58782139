//! Statistical checks of the Monte Carlo experiments against closed forms.

use std::f64::consts::PI;

use dephasing_core::experiments::theory::{kappa, kappa_fixed_start, t2_star};
use dephasing_core::experiments::{
    fit_exponential, run_memory, run_transmission, MemoryConfig, ReadoutMode, TrainStart,
    TransmissionConfig,
};

const J: f64 = 2.0 * PI * 215.5;

#[test]
fn kappa_bracketing() {
    for (start, target) in [
        (
            TrainStart::FixedAtFlip,
            kappa_fixed_start(J, 0.3e-3).unwrap(),
        ),
        (TrainStart::RandomPhase, kappa(J, 0.3e-3).unwrap()),
    ] {
        let mut cfg = TransmissionConfig::new(17);
        cfg.bang_bang = true;
        cfg.train_start = start;
        cfg.trials = 4000;
        let res = run_transmission(&cfg).unwrap();
        let dev = (res.grand_average.norm() - target).abs();
        assert!(
            dev < 3.0 * res.standard_error(),
            "{start:?}: deviation {dev}"
        );
    }
}

#[test]
fn dephasing_noise_shrinks_with_trials() {
    // mean squared |avg| over seeds scales as 1/N
    let mean_sq = |trials: usize| {
        let seeds = 24u64;
        (0..seeds)
            .map(|s| {
                let mut cfg = TransmissionConfig::new(1000 + s);
                cfg.trials = trials;
                run_transmission(&cfg).unwrap().grand_average.norm_sqr()
            })
            .sum::<f64>()
            / seeds as f64
    };
    let ratio = mean_sq(1000) / mean_sq(4000);
    assert!((2.0..8.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn memory_decay_is_linear_in_log() {
    for alpha in [0.10, 0.25] {
        let mut cfg = MemoryConfig::new(alpha, 33);
        cfg.observation_times = (5..=25).map(|n| 4e-3 * n as f64).collect();
        let res = run_memory(&cfg).unwrap();
        let fit = fit_exponential(&res.curve.points).unwrap();
        assert!(fit.r_squared > 0.99, "α={alpha}: R² {}", fit.r_squared);
    }
}

#[test]
fn decay_rate_scales_with_alpha_squared() {
    let scaled: Vec<f64> = [0.10, 0.15, 0.20, 0.25]
        .iter()
        .map(|&alpha| {
            let mut cfg = MemoryConfig::new(alpha, 71);
            cfg.trials = 5000;
            let t2 = run_memory(&cfg).unwrap().curve.fit.unwrap().t2;
            1.0 / (t2 * alpha * alpha)
        })
        .collect();
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let spread = scaled
        .iter()
        .map(|s| (s - mean).abs() / mean)
        .fold(0.0, f64::max);
    assert!(spread < 0.10, "spread {spread}");
    let predicted = 1.0 / (t2_star(J, 1.0, 2e-3).unwrap());
    assert!((mean - predicted).abs() / predicted < 0.10);
}

#[test]
fn fixed_time_readout_runs_and_decays() {
    let mut cfg = MemoryConfig::new(0.25, 5);
    cfg.trials = 2000;
    cfg.readout = ReadoutMode::FixedTime;
    let res = run_memory(&cfg).unwrap();
    assert!(
        res.curve
            .points
            .windows(2)
            .filter(|w| w[1].1 < w[0].1)
            .count()
            > 15
    );
}
