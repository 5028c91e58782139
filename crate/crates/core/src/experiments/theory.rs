//! Closed-form decay laws for the transmission and memory experiments.

use super::ExperimentError;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), ExperimentError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ExperimentError::Domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// `sin(Jt_b/2) / (Jt_b/2)`: coherence kept through one noise window when
/// the pulse train starts at the first environment flip.
pub fn kappa_fixed_start(j: f64, t_b: f64) -> Result<f64, ExperimentError> {
    check_positive("J", j)?;
    check_positive("t_b", t_b)?;
    Ok(sinc(0.5 * j * t_b))
}

/// `(sin(Jt_b/2) / (Jt_b/2))²`: the same with a uniformly random train phase.
pub fn kappa(j: f64, t_b: f64) -> Result<f64, ExperimentError> {
    kappa_fixed_start(j, t_b).map(|k| k * k)
}

/// `exp(-(JΔ̄α)²/4)`: coherence kept per pair of Gaussian-jittered flips.
pub fn lambda_factor(j: f64, mean_interval: f64, alpha: f64) -> Result<f64, ExperimentError> {
    check_positive("J", j)?;
    check_positive("mean interval", mean_interval)?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(ExperimentError::Domain(format!(
            "alpha must be non-negative, got {alpha}"
        )));
    }
    let x = j * mean_interval * alpha;
    Ok((-0.25 * x * x).exp())
}

/// `T2* = 8 / (J² α² Δ̄)`.
pub fn t2_star(j: f64, alpha: f64, mean_interval: f64) -> Result<f64, ExperimentError> {
    check_positive("J", j)?;
    check_positive("alpha", alpha)?;
    check_positive("mean interval", mean_interval)?;
    Ok(8.0 / (j * j * alpha * alpha * mean_interval))
}

/// `T2b* = -2Δ̄ / ln κ` with the squared `κ`. Returns `+∞` when
/// `J t_b < 1e-8`, where `κ` rounds to one.
pub fn t2b_star(j: f64, t_b: f64, mean_interval: f64) -> Result<f64, ExperimentError> {
    check_positive("J", j)?;
    check_positive("t_b", t_b)?;
    check_positive("mean interval", mean_interval)?;
    let x = j * t_b;
    if x >= 2.0 * std::f64::consts::PI {
        return Err(ExperimentError::Domain(format!(
            "J t_b must be below 2π, got {x}"
        )));
    }
    if x < 1e-8 {
        return Ok(f64::INFINITY);
    }
    Ok(-2.0 * mean_interval / kappa(j, t_b)?.ln())
}

/// `-(1/α²) ln(decay_alpha / decay_ref)`.
pub fn r_statistic(decay_alpha: f64, decay_ref: f64, alpha: f64) -> Result<f64, ExperimentError> {
    for (name, v) in [("decay_alpha", decay_alpha), ("decay_ref", decay_ref)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(ExperimentError::Domain(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    check_positive("alpha", alpha)?;
    Ok(-(decay_alpha / decay_ref).ln() / (alpha * alpha))
}

/// `J² Δ̄ T / 8`, the value of [`r_statistic`] predicted by the Gaussian model.
pub fn r_theory(j: f64, mean_interval: f64, total_time: f64) -> f64 {
    j * j * mean_interval * total_time / 8.0
}

/// Phase `θ` of the qubit-1 propagator `S(θ)` accumulated over a noise
/// window relative to a noise-free run, under a bang-bang train of spacing
/// `t_b`.
///
/// `case` selects the parities of the pulse counts before and inside the
/// window: 1 even/even, 2 even/odd, 3 odd/even, 4 odd/odd. `eps0` is the
/// delay from the window start to its first pulse and `eps1` the delay from
/// its last pulse to the window end.
pub fn four_case_phase(
    case: u8,
    eps0: f64,
    eps1: f64,
    t_b: f64,
    j: f64,
) -> Result<f64, ExperimentError> {
    check_positive("t_b", t_b)?;
    check_positive("J", j)?;
    for (name, e) in [("eps0", eps0), ("eps1", eps1)] {
        if !(e.is_finite() && (0.0..=t_b).contains(&e)) {
            return Err(ExperimentError::Domain(format!(
                "{name} = {e} outside [0, t_b]"
            )));
        }
    }
    let phase = match case {
        1 => eps1 + eps0 - t_b,
        2 => eps0 - eps1,
        3 => t_b - eps1 - eps0,
        4 => eps1 - eps0,
        other => {
            return Err(ExperimentError::Domain(format!(
                "case must be 1..=4, got {other}"
            )))
        }
    };
    Ok(j * phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const J: f64 = 2.0 * PI * 215.5;

    #[test]
    fn kappa_values() {
        assert!((kappa_fixed_start(J, 0.3e-3).unwrap() - 0.99312).abs() < 2e-5);
        assert!((kappa(J, 0.3e-3).unwrap() - 0.98629).abs() < 5e-5);
        assert!((kappa(J, 1e-12).unwrap() - 1.0).abs() < 1e-15);
        assert!(kappa(1.0, 2.0 * PI).unwrap().abs() < 1e-15);
        assert!(kappa(J, 0.0).is_err());
    }

    #[test]
    fn lambda_values() {
        assert_eq!(lambda_factor(J, 2e-3, 0.0).unwrap(), 1.0);
        let l = lambda_factor(J, 2e-3, 0.25).unwrap();
        assert!((l - 0.89173).abs() < 1e-5);
        assert!((l.powi(25) - 0.0570).abs() < 1e-4);
    }

    #[test]
    fn decay_times() {
        assert!((t2_star(J, 0.25, 2e-3).unwrap() - 34.91e-3).abs() < 1e-5);
        let t2b = t2b_star(J, 0.5e-3, 2e-3).unwrap();
        assert!((t2b - 104.5e-3).abs() < 0.5e-3);
        assert!(((-60e-3 / t2b).exp() - 0.562).abs() < 1e-3);
        assert_eq!(t2b_star(J, 1e-14, 2e-3).unwrap(), f64::INFINITY);
        assert!(t2_star(J, 0.0, 2e-3).is_err());
    }

    #[test]
    fn lambda_and_t2_star_agree() {
        // λ^n = exp(-2nΔ̄ / T2*)
        let (dbar, alpha) = (2e-3, 0.15);
        let l = lambda_factor(J, dbar, alpha).unwrap();
        let t2 = t2_star(J, alpha, dbar).unwrap();
        assert!((l.ln() + 2.0 * dbar / t2).abs() < 1e-14);
    }

    #[test]
    fn r_values() {
        assert!((r_theory(J, 2e-3, 0.1) - 45.84).abs() < 0.01);
        assert_eq!(r_statistic(0.3, 0.3, 0.2).unwrap(), 0.0);
        assert!(r_statistic(0.0, 1.0, 0.2).is_err());
        let lam = lambda_factor(J, 2e-3, 0.2).unwrap().powi(25);
        assert!((r_statistic(lam, 1.0, 0.2).unwrap() - r_theory(J, 2e-3, 0.1)).abs() < 1e-9);
    }

    #[test]
    fn four_case_examples() {
        let tb = 0.3e-3;
        assert_eq!(four_case_phase(2, 0.1e-3, 0.1e-3, tb, J).unwrap(), 0.0);
        assert!(four_case_phase(1, tb / 2.0, tb / 2.0, tb, J).unwrap().abs() < 1e-15);
        assert!(four_case_phase(5, 0.0, 0.0, tb, J).is_err());
        assert!(four_case_phase(1, 2.0 * tb, 0.0, tb, J).is_err());
    }

    #[test]
    fn four_case_average_is_kappa() {
        // averaging e^{iθ} over uniform eps0, eps1 gives sinc² in every case
        let tb = 0.3e-3;
        let n = 400;
        for case in 1..=4u8 {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let e0 = tb * (a as f64 + 0.5) / n as f64;
                    let e1 = tb * (b as f64 + 0.5) / n as f64;
                    acc += four_case_phase(case, e0, e1, tb, J).unwrap().cos();
                }
            }
            let avg = acc / (n * n) as f64;
            assert!(
                (avg - kappa(J, tb).unwrap()).abs() < 1e-6,
                "case {case}: {avg}"
            );
        }
    }
}
