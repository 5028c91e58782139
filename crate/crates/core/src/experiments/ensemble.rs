//! Trial bookkeeping shared by the Monte Carlo experiments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ExperimentError;
use crate::linalg::C64;

/// Per-trial amplitudes with their group and grand averages.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleResult {
    pub amplitudes: Vec<C64>,
    pub group_averages: Vec<C64>,
    pub grand_average: C64,
    pub observation_time: f64,
}

impl EnsembleResult {
    /// Averages `amplitudes` in index order. Groups are consecutive runs of
    /// `group_size` trials; a trailing partial group is averaged over its
    /// own length.
    pub fn from_amplitudes(
        amplitudes: Vec<C64>,
        group_size: usize,
        observation_time: f64,
    ) -> Result<Self, ExperimentError> {
        if amplitudes.is_empty() {
            return Err(ExperimentError::Config(
                "at least one trial is required".into(),
            ));
        }
        if group_size == 0 {
            return Err(ExperimentError::Config(
                "group_size must be positive".into(),
            ));
        }
        let group_averages = amplitudes.chunks(group_size).map(mean).collect();
        let grand_average = mean(&amplitudes);
        Ok(Self {
            amplitudes,
            group_averages,
            grand_average,
            observation_time,
        })
    }

    /// Standard error of the grand average's real and imaginary parts,
    /// combined in quadrature.
    pub fn standard_error(&self) -> f64 {
        let n = self.amplitudes.len() as f64;
        if n < 2.0 {
            return f64::INFINITY;
        }
        let var = self
            .amplitudes
            .iter()
            .map(|a| (a - self.grand_average).norm_sqr())
            .sum::<f64>()
            / (n - 1.0);
        (var / n).sqrt()
    }
}

/// Sequential sum in slice order, so results do not depend on scheduling.
pub(crate) fn mean(values: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for v in values {
        acc += v;
    }
    acc / values.len() as f64
}

/// Independent generator for one trial, determined by `(seed, index)`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `trial` for indices `0..n` in parallel and returns results in index
/// order.
pub(crate) fn run_trials<T, F>(n: usize, trial: F) -> Result<Vec<T>, ExperimentError>
where
    T: Send,
    F: Fn(usize) -> Result<T, ExperimentError> + Sync + Send,
{
    (0..n).into_par_iter().map(trial).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn groups_and_grand_average() {
        let amps: Vec<C64> = (0..5).map(|i| C64::new(i as f64, -(i as f64))).collect();
        let r = EnsembleResult::from_amplitudes(amps, 2, 1.0).unwrap();
        assert_eq!(
            r.group_averages,
            vec![
                C64::new(0.5, -0.5),
                C64::new(2.5, -2.5),
                C64::new(4.0, -4.0)
            ]
        );
        assert_eq!(r.grand_average, C64::new(2.0, -2.0));
        assert!(EnsembleResult::from_amplitudes(vec![], 2, 1.0).is_err());
    }

    #[test]
    fn trial_streams_are_reproducible_and_distinct() {
        let a: f64 = trial_rng(7, 3).random();
        let b: f64 = trial_rng(7, 3).random();
        let c: f64 = trial_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn trials_come_back_in_order() {
        let out = run_trials(1000, |i| Ok(i * 2)).unwrap();
        assert!(out.iter().enumerate().all(|(i, &v)| v == 2 * i));
    }
}
