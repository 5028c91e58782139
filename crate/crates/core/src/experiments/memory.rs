//! Phase decoherence of a stored qubit under a randomly flipped neighbour.
//!
//! Qubit 2 is flipped at times `t_1, t_2, ...` with Gaussian-jittered
//! intervals `Δ_j = Δ̄ (1 + α ξ_j)`. The qubit-1 coherence then decays as
//! `λ^n` after `2n` flips. An optional π-pulse train on qubit 1 slows the
//! decay.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::ensemble::{run_trials, trial_rng};
use super::{DecayCurve, EnsembleResult, ExperimentError};
use crate::linalg::{amplitude_of, pauli, ComplexMatrix, DensityMatrix, C64};
use crate::pulse::{
    cyclic_axes, rotation_pulse, simulate_with_readouts, Axis, CouplingSystem, PulseEvent,
    PulseSchedule, Qubit,
};

/// Consecutive non-positive interval draws tolerated before giving up.
pub const MAX_RESAMPLES: usize = 100;

/// When a nominal observation time `2nΔ̄` is read out in each trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReadoutMode {
    /// At the trial's own `2n`-th flip, whose mean is `2nΔ̄`.
    AtFlip,
    /// At wall-clock time `2nΔ̄`.
    FixedTime,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemoryConfig {
    /// Coupling `J` in rad/s.
    pub j: f64,
    /// Mean flip interval `Δ̄` in s.
    pub mean_interval: f64,
    /// Relative spread of the intervals, in `[0, 1/4]`.
    pub alpha: f64,
    /// Nominal observation times, each a positive multiple of `2Δ̄`.
    pub observation_times: Vec<f64>,
    pub trials: usize,
    pub group_size: usize,
    pub bang_bang: bool,
    /// Pulse spacing in s, used when `bang_bang` is set.
    pub t_b: f64,
    pub seed: u64,
    pub readout: ReadoutMode,
}

impl MemoryConfig {
    /// `J/2π = 215.5 Hz`, `Δ̄ = 2 ms`, observations every 4 ms up to 100 ms,
    /// 10⁴ trials in groups of 16, bang-bang off.
    pub fn new(alpha: f64, seed: u64) -> Self {
        let mean_interval = 2e-3;
        Self {
            j: 2.0 * PI * 215.5,
            mean_interval,
            alpha,
            observation_times: (1..=25).map(|n| 2.0 * mean_interval * n as f64).collect(),
            trials: 10_000,
            group_size: 16,
            bang_bang: false,
            t_b: 0.5e-3,
            seed,
            readout: ReadoutMode::AtFlip,
        }
    }

    /// Flip-pair counts `n` for each observation time `2nΔ̄`.
    pub fn pair_counts(&self) -> Vec<usize> {
        self.observation_times
            .iter()
            .map(|t| (t / (2.0 * self.mean_interval)).round() as usize)
            .collect()
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        if !(self.j.is_finite() && self.j > 0.0) {
            return bad(format!("J must be positive, got {}", self.j));
        }
        if !(self.mean_interval.is_finite() && self.mean_interval > 0.0) {
            return bad(format!(
                "mean interval must be positive, got {}",
                self.mean_interval
            ));
        }
        if !(0.0..=0.25).contains(&self.alpha) {
            return bad(format!("alpha must lie in [0, 0.25], got {}", self.alpha));
        }
        if self.trials == 0 || self.group_size == 0 {
            return bad("trials and group_size must be positive".into());
        }
        if self.observation_times.is_empty() {
            return bad("at least one observation time is required".into());
        }
        let period = 2.0 * self.mean_interval;
        for (&t, n) in self.observation_times.iter().zip(self.pair_counts()) {
            if !(t.is_finite() && n > 0 && (t - n as f64 * period).abs() <= 1e-9 * period.max(t)) {
                return bad(format!(
                    "observation time {t} s is not a positive multiple of 2Δ̄ = {period} s"
                ));
            }
        }
        if self.observation_times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("observation times must be strictly increasing".into());
        }
        if self.bang_bang {
            if !(self.t_b.is_finite() && self.t_b > 0.0) {
                return bad(format!("t_b must be positive, got {}", self.t_b));
            }
            if self.j * self.t_b >= 2.0 * PI {
                return bad(format!("J t_b = {} must be below 2π", self.j * self.t_b));
            }
        }
        Ok(())
    }

    /// Non-fatal remarks about the regime being simulated.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.bang_bang && self.t_b >= self.alpha * self.mean_interval {
            out.push(format!(
                "t_b = {} s is not small against α·Δ̄ = {} s; the decoupling prediction assumes t_b ≪ α·Δ̄",
                self.t_b,
                self.alpha * self.mean_interval
            ));
        }
        out
    }
}

/// Magnitude curve together with the ensemble at each observation time.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryResult {
    pub curve: DecayCurve,
    pub ensembles: Vec<EnsembleResult>,
}

fn draw_interval<R: Rng>(
    rng: &mut R,
    cfg: &MemoryConfig,
    trial: usize,
) -> Result<f64, ExperimentError> {
    for _ in 0..MAX_RESAMPLES {
        let xi: f64 = rng.sample(StandardNormal);
        let d = cfg.mean_interval * (1.0 + cfg.alpha * xi);
        if d > 0.0 {
            return Ok(d);
        }
    }
    Err(ExperimentError::ResampleExhausted {
        trial,
        attempts: MAX_RESAMPLES,
    })
}

/// Draws the flip times of one trial: enough to reach every readout.
fn draw_flip_times<R: Rng>(
    rng: &mut R,
    cfg: &MemoryConfig,
    trial: usize,
) -> Result<Vec<f64>, ExperimentError> {
    let mut flips = Vec::new();
    let mut t = 0.0;
    match cfg.readout {
        ReadoutMode::AtFlip => {
            let needed = 2 * cfg.pair_counts().into_iter().max().unwrap_or(0);
            for _ in 0..needed {
                t += draw_interval(rng, cfg, trial)?;
                flips.push(t);
            }
        }
        ReadoutMode::FixedTime => {
            let end = cfg.observation_times.iter().copied().fold(0.0, f64::max);
            loop {
                t += draw_interval(rng, cfg, trial)?;
                if t > end {
                    break;
                }
                flips.push(t);
            }
        }
    }
    Ok(flips)
}

/// The joint schedule for given flip times, ending at `total_time`.
pub fn memory_trial_schedule(
    cfg: &MemoryConfig,
    flips: &[f64],
    total_time: f64,
) -> Result<PulseSchedule, ExperimentError> {
    let mut events = vec![PulseEvent::new(0.0, Qubit::One, Axis::Y, PI / 2.0)];
    events.extend(
        flips
            .iter()
            .zip(cyclic_axes(flips.len()))
            .map(|(&t, axis)| PulseEvent::pi(t, Qubit::Two, axis)),
    );
    if cfg.bang_bang {
        let count = (total_time / cfg.t_b).floor() as usize;
        events.extend(
            cyclic_axes(count)
                .into_iter()
                .enumerate()
                .map(|(k, axis)| PulseEvent::pi((k + 1) as f64 * cfg.t_b, Qubit::One, axis)),
        );
    }
    Ok(PulseSchedule::new(
        CouplingSystem::new(cfg.j)?,
        events,
        total_time,
    )?)
}

/// Net rotation of the first `count` train pulses (later pulses on the left).
fn train_rotation(axes: &[Axis], count: usize) -> ComplexMatrix {
    axes[..count]
        .iter()
        .fold(pauli::identity(), |acc, &a| rotation_pulse(a, PI) * acc)
}

fn run_trial(
    cfg: &MemoryConfig,
    trial: usize,
    rho0: &DensityMatrix,
) -> Result<Vec<C64>, ExperimentError> {
    let mut rng = trial_rng(cfg.seed, trial as u64);
    let flips = draw_flip_times(&mut rng, cfg, trial)?;
    let readouts: Vec<f64> = match cfg.readout {
        ReadoutMode::AtFlip => cfg
            .pair_counts()
            .into_iter()
            .map(|n| flips[2 * n - 1])
            .collect(),
        ReadoutMode::FixedTime => cfg.observation_times.clone(),
    };
    let total = readouts.iter().copied().fold(0.0, f64::max);
    let sched = memory_trial_schedule(cfg, &flips, total)?;
    let states = simulate_with_readouts(&sched, rho0, &readouts)?;
    let train_axes: Vec<Axis> = sched
        .events()
        .iter()
        .filter(|e| e.target == Qubit::One && e.time > 0.0)
        .map(|e| e.axis)
        .collect();
    readouts
        .iter()
        .zip(states)
        .map(|(&t, state)| {
            let mut rho1 = state.reduced_system()?;
            if cfg.bang_bang {
                // undo the ideal train rotation so readouts between pulses of
                // a pair are not mirrored
                let applied = sched
                    .events()
                    .iter()
                    .filter(|e| e.target == Qubit::One && e.time > 0.0 && e.time <= t)
                    .count();
                let net = train_rotation(&train_axes, applied);
                rho1 = DensityMatrix::from_trusted(rho1.matrix().conjugate_by(&net.adjoint())?);
            }
            Ok(amplitude_of(&rho1)?.value())
        })
        .collect()
}

pub fn run_memory(cfg: &MemoryConfig) -> Result<MemoryResult, ExperimentError> {
    cfg.validate()?;
    let zero = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ];
    let rho0 = DensityMatrix::pure(&zero)?;
    let per_trial = run_trials(cfg.trials, |i| run_trial(cfg, i, &rho0))?;
    let mut ensembles = Vec::with_capacity(cfg.observation_times.len());
    for (k, &t) in cfg.observation_times.iter().enumerate() {
        let amps = per_trial.iter().map(|row| row[k]).collect();
        ensembles.push(EnsembleResult::from_amplitudes(amps, cfg.group_size, t)?);
    }
    let points = ensembles
        .iter()
        .map(|e| (e.observation_time, e.grand_average.norm()))
        .collect();
    Ok(MemoryResult {
        curve: DecayCurve::new(points),
        ensembles,
    })
}
