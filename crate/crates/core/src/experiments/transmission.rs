//! Phase decoherence of a qubit in a transmission line.
//!
//! Qubit 1 is tipped onto the x axis at `t = 0`. Qubit 2 is flipped to `|1⟩`
//! at `t1` and back at `t1 + Δ` with `Δ` uniform on `[0, 2π/J]`, which
//! averages the qubit-1 coherence to zero. A regular π-pulse train on qubit 1
//! suppresses this.

use std::f64::consts::PI;

use rand::Rng;

use super::ensemble::{run_trials, trial_rng};
use super::{EnsembleResult, ExperimentError};
use crate::linalg::{amplitude_of, DensityMatrix, C64};
use crate::pulse::{
    cyclic_axes, simulate_schedule, Axis, CouplingSystem, PulseEvent, PulseSchedule, Qubit,
};

/// Placement of the bang-bang train relative to the first flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrainStart {
    /// First pulse coincides with the flip at `t1`.
    FixedAtFlip,
    /// Train shifted earlier by an offset uniform over one full pulse-pair
    /// period `[0, 2 t_b)`, so its phase is uncorrelated with the window.
    RandomPhase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransmissionConfig {
    /// Coupling `J` in rad/s.
    pub j: f64,
    /// Readout time `T` in s.
    pub total_time: f64,
    /// First environment flip in s.
    pub t1: f64,
    pub bang_bang: bool,
    /// Pulse spacing in s, used when `bang_bang` is set.
    pub t_b: f64,
    pub train_start: TrainStart,
    /// Train length; `None` picks [`default_pulse_count`].
    pub pulses_per_trial: Option<usize>,
    pub trials: usize,
    pub group_size: usize,
    pub seed: u64,
    /// Divide each amplitude by the phase of a noise-free run of the same
    /// schedule, removing the deterministic precession.
    pub remove_trivial_phase: bool,
}

impl TransmissionConfig {
    /// `J/2π = 215.5 Hz`, `t1 = 1 ms`, `T = 10 ms`, `t_b = 0.3 ms`, 10⁴ trials
    /// in groups of 16, bang-bang off.
    pub fn new(seed: u64) -> Self {
        Self {
            j: 2.0 * PI * 215.5,
            total_time: 10e-3,
            t1: 1e-3,
            bang_bang: false,
            t_b: 0.3e-3,
            train_start: TrainStart::FixedAtFlip,
            pulses_per_trial: None,
            trials: 10_000,
            group_size: 16,
            seed,
            remove_trivial_phase: true,
        }
    }

    pub fn noise_span(&self) -> f64 {
        2.0 * PI / self.j
    }

    pub fn pulse_count(&self) -> usize {
        self.pulses_per_trial
            .unwrap_or_else(|| default_pulse_count(self.j, self.t_b, self.train_start))
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        if !(self.j.is_finite() && self.j > 0.0) {
            return bad(format!("J must be positive, got {}", self.j));
        }
        if !(self.total_time.is_finite() && self.t1 > 0.0 && self.t1 < self.total_time) {
            return bad(format!(
                "need 0 < t1 < T, got t1 = {}, T = {}",
                self.t1, self.total_time
            ));
        }
        if self.t1 + self.noise_span() > self.total_time {
            return bad(format!(
                "noise window t1 + 2π/J = {} s exceeds T = {} s",
                self.t1 + self.noise_span(),
                self.total_time
            ));
        }
        if self.trials == 0 || self.group_size == 0 {
            return bad("trials and group_size must be positive".into());
        }
        if self.bang_bang {
            if !(self.t_b.is_finite() && self.t_b > 0.0) {
                return bad(format!("t_b must be positive, got {}", self.t_b));
            }
            if self.j * self.t_b >= 1.0 {
                return bad(format!("J t_b = {} must be below 1", self.j * self.t_b));
            }
            let m = self.pulse_count();
            if m == 0 || m % 2 != 0 {
                return bad(format!("pulse count must be even and positive, got {m}"));
            }
            let last = self.t1 + (m - 1) as f64 * self.t_b;
            if last > self.total_time {
                return bad(format!(
                    "pulse train ends at {last} s, after T = {} s",
                    self.total_time
                ));
            }
            if self.train_start == TrainStart::RandomPhase && self.t1 < 2.0 * self.t_b {
                return bad(format!(
                    "random train phase needs t1 >= 2 t_b, got t1 = {}",
                    self.t1
                ));
            }
        }
        Ok(())
    }
}

/// Smallest multiple of 8 pulses whose train spans the noise range plus one
/// spacing, and for a random phase the extra offset of up to `2 t_b`.
pub fn default_pulse_count(j: f64, t_b: f64, start: TrainStart) -> usize {
    let extra = match start {
        TrainStart::FixedAtFlip => 1.0,
        TrainStart::RandomPhase => 3.0,
    };
    let n = ((2.0 * PI / j + extra * t_b) / t_b).ceil() as usize;
    n.div_ceil(8) * 8
}

/// The joint schedule of one trial with noise window `delta` and train
/// offset `offset` (ignored without bang-bang).
pub fn transmission_trial_schedule(
    cfg: &TransmissionConfig,
    delta: f64,
    offset: f64,
) -> Result<PulseSchedule, ExperimentError> {
    let mut events = vec![
        PulseEvent::new(0.0, Qubit::One, Axis::Y, PI / 2.0),
        PulseEvent::pi(cfg.t1, Qubit::Two, Axis::X),
        PulseEvent::pi(cfg.t1 + delta, Qubit::Two, Axis::MinusX),
    ];
    if cfg.bang_bang {
        let start = cfg.t1 - offset;
        events.extend(
            cyclic_axes(cfg.pulse_count())
                .into_iter()
                .enumerate()
                .map(|(k, axis)| PulseEvent::pi(start + k as f64 * cfg.t_b, Qubit::One, axis)),
        );
    }
    Ok(PulseSchedule::new(
        CouplingSystem::new(cfg.j)?,
        events,
        cfg.total_time,
    )?)
}

fn initial_state() -> DensityMatrix {
    let zero = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ];
    DensityMatrix::pure(&zero).expect("normalized ket")
}

fn qubit1_amplitude(sched: &PulseSchedule, rho0: &DensityMatrix) -> Result<C64, ExperimentError> {
    let out = simulate_schedule(sched, rho0)?;
    Ok(amplitude_of(&out.reduced_system()?)?.value())
}

pub fn run_transmission(cfg: &TransmissionConfig) -> Result<EnsembleResult, ExperimentError> {
    cfg.validate()?;
    let rho0 = initial_state();
    let span = cfg.noise_span();
    let amplitudes = run_trials(cfg.trials, |i| {
        let mut rng = trial_rng(cfg.seed, i as u64);
        let delta = span * rng.random::<f64>();
        let offset = match (cfg.bang_bang, cfg.train_start) {
            (true, TrainStart::RandomPhase) => 2.0 * cfg.t_b * rng.random::<f64>(),
            _ => 0.0,
        };
        let sched = transmission_trial_schedule(cfg, delta, offset)?;
        let a = qubit1_amplitude(&sched, &rho0)?;
        if !cfg.remove_trivial_phase {
            return Ok(a);
        }
        let r = qubit1_amplitude(&sched.without(Qubit::Two), &rho0)?;
        Ok(a * r.conj() / r.norm())
    })?;
    EnsembleResult::from_amplitudes(amplitudes, cfg.group_size, cfg.total_time)
}
