//! Monte Carlo experiments, closed-form predictions and decay fitting.

mod ensemble;
mod fit;
mod memory;
pub mod theory;
mod transmission;

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::pulse::PulseError;

pub use ensemble::{trial_rng, EnsembleResult};
pub use fit::{fit_exponential, fit_exponential_with_floor, DecayCurve, FitResult, FIT_FLOOR};
pub use memory::{memory_trial_schedule, run_memory, MemoryConfig, MemoryResult, ReadoutMode};
pub use transmission::{
    default_pulse_count, run_transmission, transmission_trial_schedule, TrainStart,
    TransmissionConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("trial {trial}: interval draw was non-positive {attempts} times in a row")]
    ResampleExhausted { trial: usize, attempts: usize },
    #[error("fit needs at least 3 points above the floor, found {found}")]
    InsufficientPoints { found: usize },
    #[error("curve does not decay (fitted slope {slope})")]
    NoDecay { slope: f64 },
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
