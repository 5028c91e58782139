//! Simulation of engineered phase decoherence in a two-qubit system.
//!
//! Qubit 2 is driven as a randomized environment for qubit 1 through the
//! coupling `J Iz⊗Iz`. The crate provides exact small-matrix algebra, quantum
//! channels in Kraus form, pulse-schedule dynamics, and the Monte Carlo
//! experiments with their closed-form decay laws.

pub mod channels;
pub mod experiments;
pub mod linalg;
pub mod pulse;

pub use channels::{ChannelError, KrausChannel, MixingEnsemble, PhaseDistribution};
pub use experiments::{
    DecayCurve, EnsembleResult, ExperimentError, FitResult, MemoryConfig, ReadoutMode, TrainStart,
    TransmissionConfig,
};
pub use linalg::{Amplitude, BlochVector, ComplexMatrix, DensityMatrix, LinalgError, C64};
pub use pulse::{Axis, CouplingSystem, PulseError, PulseEvent, PulseSchedule, Qubit};
