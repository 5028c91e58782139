//! Fixtures shared by the benchmarks.

use dephasing_core::experiments::{MemoryConfig, TrainStart, TransmissionConfig};
use dephasing_core::linalg::{DensityMatrix, C64};

/// Both qubits in `|0⟩`.
pub fn ground_state() -> DensityMatrix {
    let zero = C64::new(0.0, 0.0);
    DensityMatrix::pure(&[C64::new(1.0, 0.0), zero, zero, zero]).expect("normalized ket")
}

/// Bang-bang transmission with a random train phase.
pub fn transmission(trials: usize) -> TransmissionConfig {
    let mut cfg = TransmissionConfig::new(1);
    cfg.bang_bang = true;
    cfg.train_start = TrainStart::RandomPhase;
    cfg.trials = trials;
    cfg
}

/// Memory run at α = 0.25 out to 100 ms, optionally with a 0.5 ms train.
pub fn memory(trials: usize, bang_bang: bool) -> MemoryConfig {
    let mut cfg = MemoryConfig::new(0.25, 1);
    cfg.trials = trials;
    cfg.bang_bang = bang_bang;
    cfg
}
