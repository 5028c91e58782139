//! Pulse-level dynamics of two coupled qubits.
//!
//! In the rotating frame the free Hamiltonian is `H = J Iz⊗Iz`, which is
//! diagonal, so free evolution is a set of phases. Pulses are instantaneous
//! rotations about a transverse axis of one qubit.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{pauli, tensor, ComplexMatrix, DensityMatrix, LinalgError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PulseError {
    #[error("coupling J must be positive and finite, got {0}")]
    Coupling(f64),
    #[error("evolution time must be non-negative and finite, got {0}")]
    NegativeTime(f64),
    #[error("unknown axis {0:?}, expected one of x, -x, y, -y")]
    Axis(String),
    #[error("qubit index must be 1 or 2, got {0}")]
    Qubit(u8),
    #[error("total time must be positive and finite, got {0}")]
    TotalTime(f64),
    #[error("event {index} at t = {time} s lies outside [0, {total}] s")]
    EventTime { index: usize, time: f64, total: f64 },
    #[error("event {index} has non-finite angle {angle}")]
    EventAngle { index: usize, angle: f64 },
    #[error("readout time {0} s lies outside the schedule")]
    ReadoutTime(f64),
    #[error("readout times must be non-decreasing")]
    ReadoutOrder,
    #[error("finite-difference step must be positive, got {0}")]
    Step(f64),
    #[error("lab-frame parameters must be finite")]
    LabFrame,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Scalar coupling strength `J` in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingSystem {
    j: f64,
}

impl CouplingSystem {
    pub fn new(j: f64) -> Result<Self, PulseError> {
        if j.is_finite() && j > 0.0 {
            Ok(Self { j })
        } else {
            Err(PulseError::Coupling(j))
        }
    }

    /// Build from `J/2π` in Hz.
    pub fn from_hz(j_hz: f64) -> Result<Self, PulseError> {
        Self::new(2.0 * std::f64::consts::PI * j_hz)
    }

    pub fn j(&self) -> f64 {
        self.j
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Qubit {
    /// The system qubit (left tensor factor).
    One,
    /// The environment qubit.
    Two,
}

impl TryFrom<u8> for Qubit {
    type Error = PulseError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Qubit::One),
            2 => Ok(Qubit::Two),
            other => Err(PulseError::Qubit(other)),
        }
    }
}

impl From<Qubit> for u8 {
    fn from(q: Qubit) -> u8 {
        match q {
            Qubit::One => 1,
            Qubit::Two => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "-x")]
    MinusX,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "-y")]
    MinusY,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::MinusX => "-x",
            Axis::Y => "y",
            Axis::MinusY => "-y",
        }
    }

    /// `σ_axis`, with `σ_{-x} = -σ_x` and `σ_{-y} = -σ_y`.
    pub fn pauli(&self) -> ComplexMatrix {
        match self {
            Axis::X => pauli::sigma_x(),
            Axis::MinusX => pauli::sigma_x().scale_real(-1.0),
            Axis::Y => pauli::sigma_y(),
            Axis::MinusY => pauli::sigma_y().scale_real(-1.0),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = PulseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "x" | "+x" => Ok(Axis::X),
            "-x" => Ok(Axis::MinusX),
            "y" | "+y" => Ok(Axis::Y),
            "-y" => Ok(Axis::MinusY),
            other => Err(PulseError::Axis(other.to_string())),
        }
    }
}

/// An instantaneous rotation of one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseEvent {
    #[serde(rename = "time_s")]
    pub time: f64,
    pub target: Qubit,
    pub axis: Axis,
    #[serde(rename = "angle_rad")]
    pub angle: f64,
}

impl PulseEvent {
    pub fn new(time: f64, target: Qubit, axis: Axis, angle: f64) -> Self {
        Self {
            time,
            target,
            axis,
            angle,
        }
    }

    pub fn pi(time: f64, target: Qubit, axis: Axis) -> Self {
        Self::new(time, target, axis, std::f64::consts::PI)
    }

    pub fn unitary(&self) -> ComplexMatrix {
        rotation_pulse(self.axis, self.angle)
    }

    /// The pulse lifted to the joint space.
    pub fn joint_unitary(&self) -> ComplexMatrix {
        let u = self.unitary();
        let id = pauli::identity();
        let joint = match self.target {
            Qubit::One => tensor(&u, &id),
            Qubit::Two => tensor(&id, &u),
        };
        joint.expect("2x2 factors")
    }
}

/// A time-ordered list of pulses interleaved with free evolution up to `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleDocument", into = "ScheduleDocument")]
pub struct PulseSchedule {
    system: CouplingSystem,
    events: Vec<PulseEvent>,
    total_time: f64,
}

/// Serialized form of [`PulseSchedule`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub j_rad_per_s: f64,
    pub total_time_s: f64,
    #[serde(default)]
    pub events: Vec<PulseEvent>,
}

impl TryFrom<ScheduleDocument> for PulseSchedule {
    type Error = PulseError;

    fn try_from(doc: ScheduleDocument) -> Result<Self, Self::Error> {
        PulseSchedule::new(
            CouplingSystem::new(doc.j_rad_per_s)?,
            doc.events,
            doc.total_time_s,
        )
    }
}

impl From<PulseSchedule> for ScheduleDocument {
    fn from(s: PulseSchedule) -> Self {
        ScheduleDocument {
            j_rad_per_s: s.system.j,
            total_time_s: s.total_time,
            events: s.events,
        }
    }
}

fn event_order(a: &PulseEvent, b: &PulseEvent) -> Ordering {
    let rank = |e: &PulseEvent| match e.target {
        Qubit::Two => 0,
        Qubit::One => 1,
    };
    a.time.total_cmp(&b.time).then(rank(a).cmp(&rank(b)))
}

impl PulseSchedule {
    /// Validates times and angles, then sorts events by time. Simultaneous
    /// events on different qubits run qubit 2 first; simultaneous events on
    /// the same qubit keep their input order.
    pub fn new(
        system: CouplingSystem,
        mut events: Vec<PulseEvent>,
        total_time: f64,
    ) -> Result<Self, PulseError> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(PulseError::TotalTime(total_time));
        }
        for (index, e) in events.iter().enumerate() {
            if !(e.time.is_finite() && (0.0..=total_time).contains(&e.time)) {
                return Err(PulseError::EventTime {
                    index,
                    time: e.time,
                    total: total_time,
                });
            }
            if !e.angle.is_finite() {
                return Err(PulseError::EventAngle {
                    index,
                    angle: e.angle,
                });
            }
        }
        events.sort_by(event_order);
        Ok(Self {
            system,
            events,
            total_time,
        })
    }

    pub fn system(&self) -> CouplingSystem {
        self.system
    }

    pub fn events(&self) -> &[PulseEvent] {
        &self.events
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// The same schedule with all pulses on `target` removed.
    pub fn without(&self, target: Qubit) -> Self {
        Self {
            system: self.system,
            events: self
                .events
                .iter()
                .copied()
                .filter(|e| e.target != target)
                .collect(),
            total_time: self.total_time,
        }
    }
}

/// Computational-basis state of the environment qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvState {
    Zero,
    One,
}

impl EnvState {
    pub fn flipped(self) -> Self {
        match self {
            EnvState::Zero => EnvState::One,
            EnvState::One => EnvState::Zero,
        }
    }
}

/// `S(θ) = e^{iθσz/2} = diag(e^{iθ/2}, e^{-iθ/2})`.
pub fn phase_shift(theta: f64) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[
        C64::from_polar(1.0, theta / 2.0),
        C64::from_polar(1.0, -theta / 2.0),
    ])
    .expect("dim 2")
}

/// `e^{-i(angle/2)σ_axis} = cos(angle/2) I - i sin(angle/2) σ_axis`.
pub fn rotation_pulse(axis: Axis, angle: f64) -> ComplexMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    pauli::identity().scale_real(c) - axis.pauli().scale(C64::new(0.0, s))
}

/// Qubit-1 propagator for time `tau` with the environment frozen in `env`:
/// `S(-Jτ/2)` for `|0⟩`, `S(Jτ/2)` for `|1⟩`.
pub fn conditional_evolution(
    sys: CouplingSystem,
    tau: f64,
    env: EnvState,
) -> Result<ComplexMatrix, PulseError> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(PulseError::NegativeTime(tau));
    }
    let half = 0.5 * sys.j * tau;
    Ok(match env {
        EnvState::Zero => phase_shift(-half),
        EnvState::One => phase_shift(half),
    })
}

/// Diagonal of `e^{-iHτ}` for `H = J Iz⊗Iz` in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn free_evolution_diagonal(sys: CouplingSystem, tau: f64) -> [C64; 4] {
    let q = 0.25 * sys.j * tau;
    let minus = C64::from_polar(1.0, -q);
    let plus = C64::from_polar(1.0, q);
    [minus, plus, plus, minus]
}

pub fn free_evolution(sys: CouplingSystem, tau: f64) -> Result<ComplexMatrix, PulseError> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(PulseError::NegativeTime(tau));
    }
    Ok(ComplexMatrix::from_diagonal(&free_evolution_diagonal(
        sys, tau,
    ))?)
}

/// `ρ ↦ D ρ D†` for diagonal `D`.
fn evolve_diagonal(rho: &ComplexMatrix, d: &[C64; 4]) -> ComplexMatrix {
    let mut rows = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, row) in rows.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            *entry = d[i] * rho.get(i, k) * d[k].conj();
        }
    }
    ComplexMatrix::from_rows4(rows)
}

/// Steps a joint density matrix through a schedule.
struct Stepper<'a> {
    schedule: &'a PulseSchedule,
    rho: ComplexMatrix,
    time: f64,
    next_event: usize,
}

impl<'a> Stepper<'a> {
    fn new(schedule: &'a PulseSchedule, rho0: &DensityMatrix) -> Result<Self, PulseError> {
        if rho0.dim() != 4 {
            return Err(LinalgError::DimensionMismatch {
                expected: 4,
                found: rho0.dim(),
            }
            .into());
        }
        Ok(Self {
            schedule,
            rho: *rho0.matrix(),
            time: 0.0,
            next_event: 0,
        })
    }

    fn evolve_to(&mut self, t: f64) {
        let tau = t - self.time;
        if tau > 0.0 {
            let d = free_evolution_diagonal(self.schedule.system, tau);
            self.rho = evolve_diagonal(&self.rho, &d);
            self.time = t;
        }
    }

    /// Applies every event with time `<= t`, then free evolution up to `t`.
    fn advance(&mut self, t: f64) {
        let events = &self.schedule.events;
        while let Some(e) = events.get(self.next_event).filter(|e| e.time <= t) {
            self.evolve_to(e.time);
            self.rho = self
                .rho
                .conjugate_by(&e.joint_unitary())
                .expect("4x4 operands");
            self.next_event += 1;
        }
        self.evolve_to(t);
    }

    fn state(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(self.rho)
    }
}

/// Evolves `rho0` (4x4) through the whole schedule up to its total time.
pub fn simulate_schedule(
    sched: &PulseSchedule,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix, PulseError> {
    let mut stepper = Stepper::new(sched, rho0)?;
    stepper.advance(sched.total_time);
    Ok(stepper.state())
}

/// Joint states at each of the non-decreasing `times`. Events at exactly a
/// readout time are applied before that readout.
pub fn simulate_with_readouts(
    sched: &PulseSchedule,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<DensityMatrix>, PulseError> {
    if let Some(&t) = times
        .iter()
        .find(|t| !(t.is_finite() && (0.0..=sched.total_time).contains(*t)))
    {
        return Err(PulseError::ReadoutTime(t));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(PulseError::ReadoutOrder);
    }
    let mut stepper = Stepper::new(sched, rho0)?;
    Ok(times
        .iter()
        .map(|&t| {
            stepper.advance(t);
            stepper.state()
        })
        .collect())
}

const AXIS_CYCLE: [Axis; 8] = [
    Axis::X,
    Axis::MinusX,
    Axis::Y,
    Axis::MinusY,
    Axis::MinusX,
    Axis::X,
    Axis::MinusY,
    Axis::Y,
];

/// The first `n` entries of the repeating 8-pulse axis cycle.
pub fn cyclic_axes(n: usize) -> Vec<Axis> {
    AXIS_CYCLE.iter().copied().cycle().take(n).collect()
}

/// Larmor frequencies and coupling of the lab-frame Hamiltonian, in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabFrameParams {
    pub omega_01: f64,
    pub omega_02: f64,
    pub j: f64,
}

impl LabFrameParams {
    /// `H = -ω01 Iz⊗I - ω02 I⊗Iz + J Iz⊗Iz`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        let iz = pauli::spin(2);
        let id = pauli::identity();
        let a = tensor(&iz, &id).expect("2x2");
        let b = tensor(&id, &iz).expect("2x2");
        let c = tensor(&iz, &iz).expect("2x2");
        a.scale_real(-self.omega_01) + b.scale_real(-self.omega_02) + c.scale_real(self.j)
    }

    /// `R(t) = e^{-iω01 Iz t} ⊗ e^{-iω02 Iz t}`.
    pub fn frame(&self, t: f64) -> ComplexMatrix {
        let one = ComplexMatrix::from_diagonal(&[
            C64::from_polar(1.0, -0.5 * self.omega_01 * t),
            C64::from_polar(1.0, 0.5 * self.omega_01 * t),
        ])
        .expect("dim 2");
        let two = ComplexMatrix::from_diagonal(&[
            C64::from_polar(1.0, -0.5 * self.omega_02 * t),
            C64::from_polar(1.0, 0.5 * self.omega_02 * t),
        ])
        .expect("dim 2");
        tensor(&one, &two).expect("2x2")
    }
}

/// Frobenius distance between `R H R† + i (dR/dt) R†` and `J Iz⊗Iz`, with
/// `dR/dt` taken by a central difference of step `dt`.
pub fn verify_rotating_frame(params: &LabFrameParams, t: f64, dt: f64) -> Result<f64, PulseError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(PulseError::Step(dt));
    }
    if ![params.omega_01, params.omega_02, params.j, t]
        .iter()
        .all(|v| v.is_finite())
    {
        return Err(PulseError::LabFrame);
    }
    let r = params.frame(t);
    let dr = (params.frame(t + dt) - params.frame(t - dt)).scale_real(0.5 / dt);
    let h = params.hamiltonian();
    let transformed = r * h * r.adjoint() + (dr * r.adjoint()).scale(C64::new(0.0, 1.0));
    let iz = pauli::spin(2);
    let target = tensor(&iz, &iz)?.scale_real(params.j);
    Ok((transformed - target).frobenius_norm())
}
