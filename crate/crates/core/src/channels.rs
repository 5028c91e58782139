//! Quantum channels in operator-sum (Kraus) form.
//!
//! Channels can be built three ways: directly from Kraus operators, from an
//! environment dilation `ρ ↦ Tr_e[U (ρ ⊗ ρ_e) U†]`, or from a mixing
//! ensemble `ρ ↦ Σ p_k U_k ρ U_k†`. Equality between channels is decided on
//! the superoperator, since different dilations can realize the same map.

use std::f64::consts::PI;

use thiserror::Error;

use crate::linalg::{
    is_unitary, partial_trace_env, pauli, tensor, ComplexMatrix, DensityMatrix, LinalgError, C64,
    DEFAULT_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("a channel needs at least one Kraus operator")]
    Empty,
    #[error("Kraus operator {index} is {dim}x{dim}, expected 2x2")]
    OperatorDim { index: usize, dim: usize },
    #[error("Kraus operators are not trace preserving: |Σ E†E - I| = {defect:.3e}")]
    Incomplete { defect: f64 },
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("mixing probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("mixing ensemble has {unitaries} unitaries but {probabilities} probabilities")]
    EnsembleLength {
        unitaries: usize,
        probabilities: usize,
    },
    #[error("operator {0} is not unitary")]
    NotUnitary(String),
    #[error("invalid phase distribution: {0}")]
    Distribution(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Tolerance on the completeness relation `Σ E_k† E_k = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// A trace-preserving one-qubit channel given by its Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    pub fn new(
        label: impl Into<String>,
        operators: Vec<ComplexMatrix>,
    ) -> Result<Self, ChannelError> {
        if operators.is_empty() {
            return Err(ChannelError::Empty);
        }
        if let Some((index, op)) = operators.iter().enumerate().find(|(_, op)| op.dim() != 2) {
            return Err(ChannelError::OperatorDim {
                index,
                dim: op.dim(),
            });
        }
        let defect = completeness_defect(&operators);
        if defect > COMPLETENESS_TOL {
            return Err(ChannelError::Incomplete { defect });
        }
        Ok(Self {
            operators,
            label: label.into(),
        })
    }

    pub fn identity() -> Self {
        Self {
            operators: vec![pauli::identity()],
            label: "identity".into(),
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `max |Σ E†E - I|` entry-wise.
    pub fn completeness_defect(&self) -> f64 {
        completeness_defect(&self.operators)
    }

    /// `Σ_k E_k ρ E_k†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
        if rho.dim() != 2 {
            return Err(LinalgError::DimensionMismatch {
                expected: 2,
                found: rho.dim(),
            }
            .into());
        }
        Ok(DensityMatrix::from_trusted(
            self.apply_operator(rho.matrix()),
        ))
    }

    /// The map extended linearly to arbitrary 2x2 operators.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.operators
            .iter()
            .map(|e| *e * *m * e.adjoint())
            .fold(ComplexMatrix::zeros(2).expect("dim 2"), |acc, x| acc + x)
    }
}

fn completeness_defect(ops: &[ComplexMatrix]) -> f64 {
    let sum = ops
        .iter()
        .map(|e| e.adjoint() * *e)
        .fold(ComplexMatrix::zeros(2).expect("dim 2"), |acc, x| acc + x);
    sum.max_abs_diff(&pauli::identity())
}

fn check_probability(p: f64) -> Result<(), ChannelError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ChannelError::Probability(p))
    }
}

/// Identity with probability `p`, `σ_z` with probability `1 - p`.
/// Off-diagonal elements are scaled by `2p - 1`.
pub fn phase_flip(p: f64) -> Result<KrausChannel, ChannelError> {
    check_probability(p)?;
    KrausChannel::new(
        format!("phase_flip(p={p})"),
        vec![
            pauli::identity().scale_real(p.sqrt()),
            pauli::sigma_z().scale_real((1.0 - p).sqrt()),
        ],
    )
}

/// `I ⊗ |0⟩⟨0| + σ_z ⊗ |1⟩⟨1|`: applies `σ_z` to the system when the
/// environment is `|1⟩`.
pub fn controlled_sigma_z() -> ComplexMatrix {
    let a = tensor(&pauli::identity(), &pauli::proj0()).expect("2x2 factors");
    let b = tensor(&pauli::sigma_z(), &pauli::proj1()).expect("2x2 factors");
    a + b
}

/// `I ⊗ |+⟩⟨+| + σ_z ⊗ |-⟩⟨-|`, which equals the CNOT matrix with qubit 1
/// as control.
pub fn cnot() -> ComplexMatrix {
    let a = tensor(&pauli::identity(), &pauli::proj_plus()).expect("2x2 factors");
    let b = tensor(&pauli::sigma_z(), &pauli::proj_minus()).expect("2x2 factors");
    a + b
}

/// `√p |0⟩ + √(1-p) |1⟩` as a density matrix.
pub fn flip_environment_state(p: f64) -> Result<DensityMatrix, ChannelError> {
    check_probability(p)?;
    let ket = [C64::new(p.sqrt(), 0.0), C64::new((1.0 - p).sqrt(), 0.0)];
    Ok(DensityMatrix::pure(&ket)?)
}

/// `p |+⟩⟨+| + (1-p) |-⟩⟨-|`.
pub fn mixed_plus_minus_state(p: f64) -> Result<DensityMatrix, ChannelError> {
    check_probability(p)?;
    let m = pauli::proj_plus().scale_real(p) + pauli::proj_minus().scale_real(1.0 - p);
    Ok(DensityMatrix::new(m)?)
}

/// Kraus form of `ρ ↦ Tr_e[U (ρ ⊗ ρ_e) U†]`.
///
/// With `ρ_e = Σ_j λ_j |e_j⟩⟨e_j|`, the operators are
/// `E_{k,j} = √λ_j ⟨k|U|e_j⟩`, ordered by `k` then `j`. Terms with `λ_j = 0`
/// are kept.
pub fn channel_from_environment(
    u: &ComplexMatrix,
    rho_e: &DensityMatrix,
) -> Result<KrausChannel, ChannelError> {
    if u.dim() != 4 {
        return Err(LinalgError::DimensionMismatch {
            expected: 4,
            found: u.dim(),
        }
        .into());
    }
    if !is_unitary(u, DEFAULT_TOL) {
        return Err(ChannelError::NotUnitary("environment coupling U".into()));
    }
    if rho_e.dim() != 2 {
        return Err(LinalgError::DimensionMismatch {
            expected: 2,
            found: rho_e.dim(),
        }
        .into());
    }
    let spectrum = rho_e.matrix().hermitian_eigensystem2()?;
    let mut operators = Vec::with_capacity(4);
    for k in 0..2 {
        for (lambda, e) in spectrum {
            let weight = lambda.max(0.0).sqrt();
            let mut rows = [[C64::new(0.0, 0.0); 2]; 2];
            for (a, row) in rows.iter_mut().enumerate() {
                for (b, entry) in row.iter_mut().enumerate() {
                    // ⟨a k| U |b c⟩ e_c
                    let z: C64 = (0..2).map(|c| u.get(2 * a + k, 2 * b + c) * e[c]).sum();
                    *entry = z * weight;
                }
            }
            operators.push(ComplexMatrix::from_rows2(rows));
        }
    }
    KrausChannel::new("environment dilation", operators)
}

/// The reduced dynamics computed directly: `Tr_e[U (ρ ⊗ ρ_e) U†]`.
pub fn reduced_dynamics(
    u: &ComplexMatrix,
    rho_s: &DensityMatrix,
    rho_e: &DensityMatrix,
) -> Result<DensityMatrix, ChannelError> {
    let joint = DensityMatrix::product(rho_s, rho_e)?;
    let evolved = joint.matrix().conjugate_by(u)?;
    Ok(DensityMatrix::from_trusted(partial_trace_env(&evolved)?))
}

/// Unitaries applied with fixed probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingEnsemble {
    unitaries: Vec<ComplexMatrix>,
    probabilities: Vec<f64>,
}

impl MixingEnsemble {
    pub fn new(
        unitaries: Vec<ComplexMatrix>,
        probabilities: Vec<f64>,
    ) -> Result<Self, ChannelError> {
        if unitaries.len() != probabilities.len() {
            return Err(ChannelError::EnsembleLength {
                unitaries: unitaries.len(),
                probabilities: probabilities.len(),
            });
        }
        if unitaries.is_empty() {
            return Err(ChannelError::Empty);
        }
        for &p in &probabilities {
            check_probability(p)?;
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(ChannelError::ProbabilitySum(total));
        }
        for (i, u) in unitaries.iter().enumerate() {
            if u.dim() != 2 {
                return Err(ChannelError::OperatorDim {
                    index: i,
                    dim: u.dim(),
                });
            }
            if !is_unitary(u, DEFAULT_TOL) {
                return Err(ChannelError::NotUnitary(format!("ensemble member {i}")));
            }
        }
        Ok(Self {
            unitaries,
            probabilities,
        })
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

/// `E_k = √p_k U_k`.
pub fn channel_from_mixing(ens: &MixingEnsemble) -> Result<KrausChannel, ChannelError> {
    let operators = ens
        .unitaries
        .iter()
        .zip(&ens.probabilities)
        .map(|(u, &p)| u.scale_real(p.sqrt()))
        .collect();
    KrausChannel::new("mixing process", operators)
}

/// Distribution of a random phase-shift angle θ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseDistribution {
    /// Uniform on `[0, 2π)`.
    Uniform,
    /// Zero-mean Gaussian with standard deviation `std`.
    Gaussian { std: f64 },
    /// `+delta` with probability `q`, `-delta` with probability `1 - q`.
    TwoPoint { delta: f64, q: f64 },
}

/// `⟨e^{iθ}⟩` in closed form.
pub fn phase_average_factor(dist: &PhaseDistribution) -> Result<C64, ChannelError> {
    match *dist {
        PhaseDistribution::Uniform => Ok(C64::new(0.0, 0.0)),
        PhaseDistribution::Gaussian { std } => {
            if !(std.is_finite() && std >= 0.0) {
                return Err(ChannelError::Distribution(format!("Gaussian std {std}")));
            }
            Ok(C64::new((-0.5 * std * std).exp(), 0.0))
        }
        PhaseDistribution::TwoPoint { delta, q } => {
            if !delta.is_finite() {
                return Err(ChannelError::Distribution(format!(
                    "two-point delta {delta}"
                )));
            }
            check_probability(q)?;
            Ok(C64::from_polar(q, delta) + C64::from_polar(1.0 - q, -delta))
        }
    }
}

/// The mixing process over phase shifts `S(θ)`: populations are kept and
/// `ρ_01` is multiplied by `⟨e^{iθ}⟩`.
pub fn phase_mixing(
    rho: &DensityMatrix,
    dist: &PhaseDistribution,
) -> Result<DensityMatrix, ChannelError> {
    if rho.dim() != 2 {
        return Err(LinalgError::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        }
        .into());
    }
    let f = phase_average_factor(dist)?;
    let m = rho.matrix();
    let out = ComplexMatrix::from_rows2([
        [m.get(0, 0), f * m.get(0, 1)],
        [f.conj() * m.get(1, 0), m.get(1, 1)],
    ]);
    Ok(DensityMatrix::from_trusted(out))
}

/// Superoperator equality: the two maps agree on `{I, σ_x, σ_y, σ_z}`.
pub fn channels_equal_as_maps(a: &KrausChannel, b: &KrausChannel, tol: f64) -> bool {
    (0..4).all(|k| {
        let basis = if k == 0 {
            pauli::identity()
        } else {
            pauli::sigma(k - 1)
        };
        a.apply_operator(&basis)
            .approx_eq(&b.apply_operator(&basis), tol)
    })
}

/// Phase shift angles for the uniform distribution, used by tests that
/// compare a discretized mixture with the closed form.
pub fn uniform_phase_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| 2.0 * PI * i as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{amplitude_of, density_from_bloch, BlochVector};

    fn plus_x() -> DensityMatrix {
        density_from_bloch(&BlochVector::new(1.0, 0.0, 0.0).unwrap())
    }

    fn s(theta: f64) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&[
            C64::from_polar(1.0, theta / 2.0),
            C64::from_polar(1.0, -theta / 2.0),
        ])
        .unwrap()
    }

    #[test]
    fn identity_channel_is_identity() {
        let rho = density_from_bloch(&BlochVector::new(0.2, 0.3, -0.6).unwrap());
        let out = KrausChannel::identity().apply(&rho).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 0.0));
    }

    #[test]
    fn half_phase_flip_erases_coherence() {
        let out = phase_flip(0.5).unwrap().apply(&plus_x()).unwrap();
        assert!(out
            .matrix()
            .approx_eq(&pauli::identity().scale_real(0.5), 1e-15));
    }

    #[test]
    fn phase_flip_scales_coherence_by_two_p_minus_one() {
        let out = phase_flip(0.75).unwrap().apply(&plus_x()).unwrap();
        assert!((out.matrix().get(0, 1) - C64::new(0.25, 0.0)).norm() < 1e-15);

        let flipped = phase_flip(0.0).unwrap().apply(&plus_x()).unwrap();
        assert!((flipped.matrix().get(0, 1) + C64::new(0.5, 0.0)).norm() < 1e-15);

        let kept = phase_flip(1.0).unwrap();
        assert!(channels_equal_as_maps(
            &kept,
            &KrausChannel::identity(),
            1e-15
        ));
    }

    #[test]
    fn phase_flip_rejects_bad_probability() {
        assert_eq!(phase_flip(1.2).unwrap_err(), ChannelError::Probability(1.2));
        assert!(phase_flip(-0.1).is_err());
    }

    #[test]
    fn kraus_channel_validation() {
        assert_eq!(
            KrausChannel::new("x", vec![]).unwrap_err(),
            ChannelError::Empty
        );
        assert!(matches!(
            KrausChannel::new("x", vec![pauli::identity().scale_real(0.9)]),
            Err(ChannelError::Incomplete { .. })
        ));
        let id4 = ComplexMatrix::identity(4).unwrap();
        assert!(matches!(
            KrausChannel::new("x", vec![id4]),
            Err(ChannelError::OperatorDim { index: 0, dim: 4 })
        ));
    }

    #[test]
    fn flip_dilation_gives_expected_kraus_operators() {
        let p = 0.75;
        let ch =
            channel_from_environment(&controlled_sigma_z(), &flip_environment_state(p).unwrap())
                .unwrap();
        assert!(channels_equal_as_maps(&ch, &phase_flip(p).unwrap(), 1e-12));
        // off-diagonals scaled by 2p - 1 through the partial trace route too
        let out = reduced_dynamics(
            &controlled_sigma_z(),
            &plus_x(),
            &flip_environment_state(p).unwrap(),
        )
        .unwrap();
        assert!((out.matrix().get(0, 1) - C64::new(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_matches_its_matrix_and_dilates_phase_flip() {
        let expected = ComplexMatrix::from_real(
            4,
            &[
                1., 0., 0., 0., //
                0., 1., 0., 0., //
                0., 0., 0., 1., //
                0., 0., 1., 0.,
            ],
        )
        .unwrap();
        assert!(cnot().approx_eq(&expected, 1e-15));
        let p = 0.3;
        let ch = channel_from_environment(&cnot(), &mixed_plus_minus_state(p).unwrap()).unwrap();
        assert!(channels_equal_as_maps(&ch, &phase_flip(p).unwrap(), 1e-12));
    }

    #[test]
    fn trivial_coupling_gives_identity_channel() {
        let id4 = ComplexMatrix::identity(4).unwrap();
        let rho_e = mixed_plus_minus_state(0.2).unwrap();
        let ch = channel_from_environment(&id4, &rho_e).unwrap();
        assert!(channels_equal_as_maps(
            &ch,
            &KrausChannel::identity(),
            1e-14
        ));
    }

    #[test]
    fn environment_rejects_non_unitary() {
        let not_u = ComplexMatrix::identity(4).unwrap().scale_real(2.0);
        let rho_e = mixed_plus_minus_state(0.2).unwrap();
        assert!(matches!(
            channel_from_environment(&not_u, &rho_e),
            Err(ChannelError::NotUnitary(_))
        ));
    }

    #[test]
    fn mixing_examples() {
        let ens =
            MixingEnsemble::new(vec![pauli::identity(), pauli::sigma_z()], vec![0.5, 0.5]).unwrap();
        let ch = channel_from_mixing(&ens).unwrap();
        assert!(channels_equal_as_maps(
            &ch,
            &phase_flip(0.5).unwrap(),
            1e-15
        ));

        let u = s(0.4);
        let single =
            channel_from_mixing(&MixingEnsemble::new(vec![u], vec![1.0]).unwrap()).unwrap();
        let rho = density_from_bloch(&BlochVector::new(0.6, 0.1, 0.3).unwrap());
        let direct = rho.matrix().conjugate_by(&u).unwrap();
        assert!(single
            .apply(&rho)
            .unwrap()
            .matrix()
            .approx_eq(&direct, 1e-15));

        // symmetric ±θ shifts: coherence multiplied by (e^{iθ} + e^{-iθ})/2 = cos θ
        let theta = 0.9;
        let ens = MixingEnsemble::new(vec![s(theta), s(-theta)], vec![0.5, 0.5]).unwrap();
        let out = channel_from_mixing(&ens).unwrap().apply(&plus_x()).unwrap();
        assert!((out.matrix().get(0, 1) - C64::new(0.5 * theta.cos(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mixing_ensemble_validation() {
        let id = pauli::identity();
        assert!(matches!(
            MixingEnsemble::new(vec![id, id], vec![0.5, 0.6]),
            Err(ChannelError::ProbabilitySum(_))
        ));
        assert!(matches!(
            MixingEnsemble::new(vec![id], vec![0.5, 0.5]),
            Err(ChannelError::EnsembleLength { .. })
        ));
        assert!(matches!(
            MixingEnsemble::new(vec![id.scale_real(2.0)], vec![1.0]),
            Err(ChannelError::NotUnitary(_))
        ));
    }

    #[test]
    fn phase_average_closed_forms() {
        assert_eq!(
            phase_average_factor(&PhaseDistribution::Uniform).unwrap(),
            C64::new(0.0, 0.0)
        );
        let g = phase_average_factor(&PhaseDistribution::Gaussian { std: 0.8 }).unwrap();
        assert!((g - C64::new((-0.32f64).exp(), 0.0)).norm() < 1e-15);
        let t = phase_average_factor(&PhaseDistribution::TwoPoint { delta: 0.7, q: 0.5 }).unwrap();
        assert!((t - C64::new(0.7f64.cos(), 0.0)).norm() < 1e-15);
        assert!(phase_average_factor(&PhaseDistribution::Gaussian { std: -1.0 }).is_err());
        assert!(phase_average_factor(&PhaseDistribution::TwoPoint { delta: 0.1, q: 2.0 }).is_err());
    }

    #[test]
    fn gaussian_factor_matches_quadrature() {
        // midpoint rule on [-10s, 10s]
        let std = 1.3;
        let n = 200_000;
        let (lo, hi) = (-10.0 * std, 10.0 * std);
        let h = (hi - lo) / n as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let x: f64 = lo + (i as f64 + 0.5) * h;
            let pdf = (-(x * x) / (2.0 * std * std)).exp() / ((2.0 * PI).sqrt() * std);
            acc += C64::from_polar(pdf * h, x);
        }
        let closed = phase_average_factor(&PhaseDistribution::Gaussian { std }).unwrap();
        assert!((acc - closed).norm() < 1e-10);
    }

    #[test]
    fn uniform_mixing_fully_dephases() {
        // discrete uniform grid on the circle averages e^{iθ} to zero exactly
        let n = 16;
        let unitaries: Vec<_> = uniform_phase_grid(n).map(s).collect();
        let ens = MixingEnsemble::new(unitaries, vec![1.0 / n as f64; n]).unwrap();
        let out = channel_from_mixing(&ens).unwrap().apply(&plus_x()).unwrap();
        assert!(amplitude_of(&out).unwrap().magnitude() < 1e-14);
        let closed = phase_mixing(&plus_x(), &PhaseDistribution::Uniform).unwrap();
        assert!(out.matrix().approx_eq(closed.matrix(), 1e-14));
    }

    #[test]
    fn two_point_mixing_matches_ensemble() {
        let (delta, q) = (0.35, 0.3);
        let rho = density_from_bloch(&BlochVector::new(0.5, -0.5, 0.1).unwrap());
        let ens = MixingEnsemble::new(vec![s(delta), s(-delta)], vec![q, 1.0 - q]).unwrap();
        let via_kraus = channel_from_mixing(&ens).unwrap().apply(&rho).unwrap();
        let closed = phase_mixing(&rho, &PhaseDistribution::TwoPoint { delta, q }).unwrap();
        assert!(via_kraus.matrix().approx_eq(closed.matrix(), 1e-15));
    }

    #[test]
    fn map_equality_distinguishes_and_ignores_order() {
        let a = phase_flip(0.3).unwrap();
        let b = phase_flip(0.7).unwrap();
        assert!(!channels_equal_as_maps(&a, &b, 1e-6));
        let mut ops = a.operators().to_vec();
        ops.reverse();
        let permuted = KrausChannel::new("permuted", ops).unwrap();
        assert!(channels_equal_as_maps(&a, &permuted, 1e-15));
    }
}
