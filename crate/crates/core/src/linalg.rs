//! Small fixed-dimension complex linear algebra.
//!
//! Every operator in this crate is either a one-qubit (2x2) or a two-qubit
//! (4x4) matrix, so [`ComplexMatrix`] stores its entries inline and is `Copy`.
//! Two-qubit matrices use the ordering `|s e⟩ -> 2*s + e`: the system qubit
//! (qubit 1) is always the left tensor factor, the environment qubit
//! (qubit 2) the right one.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::Matrix4;
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Default absolute tolerance for matrix comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance on negative eigenvalues when validating density matrices.
pub const EIGEN_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("unsupported matrix dimension {0} (expected 2 or 4)")]
    UnsupportedDim(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected {expected} matrix entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error("Bloch vector length {0} exceeds 1")]
    BlochOutOfBall(f64),
    #[error("amplitude magnitude {0} exceeds 1")]
    AmplitudeOutOfDisk(f64),
}

fn check_dim(dim: usize) -> Result<(), LinalgError> {
    match dim {
        2 | 4 => Ok(()),
        d => Err(LinalgError::UnsupportedDim(d)),
    }
}

fn expect_dim(found: usize, expected: usize) -> Result<(), LinalgError> {
    if found == expected {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, found })
    }
}

/// A dense 2x2 or 4x4 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; 16],
}

impl ComplexMatrix {
    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn new(dim: usize, entries: &[C64]) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(LinalgError::EntryCount {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite);
        }
        let mut data = [ZERO; 16];
        data[..entries.len()].copy_from_slice(entries);
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [ZERO; 16],
        })
    }

    pub fn identity(dim: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        Ok(m)
    }

    pub fn from_rows2(rows: [[C64; 2]; 2]) -> Self {
        let mut data = [ZERO; 16];
        for (r, row) in rows.iter().enumerate() {
            data[r * 2..r * 2 + 2].copy_from_slice(row);
        }
        Self { dim: 2, data }
    }

    pub fn from_rows4(rows: [[C64; 4]; 4]) -> Self {
        let mut data = [ZERO; 16];
        for (r, row) in rows.iter().enumerate() {
            data[r * 4..r * 4 + 4].copy_from_slice(row);
        }
        Self { dim: 4, data }
    }

    /// Diagonal matrix; the length of `diag` fixes the dimension.
    pub fn from_diagonal(diag: &[C64]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = d;
        }
        Ok(m)
    }

    /// Real-valued convenience constructor, row-major.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self, LinalgError> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(dim, &c)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    /// Row-major view of the `dim * dim` entries.
    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        expect_dim(other.dim, self.dim)?;
        Ok(self.matmul_unchecked(other))
    }

    #[inline]
    fn matmul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut data = [ZERO; 16];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Self { dim: n, data }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LinalgError> {
        expect_dim(other.dim, self.dim)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        expect_dim(other.dim, self.dim)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        let mut out = *self;
        for (o, &b) in out.data.iter_mut().zip(other.data.iter()) {
            *o = f(*o, b);
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= factor);
        out
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = [ZERO; 16];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Self { dim: n, data }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry-wise absolute difference. Infinite on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Element-wise equality within an absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.adjoint(), tol)
    }

    /// `u * self * u†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self, LinalgError> {
        expect_dim(u.dim, self.dim)?;
        Ok(u.matmul_unchecked(self).matmul_unchecked(&u.adjoint()))
    }

    /// Eigenvalues of the Hermitian part `(M + M†)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (*self + self.adjoint()).scale_real(0.5);
        let mut vals = match self.dim {
            2 => {
                let (lo, hi) = eigenvalues2(&h);
                vec![lo, hi]
            }
            _ => {
                let m = Matrix4::from_fn(|r, c| h.get(r, c));
                m.symmetric_eigenvalues().iter().copied().collect()
            }
        };
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// Spectral decomposition of a 2x2 Hermitian matrix: `(eigenvalue,
    /// unit eigenvector)` pairs, ascending by eigenvalue.
    pub fn hermitian_eigensystem2(&self) -> Result<[(f64, [C64; 2]); 2], LinalgError> {
        expect_dim(self.dim, 2)?;
        let h = (*self + self.adjoint()).scale_real(0.5);
        let (lo, hi) = eigenvalues2(&h);
        let a = h.get(0, 0).re;
        let d = h.get(1, 1).re;
        let b = h.get(0, 1);
        // Already diagonal, or degenerate: the computational basis works.
        if b.norm() <= f64::EPSILON * (a.abs() + d.abs() + 1.0) {
            let e0 = [ONE, ZERO];
            let e1 = [ZERO, ONE];
            return Ok(if a <= d {
                [(a, e0), (d, e1)]
            } else {
                [(d, e1), (a, e0)]
            });
        }
        let vec_for = |lambda: f64| {
            let v = [b, C64::new(lambda - a, 0.0)];
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            [v[0] / norm, v[1] / norm]
        };
        Ok([(lo, vec_for(lo)), (hi, vec_for(hi))])
    }
}

fn eigenvalues2(h: &ComplexMatrix) -> (f64, f64) {
    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + h.get(0, 1).norm_sqr()).sqrt();
    (mean - half_gap, mean + half_gap)
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.dim && c < self.dim, "index out of bounds");
        &self.data[r * self.dim + c]
    }
}

// Operator impls panic on dimension mismatch; the `checked_*`/`matmul`
// methods are the fallible forms.
impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        self.matmul_unchecked(&rhs)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self.get(r, c);
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b` of two one-qubit operators; `a` acts on qubit 1.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    expect_dim(a.dim, 2)?;
    expect_dim(b.dim, 2)?;
    let mut data = [ZERO; 16];
    for i in 0..2 {
        for j in 0..2 {
            let aij = a.get(i, j);
            for k in 0..2 {
                for l in 0..2 {
                    data[(2 * i + k) * 4 + (2 * j + l)] = aij * b.get(k, l);
                }
            }
        }
    }
    Ok(ComplexMatrix { dim: 4, data })
}

/// Traces out the environment (right) factor of a two-qubit operator.
pub fn partial_trace_env(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    expect_dim(m.dim, 4)?;
    let mut out = [[ZERO; 2]; 2];
    for (s, row) in out.iter_mut().enumerate() {
        for (t, entry) in row.iter_mut().enumerate() {
            *entry = m.get(2 * s, 2 * t) + m.get(2 * s + 1, 2 * t + 1);
        }
    }
    Ok(ComplexMatrix::from_rows2(out))
}

/// `m m† = I` within `tol`.
pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    let id = ComplexMatrix::identity(m.dim).expect("dimension validated at construction");
    m.matmul_unchecked(&m.adjoint()).approx_eq(&id, tol)
}

/// Hermitian, unit trace and no eigenvalue below `-tol`.
pub fn is_density(m: &ComplexMatrix, tol: f64) -> bool {
    density_violation(m, tol).is_none()
}

fn density_violation(m: &ComplexMatrix, tol: f64) -> Option<String> {
    if !m.is_hermitian(tol) {
        return Some("not Hermitian".into());
    }
    let tr = m.trace();
    if (tr - ONE).norm() > tol {
        return Some(format!("trace {:.3e}{:+.3e}i != 1", tr.re, tr.im));
    }
    let min = m.hermitian_eigenvalues()[0];
    if min < -tol {
        return Some(format!("negative eigenvalue {min:.3e}"));
    }
    None
}

/// A validated density matrix of one (dim 2) or two (dim 4) qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates with [`EIGEN_TOL`].
    pub fn new(m: ComplexMatrix) -> Result<Self, LinalgError> {
        Self::with_tolerance(m, EIGEN_TOL)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self, LinalgError> {
        match density_violation(&m, tol) {
            None => Ok(Self(m)),
            Some(why) => Err(LinalgError::NotDensity(why)),
        }
    }

    /// Wraps a matrix produced by a trace- and positivity-preserving map of
    /// an already validated state.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket of length 2 or 4.
    pub fn pure(ket: &[C64]) -> Result<Self, LinalgError> {
        let n = ket.len();
        check_dim(n)?;
        let mut entries = Vec::with_capacity(n * n);
        for a in ket {
            for b in ket {
                entries.push(a * b.conj());
            }
        }
        Self::new(ComplexMatrix::new(n, &entries)?)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self, LinalgError> {
        let id = ComplexMatrix::identity(dim)?;
        Ok(Self(id.scale_real(1.0 / dim as f64)))
    }

    /// `ρ_s ⊗ ρ_e`.
    pub fn product(system: &DensityMatrix, env: &DensityMatrix) -> Result<Self, LinalgError> {
        Ok(Self(tensor(&system.0, &env.0)?))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// Reduced state of qubit 1 of a two-qubit density matrix.
    pub fn reduced_system(&self) -> Result<DensityMatrix, LinalgError> {
        Ok(Self(partial_trace_env(&self.0)?))
    }

    pub fn bloch(&self) -> Result<BlochVector, LinalgError> {
        bloch_from_density(self)
    }

    pub fn amplitude(&self) -> Result<Amplitude, LinalgError> {
        amplitude_of(self)
    }
}

/// Bloch vector `(a_x, a_y, a_z)` of a one-qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, LinalgError> {
        Self::with_tolerance(x, y, z, DEFAULT_TOL)
    }

    pub fn with_tolerance(x: f64, y: f64, z: f64, tol: f64) -> Result<Self, LinalgError> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let len = (x * x + y * y + z * z).sqrt();
        if len > 1.0 + tol {
            return Err(LinalgError::BlochOutOfBall(len));
        }
        Ok(Self { x, y, z })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn length(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// NMR amplitude `a_x + i a_y = 2 ρ_10` of a one-qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitude {
    value: C64,
}

impl Amplitude {
    pub fn new(value: C64) -> Result<Self, LinalgError> {
        let r = value.norm();
        if !r.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        if r > 1.0 + DEFAULT_TOL {
            return Err(LinalgError::AmplitudeOutOfDisk(r));
        }
        Ok(Self { value })
    }

    pub fn value(&self) -> C64 {
        self.value
    }

    pub fn magnitude(&self) -> f64 {
        self.value.norm()
    }

    /// Azimuthal angle of the Bloch vector; `None` when there is no coherence.
    pub fn phase(&self) -> Option<f64> {
        (self.value.norm() > 0.0).then(|| self.value.arg())
    }
}

fn one_qubit(rho: &DensityMatrix) -> Result<&ComplexMatrix, LinalgError> {
    expect_dim(rho.dim(), 2)?;
    Ok(&rho.0)
}

pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochVector, LinalgError> {
    let m = one_qubit(rho)?;
    let coherence = 2.0 * m.get(1, 0);
    let z = (m.get(0, 0) - m.get(1, 1)).re;
    // A validated state lies in the ball up to the eigenvalue tolerance.
    BlochVector::with_tolerance(coherence.re, coherence.im, z, 4.0 * EIGEN_TOL)
}

pub fn density_from_bloch(b: &BlochVector) -> DensityMatrix {
    let half = 0.5;
    let m = ComplexMatrix::from_rows2([
        [
            C64::new(half * (1.0 + b.z), 0.0),
            C64::new(half * b.x, -half * b.y),
        ],
        [
            C64::new(half * b.x, half * b.y),
            C64::new(half * (1.0 - b.z), 0.0),
        ],
    ]);
    DensityMatrix(m)
}

pub fn amplitude_of(rho: &DensityMatrix) -> Result<Amplitude, LinalgError> {
    let m = one_qubit(rho)?;
    let value = 2.0 * m.get(1, 0);
    // Clamp the tolerance-level overshoot a validated state may carry.
    let r = value.norm();
    let value = if r > 1.0 && r <= 1.0 + 4.0 * EIGEN_TOL {
        value / r
    } else {
        value
    };
    Amplitude::new(value)
}

/// Pauli matrices and the common one-qubit projectors.
pub mod pauli {
    use super::{ComplexMatrix, C64, ONE, ZERO};

    const I: C64 = C64::new(0.0, 1.0);

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `σ_k` for k = 0 (x), 1 (y), 2 (z).
    pub fn sigma(k: usize) -> ComplexMatrix {
        match k {
            0 => sigma_x(),
            1 => sigma_y(),
            2 => sigma_z(),
            _ => panic!("Pauli index {k} out of range"),
        }
    }

    /// Spin operator `I_k = σ_k / 2`.
    pub fn spin(k: usize) -> ComplexMatrix {
        sigma(k).scale_real(0.5)
    }

    /// `|0⟩⟨0|`
    pub fn proj0() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[ONE, ZERO], [ZERO, ZERO]])
    }

    /// `|1⟩⟨1|`
    pub fn proj1() -> ComplexMatrix {
        ComplexMatrix::from_rows2([[ZERO, ZERO], [ZERO, ONE]])
    }

    /// `|+⟩⟨+|`
    pub fn proj_plus() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).expect("static 2x2")
    }

    /// `|-⟩⟨-|`
    pub fn proj_minus() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[0.5, -0.5, -0.5, 0.5]).expect("static 2x2")
    }
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn exp_i_sz(theta: f64) -> ComplexMatrix {
        // e^{iθσ_z/2}
        ComplexMatrix::from_diagonal(&[
            C64::from_polar(1.0, theta / 2.0),
            C64::from_polar(1.0, -theta / 2.0),
        ])
        .unwrap()
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id4 = ComplexMatrix::identity(4).unwrap();
        assert!(tensor(&identity(), &identity())
            .unwrap()
            .approx_eq(&id4, 0.0));
    }

    #[test]
    fn tensor_of_half_sigma_z_is_coupling_diagonal() {
        let h = tensor(&spin(2), &spin(2)).unwrap();
        let expected = ComplexMatrix::from_real(
            4,
            &[
                0.25, 0.0, 0.0, 0.0, //
                0.0, -0.25, 0.0, 0.0, //
                0.0, 0.0, -0.25, 0.0, //
                0.0, 0.0, 0.0, 0.25,
            ],
        )
        .unwrap();
        assert!(h.approx_eq(&expected, 0.0));
    }

    #[test]
    fn controlled_sigma_z_is_diag_with_single_sign() {
        let u = tensor(&identity(), &proj0()).unwrap() + tensor(&sigma_z(), &proj1()).unwrap();
        let expected =
            ComplexMatrix::from_diagonal(&[c(1., 0.), c(1., 0.), c(1., 0.), c(-1., 0.)]).unwrap();
        assert!(u.approx_eq(&expected, 0.0));
        assert!(is_unitary(&u, DEFAULT_TOL));
    }

    #[test]
    fn tensor_rejects_wrong_dims() {
        let id4 = ComplexMatrix::identity(4).unwrap();
        assert!(matches!(
            tensor(&id4, &identity()),
            Err(LinalgError::DimensionMismatch {
                expected: 2,
                found: 4
            })
        ));
    }

    #[test]
    fn partial_trace_of_identity() {
        let id4 = ComplexMatrix::identity(4).unwrap();
        let r = partial_trace_env(&id4).unwrap();
        assert!(r.approx_eq(&identity().scale_real(2.0), 0.0));
        assert!(partial_trace_env(&identity()).is_err());
    }

    #[test]
    fn partial_trace_of_product_recovers_system() {
        let rs = density_from_bloch(&BlochVector::new(0.3, -0.4, 0.5).unwrap());
        let re = density_from_bloch(&BlochVector::new(0.1, 0.7, -0.2).unwrap());
        let joint = DensityMatrix::product(&rs, &re).unwrap();
        assert!(joint
            .reduced_system()
            .unwrap()
            .matrix()
            .approx_eq(rs.matrix(), 1e-15));
    }

    #[test]
    fn bloch_poles_and_center() {
        let up = density_from_bloch(&BlochVector::new(0.0, 0.0, 1.0).unwrap());
        assert!(up.matrix().approx_eq(&proj0(), 0.0));

        let plus_x = density_from_bloch(&BlochVector::new(1.0, 0.0, 0.0).unwrap());
        assert!(plus_x
            .matrix()
            .approx_eq(&(identity() + sigma_x()).scale_real(0.5), 1e-15));

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let b = bloch_from_density(&mixed).unwrap();
        assert_eq!((b.x(), b.y(), b.z()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bloch_rejects_outside_ball() {
        assert!(matches!(
            BlochVector::new(1.0, 0.1, 0.0),
            Err(LinalgError::BlochOutOfBall(_))
        ));
        assert!(bloch_from_density(&DensityMatrix::maximally_mixed(4).unwrap()).is_err());
    }

    #[test]
    fn amplitudes_of_transverse_states() {
        let x = DensityMatrix::new((identity() + sigma_x()).scale_real(0.5)).unwrap();
        let a = amplitude_of(&x).unwrap();
        assert!((a.value() - c(1.0, 0.0)).norm() < 1e-15);

        let y = DensityMatrix::new((identity() + sigma_y()).scale_real(0.5)).unwrap();
        let a = amplitude_of(&y).unwrap();
        assert!((a.value() - c(0.0, 1.0)).norm() < 1e-15);
        assert!((a.phase().unwrap() - PI / 2.0).abs() < 1e-15);

        let diag = DensityMatrix::new(ComplexMatrix::from_real(2, &[0.7, 0.0, 0.0, 0.3]).unwrap())
            .unwrap();
        let a = amplitude_of(&diag).unwrap();
        assert_eq!(a.magnitude(), 0.0);
        assert_eq!(a.phase(), None);
    }

    #[test]
    fn unitarity_checks() {
        assert!(!is_unitary(&(sigma_z() + identity()), DEFAULT_TOL));
        let theta = 0.731;
        assert!(exp_i_sz(theta)
            .adjoint()
            .approx_eq(&exp_i_sz(-theta), 1e-15));
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(sigma_z()).is_err());
        let neg = ComplexMatrix::from_real(2, &[1.2, 0.0, 0.0, -0.2]).unwrap();
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(LinalgError::NotDensity(_))
        ));
        let non_herm = ComplexMatrix::from_real(2, &[0.5, 0.2, 0.0, 0.5]).unwrap();
        assert!(!is_density(&non_herm, DEFAULT_TOL));
        // a 4x4 with one negative eigenvalue but unit trace and positive diagonal
        let bad4 = ComplexMatrix::from_real(
            4,
            &[
                0.25, 0.0, 0.0, 0.4, //
                0.0, 0.25, 0.0, 0.0, //
                0.0, 0.0, 0.25, 0.0, //
                0.4, 0.0, 0.0, 0.25,
            ],
        )
        .unwrap();
        assert!(!is_density(&bad4, EIGEN_TOL));
        assert!(is_density(
            DensityMatrix::maximally_mixed(4).unwrap().matrix(),
            0.0
        ));
    }

    #[test]
    fn eigensystem2_reconstructs() {
        let m =
            ComplexMatrix::new(2, &[c(0.6, 0.0), c(0.1, -0.2), c(0.1, 0.2), c(0.4, 0.0)]).unwrap();
        let sys = m.hermitian_eigensystem2().unwrap();
        let mut rebuilt = ComplexMatrix::zeros(2).unwrap();
        for (lambda, v) in sys {
            let outer = ComplexMatrix::new(
                2,
                &[
                    v[0] * v[0].conj(),
                    v[0] * v[1].conj(),
                    v[1] * v[0].conj(),
                    v[1] * v[1].conj(),
                ],
            )
            .unwrap();
            rebuilt = rebuilt + outer.scale_real(lambda);
        }
        assert!(rebuilt.approx_eq(&m, 1e-14));
        assert!(sys[0].0 <= sys[1].0);
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(ComplexMatrix::zeros(3), Err(LinalgError::UnsupportedDim(3)));
        assert_eq!(
            ComplexMatrix::new(2, &[ONE; 3]),
            Err(LinalgError::EntryCount {
                expected: 4,
                found: 3
            })
        );
        assert_eq!(
            ComplexMatrix::new(2, &[c(f64::NAN, 0.0), ONE, ONE, ONE]),
            Err(LinalgError::NonFinite)
        );
        let id4 = ComplexMatrix::identity(4).unwrap();
        assert!(identity().matmul(&id4).is_err());
        assert!(identity().checked_add(&id4).is_err());
    }
}
