//! Pure states and density matrices.

use super::{hermitian_eig, partial_trace_matrix, ComplexMatrix, C64, ONE, ZERO};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Build from amplitudes, requiring Σ|aᵢ|² = 1 within `tol`.
    pub fn new(amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() {
            return Err(Error::NonFinite("state norm".into()));
        }
        if (norm_sq - 1.0).abs() > tol {
            return Err(Error::Shape(format!(
                "state is not normalized: Σ|a|² = {norm_sq}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize an arbitrary non-zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq < 1e-24 || !norm_sq.is_finite() {
            return Err(Error::Shape("cannot normalize a (near-)zero vector".into()));
        }
        let inv = 1.0 / norm_sq.sqrt();
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|a| a * inv).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Shape(format!("basis index {index} out of range {dim}")));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |self⟩⟨self| as a raw matrix.
    pub fn projector(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m.set(r, c, self.amplitudes[r] * self.amplitudes[c].conj());
            }
        }
        m
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { amplitudes }
    }

    // Named one- and two-qubit states used by the gadget library.

    pub fn plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { amplitudes: vec![C64::new(s, 0.0), C64::new(s, 0.0)] }
    }

    pub fn minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { amplitudes: vec![C64::new(s, 0.0), C64::new(-s, 0.0)] }
    }

    /// (|0⟩ + i|1⟩)/√2.
    pub fn i_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { amplitudes: vec![C64::new(s, 0.0), C64::new(0.0, s)] }
    }

    /// (|0⟩ + e^{iπ/4}|1⟩)/√2.
    pub fn t_state() -> Self {
        Self::phase_plus(std::f64::consts::FRAC_PI_4)
    }

    /// (|0⟩ + e^{2πi/2^k}|1⟩)/√2 — the resource consumed by the k-th
    /// diagonal-gate gadget.
    pub fn uk_plus(k: u32) -> Self {
        Self::phase_plus(2.0 * std::f64::consts::PI / (1u64 << k) as f64)
    }

    fn phase_plus(theta: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: vec![C64::new(s, 0.0), C64::from_polar(s, theta)],
        }
    }

    /// (|00⟩ + |11⟩)/√2.
    pub fn phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)],
        }
    }
}

/// Positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace. Positivity is *not* recomputed
    /// here (it needs an eigendecomposition); use [`DensityMatrix::validate_psd`]
    /// at trust boundaries.
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape("density matrix must be square".into()));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > tol.herm {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol.norm.max(1e-9) || tr.im.abs() > tol.norm.max(1e-9) {
            return Err(Error::Shape(format!("density matrix trace is {tr}, not 1")));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { matrix: psi.projector() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self { matrix: self.matrix.kron(&other.matrix)? })
    }

    /// Eigenvalues ascending.
    pub fn eigenvalues(&self, tol: &Tolerances) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.matrix, tol.herm.max(1e-9))?.0)
    }

    /// Full spectral check: all eigenvalues ≥ −tol.psd.
    pub fn validate_psd(&self, tol: &Tolerances) -> Result<()> {
        let eigs = self.eigenvalues(tol)?;
        if let Some(min) = eigs.first() {
            if *min < -tol.psd {
                return Err(Error::Shape(format!("negative eigenvalue {min}")));
            }
        }
        Ok(())
    }

    /// Reduced state on the `keep` subsystems. Trace is preserved.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        let reduced = partial_trace_matrix(&self.matrix, dims, keep)?;
        Ok(Self { matrix: reduced })
    }

    /// Conjugation ρ ↦ UρU†.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.mul(&self.matrix)?.mul(&u.dagger())?;
        Ok(Self { matrix: m })
    }
}
