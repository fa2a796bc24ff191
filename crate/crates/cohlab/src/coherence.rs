//! Coherence-specific primitives: the dephasing map, incoherence
//! classification for states, unitaries and channels, and the coherence rank.
//!
//! Everything is relative to the fixed computational basis. A unitary is
//! incoherent when it is monomial — Σₓ e^{iθₓ}|π(x)⟩⟨x| for a permutation π —
//! i.e. it maps basis states to basis states up to phase. A channel is
//! dephasing-covariant (DIO) when it commutes with the dephasing map Δ, and
//! maximally incoherent (MIO) when Δ∘E∘Δ = E∘Δ, which is exactly the
//! condition that it maps incoherent states to incoherent states.

use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, PureState, C64};

/// Zero the off-diagonal entries of a square matrix, keeping the diagonal
/// bit-identical.
pub fn dephase_matrix(m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.rows();
    let mut out = ComplexMatrix::zeros(d, m.cols());
    for i in 0..d.min(m.cols()) {
        out.set(i, i, m.get(i, i));
    }
    out
}

/// The dephasing map Δ(ρ) = Σₓ |x⟩⟨x| ρ |x⟩⟨x|.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new(dephase_matrix(rho.matrix()), &crate::config::Tolerances::DEFAULT)
        .expect("diagonal of a density matrix is a density matrix")
}

/// True iff every off-diagonal magnitude is ≤ tol.
pub fn is_incoherent_state(rho: &DensityMatrix, tol: f64) -> bool {
    let m = rho.matrix();
    let d = rho.dim();
    for r in 0..d {
        for c in 0..d {
            if r != c && m.get(r, c).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Permutation and phase list certifying that a unitary is incoherent.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentDecomposition {
    /// π as an index list: column x maps to row π(x).
    pub permutation: Vec<usize>,
    /// θₓ in (−π, π].
    pub phases: Vec<f64>,
}

impl IncoherentDecomposition {
    /// Σₓ e^{iθₓ}|π(x)⟩⟨x|.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.permutation.len();
        let mut m = ComplexMatrix::zeros(d, d);
        for (x, (&px, &theta)) in self.permutation.iter().zip(&self.phases).enumerate() {
            m.set(px, x, C64::from_polar(1.0, theta));
        }
        m
    }
}

/// Decompose a unitary as permutation-plus-phases, or return `None` when it
/// is coherent. A column qualifies when exactly one entry has magnitude
/// ≥ 1 − tol and the rest stay ≤ tol.
pub fn classify_incoherent_unitary(
    u: &ComplexMatrix,
    tol: f64,
) -> Result<Option<IncoherentDecomposition>> {
    let dev = u.unitarity_deviation();
    if dev > tol.max(1e-9) {
        return Err(Error::NotUnitary(dev));
    }
    let d = u.rows();
    let mut permutation = vec![0usize; d];
    let mut phases = vec![0f64; d];
    let mut hit = vec![false; d];
    for x in 0..d {
        let mut big: Option<usize> = None;
        for r in 0..d {
            let mag = u.get(r, x).norm();
            if mag >= 1.0 - tol {
                if big.is_some() {
                    return Ok(None);
                }
                big = Some(r);
            } else if mag > tol {
                return Ok(None);
            }
        }
        let Some(r) = big else { return Ok(None) };
        if hit[r] {
            return Ok(None);
        }
        hit[r] = true;
        permutation[x] = r;
        let mut theta = u.get(r, x).arg();
        if theta <= -std::f64::consts::PI {
            theta = std::f64::consts::PI;
        }
        phases[x] = theta;
    }
    Ok(Some(IncoherentDecomposition { permutation, phases }))
}

/// Coherence rank of a pure state: the number of basis amplitudes with
/// magnitude above the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceRank {
    pub value: usize,
    pub tolerance_used: f64,
    /// Set when some amplitude magnitude falls within a factor of 10 of the
    /// threshold. The rank is discontinuous there; treat the value with care.
    pub borderline: bool,
}

pub fn coherence_rank(psi: &PureState, tol: f64) -> CoherenceRank {
    coherence_rank_of(psi.amplitudes(), tol)
}

pub fn coherence_rank_of(amplitudes: &[C64], tol: f64) -> CoherenceRank {
    let mut value = 0usize;
    let mut borderline = false;
    for a in amplitudes {
        let mag = a.norm();
        if mag > tol {
            value += 1;
        }
        if mag > tol * 0.1 && mag <= tol * 10.0 {
            borderline = true;
        }
    }
    CoherenceRank { value, tolerance_used: tol, borderline }
}

/// Dephasing covariance (DIO membership): Δ∘E = E∘Δ as superoperators,
/// checked entrywise over the full matrix-unit basis.
pub fn is_dephasing_covariant(ch: &QuantumChannel, tol: f64) -> bool {
    dephasing_covariance_deviation(ch) <= tol
}

/// Max deviation between Δ∘E and E∘Δ on the matrix-unit basis.
pub fn dephasing_covariance_deviation(ch: &QuantumChannel) -> f64 {
    let s = ch.superoperator();
    superop_commutator_deviation(&s, ch.in_dim(), ch.out_dim())
}

pub(crate) fn superop_commutator_deviation(s: &ComplexMatrix, in_dim: usize, out_dim: usize) -> f64 {
    let left = dephase_superop_rows(s, out_dim); // Δ∘E
    let right = dephase_superop_cols(s, in_dim); // E∘Δ
    left.max_abs_diff(&right)
}

/// MIO membership: Δ∘E∘Δ = E∘Δ as superoperators on the matrix-unit basis.
pub fn is_mio(ch: &QuantumChannel, tol: f64) -> bool {
    let s = ch.superoperator();
    let ed = dephase_superop_cols(&s, ch.in_dim());
    let ded = dephase_superop_rows(&ed, ch.out_dim());
    ded.max_abs_diff(&ed) <= tol
}

// Superoperators use column-stacking: vec index (c·d + r) for entry (r, c).
// Composing with Δ on the output zeroes all rows except the diagonal ones;
// composing on the input zeroes the corresponding columns.

fn dephase_superop_rows(s: &ComplexMatrix, out_dim: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(s.rows(), s.cols());
    for i in 0..out_dim {
        let r = i * out_dim + i;
        for c in 0..s.cols() {
            out.set(r, c, s.get(r, c));
        }
    }
    out
}

fn dephase_superop_cols(s: &ComplexMatrix, in_dim: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(s.rows(), s.cols());
    for i in 0..in_dim {
        let c = i * in_dim + i;
        for r in 0..s.rows() {
            out.set(r, c, s.get(r, c));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gates;
    use crate::config::Tolerances;
    use crate::random;

    const TOL: f64 = 1e-9;

    #[test]
    fn dephase_plus_is_maximally_mixed() {
        let rho = PureState::plus().density();
        let d = dephase(&rho);
        assert!(d.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn dephase_fixes_incoherent() {
        let rho = PureState::basis(2, 0).unwrap().density();
        assert_eq!(dephase(&rho).matrix(), rho.matrix());
    }

    #[test]
    fn dephase_factorizes_over_tensor() {
        let mut rng = random::rng_from(23);
        for _ in 0..5 {
            let rho = random::random_mixed_state(2, &mut rng);
            let tau = random::random_mixed_state(4, &mut rng);
            let lhs = dephase(&rho.tensor(&tau).unwrap());
            let rhs = dephase(&rho).tensor(&dephase(&tau)).unwrap();
            assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-14);
        }
    }

    #[test]
    fn dephase_idempotent_bit_identical() {
        let mut rng = random::rng_from(4);
        let rho = random::random_mixed_state(4, &mut rng);
        let once = dephase(&rho);
        let twice = dephase(&once);
        assert_eq!(once.matrix(), twice.matrix());
    }

    #[test]
    fn incoherent_state_checks() {
        assert!(is_incoherent_state(&DensityMatrix::maximally_mixed(2), TOL));
        assert!(!is_incoherent_state(&PureState::plus().density(), TOL));
        let mut rng = random::rng_from(8);
        for _ in 0..5 {
            let rho = random::random_mixed_state(4, &mut rng);
            assert!(is_incoherent_state(&dephase(&rho), TOL));
        }
    }

    #[test]
    fn classify_cnot() {
        let dec = classify_incoherent_unitary(&gates::cnot(), TOL).unwrap().unwrap();
        assert_eq!(dec.permutation, vec![0, 1, 3, 2]);
        for theta in dec.phases {
            assert!(theta.abs() < 1e-12);
        }
    }

    #[test]
    fn classify_hadamard_is_coherent() {
        assert!(classify_incoherent_unitary(&gates::hadamard(), TOL).unwrap().is_none());
    }

    #[test]
    fn classify_t_gate() {
        let dec = classify_incoherent_unitary(&gates::gate_t(), TOL).unwrap().unwrap();
        assert_eq!(dec.permutation, vec![0, 1]);
        assert!(dec.phases[0].abs() < 1e-12);
        assert!((dec.phases[1] - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn classify_rejects_non_unitary() {
        let m = ComplexMatrix::zeros(2, 2);
        assert!(matches!(classify_incoherent_unitary(&m, TOL), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn decomposition_reconstructs() {
        let mut rng = random::rng_from(31);
        for _ in 0..10 {
            let u = random::random_incoherent_unitary(8, &mut rng);
            let dec = classify_incoherent_unitary(&u, TOL).unwrap().unwrap();
            assert!(dec.reconstruct().max_abs_diff(&u) < 1e-9);
        }
    }

    #[test]
    fn incoherent_unitary_commutes_with_dephasing() {
        // U·Δ(ρ)·U† == Δ(U·ρ·U†) for classified unitaries.
        let mut rng = random::rng_from(12);
        for _ in 0..10 {
            let u = random::random_incoherent_unitary(4, &mut rng);
            assert!(classify_incoherent_unitary(&u, TOL).unwrap().is_some());
            let rho = random::random_mixed_state(4, &mut rng);
            let lhs = dephase(&rho).conjugate_by(&u).unwrap();
            let rhs = dephase(&rho.conjugate_by(&u).unwrap());
            assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-9);
        }
    }

    #[test]
    fn coherence_rank_basics() {
        let tol = Tolerances::DEFAULT.rank;
        assert_eq!(coherence_rank(&PureState::basis(8, 3).unwrap(), tol).value, 1);
        // |+⟩^{⊗n} has rank 2^n
        let mut plus_n = PureState::plus();
        for _ in 0..2 {
            plus_n = plus_n.tensor(&PureState::plus());
        }
        assert_eq!(coherence_rank(&plus_n, tol).value, 8);
    }

    #[test]
    fn coherence_rank_multiplicative() {
        let tol = Tolerances::DEFAULT.rank;
        let mut rng = random::rng_from(77);
        for _ in 0..10 {
            let a = random::random_sparse_state(8, 3, &mut rng);
            let b = random::random_sparse_state(4, 2, &mut rng);
            let ra = coherence_rank(&a, tol).value;
            let rb = coherence_rank(&b, tol).value;
            let rab = coherence_rank(&a.tensor(&b), tol).value;
            assert_eq!(rab, ra * rb);
        }
    }

    #[test]
    fn coherence_rank_borderline_flag() {
        let tol = 1e-9;
        let s = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(5e-9, 0.0)]).unwrap();
        let r = coherence_rank(&s, tol);
        assert!(r.borderline);
        let clean = PureState::plus();
        assert!(!coherence_rank(&clean, tol).borderline);
    }
}
