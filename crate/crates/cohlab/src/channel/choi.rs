//! Choi matrices and unitarity extraction.
//!
//! The Choi matrix here is (1 ⊗ E)(|Ω⟩⟨Ω|) for the normalized maximally
//! entangled |Ω⟩ = Σᵢ|ii⟩/√d, so tr J = 1 and a channel is unitary exactly
//! when J has a single eigenvalue equal to 1.

use super::QuantumChannel;
use crate::config::Tolerances;
use crate::error::Result;
use crate::linalg::{hermitian_eig, trace_norm, ComplexMatrix, C64, ZERO};

/// Choi matrix in the column-stacking convention, normalized to unit trace.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub matrix: ComplexMatrix,
    pub in_dim: usize,
    pub out_dim: usize,
    /// Which vectorization the block layout follows.
    pub convention: &'static str,
}

/// (1 ⊗ E)(|Ω⟩⟨Ω|): block (i, j) holds E(|i⟩⟨j|)/d.
pub fn choi(ch: &QuantumChannel) -> ChoiMatrix {
    let d_in = ch.in_dim();
    let d_out = ch.out_dim();
    let dim = d_in * d_out;
    let mut j_mat = ComplexMatrix::zeros(dim, dim);
    let scale = C64::new(1.0 / d_in as f64, 0.0);
    for i in 0..d_in {
        for j in 0..d_in {
            let mut unit = ComplexMatrix::zeros(d_in, d_in);
            unit.set(i, j, C64::new(1.0, 0.0));
            let img = ch.apply_matrix(&unit).expect("shape").scale(scale);
            for r in 0..d_out {
                for c in 0..d_out {
                    j_mat.set(i * d_out + r, j * d_out + c, img.get(r, c));
                }
            }
        }
    }
    ChoiMatrix { matrix: j_mat, in_dim: d_in, out_dim: d_out, convention: "column-stacking" }
}

/// Trace distance between the Choi matrices of two channels. Zero iff the
/// channels are equal as linear maps.
pub fn choi_distance(a: &QuantumChannel, b: &QuantumChannel) -> Result<f64> {
    let ja = choi(a);
    let jb = choi(b);
    let diff = ja.matrix.sub(&jb.matrix)?;
    Ok(0.5 * trace_norm(&diff)?)
}

/// Choi distance between a channel and the unitary channel of `u`.
pub fn unitary_channel_choi_distance(
    ch: &QuantumChannel,
    u: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    let target = QuantumChannel::from_unitary(u, tol)?;
    choi_distance(ch, &target)
}

/// Extract V with E(ρ) = VρV† when the channel is a unitary channel.
///
/// Works off the Choi spectrum: the top eigenvalue must carry all the weight
/// (≥ 1 − tol under the unit-trace normalization). The global phase of the
/// returned V is fixed by making its largest-magnitude entry real positive.
pub fn as_unitary(ch: &QuantumChannel, tol: f64) -> Result<Option<ComplexMatrix>> {
    if ch.in_dim() != ch.out_dim() {
        return Ok(None);
    }
    let d = ch.in_dim();
    let j = choi(ch);
    let (eigs, vecs) = hermitian_eig(&j.matrix, 1e-8)?;
    let top = *eigs.last().expect("nonempty spectrum");
    if top < 1.0 - tol {
        return Ok(None);
    }
    let top_col = eigs.len() - 1;
    // Top eigenvector is (1 ⊗ V)|Ω⟩ = Σᵢ |i⟩ ⊗ V|i⟩ / √d.
    let scale = (d as f64).sqrt();
    let mut v = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for k in 0..d {
            v.set(k, i, vecs.get(i * d + k, top_col) * scale);
        }
    }
    // Canonical global phase.
    let mut best = ZERO;
    for r in 0..d {
        for c in 0..d {
            if v.get(r, c).norm() > best.norm() {
                best = v.get(r, c);
            }
        }
    }
    if best.norm() > 1e-12 {
        let phase = best.conj() / best.norm();
        v = v.scale(phase);
    }
    if v.is_unitary(tol.max(1e-9)) {
        Ok(Some(v))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{channel_tracing_ancilla, QuantumChannel};
    use crate::circuit::gates;
    use crate::linalg::{DensityMatrix, PureState};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn choi_of_identity_is_max_entangled() {
        let id = QuantumChannel::from_unitary(&ComplexMatrix::identity(2), &tol()).unwrap();
        let j = choi(&id);
        let omega = PureState::phi_plus().projector();
        assert!(j.matrix.max_abs_diff(&omega) < 1e-12);
        assert!((j.matrix.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn as_unitary_recovers_hadamard() {
        let ch = QuantumChannel::from_unitary(&gates::hadamard(), &tol()).unwrap();
        let v = as_unitary(&ch, 1e-9).unwrap().unwrap();
        assert!(v.phase_equal(&gates::hadamard(), 1e-9));
        // phase canonicalization makes the comparison entrywise exact here
        assert!(v.max_abs_diff(&gates::hadamard()) < 1e-9);
    }

    #[test]
    fn as_unitary_rejects_dephasing() {
        assert!(as_unitary(&QuantumChannel::dephasing(2), 1e-9).unwrap().is_none());
    }

    #[test]
    fn as_unitary_rejects_cnot_with_mixed_ancilla() {
        let ch = channel_tracing_ancilla(
            &gates::cnot(),
            &DensityMatrix::maximally_mixed(2),
            &tol(),
        )
        .unwrap();
        assert!(as_unitary(&ch, 1e-9).unwrap().is_none());
    }

    #[test]
    fn choi_distance_separates_channels() {
        let h = QuantumChannel::from_unitary(&gates::hadamard(), &tol()).unwrap();
        let id = QuantumChannel::from_unitary(&ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(choi_distance(&h, &h).unwrap() < 1e-12);
        assert!(choi_distance(&h, &id).unwrap() > 0.4);
    }
}
