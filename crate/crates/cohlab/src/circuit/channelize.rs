//! Compile a circuit (with measurements and classical control) into the
//! quantum channel it induces.
//!
//! Each classical-outcome path through the circuit is a linear operator on
//! the full wire space: gates multiply in, measurements insert projectors,
//! conditioned gates multiply in only on matching paths. With the ancilla
//! wires fixed to a given state and the traced wires summed out at the end,
//! the paths contract to a Kraus list for a channel from the data-in wires
//! to the data-out wires.

use super::{embed_operator, Circuit, CircuitOp};
use crate::channel::QuantumChannel;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, DensityMatrix, C64, ZERO};

/// How circuit wires map onto a channel signature.
#[derive(Debug, Clone)]
pub struct WireRoles {
    /// Wires holding the fixed ancilla state; the rest are channel input.
    pub ancilla_wires: Vec<usize>,
    /// State on the ancilla wires, dimension 2^{#ancilla_wires}.
    pub ancilla: DensityMatrix,
    /// Wires kept as channel output; the rest are traced out.
    pub data_out: Vec<usize>,
}

impl WireRoles {
    /// No ancilla, nothing traced: the circuit as a channel on all wires.
    pub fn full(qubits: usize) -> Self {
        Self {
            ancilla_wires: Vec::new(),
            ancilla: DensityMatrix::maximally_mixed(1),
            data_out: (0..qubits).collect(),
        }
    }
}

struct Path {
    cbits: Vec<u8>,
    op: ComplexMatrix,
}

fn enumerate_paths(c: &Circuit) -> Result<Vec<Path>> {
    let n = c.qubits();
    let dim = c.dim();
    let mut paths = vec![Path { cbits: vec![0u8; c.cbits()], op: ComplexMatrix::identity(dim) }];
    for op in c.ops() {
        match op {
            CircuitOp::Gate(g) => {
                let full = embed_operator(&g.matrix, &g.targets, n)?;
                for p in paths.iter_mut() {
                    p.op = full.mul(&p.op)?;
                }
            }
            CircuitOp::Controlled(capp) => {
                let mut wires = capp.controls.clone();
                wires.extend_from_slice(&capp.gate.targets);
                let full = embed_operator(&capp.local_matrix()?, &wires, n)?;
                for p in paths.iter_mut() {
                    p.op = full.mul(&p.op)?;
                }
            }
            CircuitOp::Conditioned { gate, cbit, value } => {
                let full = embed_operator(&gate.matrix, &gate.targets, n)?;
                for p in paths.iter_mut() {
                    if p.cbits[*cbit] == *value {
                        p.op = full.mul(&p.op)?;
                    }
                }
            }
            CircuitOp::Measure { qubit, cbit } => {
                let mask = 1usize << (n - 1 - qubit);
                let mut next = Vec::with_capacity(paths.len() * 2);
                for p in paths.into_iter() {
                    for bit in [0u8, 1u8] {
                        let mut projected = ComplexMatrix::zeros(dim, dim);
                        let mut nonzero = false;
                        for r in 0..dim {
                            if ((r & mask != 0) as u8) != bit {
                                continue;
                            }
                            for col in 0..dim {
                                let v = p.op.get(r, col);
                                if v != ZERO {
                                    projected.set(r, col, v);
                                    nonzero = true;
                                }
                            }
                        }
                        if !nonzero || projected.frobenius_norm() < 1e-14 {
                            continue;
                        }
                        let mut cbits = p.cbits.clone();
                        cbits[*cbit] = bit;
                        next.push(Path { cbits, op: projected });
                    }
                }
                paths = next;
            }
        }
    }
    Ok(paths)
}

/// The channel induced by `c` under the given wire roles.
pub fn circuit_channel(c: &Circuit, roles: &WireRoles, tol: &Tolerances) -> Result<QuantumChannel> {
    let n = c.qubits();
    let dim = c.dim();
    for &w in roles.ancilla_wires.iter().chain(&roles.data_out) {
        if w >= n {
            return Err(Error::Shape(format!("role wire {w} out of range")));
        }
    }
    let data_in: Vec<usize> = (0..n).filter(|w| !roles.ancilla_wires.contains(w)).collect();
    let traced: Vec<usize> = (0..n).filter(|w| !roles.data_out.contains(w)).collect();
    let anc_dim = 1usize << roles.ancilla_wires.len();
    if roles.ancilla.dim() != anc_dim {
        return Err(Error::Shape(format!(
            "ancilla state dim {} for {} ancilla wires",
            roles.ancilla.dim(),
            roles.ancilla_wires.len()
        )));
    }
    let in_dim = 1usize << data_in.len();
    let out_dim = 1usize << roles.data_out.len();

    let bit_of = |index: usize, wire: usize| (index >> (n - 1 - wire)) & 1;
    let pack = |index: usize, wires: &[usize]| -> usize {
        wires.iter().fold(0usize, |acc, &w| (acc << 1) | bit_of(index, w))
    };

    let (eigs, vecs) = hermitian_eig(roles.ancilla.matrix(), tol.herm.max(1e-9))?;
    let paths = enumerate_paths(c)?;

    let mut kraus = Vec::new();
    for path in &paths {
        for (j, &lambda) in eigs.iter().enumerate() {
            if lambda < tol.kraus_drop {
                continue;
            }
            let w = lambda.max(0.0).sqrt();
            // B = A · In_j, where In_j embeds a data basis state together
            // with the j-th ancilla eigenvector.
            let mut b = ComplexMatrix::zeros(dim, in_dim);
            for full in 0..dim {
                for r in 0..dim {
                    let v = path.op.get(r, full);
                    if v == ZERO {
                        continue;
                    }
                    let s = pack(full, &data_in);
                    let a = pack(full, &roles.ancilla_wires);
                    let amp = vecs.get(a, j);
                    if amp != ZERO {
                        b.set(r, s, b.get(r, s) + v * amp);
                    }
                }
            }
            // Split rows by traced-wire value.
            for t in 0..1usize << traced.len() {
                let mut k = ComplexMatrix::zeros(out_dim, in_dim);
                let mut norm_sq = 0.0;
                for r in 0..dim {
                    if pack(r, &traced) != t {
                        continue;
                    }
                    let o = pack(r, &roles.data_out);
                    for s in 0..in_dim {
                        let v = b.get(r, s) * C64::new(w, 0.0);
                        k.set(o, s, v);
                        norm_sq += v.norm_sqr();
                    }
                }
                if norm_sq.sqrt() >= tol.kraus_drop {
                    kraus.push(k);
                }
            }
        }
    }
    QuantumChannel::from_kraus(kraus, tol)
}

/// The circuit as a channel on all wires, nothing fixed or traced.
pub fn circuit_channel_full(c: &Circuit, tol: &Tolerances) -> Result<QuantumChannel> {
    circuit_channel(c, &WireRoles::full(c.qubits()), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{choi_distance, QuantumChannel};
    use crate::circuit::{gates, parse_circuit};
    use crate::linalg::PureState;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn unitary_circuit_channel_matches_unitary() {
        let c = parse_circuit("qubits 2\ngate H 0\ngate CNOT 0 1\n").unwrap();
        let ch = circuit_channel_full(&c, &tol()).unwrap();
        let u = c.compile_unitary().unwrap();
        let target = QuantumChannel::from_unitary(&u, &tol()).unwrap();
        assert!(choi_distance(&ch, &target).unwrap() < 1e-10);
    }

    #[test]
    fn measured_bell_circuit_dephases() {
        // Measuring one half of a Bell pair and discarding the outcome is a
        // dephasing channel on the other half... checked end to end: prepare
        // nothing, CNOT onto |0⟩ ancilla, trace it.
        let c = parse_circuit("qubits 2\ncbits 1\ngate CNOT 0 1\nmeasure 1 -> 0\n").unwrap();
        let roles = WireRoles {
            ancilla_wires: vec![1],
            ancilla: PureState::basis(2, 0).unwrap().density(),
            data_out: vec![0],
        };
        let ch = circuit_channel(&c, &roles, &tol()).unwrap();
        let deph = QuantumChannel::dephasing(2);
        assert!(choi_distance(&ch, &deph).unwrap() < 1e-10);
    }

    #[test]
    fn conditioned_gate_is_part_of_the_channel() {
        // measure-then-X where the outcome is always 1 flips deterministically
        let src = "qubits 2\ncbits 1\ngate X 1\nmeasure 1 -> 0\ngate X 0 if 0==1\n";
        let c = parse_circuit(src).unwrap();
        let roles = WireRoles {
            ancilla_wires: vec![1],
            ancilla: PureState::basis(2, 0).unwrap().density(),
            data_out: vec![0],
        };
        let ch = circuit_channel(&c, &roles, &tol()).unwrap();
        let x = QuantumChannel::from_unitary(&gates::pauli_x(), &tol()).unwrap();
        assert!(choi_distance(&ch, &x).unwrap() < 1e-10);
    }

    #[test]
    fn output_on_a_different_wire() {
        // SWAP then trace the first wire: input enters on wire 0, leaves on 1.
        let c = parse_circuit("qubits 2\ngate SWAP 0 1\n").unwrap();
        let roles = WireRoles {
            ancilla_wires: vec![1],
            ancilla: PureState::basis(2, 0).unwrap().density(),
            data_out: vec![1],
        };
        let ch = circuit_channel(&c, &roles, &tol()).unwrap();
        let id = QuantumChannel::from_unitary(&ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(choi_distance(&ch, &id).unwrap() < 1e-10);
    }
}
