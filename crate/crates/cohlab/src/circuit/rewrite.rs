//! Deferred-measurement rewrite.
//!
//! Every classically conditioned gate becomes a quantum-controlled gate on
//! the wire that was (or will be) measured into the controlling bit, and all
//! measurements move to the end of the circuit. When a measured qubit is
//! still used afterwards, its basis value is first copied onto a fresh wire
//! with a CNOT and the measurement (and any controls) move to the copy, so
//! the rewrite is channel-preserving for every input circuit.

use super::{Circuit, CircuitOp, ControlledApp};
use crate::error::Result;

/// Rewritten circuit plus the wires the rewrite added (always to be traced
/// out; they start in |0⟩ and are measured at the end).
#[derive(Debug, Clone)]
pub struct DeferredCircuit {
    pub circuit: Circuit,
    pub fresh_wires: Vec<usize>,
}

pub fn defer_measurements(c: &Circuit) -> Result<DeferredCircuit> {
    let n = c.qubits();

    // Which measurements need a copy wire: the measured qubit is targeted or
    // controlled by a later op, or measured again later.
    let mut needs_fresh = vec![false; c.ops().len()];
    for (i, op) in c.ops().iter().enumerate() {
        let CircuitOp::Measure { qubit, .. } = op else { continue };
        for later in &c.ops()[i + 1..] {
            let touches = match later {
                CircuitOp::Gate(g) => g.targets.contains(qubit),
                CircuitOp::Controlled(capp) => {
                    capp.gate.targets.contains(qubit) || capp.controls.contains(qubit)
                }
                CircuitOp::Conditioned { gate, .. } => gate.targets.contains(qubit),
                CircuitOp::Measure { qubit: q2, .. } => q2 == qubit,
            };
            if touches {
                needs_fresh[i] = true;
                break;
            }
        }
    }
    let fresh_count = needs_fresh.iter().filter(|&&b| b).count();
    let total = n + fresh_count;

    let mut out = Circuit::new(total, c.cbits());
    let mut next_fresh = n;
    let mut fresh_wires = Vec::new();
    // classical bit -> wire carrying its value until the terminal measurement
    let mut bit_wire: Vec<Option<usize>> = vec![None; c.cbits()];
    let mut terminal: Vec<(usize, usize)> = Vec::new(); // (wire, cbit) in op order

    for (i, op) in c.ops().iter().enumerate() {
        match op {
            CircuitOp::Measure { qubit, cbit } => {
                let wire = if needs_fresh[i] {
                    let fresh = next_fresh;
                    next_fresh += 1;
                    fresh_wires.push(fresh);
                    out.gate("CNOT", &[*qubit, fresh])?;
                    fresh
                } else {
                    *qubit
                };
                bit_wire[*cbit] = Some(wire);
                terminal.push((wire, *cbit));
            }
            CircuitOp::Conditioned { gate, cbit, value } => {
                let wire = bit_wire[*cbit].expect("validated: bit written before use");
                out.push(CircuitOp::Controlled(ControlledApp {
                    gate: gate.clone(),
                    controls: vec![wire],
                    triggers: std::iter::once(*value as u64).collect(),
                }))?;
            }
            other => out.push(other.clone())?,
        }
    }
    for (wire, cbit) in terminal {
        out.measure(wire, cbit)?;
    }
    Ok(DeferredCircuit { circuit: out, fresh_wires })
}

impl DeferredCircuit {
    /// Wire roles for comparing the rewritten circuit against the original
    /// under the original's roles: the fresh wires join the ancilla in |0⟩
    /// and are traced out.
    pub fn extended_roles(&self, original: &super::WireRoles) -> Result<super::WireRoles> {
        let mut ancilla_wires = original.ancilla_wires.clone();
        let mut ancilla = original.ancilla.clone();
        for &w in &self.fresh_wires {
            ancilla_wires.push(w);
            ancilla = ancilla.tensor(&crate::linalg::PureState::basis(2, 0)?.density())?;
        }
        Ok(super::WireRoles {
            ancilla_wires,
            ancilla,
            data_out: original.data_out.clone(),
        })
    }
}
