//! Circuit IR: ordered gates, generalized controlled gates, measurements,
//! and classically conditioned gates over named qubits and classical bits.
//!
//! Wire convention: qubit 0 is the most significant bit of a basis index, so
//! the bitstring read left to right matches wires 0..n.

pub mod channelize;
pub mod gadgets;
pub mod gates;
mod parse;
mod rewrite;
mod sim;
pub mod state_spec;

pub use channelize::{circuit_channel, circuit_channel_full, WireRoles};
pub use gadgets::{gadget_library, verify_gadget, Gadget};
pub use parse::parse_circuit;
pub use rewrite::defer_measurements;
pub use sim::{simulate, SimBranch, SimMode, SimOutcome};

use crate::coherence::classify_incoherent_unitary;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};
use std::collections::BTreeSet;
use std::sync::Arc;

/// A named unitary applied to an ordered list of target wires. The first
/// listed wire is the most significant bit of the gate's own index space.
#[derive(Debug, Clone)]
pub struct GateApp {
    pub name: String,
    pub matrix: Arc<ComplexMatrix>,
    pub targets: Vec<usize>,
}

impl GateApp {
    pub fn named(name: &str, targets: Vec<usize>) -> Result<Self> {
        let matrix = gates::gate_matrix(name)
            .ok_or_else(|| Error::Circuit(format!("unknown gate name `{name}`")))?;
        Ok(Self { name: name.to_string(), matrix: Arc::new(matrix), targets })
    }

    pub fn custom(name: &str, matrix: ComplexMatrix, targets: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != 1usize << targets.len() {
            return Err(Error::Circuit(format!(
                "gate `{name}` matrix is {}x{} for {} targets",
                matrix.rows(),
                matrix.cols(),
                targets.len()
            )));
        }
        Ok(Self { name: name.to_string(), matrix: Arc::new(matrix), targets })
    }
}

/// Generalized controlled gate: the inner gate acts exactly when the control
/// wires (read in listed order) carry a bitstring in the trigger set.
#[derive(Debug, Clone)]
pub struct ControlledApp {
    pub gate: GateApp,
    pub controls: Vec<usize>,
    pub triggers: BTreeSet<u64>,
}

impl ControlledApp {
    /// Block matrix on (controls ++ targets), controls most significant.
    pub fn local_matrix(&self) -> Result<ComplexMatrix> {
        controlled_unitary(
            &self.gate.matrix,
            self.controls.len(),
            &self.triggers,
            1e-9,
        )
    }

    fn wires(&self) -> Vec<usize> {
        let mut w = self.controls.clone();
        w.extend_from_slice(&self.gate.targets);
        w
    }
}

#[derive(Debug, Clone)]
pub enum CircuitOp {
    Gate(GateApp),
    Controlled(ControlledApp),
    Measure { qubit: usize, cbit: usize },
    Conditioned { gate: GateApp, cbit: usize, value: u8 },
}

/// Ordered list of operations over `qubits` wires and `cbits` classical bits.
#[derive(Debug, Clone)]
pub struct Circuit {
    qubits: usize,
    cbits: usize,
    ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(qubits: usize, cbits: usize) -> Self {
        Self { qubits, cbits, ops: Vec::new() }
    }

    pub fn from_ops(qubits: usize, cbits: usize, ops: Vec<CircuitOp>) -> Result<Self> {
        let mut c = Self::new(qubits, cbits);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn cbits(&self) -> usize {
        self.cbits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        1usize << self.qubits
    }

    /// Append an op after validating wire ranges and classical-bit order
    /// (conditions may only reference bits some earlier measurement wrote).
    pub fn push(&mut self, op: CircuitOp) -> Result<()> {
        let check_wires = |wires: &[usize]| -> Result<()> {
            let mut seen = BTreeSet::new();
            for &w in wires {
                if w >= self.qubits {
                    return Err(Error::Circuit(format!(
                        "wire {w} out of range for {} qubits",
                        self.qubits
                    )));
                }
                if !seen.insert(w) {
                    return Err(Error::Circuit(format!("wire {w} repeated")));
                }
            }
            Ok(())
        };
        match &op {
            CircuitOp::Gate(g) => check_wires(&g.targets)?,
            CircuitOp::Controlled(capp) => {
                check_wires(&capp.wires())?;
                if capp.triggers.is_empty() {
                    return Err(Error::InvalidTriggerSet("empty trigger set".into()));
                }
                let bound = 1u64 << capp.controls.len();
                if capp.triggers.iter().any(|&t| t >= bound) {
                    return Err(Error::InvalidTriggerSet(format!(
                        "trigger exceeds {} control bits",
                        capp.controls.len()
                    )));
                }
            }
            CircuitOp::Measure { qubit, cbit } => {
                check_wires(&[*qubit])?;
                if *cbit >= self.cbits {
                    return Err(Error::Circuit(format!(
                        "classical bit {cbit} out of range for {} cbits",
                        self.cbits
                    )));
                }
                if self.written_cbits().contains(cbit) {
                    return Err(Error::Circuit(format!(
                        "classical bit {cbit} measured twice"
                    )));
                }
            }
            CircuitOp::Conditioned { gate, cbit, value } => {
                check_wires(&gate.targets)?;
                if *value > 1 {
                    return Err(Error::Circuit("condition value must be 0 or 1".into()));
                }
                if !self.written_cbits().contains(cbit) {
                    return Err(Error::Circuit(format!(
                        "condition on unwritten classical bit {cbit}"
                    )));
                }
            }
        }
        self.ops.push(op);
        Ok(())
    }

    fn written_cbits(&self) -> BTreeSet<usize> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                CircuitOp::Measure { cbit, .. } => Some(*cbit),
                _ => None,
            })
            .collect()
    }

    // Builder conveniences.

    pub fn gate(&mut self, name: &str, targets: &[usize]) -> Result<&mut Self> {
        self.push(CircuitOp::Gate(GateApp::named(name, targets.to_vec())?))?;
        Ok(self)
    }

    pub fn gate_custom(
        &mut self,
        name: &str,
        matrix: ComplexMatrix,
        targets: &[usize],
    ) -> Result<&mut Self> {
        self.push(CircuitOp::Gate(GateApp::custom(name, matrix, targets.to_vec())?))?;
        Ok(self)
    }

    pub fn cgate(
        &mut self,
        name: &str,
        targets: &[usize],
        controls: &[usize],
        triggers: &[u64],
    ) -> Result<&mut Self> {
        self.push(CircuitOp::Controlled(ControlledApp {
            gate: GateApp::named(name, targets.to_vec())?,
            controls: controls.to_vec(),
            triggers: triggers.iter().copied().collect(),
        }))?;
        Ok(self)
    }

    pub fn measure(&mut self, qubit: usize, cbit: usize) -> Result<&mut Self> {
        self.push(CircuitOp::Measure { qubit, cbit })?;
        Ok(self)
    }

    pub fn gate_if(
        &mut self,
        name: &str,
        targets: &[usize],
        cbit: usize,
        value: u8,
    ) -> Result<&mut Self> {
        self.push(CircuitOp::Conditioned {
            gate: GateApp::named(name, targets.to_vec())?,
            cbit,
            value,
        })?;
        Ok(self)
    }

    pub fn gate_if_custom(
        &mut self,
        name: &str,
        matrix: ComplexMatrix,
        targets: &[usize],
        cbit: usize,
        value: u8,
    ) -> Result<&mut Self> {
        self.push(CircuitOp::Conditioned {
            gate: GateApp::custom(name, matrix, targets.to_vec())?,
            cbit,
            value,
        })?;
        Ok(self)
    }

    pub fn has_measurements(&self) -> bool {
        self.ops.iter().any(|op| matches!(op, CircuitOp::Measure { .. }))
    }

    /// Multiply all ops into one unitary. Fails on measurements or classical
    /// control; run [`defer_measurements`] first for adaptive circuits.
    pub fn compile_unitary(&self) -> Result<ComplexMatrix> {
        let mut u = ComplexMatrix::identity(self.dim());
        for op in &self.ops {
            let full = match op {
                CircuitOp::Gate(g) => embed_operator(&g.matrix, &g.targets, self.qubits)?,
                CircuitOp::Controlled(capp) => {
                    embed_operator(&capp.local_matrix()?, &capp.wires(), self.qubits)?
                }
                CircuitOp::Measure { .. } | CircuitOp::Conditioned { .. } => {
                    return Err(Error::Circuit(
                        "cannot compile a circuit with measurements or classical control".into(),
                    ))
                }
            };
            u = full.mul(&u)?;
        }
        Ok(u)
    }

    /// Number of Hadamard or controlled-Hadamard ops. Every other gate must
    /// classify as incoherent.
    pub fn hadamard_count(&self) -> Result<usize> {
        let mut k = 0usize;
        for (idx, op) in self.ops.iter().enumerate() {
            match op {
                CircuitOp::Measure { .. } => {}
                CircuitOp::Gate(g) | CircuitOp::Conditioned { gate: g, .. } => {
                    k += classify_gate_for_count(g, idx)?;
                }
                CircuitOp::Controlled(capp) => {
                    k += classify_gate_for_count(&capp.gate, idx)?;
                }
            }
        }
        Ok(k)
    }
}

fn classify_gate_for_count(g: &GateApp, idx: usize) -> Result<usize> {
    if is_hadamard_matrix(&g.matrix) {
        return Ok(1);
    }
    match classify_incoherent_unitary(&g.matrix, 1e-9) {
        Ok(Some(_)) => Ok(0),
        _ => Err(Error::UnclassifiableGate(format!("op {idx} ({})", g.name))),
    }
}

pub(crate) fn is_hadamard_matrix(m: &ComplexMatrix) -> bool {
    m.rows() == 2 && m.cols() == 2 && m.phase_equal(&gates::hadamard(), 1e-9)
}

/// Σ_{x∈S} |x⟩⟨x| ⊗ U + Σ_{y∉S} |y⟩⟨y| ⊗ 1 with `control_count` control
/// qubits in front. `S` holds the triggering control values.
pub fn controlled_unitary(
    u: &ComplexMatrix,
    control_count: usize,
    triggers: &BTreeSet<u64>,
    tol: f64,
) -> Result<ComplexMatrix> {
    let dev = u.unitarity_deviation();
    if dev > tol {
        return Err(Error::NotUnitary(dev));
    }
    if triggers.is_empty() {
        return Err(Error::InvalidTriggerSet("empty trigger set".into()));
    }
    let bound = 1u64 << control_count;
    if triggers.iter().any(|&t| t >= bound) {
        return Err(Error::InvalidTriggerSet(format!(
            "trigger exceeds {control_count} control bits"
        )));
    }
    let d = u.rows();
    let dim = (bound as usize) * d;
    let identity = ComplexMatrix::identity(d);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for x in 0..bound as usize {
        let block = if triggers.contains(&(x as u64)) { u } else { &identity };
        for r in 0..d {
            for c in 0..d {
                out.set(x * d + r, x * d + c, block.get(r, c));
            }
        }
    }
    Ok(out)
}

/// Build the full 2ⁿ operator for a gate on the listed wires.
pub fn embed_operator(g: &ComplexMatrix, wires: &[usize], n: usize) -> Result<ComplexMatrix> {
    let k = wires.len();
    if g.rows() != 1usize << k || g.cols() != 1usize << k {
        return Err(Error::Shape(format!(
            "gate is {}x{} for {k} wires",
            g.rows(),
            g.cols()
        )));
    }
    let dim = 1usize << n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    let rest: Vec<usize> = (0..n).filter(|w| !wires.contains(w)).collect();
    let rest_count = rest.len();
    let place = |loc: usize, wires: &[usize]| -> usize {
        let mut x = 0usize;
        for (bi, &w) in wires.iter().enumerate() {
            if (loc >> (wires.len() - 1 - bi)) & 1 == 1 {
                x |= 1 << (n - 1 - w);
            }
        }
        x
    };
    for rest_assign in 0..1usize << rest_count {
        let base = place(rest_assign, &rest);
        for r_loc in 0..1usize << k {
            let row = base | place(r_loc, wires);
            for c_loc in 0..1usize << k {
                let v = g.get(r_loc, c_loc);
                if v == ZERO {
                    continue;
                }
                out.set(row, base | place(c_loc, wires), v);
            }
        }
    }
    Ok(out)
}
