//! Statevector simulation with exact measurement branching.
//!
//! Enumerate mode follows every measurement outcome with its exact
//! probability, applying classically conditioned gates per branch; sample
//! mode draws a single run. Branches are reported in lexicographic order of
//! the classical register, so the output is schedule-independent.

use super::{Circuit, CircuitOp, ControlledApp, GateApp};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, PureState, C64, ZERO};
use crate::random;
use rand::Rng;

#[derive(Debug, Clone, Copy)]
pub enum SimMode {
    /// Follow every branch whose probability stays above the prune threshold.
    Enumerate,
    /// Draw one run with the given seed.
    Sample(u64),
}

#[derive(Debug, Clone)]
pub struct SimBranch {
    /// Final classical register, index = classical bit.
    pub outcome: Vec<u8>,
    pub probability: f64,
    pub state: PureState,
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub branches: Vec<SimBranch>,
}

impl SimOutcome {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn outcome_string(branch: &SimBranch) -> String {
        branch.outcome.iter().map(|b| char::from(b'0' + b)).collect()
    }
}

struct Branch {
    cbits: Vec<u8>,
    probability: f64,
    state: Vec<C64>,
}

/// Apply a k-wire gate to a statevector in place.
pub(crate) fn apply_gate_vec(state: &mut [C64], g: &ComplexMatrix, wires: &[usize], n: usize) {
    let k = wires.len();
    let block = 1usize << k;
    debug_assert_eq!(g.rows(), block);
    let rest: Vec<usize> = (0..n).filter(|w| !wires.contains(w)).collect();
    let place = |loc: usize, ws: &[usize]| -> usize {
        let mut x = 0usize;
        for (bi, &w) in ws.iter().enumerate() {
            if (loc >> (ws.len() - 1 - bi)) & 1 == 1 {
                x |= 1 << (n - 1 - w);
            }
        }
        x
    };
    let mut scratch = vec![ZERO; block];
    for rest_assign in 0..1usize << rest.len() {
        let base = place(rest_assign, &rest);
        for (loc, slot) in scratch.iter_mut().enumerate() {
            *slot = state[base | place(loc, wires)];
        }
        for r_loc in 0..block {
            let mut acc = ZERO;
            for (c_loc, amp) in scratch.iter().enumerate() {
                let gv = g.get(r_loc, c_loc);
                if gv != ZERO {
                    acc += gv * amp;
                }
            }
            state[base | place(r_loc, wires)] = acc;
        }
    }
}

fn controlled_wires_and_matrix(capp: &ControlledApp) -> Result<(Vec<usize>, ComplexMatrix)> {
    let mut wires = capp.controls.clone();
    wires.extend_from_slice(&capp.gate.targets);
    Ok((wires, capp.local_matrix()?))
}

fn measure_probability(state: &[C64], qubit: usize, n: usize, bit: u8) -> f64 {
    let mask = 1usize << (n - 1 - qubit);
    state
        .iter()
        .enumerate()
        .filter(|(i, _)| ((i & mask != 0) as u8) == bit)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

fn project(state: &[C64], qubit: usize, n: usize, bit: u8, prob: f64) -> Vec<C64> {
    let mask = 1usize << (n - 1 - qubit);
    let scale = 1.0 / prob.sqrt();
    state
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if ((i & mask != 0) as u8) == bit {
                a * scale
            } else {
                ZERO
            }
        })
        .collect()
}

/// Run a circuit on an input state covering all `c.qubits()` wires.
pub fn simulate(c: &Circuit, input: &PureState, mode: SimMode) -> Result<SimOutcome> {
    if input.dim() != c.dim() {
        return Err(Error::Shape(format!(
            "input dim {} does not match {} qubits",
            input.dim(),
            c.qubits()
        )));
    }
    let n = c.qubits();
    let prune = Tolerances::DEFAULT.branch_prune;
    let mut sampler = match mode {
        SimMode::Sample(seed) => Some(random::rng_from(seed)),
        SimMode::Enumerate => None,
    };

    let mut branches = vec![Branch {
        cbits: vec![0u8; c.cbits()],
        probability: 1.0,
        state: input.amplitudes().to_vec(),
    }];

    for op in c.ops() {
        match op {
            CircuitOp::Gate(g) => {
                for b in branches.iter_mut() {
                    apply_gate_vec(&mut b.state, &g.matrix, &g.targets, n);
                }
            }
            CircuitOp::Controlled(capp) => {
                let (wires, m) = controlled_wires_and_matrix(capp)?;
                for b in branches.iter_mut() {
                    apply_gate_vec(&mut b.state, &m, &wires, n);
                }
            }
            CircuitOp::Conditioned { gate, cbit, value } => {
                for b in branches.iter_mut() {
                    if b.cbits[*cbit] == *value {
                        apply_gate_vec(&mut b.state, &gate.matrix, &gate.targets, n);
                    }
                }
            }
            CircuitOp::Measure { qubit, cbit } => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for b in branches.into_iter() {
                    let p1 = measure_probability(&b.state, *qubit, n, 1);
                    let p0 = (1.0 - p1).max(0.0);
                    let chosen: Option<u8> = sampler.as_mut().map(|rng| {
                        let draw: f64 = rng.gen::<f64>();
                        u8::from(draw < p1)
                    });
                    for (bit, p) in [(0u8, p0), (1u8, p1)] {
                        if let Some(choice) = chosen {
                            if choice != bit {
                                continue;
                            }
                        }
                        if p < prune {
                            continue;
                        }
                        let mut cbits = b.cbits.clone();
                        cbits[*cbit] = bit;
                        next.push(Branch {
                            cbits,
                            probability: b.probability * p,
                            state: project(&b.state, *qubit, n, bit, p),
                        });
                    }
                }
                branches = next;
            }
        }
    }

    let mut out: Vec<SimBranch> = branches
        .into_iter()
        .map(|b| {
            Ok(SimBranch {
                outcome: b.cbits,
                probability: b.probability,
                state: PureState::normalized(b.state)?,
            })
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.outcome.cmp(&b.outcome));
    Ok(SimOutcome { branches: out })
}

/// The mixed output over all branches, with listed wires traced out.
pub fn output_density(
    outcome: &SimOutcome,
    qubits: usize,
    traced: &[usize],
    tol: &Tolerances,
) -> Result<crate::linalg::DensityMatrix> {
    let keep: Vec<usize> = (0..qubits).filter(|w| !traced.contains(w)).collect();
    let keep_dim = 1usize << keep.len();
    let mut acc = ComplexMatrix::zeros(keep_dim, keep_dim);
    for branch in &outcome.branches {
        let rho = branch.state.projector();
        let dims = vec![2usize; qubits];
        let reduced = crate::linalg::partial_trace_matrix(&rho, &dims, &keep)?;
        acc = acc.add(&reduced.scale(C64::new(branch.probability, 0.0)))?;
    }
    crate::linalg::DensityMatrix::new(acc, tol)
}
