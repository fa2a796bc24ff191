//! Named state constructors for ancilla specifications.
//!
//! A spec is a `*`-separated product of atoms, e.g. `minus * iplus`:
//!
//! * `zero`, `one`, `plus`, `minus` — single-qubit basics
//! * `iplus` — (|0⟩ + i|1⟩)/√2
//! * `tstate` — (|0⟩ + e^{iπ/4}|1⟩)/√2
//! * `ukplus:<k>` — (|0⟩ + e^{2πi/2^k}|1⟩)/√2
//! * `phiplus` — the two-qubit maximally entangled pair
//! * `bellrot:<G>` — (1 ⊗ G)|φ⁺⟩ for a named single-qubit gate G
//! * `mmix:<q>` — maximally mixed state on q qubits

use super::gates;
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, PureState};

fn bad(spec: &str, why: impl Into<String>) -> Error {
    Error::StateSpec(spec.to_string(), why.into())
}

fn atom(spec: &str, token: &str) -> Result<DensityMatrix> {
    let pure = |s: PureState| s.density();
    Ok(match token {
        "zero" => pure(PureState::basis(2, 0).expect("fits")),
        "one" => pure(PureState::basis(2, 1).expect("fits")),
        "plus" => pure(PureState::plus()),
        "minus" => pure(PureState::minus()),
        "iplus" => pure(PureState::i_plus()),
        "tstate" => pure(PureState::t_state()),
        "phiplus" => pure(PureState::phi_plus()),
        _ => {
            if let Some(k) = token.strip_prefix("ukplus:") {
                let k: u32 = k.parse().map_err(|_| bad(spec, format!("bad level `{token}`")))?;
                if k == 0 || k > 16 {
                    return Err(bad(spec, "ukplus level must be in 1..=16"));
                }
                return Ok(pure(PureState::uk_plus(k)));
            }
            if let Some(q) = token.strip_prefix("mmix:") {
                let q: u32 = q.parse().map_err(|_| bad(spec, format!("bad qubit count `{token}`")))?;
                if q == 0 || q > 12 {
                    return Err(bad(spec, "mmix qubit count must be in 1..=12"));
                }
                return Ok(DensityMatrix::maximally_mixed(1usize << q));
            }
            if let Some(g) = token.strip_prefix("bellrot:") {
                let m = gates::gate_matrix(g)
                    .filter(|m| m.rows() == 2)
                    .ok_or_else(|| bad(spec, format!("`{g}` is not a single-qubit gate")))?;
                let phi = PureState::phi_plus();
                let full = crate::linalg::ComplexMatrix::identity(2).kron(&m)?;
                let rotated = PureState::normalized(full.mul_vec(phi.amplitudes())?)?;
                return Ok(pure(rotated));
            }
            return Err(bad(spec, format!("unknown atom `{token}`")));
        }
    })
}

/// Evaluate a constructor expression to a density matrix (pure specs give
/// rank-one states).
pub fn parse_state_spec(spec: &str) -> Result<DensityMatrix> {
    let mut acc: Option<DensityMatrix> = None;
    for token in spec.split('*') {
        let token = token.trim();
        if token.is_empty() {
            return Err(bad(spec, "empty atom"));
        }
        let state = atom(spec, token)?;
        acc = Some(match acc {
            None => state,
            Some(prev) => prev.tensor(&state)?,
        });
    }
    acc.ok_or_else(|| bad(spec, "empty spec"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_products() {
        let s = parse_state_spec("minus * iplus").unwrap();
        assert_eq!(s.dim(), 4);
        let expected = PureState::minus().tensor(&PureState::i_plus()).density();
        assert!(s.matrix().max_abs_diff(expected.matrix()) < 1e-15);
    }

    #[test]
    fn parses_mixed_and_rotated() {
        assert_eq!(parse_state_spec("mmix:2").unwrap().dim(), 4);
        let rot = parse_state_spec("bellrot:H").unwrap();
        assert_eq!(rot.dim(), 4);
        assert!((rot.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_atoms() {
        assert!(parse_state_spec("gibberish").is_err());
        assert!(parse_state_spec("").is_err());
        assert!(parse_state_spec("ukplus:0").is_err());
    }
}
