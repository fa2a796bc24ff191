//! Fixed gate matrices addressable by name in the circuit text format.

use crate::linalg::{ComplexMatrix, C64};

const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_reim(2, 2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_reim(2, 2, &[(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_reim(2, 2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)]).unwrap()
}

pub fn hadamard() -> ComplexMatrix {
    ComplexMatrix::from_reim(2, 2, &[(S2, 0.0), (S2, 0.0), (S2, 0.0), (-S2, 0.0)]).unwrap()
}

pub fn phase_s() -> ComplexMatrix {
    ComplexMatrix::from_reim(2, 2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 1.0)]).unwrap()
}

pub fn gate_t() -> ComplexMatrix {
    let e = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), e]).unwrap()
}

/// diag(1, e^{2πi/2^k}) — the k-th gate in the diagonal hierarchy:
/// k = 1 is Z, k = 2 is S, k = 3 is T.
pub fn diagonal_uk(k: u32) -> ComplexMatrix {
    let theta = 2.0 * std::f64::consts::PI / (1u64 << k) as f64;
    ComplexMatrix::new(
        2,
        2,
        vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, theta)],
    )
    .unwrap()
}

pub fn cnot() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, c(1.0, 0.0));
    m.set(1, 1, c(1.0, 0.0));
    m.set(2, 3, c(1.0, 0.0));
    m.set(3, 2, c(1.0, 0.0));
    m
}

pub fn cz() -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(4);
    m.set(3, 3, c(-1.0, 0.0));
    m
}

pub fn swap() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, c(1.0, 0.0));
    m.set(1, 2, c(1.0, 0.0));
    m.set(2, 1, c(1.0, 0.0));
    m.set(3, 3, c(1.0, 0.0));
    m
}

pub fn toffoli() -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(8);
    m.set(6, 6, c(0.0, 0.0));
    m.set(7, 7, c(0.0, 0.0));
    m.set(6, 7, c(1.0, 0.0));
    m.set(7, 6, c(1.0, 0.0));
    m
}

/// Matrix for a named gate, if the name is known.
pub fn gate_matrix(name: &str) -> Option<ComplexMatrix> {
    Some(match name {
        "I" => ComplexMatrix::identity(2),
        "X" => pauli_x(),
        "Y" => pauli_y(),
        "Z" => pauli_z(),
        "H" => hadamard(),
        "S" => phase_s(),
        "Sdg" => phase_s().dagger(),
        "T" => gate_t(),
        "Tdg" => gate_t().dagger(),
        "CNOT" => cnot(),
        "CZ" => cz(),
        "SWAP" => swap(),
        "TOFFOLI" => toffoli(),
        _ => return None,
    })
}

/// Number of qubits a named gate acts on.
pub fn gate_arity(name: &str) -> Option<usize> {
    Some(match name {
        "I" | "X" | "Y" | "Z" | "H" | "S" | "Sdg" | "T" | "Tdg" => 1,
        "CNOT" | "CZ" | "SWAP" => 2,
        "TOFFOLI" => 3,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_named_gates_unitary() {
        for name in [
            "I", "X", "Y", "Z", "H", "S", "Sdg", "T", "Tdg", "CNOT", "CZ", "SWAP", "TOFFOLI",
        ] {
            let m = gate_matrix(name).unwrap();
            assert!(m.is_unitary(1e-12), "{name}");
            assert_eq!(m.rows(), 1 << gate_arity(name).unwrap());
        }
    }

    #[test]
    fn diagonal_hierarchy() {
        assert!(diagonal_uk(1).max_abs_diff(&pauli_z()) < 1e-12);
        assert!(diagonal_uk(2).max_abs_diff(&phase_s()) < 1e-12);
        assert!(diagonal_uk(3).max_abs_diff(&gate_t()) < 1e-12);
    }

    #[test]
    fn t_squares_to_s() {
        let t = gate_t();
        let s = phase_s();
        assert!(t.mul(&t).unwrap().max_abs_diff(&s) < 1e-12);
    }
}
