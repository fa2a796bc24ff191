//! Trace distance and the two bounds on the induced channel distance.
//!
//! `induced_distance_lower` maximizes D(E(|ψ⟩⟨ψ|), V|ψ⟩⟨ψ|V†) over input
//! states by multistart derivative-free ascent; it only ever reports a
//! *lower* bound, achieved by the returned witness. Restricting to pure
//! inputs is enough because the induced distance is attained on them.
//!
//! `certified_nogo_bound` is the exact counterpart for dephasing-covariant
//! channels: scanning the diagonal of σ = E(1/2ⁿ ⊗ Δ(τ)) certifies a bound
//! that can never fall below 1 − 2⁻ⁿ.

use super::{superop_apply, QuantumChannel};
use crate::coherence;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, DensityMatrix, PureState, C64};
use crate::par;
use crate::random;

/// D(ρ, σ) = ½‖ρ − σ‖₁, always in [0, 1].
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("trace distance dims {} vs {}", a.dim(), b.dim())));
    }
    let diff = a.matrix().sub(b.matrix())?;
    // The difference of density matrices is Hermitian; sum of |eigenvalues|.
    let (eigs, _) = hermitian_eig(&diff, 1e-8)?;
    Ok(0.5 * eigs.iter().map(|l| l.abs()).sum::<f64>())
}

/// Multistart ascent controls.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerOptions {
    /// Total objective-evaluation budget across all starts.
    pub budget: usize,
    /// Number of seeded Haar-random starts on top of the basis starts.
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { budget: 20_000, random_starts: 8, seed: 0 }
    }
}

/// Best value found of D(E(|ψ⟩⟨ψ|), V|ψ⟩⟨ψ|V†) together with the witness
/// state achieving it. The value is a certified lower bound on the induced
/// trace distance between E and the unitary channel of `target`.
pub fn induced_distance_lower(
    ch: &QuantumChannel,
    target: &ComplexMatrix,
    budget: usize,
    seed: u64,
) -> Result<(f64, PureState)> {
    induced_distance_lower_with(
        ch,
        target,
        &OptimizerOptions { budget, seed, ..OptimizerOptions::default() },
        false,
    )
}

pub fn induced_distance_lower_with(
    ch: &QuantumChannel,
    target: &ComplexMatrix,
    opts: &OptimizerOptions,
    sequential: bool,
) -> Result<(f64, PureState)> {
    let d = ch.in_dim();
    if target.rows() != ch.out_dim() || target.cols() != d {
        return Err(Error::Shape(format!(
            "target is {}x{}, channel maps {} -> {}",
            target.rows(),
            target.cols(),
            d,
            ch.out_dim()
        )));
    }
    let superop = ch.superoperator();
    let out_dim = ch.out_dim();

    let objective = move |amps: &[C64]| -> f64 {
        let psi = match PureState::normalized(amps.to_vec()) {
            Ok(p) => p,
            Err(_) => return -1.0,
        };
        let rho = psi.projector();
        let image = superop_apply(&superop, &rho, out_dim);
        let v_psi = target.mul_vec(psi.amplitudes()).expect("shape checked");
        let mut diff = image;
        for r in 0..out_dim {
            for c in 0..out_dim {
                let t = v_psi[r] * v_psi[c].conj();
                diff.set(r, c, diff.get(r, c) - t);
            }
        }
        match hermitian_eig(&diff, 1e-7) {
            Ok((eigs, _)) => 0.5 * eigs.iter().map(|l| l.abs()).sum::<f64>(),
            Err(_) => -1.0,
        }
    };

    // Starts: computational basis, conjugate basis (when d = 2^n), then
    // seeded Haar-random states.
    let mut starts: Vec<Vec<C64>> = Vec::new();
    for i in 0..d {
        starts.push(PureState::basis(d, i).expect("in range").amplitudes().to_vec());
    }
    if d.is_power_of_two() {
        let n = d.trailing_zeros();
        let h = crate::circuit::gates::hadamard();
        let mut hn = ComplexMatrix::identity(1);
        for _ in 0..n {
            hn = hn.kron(&h)?;
        }
        for i in 0..d {
            starts.push(hn.row(i).to_vec()); // H^{⊗n} columns = rows, H is symmetric
        }
    }
    let n_random = opts.random_starts;
    let n_starts = starts.len() + n_random;
    let per_start_budget = (opts.budget / n_starts.max(1)).max(8);

    let results: Vec<(f64, Vec<C64>)> = par::map_indexed(n_starts, sequential, |idx| {
        let start = if idx < starts.len() {
            starts[idx].clone()
        } else {
            let mut rng = random::rng_from(random::derive_seed(opts.seed, idx as u64));
            random::haar_state(d, &mut rng).amplitudes().to_vec()
        };
        ascend(&objective, start, per_start_budget)
    });

    // Deterministic merge: best value, ties to the lowest start index.
    let mut best_idx = 0usize;
    for i in 1..results.len() {
        if results[i].0 > results[best_idx].0 {
            best_idx = i;
        }
    }
    let (value, amps) = results[best_idx].clone();
    Ok((value, PureState::normalized(amps)?))
}

/// Coordinate-wise local ascent over the real parameterization of the unit
/// sphere, with renormalization and step halving.
fn ascend(objective: &dyn Fn(&[C64]) -> f64, start: Vec<C64>, budget: usize) -> (f64, Vec<C64>) {
    let d = start.len();
    let mut current = start;
    let mut best = objective(&current);
    let mut evals = 1usize;
    let mut step = 0.25_f64;
    let min_improvement = Tolerances::DEFAULT.ascent_improvement;

    while evals < budget && step > 1e-9 {
        let mut pass_improvement = 0.0_f64;
        'coords: for coord in 0..2 * d {
            for sign in [1.0, -1.0] {
                if evals >= budget {
                    break 'coords;
                }
                let mut candidate = current.clone();
                let delta = step * sign;
                if coord < d {
                    candidate[coord] += C64::new(delta, 0.0);
                } else {
                    candidate[coord - d] += C64::new(0.0, delta);
                }
                let norm_sq: f64 = candidate.iter().map(|a| a.norm_sqr()).sum();
                if norm_sq < 1e-12 {
                    continue;
                }
                let inv = 1.0 / norm_sq.sqrt();
                for a in candidate.iter_mut() {
                    *a *= inv;
                }
                let value = objective(&candidate);
                evals += 1;
                if value > best {
                    pass_improvement += value - best;
                    best = value;
                    current = candidate;
                }
            }
        }
        if pass_improvement < min_improvement {
            step *= 0.5;
        }
    }
    (best, current)
}

/// Certified lower-bound witness for a dephasing-covariant channel against
/// n Hadamards.
#[derive(Debug, Clone)]
pub struct NogoBound {
    pub bound: f64,
    pub witness_state: PureState,
    /// Basis index of the witness as an n-bit string.
    pub witness_basis_vector: String,
}

/// For a dephasing-covariant E : S(H₁ ⊗ H₂) → S(H₁) on n system qubits with
/// ancilla τ, compute σ = E(1/2ⁿ ⊗ Δ(τ)) and return
/// max over basis states ψ of (1 − ⟨ψ|Δ(σ)|ψ⟩). Ties break toward the
/// smallest basis index. The result is guaranteed ≥ 1 − 2⁻ⁿ.
pub fn certified_nogo_bound(
    ch: &QuantumChannel,
    n: usize,
    ancilla: &DensityMatrix,
) -> Result<NogoBound> {
    let sys_dim = 1usize << n;
    if ch.in_dim() != sys_dim * ancilla.dim() || ch.out_dim() != sys_dim {
        return Err(Error::Shape(format!(
            "channel maps {} -> {}, expected {} -> {}",
            ch.in_dim(),
            ch.out_dim(),
            sys_dim * ancilla.dim(),
            sys_dim
        )));
    }
    let dev = coherence::dephasing_covariance_deviation(ch);
    if dev > Tolerances::DEFAULT.superop {
        return Err(Error::NotDephasingCovariant(dev));
    }

    let input = DensityMatrix::maximally_mixed(sys_dim).tensor(&coherence::dephase(ancilla))?;
    let sigma = ch.apply(&input)?;

    let mut best_idx = 0usize;
    let mut best = f64::NEG_INFINITY;
    for x in 0..sys_dim {
        let value = 1.0 - sigma.matrix().get(x, x).re;
        if value > best {
            best = value;
            best_idx = x;
        }
    }
    assert!(
        best >= 1.0 - (1.0 / sys_dim as f64) - Tolerances::DEFAULT.nogo_slack,
        "diagonal bound {best} fell below the guaranteed 1 - 2^-{n}"
    );
    Ok(NogoBound {
        bound: best,
        witness_state: PureState::basis(sys_dim, best_idx)?,
        witness_basis_vector: format!("{best_idx:0n$b}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::channel_tracing_ancilla;
    use crate::circuit::gates;
    use crate::linalg::kron_all;
    use crate::random;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn trace_distance_basics() {
        let mut rng = random::rng_from(1);
        let rho = random::random_mixed_state(4, &mut rng);
        assert!(trace_distance(&rho, &rho).unwrap() < 1e-12);
        let zero = PureState::basis(2, 0).unwrap().density();
        let one = PureState::basis(2, 1).unwrap().density();
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        let plus = PureState::plus().density();
        assert!(
            (trace_distance(&zero, &plus).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10
        );
    }

    #[test]
    fn trace_distance_matches_pure_formula() {
        let mut rng = random::rng_from(2);
        for _ in 0..10 {
            let a = random::haar_state(4, &mut rng);
            let b = random::haar_state(4, &mut rng);
            let d = trace_distance(&a.density(), &b.density()).unwrap();
            let overlap = a.inner(&b).norm_sqr();
            assert!((d - (1.0 - overlap).max(0.0).sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn trace_distance_contractive_under_channels() {
        let mut rng = random::rng_from(3);
        for _ in 0..5 {
            let u = random::haar_unitary(8, &mut rng);
            let tau = random::random_mixed_state(2, &mut rng);
            let ch = channel_tracing_ancilla(&u, &tau, &tol()).unwrap();
            let rho = random::random_mixed_state(4, &mut rng);
            let sigma = random::random_mixed_state(4, &mut rng);
            let before = trace_distance(&rho, &sigma).unwrap();
            let after =
                trace_distance(&ch.apply(&rho).unwrap(), &ch.apply(&sigma).unwrap()).unwrap();
            assert!(after <= before + 1e-9);
        }
    }

    #[test]
    fn identity_vs_itself_is_zero() {
        let id = QuantumChannel::from_unitary(&ComplexMatrix::identity(2), &tol()).unwrap();
        let (value, _) =
            induced_distance_lower(&id, &ComplexMatrix::identity(2), 2000, 0).unwrap();
        assert!(value < 1e-9);
    }

    #[test]
    fn identity_vs_hadamard_reaches_one() {
        let id = QuantumChannel::from_unitary(&ComplexMatrix::identity(2), &tol()).unwrap();
        let (value, witness) =
            induced_distance_lower(&id, &gates::hadamard(), 6000, 0).unwrap();
        assert!(value > 1.0 - 1e-7, "found {value}");
        // the witness has ⟨ψ|H|ψ⟩ = 0
        let h_psi = gates::hadamard().mul_vec(witness.amplitudes()).unwrap();
        let overlap: C64 = witness
            .amplitudes()
            .iter()
            .zip(&h_psi)
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(overlap.norm() < 1e-3);
    }

    #[test]
    fn replace_with_mixed_vs_hadamards_matches_closed_form() {
        for n in 1..=2usize {
            let dim = 1 << n;
            let ch = QuantumChannel::replace_with_maximally_mixed(dim, n, &tol()).unwrap();
            let h = gates::hadamard();
            let hn = if n == 1 { h.clone() } else { kron_all(&[&h, &h]).unwrap() };
            let (value, _) = induced_distance_lower(&ch, &hn, 1500, 0).unwrap();
            let expected = 1.0 - 1.0 / dim as f64;
            assert!((value - expected).abs() < 1e-9, "n={n}: {value} vs {expected}");
        }
    }

    #[test]
    fn certified_bound_replace_with_mixed_is_tight() {
        for n in 1..=3usize {
            let sys = 1usize << n;
            let anc = DensityMatrix::maximally_mixed(2);
            let ch = QuantumChannel::replace_with_maximally_mixed(sys * 2, n, &tol()).unwrap();
            let b = certified_nogo_bound(&ch, n, &anc).unwrap();
            let expected = 1.0 - 1.0 / sys as f64;
            assert!((b.bound - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn certified_bound_picks_smallest_tied_witness() {
        // Constant output |0..0⟩⟨0..0|: basis vector 0 scores 0, every other
        // scores 1; the max rule picks index 1.
        let n = 2usize;
        let sys = 1 << n;
        let target = PureState::basis(sys, 0).unwrap().density();
        let anc = DensityMatrix::maximally_mixed(2);
        let ch = QuantumChannel::constant(sys * 2, &target, &tol()).unwrap();
        let b = certified_nogo_bound(&ch, n, &anc).unwrap();
        assert!((b.bound - 1.0).abs() < 1e-12);
        assert_eq!(b.witness_basis_vector, "01");
    }

    #[test]
    fn certified_bound_rejects_non_covariant() {
        let anc = DensityMatrix::maximally_mixed(1);
        let h2 = gates::hadamard();
        let ch = QuantumChannel::from_unitary(&h2, &tol()).unwrap();
        assert!(matches!(
            certified_nogo_bound(&ch, 1, &anc),
            Err(Error::NotDephasingCovariant(_))
        ));
    }

    #[test]
    fn incoherent_realization_bound_at_least_half() {
        let mut rng = random::rng_from(9);
        for _ in 0..5 {
            let u = random::random_incoherent_unitary(8, &mut rng);
            let tau = random::random_mixed_state(4, &mut rng);
            let full = crate::channel::channel_full_input(&u, 2, &tol()).unwrap();
            let b = certified_nogo_bound(&full, 1, &tau).unwrap();
            assert!(b.bound >= 0.5 - 1e-9);
        }
    }
}
