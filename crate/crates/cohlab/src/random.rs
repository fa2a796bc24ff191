//! Seed-derived random generators for states and unitaries.
//!
//! Everything runs on ChaCha streams so that campaigns are reproducible
//! across platforms and thread schedules. Per-trial generators are derived
//! from a master seed and the trial index with a splitmix-style mix.

use crate::linalg::{ComplexMatrix, DensityMatrix, PureState, C64, ZERO};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Prng = ChaCha8Rng;

pub fn rng_from(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

/// Deterministic sub-seed for work item `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn standard_complex(rng: &mut Prng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random pure state.
pub fn haar_state(dim: usize, rng: &mut Prng) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| standard_complex(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix with positive
/// diagonal phase fixing.
pub fn haar_unitary(dim: usize, rng: &mut Prng) -> ComplexMatrix {
    loop {
        let cols: Vec<Vec<C64>> = (0..dim)
            .map(|_| (0..dim).map(|_| standard_complex(rng)).collect())
            .collect();
        if let Some(u) = gram_schmidt(cols) {
            return u;
        }
    }
}

fn gram_schmidt(mut cols: Vec<Vec<C64>>) -> Option<ComplexMatrix> {
    let dim = cols.len();
    for j in 0..dim {
        for k in 0..j {
            let proj: C64 = cols[k]
                .iter()
                .zip(&cols[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            for i in 0..dim {
                let sub = proj * cols[k][i];
                cols[j][i] -= sub;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        // Fix the phase so the result is a deterministic function of the input.
        let pivot = cols[j][j];
        let phase = if pivot.norm() > 1e-12 { pivot / pivot.norm() } else { C64::new(1.0, 0.0) };
        let scale = phase.conj() / norm;
        for z in cols[j].iter_mut() {
            *z *= scale;
        }
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            m.set(i, j, *z);
        }
    }
    Some(m)
}

/// Uniformly random permutation of `0..n`.
pub fn random_permutation(n: usize, rng: &mut Prng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Random incoherent unitary Σₓ e^{iθₓ}|π(x)⟩⟨x| from a uniform permutation
/// and uniform phases.
pub fn random_incoherent_unitary(dim: usize, rng: &mut Prng) -> ComplexMatrix {
    let perm = random_permutation(dim, rng);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (x, &px) in perm.iter().enumerate() {
        let theta: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        m.set(px, x, C64::from_polar(1.0, theta));
    }
    m
}

/// Random full-rank mixed state GG†/tr(GG†) from a Ginibre G.
pub fn random_mixed_state(dim: usize, rng: &mut Prng) -> DensityMatrix {
    let g: Vec<C64> = (0..dim * dim).map(|_| standard_complex(rng)).collect();
    let gmat = ComplexMatrix::new(dim, dim, g).expect("finite");
    let w = gmat.mul(&gmat.dagger()).expect("square");
    let tr = w.trace().re;
    let rho = w.scale(C64::new(1.0 / tr, 0.0));
    // Symmetrize away round-off before constructing.
    let sym = rho
        .add(&rho.dagger())
        .expect("shape")
        .scale(C64::new(0.5, 0.0));
    DensityMatrix::new(sym, &crate::config::Tolerances::DEFAULT).expect("valid by construction")
}

/// Random state supported on `support` randomly chosen basis vectors.
pub fn random_sparse_state(dim: usize, support: usize, rng: &mut Prng) -> PureState {
    let support = support.clamp(1, dim);
    let positions = random_permutation(dim, rng);
    let mut v = vec![ZERO; dim];
    for &p in positions.iter().take(support) {
        // Keep magnitudes well away from the rank threshold.
        let mag = rng.gen_range(0.2..1.0);
        let phase = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        v[p] = C64::from_polar(mag, phase);
    }
    PureState::normalized(v).expect("nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from(0);
        for dim in [2, 3, 8] {
            let u = haar_unitary(dim, &mut rng);
            assert!(u.is_unitary(1e-10));
        }
    }

    #[test]
    fn incoherent_unitary_is_monomial() {
        let mut rng = rng_from(1);
        let u = random_incoherent_unitary(8, &mut rng);
        assert!(u.is_unitary(1e-12));
        for c in 0..8 {
            let nonzero = (0..8).filter(|&r| u.get(r, c).norm() > 1e-12).count();
            assert_eq!(nonzero, 1);
        }
    }

    #[test]
    fn mixed_state_full_rank() {
        let mut rng = rng_from(2);
        let rho = random_mixed_state(4, &mut rng);
        let eigs = rho.eigenvalues(&crate::config::Tolerances::DEFAULT).unwrap();
        assert!(eigs.iter().all(|&l| l > 1e-6));
        assert!((eigs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn derive_seed_spreads() {
        let a = derive_seed(0, 0);
        let b = derive_seed(0, 1);
        let c = derive_seed(1, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sparse_state_has_requested_support() {
        let mut rng = rng_from(9);
        let s = random_sparse_state(16, 5, &mut rng);
        let nz = s.amplitudes().iter().filter(|a| a.norm() > 1e-9).count();
        assert_eq!(nz, 5);
    }
}
