//! Hermitian eigendecomposition via a cyclic Jacobi scheme.
//!
//! The sweep order is fixed (row-major over the upper triangle), so the
//! decomposition is bit-reproducible across platforms — no LAPACK, no
//! threading nondeterminism. Quadratic convergence makes a handful of sweeps
//! enough at the dimensions used here.

use super::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 128;

/// Eigenvalues (ascending) and a unitary matrix of column eigenvectors
/// satisfying `m = V diag(λ) V†`.
pub fn hermitian_eig(m: &ComplexMatrix, tol_herm: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::Shape("eigendecomposition needs a square matrix".into()));
    }
    let dev = m.hermiticity_deviation();
    if dev > tol_herm {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows();
    let mut a: Vec<C64> = m.entries().to_vec();
    // Symmetrize so rotations see an exactly Hermitian matrix.
    for p in 0..n {
        a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
        for q in (p + 1)..n {
            let avg = (a[p * n + q] + a[q * n + p].conj()) * 0.5;
            a[p * n + q] = avg;
            a[q * n + p] = avg.conj();
        }
    }
    let mut v: Vec<C64> = ComplexMatrix::identity(n).entries().to_vec();

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let threshold = 1e-15 * scale;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[p * n + q];
                let gn = g.norm();
                if gn <= threshold * 1e-2 / (n as f64) {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let w = g / gn; // e^{iφ}
                let tau = (aqq - app) / (2.0 * gn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- R† A R with R = [[c, s·w], [−s·w̄, c]] on rows/cols (p, q).
                let (cs, sw) = (C64::new(c, 0.0), w * s);
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * cs - akq * sw.conj();
                    a[k * n + q] = akp * sw + akq * cs;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * cs - aqk * sw;
                    a[q * n + k] = apk * sw.conj() + aqk * cs;
                }
                // Clamp the rotated pair to exactly Hermitian form.
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = C64::new(a[q * n + q].re, 0.0);
                a[q * n + p] = a[p * n + q].conj();

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * cs - vkq * sw.conj();
                    v[k * n + q] = vkp * sw + vkq * cs;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v[r * n + old_col]);
        }
    }
    Ok((eigenvalues, vectors))
}

/// Trace norm ‖M‖₁ (the sum of singular values) of a square matrix.
///
/// Hermitian inputs take the fast path Σ|λ|; the general case goes through
/// the eigenvalues of M†M.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Shape("trace norm needs a square matrix".into()));
    }
    if m.hermiticity_deviation() <= 1e-12 * m.max_abs().max(1.0) {
        let (eigs, _) = hermitian_eig(m, f64::INFINITY)?;
        return Ok(eigs.iter().map(|l| l.abs()).sum());
    }
    let gram = m.dagger().mul(m)?;
    let (eigs, _) = hermitian_eig(&gram, 1e-9 * gram.max_abs().max(1.0))?;
    Ok(eigs.iter().map(|l| l.max(0.0).sqrt()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{PureState, ONE};
    use crate::random;

    #[test]
    fn trace_norm_zero_matrix() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(trace_norm(&z).unwrap(), 0.0);
    }

    #[test]
    fn trace_norm_diag() {
        let d = ComplexMatrix::from_reim(2, 2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)])
            .unwrap();
        assert!((trace_norm(&d).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_projector_difference() {
        // ‖|0⟩⟨0| − |+⟩⟨+|‖₁ = √2, from the eigenvalues ±1/√2 of the difference.
        let p0 = PureState::basis(2, 0).unwrap().projector();
        let pp = PureState::plus().projector();
        let diff = p0.sub(&pp).unwrap();
        assert!((trace_norm(&diff).unwrap() - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn trace_norm_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(trace_norm(&m).is_err());
    }

    #[test]
    fn trace_norm_unitary_invariance() {
        let mut rng = random::rng_from(11);
        for _ in 0..5 {
            let a = random::haar_unitary(4, &mut rng)
                .scale(C64::new(0.3, 0.7))
                .add(&ComplexMatrix::identity(4))
                .unwrap();
            let u = random::haar_unitary(4, &mut rng);
            let v = random::haar_unitary(4, &mut rng);
            let rotated = u.mul(&a).unwrap().mul(&v).unwrap();
            let n1 = trace_norm(&a).unwrap();
            let n2 = trace_norm(&rotated).unwrap();
            assert!((n1 - n2).abs() < 1e-9, "{n1} vs {n2}");
        }
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let mut rng = random::rng_from(5);
        for dim in [2usize, 3, 5, 8] {
            let g = random::haar_unitary(dim, &mut rng);
            // Hermitian test matrix with a spread spectrum.
            let mut d = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                d.set(i, i, C64::new(i as f64 - 1.3, 0.0));
            }
            let m = g.mul(&d).unwrap().mul(&g.dagger()).unwrap();
            let (eigs, v) = hermitian_eig(&m, 1e-9).unwrap();
            for w in eigs.windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
            // columns orthonormal
            let gram = v.dagger().mul(&v).unwrap();
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-9);
            // reconstruction
            let mut lam = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                lam.set(i, i, C64::new(eigs[i], 0.0));
            }
            let rec = v.mul(&lam).unwrap().mul(&v.dagger()).unwrap();
            assert!(rec.max_abs_diff(&m) < 1e-9);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_reim(2, 2, &[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)])
            .unwrap();
        assert!(matches!(hermitian_eig(&m, 1e-10), Err(Error::NotHermitian(_))));
        let _ = ONE;
    }
}
