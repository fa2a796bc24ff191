//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything is stored row-major in a flat `Vec<Complex<f64>>`. At the
//! dimensions this crate targets (statevectors up to 2¹², operators up to a
//! few hundred) dense storage is simpler and fast enough, and it keeps Choi
//! and superoperator manipulation uniform.
//!
//! All values are immutable after construction; operations are pure functions
//! and safe to call from any thread.

mod eig;
mod state;

pub use eig::{hermitian_eig, trace_norm};
pub use state::{DensityMatrix, PureState};

use crate::error::{Error, Result, MAX_DIM};

pub type C64 = num_complex::Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Build from a flat row-major entry list. Rejects shape mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::DimensionLimit(rows.max(cols)));
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(format!("matrix entry {k} is {z}")));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Convenience constructor from (re, im) pairs, row-major.
    pub fn from_reim(rows: usize, cols: usize, entries: &[(f64, f64)]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&(re, im)| C64::new(re, im)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn conjugate(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let lhs_row = r * rhs.cols;
                let rhs_row = k * rhs.cols;
                for c in 0..rhs.cols {
                    out.data[lhs_row + c] += a * rhs.data[rhs_row + c];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![ZERO; self.rows];
        for r in 0..self.rows {
            let mut acc = ZERO;
            let base = r * self.cols;
            for c in 0..self.cols {
                acc += self.data[base + c] * v[c];
            }
            out[r] = acc;
        }
        Ok(out)
    }

    pub fn trace(&self) -> C64 {
        let d = self.rows.min(self.cols);
        (0..d).map(|i| self.data[i * self.cols + i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max entry of |A − B|; shape mismatch counts as infinite.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max entry of |A − A†|. Zero for Hermitian matrices.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Max entry of |m†m − 1|. Zero for unitaries.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.dagger().mul(self).expect("square");
        gram.max_abs_diff(&Self::identity(self.rows))
    }

    /// True iff ‖m†m − 1‖_max ≤ tol.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitarity_deviation() <= tol
    }

    /// Kronecker product. Dimensions beyond the configured limit are refused.
    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let rows = self.rows.checked_mul(rhs.rows).ok_or(Error::DimensionLimit(usize::MAX))?;
        let cols = self.cols.checked_mul(rhs.cols).ok_or(Error::DimensionLimit(usize::MAX))?;
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::DimensionLimit(rows.max(cols)));
        }
        let mut out = Self::zeros(rows, cols);
        for ra in 0..self.rows {
            for ca in 0..self.cols {
                let a = self.get(ra, ca);
                if a == ZERO {
                    continue;
                }
                for rb in 0..rhs.rows {
                    let out_r = ra * rhs.rows + rb;
                    for cb in 0..rhs.cols {
                        out.data[out_r * cols + ca * rhs.cols + cb] = a * rhs.get(rb, cb);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Equality up to a global phase, for unitaries of equal dimension:
    /// |tr(A†B)|/d ≥ 1 − tol.
    pub fn phase_equal(&self, rhs: &Self, tol: f64) -> bool {
        if self.rows != rhs.rows || self.cols != rhs.cols || !self.is_square() {
            return false;
        }
        let d = self.rows as f64;
        let overlap: C64 = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.conj() * b)
            .sum();
        overlap.norm() / d >= 1.0 - tol
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                let z = self.get(r, c);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all(mats: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let mut iter = mats.iter();
    let first = iter.next().ok_or_else(|| Error::Shape("empty kron".into()))?;
    let mut acc = (*first).clone();
    for m in iter {
        acc = acc.kron(m)?;
    }
    Ok(acc)
}

/// Partial trace of a square matrix over the subsystems *not* in `keep`.
///
/// `dims` factorizes the total dimension; `keep` lists, in ascending order of
/// subsystem index, the subsystems retained in the output.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Shape("partial trace needs a square matrix".into()));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() {
        return Err(Error::Shape(format!(
            "subsystem dims {:?} do not multiply to {}",
            dims,
            m.rows()
        )));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Shape("keep index out of range".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();

    let keep_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let keep_total: usize = keep_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // Strides of each subsystem within the flat index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    let compose = |subs: &[usize], digits: &[usize]| -> usize {
        subs.iter().zip(digits).map(|(&s, &d)| strides[s] * d).sum()
    };
    let digits_of = |mut x: usize, sub_dims: &[usize]| -> Vec<usize> {
        let mut out = vec![0; sub_dims.len()];
        for i in (0..sub_dims.len()).rev() {
            out[i] = x % sub_dims[i];
            x /= sub_dims[i];
        }
        out
    };

    let mut out = ComplexMatrix::zeros(keep_total, keep_total);
    for rk in 0..keep_total {
        let rk_digits = digits_of(rk, &keep_dims);
        let r_base = compose(&keep, &rk_digits);
        for ck in 0..keep_total {
            let ck_digits = digits_of(ck, &keep_dims);
            let c_base = compose(&keep, &ck_digits);
            let mut acc = ZERO;
            for t in 0..traced_total {
                let t_digits = digits_of(t, &traced_dims);
                let offset = compose(&traced, &t_digits);
                acc += m.get(r_base + offset, c_base + offset);
            }
            out.set(rk, ck, acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gates;

    #[test]
    fn kron_identity_case() {
        let i2 = ComplexMatrix::identity(2);
        let i4 = i2.kron(&i2).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_basis_projectors() {
        let p0 = PureState::basis(2, 0).unwrap().projector();
        let p1 = PureState::basis(2, 1).unwrap().projector();
        let p01 = p0.kron(&p1).unwrap();
        let expected = PureState::basis(4, 1).unwrap().projector();
        assert!(p01.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn kron_hh_on_00() {
        // H ⊗ H applied to |00⟩ gives the uniform superposition; the expected
        // vector is the hand-computed 4x4 matrix-vector product.
        let h = gates::gate_matrix("H").unwrap();
        let hh = h.kron(&h).unwrap();
        let v = hh.mul_vec(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        for amp in v {
            assert!((amp - C64::new(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn kron_dimension_limit() {
        let big = ComplexMatrix::identity(128);
        let err = big.kron(&ComplexMatrix::identity(64)).unwrap_err();
        assert!(matches!(err, Error::DimensionLimit(8192)));
    }

    #[test]
    fn partial_trace_product_state() {
        let p00 = PureState::basis(4, 0).unwrap().projector();
        let reduced = partial_trace_matrix(&p00, &[2, 2], &[0]).unwrap();
        let p0 = PureState::basis(2, 0).unwrap().projector();
        assert!(reduced.max_abs_diff(&p0) < 1e-15);
    }

    #[test]
    fn partial_trace_bell_marginal() {
        let bell = PureState::phi_plus().projector();
        let reduced = partial_trace_matrix(&bell, &[2, 2], &[0]).unwrap();
        let half = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
        assert!(reduced.max_abs_diff(&half) < 1e-12);
    }

    #[test]
    fn partial_trace_shape_error() {
        let m = ComplexMatrix::identity(6);
        assert!(partial_trace_matrix(&m, &[2, 2], &[0]).is_err());
    }

    #[test]
    fn unitarity_check() {
        let h = gates::gate_matrix("H").unwrap();
        assert!(h.is_unitary(1e-12));
        let singular = ComplexMatrix::from_reim(2, 2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]).unwrap();
        assert!(!singular.is_unitary(1e-6));
    }

    #[test]
    fn product_of_gates_is_unitary() {
        let h = gates::gate_matrix("H").unwrap();
        let s = gates::gate_matrix("S").unwrap();
        let cnot = gates::gate_matrix("CNOT").unwrap();
        let i2 = ComplexMatrix::identity(2);
        let a = kron_all(&[&h, &s, &i2]).unwrap();
        let b = cnot.kron(&i2).unwrap();
        let c = i2.kron(&cnot).unwrap();
        let m = a.mul(&b).unwrap().mul(&c).unwrap();
        // explicit m†m check
        let gram = m.dagger().mul(&m).unwrap();
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-12);
        assert!(m.is_unitary(1e-9));
    }

    #[test]
    fn non_finite_rejected() {
        let err = ComplexMatrix::new(1, 1, vec![C64::new(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }
}
