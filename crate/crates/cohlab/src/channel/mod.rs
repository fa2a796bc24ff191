//! Quantum channels and subchannels in Kraus form.
//!
//! A channel may carry a *realization*: a unitary acting on the input joined
//! with a fixed ancilla, followed by a partial trace over chosen subsystems.
//! Channels built that way keep the realization around so tests can compare
//! the two evaluation paths. Subchannels arise from projecting the traced
//! subsystems onto a computational-basis outcome before tracing: they are
//! trace non-increasing, and summing them over all outcomes recovers the
//! channel.

mod choi;
mod distance;

pub use choi::{as_unitary, choi, choi_distance, unitary_channel_choi_distance, ChoiMatrix};
pub use distance::{
    certified_nogo_bound, induced_distance_lower, trace_distance, NogoBound, OptimizerOptions,
};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, DensityMatrix, C64, ZERO};

/// Unitary-plus-ancilla presentation of a channel.
#[derive(Debug, Clone)]
pub struct Realization {
    /// Acts on the input tensored with the ancilla.
    pub unitary: ComplexMatrix,
    pub ancilla: DensityMatrix,
    /// Factorization of the unitary's dimension into subsystems.
    pub subsystem_dims: Vec<usize>,
    /// Indices of the subsystems that get traced out (or measured).
    pub traced: Vec<usize>,
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
    realization: Option<Realization>,
}

/// Completely positive trace non-increasing map attached to a measurement
/// outcome.
#[derive(Debug, Clone)]
pub struct SubChannel {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<ComplexMatrix>,
    /// Computational-basis outcome on the measured subsystems.
    pub outcome_label: String,
}

impl QuantumChannel {
    /// Build from Kraus operators, enforcing Σ K†K = 1 within `tol.unitary`.
    pub fn from_kraus(kraus: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::Shape("no Kraus operators".into()))?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        for k in &kraus {
            if k.rows() != out_dim || k.cols() != in_dim {
                return Err(Error::Shape("Kraus operators must share a shape".into()));
            }
        }
        let sum = kraus_gram(&kraus)?;
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(in_dim));
        if dev > tol.unitary {
            return Err(Error::Shape(format!(
                "Kraus operators are not trace preserving (deviation {dev:.3e})"
            )));
        }
        Ok(Self { in_dim, out_dim, kraus, realization: None })
    }

    /// The unitary channel ρ ↦ UρU†.
    pub fn from_unitary(u: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let dev = u.unitarity_deviation();
        if dev > tol.unitary {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self {
            in_dim: u.cols(),
            out_dim: u.rows(),
            kraus: vec![u.clone()],
            realization: None,
        })
    }

    /// The constant channel ρ ↦ σ · tr(ρ).
    pub fn constant(in_dim: usize, sigma: &DensityMatrix, tol: &Tolerances) -> Result<Self> {
        let (eigs, vecs) = hermitian_eig(sigma.matrix(), tol.herm.max(1e-9))?;
        let d_out = sigma.dim();
        let mut kraus = Vec::new();
        for (j, &lambda) in eigs.iter().enumerate() {
            if lambda < tol.kraus_drop {
                continue;
            }
            let w = lambda.sqrt();
            for col in 0..in_dim {
                let mut k = ComplexMatrix::zeros(d_out, in_dim);
                for r in 0..d_out {
                    k.set(r, col, vecs.get(r, j) * w);
                }
                kraus.push(k);
            }
        }
        Self::from_kraus(kraus, tol)
    }

    /// ρ ↦ 1/2ⁿ · tr(ρ).
    pub fn replace_with_maximally_mixed(in_dim: usize, n_out: usize, tol: &Tolerances) -> Result<Self> {
        Self::constant(in_dim, &DensityMatrix::maximally_mixed(1 << n_out), tol)
    }

    /// The dephasing channel on dimension d.
    pub fn dephasing(d: usize) -> Self {
        let kraus = (0..d)
            .map(|i| {
                let mut k = ComplexMatrix::zeros(d, d);
                k.set(i, i, C64::new(1.0, 0.0));
                k
            })
            .collect();
        Self { in_dim: d, out_dim: d, kraus, realization: None }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn realization(&self) -> Option<&Realization> {
        self.realization.as_ref()
    }

    /// Σ K ρ K†.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.in_dim {
            return Err(Error::Shape(format!(
                "channel input dim {} vs state dim {}",
                self.in_dim,
                rho.dim()
            )));
        }
        let m = kraus_apply(&self.kraus, rho.matrix())?;
        // Output of a CPTP map on a density matrix is a density matrix;
        // symmetrize round-off before validating.
        let sym = m.add(&m.dagger())?.scale(C64::new(0.5, 0.0));
        DensityMatrix::new(sym, &Tolerances::DEFAULT)
    }

    /// Linear action on an arbitrary (not necessarily Hermitian) matrix.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        kraus_apply(&self.kraus, m)
    }

    /// Evaluate through the stored realization instead of the Kraus list.
    pub fn apply_via_realization(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let r = self
            .realization
            .as_ref()
            .ok_or_else(|| Error::Shape("channel has no realization".into()))?;
        let joint = rho.tensor(&r.ancilla)?;
        let evolved = joint.conjugate_by(&r.unitary)?;
        let keep: Vec<usize> = (0..r.subsystem_dims.len())
            .filter(|i| !r.traced.contains(i))
            .collect();
        evolved.partial_trace(&r.subsystem_dims, &keep)
    }

    /// Superoperator matrix in the column-stacking convention:
    /// vec(E(ρ)) = S · vec(ρ) with S = Σ K̄ ⊗ K.
    pub fn superoperator(&self) -> ComplexMatrix {
        kraus_superoperator(&self.kraus, self.in_dim, self.out_dim)
    }
}

/// Σ K†K for a Kraus list.
pub fn kraus_gram(kraus: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let first = kraus.first().ok_or_else(|| Error::Shape("no Kraus operators".into()))?;
    let mut sum = ComplexMatrix::zeros(first.cols(), first.cols());
    for k in kraus {
        sum = sum.add(&k.dagger().mul(k)?)?;
    }
    Ok(sum)
}

pub fn kraus_apply(kraus: &[ComplexMatrix], m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let first = kraus.first().ok_or_else(|| Error::Shape("no Kraus operators".into()))?;
    let mut out = ComplexMatrix::zeros(first.rows(), first.rows());
    for k in kraus {
        out = out.add(&k.mul(m)?.mul(&k.dagger())?)?;
    }
    Ok(out)
}

pub fn kraus_superoperator(kraus: &[ComplexMatrix], in_dim: usize, out_dim: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(out_dim * out_dim, in_dim * in_dim);
    for k in kraus {
        let term = k.conjugate().kron(k).expect("kron within limits");
        s = s.add(&term).expect("shape");
    }
    s
}

/// Apply a superoperator (column-stacking) to a matrix.
pub fn superop_apply(s: &ComplexMatrix, m: &ComplexMatrix, out_dim: usize) -> ComplexMatrix {
    let in_dim = m.rows();
    let mut v = vec![ZERO; in_dim * in_dim];
    for c in 0..in_dim {
        for r in 0..in_dim {
            v[c * in_dim + r] = m.get(r, c);
        }
    }
    let w = s.mul_vec(&v).expect("shape");
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for c in 0..out_dim {
        for r in 0..out_dim {
            out.set(r, c, w[c * out_dim + r]);
        }
    }
    out
}

struct TracedLayout {
    subsystem_dims: Vec<usize>,
    traced: Vec<usize>,
    kept_total: usize,
    traced_total: usize,
    strides: Vec<usize>,
    kept: Vec<usize>,
}

impl TracedLayout {
    fn new(subsystem_dims: &[usize], traced: &[usize], total: usize) -> Result<Self> {
        let prod: usize = subsystem_dims.iter().product();
        if prod != total {
            return Err(Error::Shape(format!(
                "subsystem dims {subsystem_dims:?} do not multiply to {total}"
            )));
        }
        let mut traced = traced.to_vec();
        traced.sort_unstable();
        traced.dedup();
        if traced.iter().any(|&t| t >= subsystem_dims.len()) {
            return Err(Error::Shape("traced index out of range".into()));
        }
        let kept: Vec<usize> = (0..subsystem_dims.len()).filter(|i| !traced.contains(i)).collect();
        let mut strides = vec![1usize; subsystem_dims.len()];
        for i in (0..subsystem_dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * subsystem_dims[i + 1];
        }
        let kept_total = kept.iter().map(|&i| subsystem_dims[i]).product();
        let traced_total = traced.iter().map(|&i| subsystem_dims[i]).product();
        Ok(Self {
            subsystem_dims: subsystem_dims.to_vec(),
            traced,
            kept_total,
            traced_total,
            strides,
            kept,
        })
    }

    /// Full row index from a kept index and a traced index.
    fn row(&self, kept_index: usize, traced_index: usize) -> usize {
        let mut row = 0usize;
        let mut k = kept_index;
        for &s in self.kept.iter().rev() {
            let d = self.subsystem_dims[s];
            row += (k % d) * self.strides[s];
            k /= d;
        }
        let mut t = traced_index;
        for &s in self.traced.iter().rev() {
            let d = self.subsystem_dims[s];
            row += (t % d) * self.strides[s];
            t /= d;
        }
        row
    }
}

fn realization_kraus(
    u: &ComplexMatrix,
    ancilla: &DensityMatrix,
    layout: &TracedLayout,
    outcome: Option<usize>,
    tol: &Tolerances,
) -> Result<Vec<ComplexMatrix>> {
    let total = u.rows();
    let anc_dim = ancilla.dim();
    let in_dim = total / anc_dim;
    if in_dim * anc_dim != total {
        return Err(Error::Shape(format!(
            "unitary dim {total} is not divisible by ancilla dim {anc_dim}"
        )));
    }
    let (eigs, vecs) = hermitian_eig(ancilla.matrix(), tol.herm.max(1e-9))?;
    let out_dim = layout.kept_total;

    let outcomes: Vec<usize> = match outcome {
        Some(x) => vec![x],
        None => (0..layout.traced_total).collect(),
    };

    let mut kraus = Vec::new();
    for (j, &lambda) in eigs.iter().enumerate() {
        if lambda < tol.kraus_drop {
            continue;
        }
        let w = lambda.max(0.0).sqrt();
        for &x in &outcomes {
            let mut k = ComplexMatrix::zeros(out_dim, in_dim);
            for r in 0..out_dim {
                let urow = layout.row(r, x);
                for s in 0..in_dim {
                    let mut acc = ZERO;
                    for a in 0..anc_dim {
                        acc += u.get(urow, s * anc_dim + a) * vecs.get(a, j);
                    }
                    k.set(r, s, acc * w);
                }
            }
            if k.frobenius_norm() >= tol.kraus_drop {
                kraus.push(k);
            }
        }
    }
    if kraus.is_empty() {
        // Keep at least one (zero) operator so shapes stay meaningful.
        kraus.push(ComplexMatrix::zeros(out_dim, in_dim));
    }
    Ok(kraus)
}

/// Channel E(ρ) = Tr_X( U (ρ ⊗ τ) U† ).
///
/// `subsystem_dims` factorizes the joint space the unitary acts on (input
/// factors first, then ancilla factors, matching the ρ ⊗ τ layout) and
/// `traced` lists the subsystems removed by the partial trace.
pub fn channel_from_realization(
    u: &ComplexMatrix,
    ancilla: &DensityMatrix,
    subsystem_dims: &[usize],
    traced: &[usize],
    tol: &Tolerances,
) -> Result<QuantumChannel> {
    let dev = u.unitarity_deviation();
    if dev > tol.unitary {
        return Err(Error::NotUnitary(dev));
    }
    let layout = TracedLayout::new(subsystem_dims, traced, u.rows())?;
    let kraus = realization_kraus(u, ancilla, &layout, None, tol)?;
    let in_dim = u.rows() / ancilla.dim();
    let mut ch = QuantumChannel::from_kraus(kraus, tol)?;
    debug_assert_eq!(ch.in_dim, in_dim);
    ch.realization = Some(Realization {
        unitary: u.clone(),
        ancilla: ancilla.clone(),
        subsystem_dims: subsystem_dims.to_vec(),
        traced: layout.traced.clone(),
    });
    Ok(ch)
}

/// Convenience: trace out the whole ancilla register (the ρ ⊗ τ split).
pub fn channel_tracing_ancilla(
    u: &ComplexMatrix,
    ancilla: &DensityMatrix,
    tol: &Tolerances,
) -> Result<QuantumChannel> {
    let in_dim = u.rows() / ancilla.dim();
    channel_from_realization(u, ancilla, &[in_dim, ancilla.dim()], &[1], tol)
}

/// The map ρ ↦ Tr₂(U ρ U†) on the *joint* input (both registers are part of
/// the channel input; nothing is fixed). `sys_dim` is the kept register.
pub fn channel_full_input(
    u: &ComplexMatrix,
    sys_dim: usize,
    tol: &Tolerances,
) -> Result<QuantumChannel> {
    let rest = u.rows() / sys_dim;
    if sys_dim * rest != u.rows() {
        return Err(Error::Shape(format!(
            "system dim {sys_dim} does not divide unitary dim {}",
            u.rows()
        )));
    }
    channel_from_realization(
        u,
        &DensityMatrix::maximally_mixed(1),
        &[sys_dim, rest],
        &[1],
        tol,
    )
}

/// Subchannel Eˣ(ρ) = Tr_X( (1 ⊗ |x⟩⟨x|) U (ρ ⊗ τ) U† ) for outcome `x`
/// over the traced subsystems' joint basis.
pub fn subchannel_from_realization(
    u: &ComplexMatrix,
    ancilla: &DensityMatrix,
    subsystem_dims: &[usize],
    traced: &[usize],
    outcome: usize,
    tol: &Tolerances,
) -> Result<SubChannel> {
    let dev = u.unitarity_deviation();
    if dev > tol.unitary {
        return Err(Error::NotUnitary(dev));
    }
    let layout = TracedLayout::new(subsystem_dims, traced, u.rows())?;
    if outcome >= layout.traced_total {
        return Err(Error::Shape(format!(
            "outcome {outcome} out of range for traced dimension {}",
            layout.traced_total
        )));
    }
    let kraus = realization_kraus(u, ancilla, &layout, Some(outcome), tol)?;
    let in_dim = u.rows() / ancilla.dim();
    let out_dim = layout.kept_total;

    // Trace non-increasing: max eigenvalue of Σ K†K must not exceed 1.
    let gram = kraus_gram(&kraus)?;
    let (eigs, _) = hermitian_eig(&gram, 1e-9)?;
    if let Some(max) = eigs.last() {
        if *max > 1.0 + tol.unitary {
            return Err(Error::Shape(format!("subchannel is trace increasing ({max})")));
        }
    }

    let width = layout
        .traced
        .iter()
        .map(|&i| (usize::BITS - (layout.subsystem_dims[i] - 1).leading_zeros()) as usize)
        .sum::<usize>()
        .max(1);
    Ok(SubChannel {
        in_dim,
        out_dim,
        kraus,
        outcome_label: format!("{outcome:0width$b}"),
    })
}

impl SubChannel {
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        kraus_apply(&self.kraus, m)
    }

    pub fn superoperator(&self) -> ComplexMatrix {
        kraus_superoperator(&self.kraus, self.in_dim, self.out_dim)
    }

    /// Σ K†K; equals c·1 exactly when the acceptance probability does not
    /// depend on the input.
    pub fn gram(&self) -> Result<ComplexMatrix> {
        kraus_gram(&self.kraus)
    }

    /// If tr(Eˣ(ρ)) is input-independent, returns the constant probability;
    /// the deviation is max |Σ K†K − c·1|.
    pub fn constant_acceptance(&self, tol: f64) -> Result<Option<f64>> {
        let gram = self.gram()?;
        let c = gram.trace().re / self.in_dim as f64;
        let dev = gram.max_abs_diff(&ComplexMatrix::identity(self.in_dim).scale(C64::new(c, 0.0)));
        Ok(if dev <= tol { Some(c) } else { None })
    }

    /// Rescale a constant-acceptance subchannel into a channel.
    pub fn normalized(&self, tol: &Tolerances) -> Result<Option<QuantumChannel>> {
        let Some(c) = self.constant_acceptance(tol.unitary)? else {
            return Ok(None);
        };
        if c <= tol.unitary {
            return Ok(None);
        }
        let scale = C64::new(1.0 / c.sqrt(), 0.0);
        let kraus: Vec<ComplexMatrix> = self.kraus.iter().map(|k| k.scale(scale)).collect();
        Ok(Some(QuantumChannel::from_kraus(kraus, tol)?))
    }
}
