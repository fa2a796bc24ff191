//! Central tolerance configuration.
//!
//! Every statement this crate checks is exact in exact arithmetic; the values
//! here only absorb floating-point error. All comparisons elsewhere take their
//! thresholds from a [`Tolerances`] record so campaigns can tighten or relax
//! them uniformly.

/// Numerical tolerances used across the toolkit.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// State normalisation: |Σ|aᵢ|² − 1|.
    pub norm: f64,
    /// Hermiticity: max entry of |A − A†|.
    pub herm: f64,
    /// Eigenvalue floor when checking positive semidefiniteness.
    pub psd: f64,
    /// Unitarity: max entry of |U†U − 1|.
    pub unitary: f64,
    /// Superoperator equality, checked entrywise on the matrix-unit basis.
    pub superop: f64,
    /// Choi trace distance below which two channels count as equal.
    pub choi: f64,
    /// Amplitude-magnitude threshold for the coherence rank.
    pub rank: f64,
    /// Global-phase-insensitive gate equality: 1 − |tr(A†B)|/d.
    pub phase_eq: f64,
    /// Kraus operators below this Frobenius norm are dropped.
    pub kraus_drop: f64,
    /// Measurement branches below this probability are pruned.
    pub branch_prune: f64,
    /// Slack allowed on certified no-go bounds.
    pub nogo_slack: f64,
    /// Minimum improvement per ascent pass before the step size halves.
    pub ascent_improvement: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        norm: 1e-10,
        herm: 1e-10,
        psd: 1e-10,
        unitary: 1e-9,
        superop: 1e-9,
        choi: 1e-9,
        rank: 1e-9,
        phase_eq: 1e-9,
        kraus_drop: 1e-12,
        branch_prune: 1e-12,
        nogo_slack: 1e-9,
        ascent_improvement: 1e-10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
