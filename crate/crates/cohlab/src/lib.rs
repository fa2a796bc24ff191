//! Toolkit for studying how much coherence quantum operations can generate.
//!
//! The crate simulates small quantum circuits and channels at desk scale and
//! verifies, numerically and reproducibly, a family of no-go statements about
//! implementing basis-changing unitaries (such as the Hadamard gate) from
//! incoherent resources: permutation-plus-phase unitaries, classical control,
//! computational-basis measurements, and an arbitrary ancilla state.
//!
//! The layers, bottom up:
//!
//! * [`linalg`] — dense complex matrices, pure states, density matrices, and
//!   a deterministic Hermitian eigensolver.
//! * [`coherence`] — the dephasing map, incoherence classification for
//!   states/unitaries/channels, and the coherence rank.
//! * [`channel`] — channels in Kraus form with optional unitary-plus-ancilla
//!   realizations, Choi calculus, trace-distance machinery, a multistart
//!   input-state optimizer, and the certified diagonal lower bound.
//! * [`circuit`] — a small circuit IR with a text format, statevector
//!   simulation with measurement branching and classical control, the
//!   deferred-measurement rewrite, and the gadget library.
//! * [`harness`] — randomized verification campaigns that produce structured,
//!   seed-reproducible reports.
//!
//! Campaign trials and optimizer starts are data-parallel. The `parallel`
//! feature (on by default) runs them on a rayon pool; disabling it falls back
//! to sequential execution with identical results.

pub mod channel;
pub mod circuit;
pub mod coherence;
pub mod config;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod par;
pub mod random;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, PureState, C64};
