//! Polarization coherence of photon pairs.
//!
//! The central quantity is the two-qubit degree of coherence
//! P₂⊗₂ = √((4Trρ² − 1)/3), which runs from 0 for the maximally mixed state
//! to 1 for any pure state. Around it sit its single-qubit counterpart, the
//! SU(4) Stokes decomposition, bounds tying it to Bell violation, discord and
//! concurrence, a sixteen-setting tomography scheme that measures it, and the
//! transfer of coherence from a pump photon into a down-converted pair.

pub mod coherence;
pub mod correlations;
pub mod error;
pub mod linalg;
pub mod pdc;
pub mod states;
pub mod tomography;

pub use coherence::{p2, p2x2, p2x2_x, stokes_decompose, StokesVector};
pub use correlations::{
    audit_bounds, chsh_max, concurrence, geometric_discord, x_state_discord, BoundReport,
    BoundsAudit, ScatterRecord, ScatterSummary,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Subsystem, C64};
pub use pdc::{GenerationChannel, PdcReport};
pub use states::{
    parse_state, BellState, RngSeed, SingleQubitState, State, StateFile, TwoQubitState,
    XStateParams,
};
pub use tomography::{CoincidenceSet, MeasurementSetting, Noise, TomographyReport};
