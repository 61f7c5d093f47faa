//! Simulation of on-demand multi-photon entanglement from distant single-photon
//! sources.
//!
//! Sources are two-level qubits that emit time-bin photons. Two sources are
//! entangled by a repeat-until-success CZ built from a measurement of their
//! photon pair in a basis unbiased with respect to `{E, L}²`. Chains of such
//! gates prepare matrix-product states, which are then mapped onto photons.
//! [`interference`] covers the angular emission pattern of two driven atoms.

pub mod cli;
pub mod error;
pub mod gates;
pub mod interference;
pub mod mps;
pub mod mubgate;
pub mod photonics;
pub mod qstate;
pub mod rng;

pub use error::{Error, Result};
pub use mps::{prepare_mps, prepare_via_rus, preset_recipe, preset_target, MpsRecipe, PresetKind};
pub use mubgate::{mub_pair_basis, rus_cz, rus_cz_lossy, GateTranscript, LossModel};
pub use photonics::map_all_sources;
pub use qstate::{fidelity_up_to_phase, StateVector, SubsystemId, SubsystemLayout};
