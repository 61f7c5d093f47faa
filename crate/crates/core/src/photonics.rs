//! Photon emission from single-photon sources onto time-bin qubits.
//!
//! Two maps are provided. *Encoding* copies the source qubit into a new photon
//! while the source keeps its qubit (`α|0⟩+β|1⟩ → α|0;E⟩+β|1;L⟩`). *Mapping*
//! transfers the qubit to the photon and leaves the source parked in `|u⟩`
//! (`α|0⟩+β|1⟩ → |u⟩⊗(α|E⟩+β|L⟩)`). Both are applied as ideal isometries.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{LocalUnitary, StateVector, SubsystemId, SubsystemKind};

/// Emission slot of a time-bin photon. Photon subsystems use the basis order
/// `(E, L)`, which coincides with the source order `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeBin {
    #[serde(rename = "E")]
    Early,
    #[serde(rename = "L")]
    Late,
}

impl TimeBin {
    /// Time bin that carries source level `bit`.
    pub fn from_bit(bit: usize) -> Self {
        if bit == 0 {
            TimeBin::Early
        } else {
            TimeBin::Late
        }
    }

    pub fn bit(self) -> usize {
        match self {
            TimeBin::Early => 0,
            TimeBin::Late => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmissionMode {
    Encode,
    Map,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmissionReport {
    pub source: SubsystemId,
    /// `None` when the emission failed and no photon exists.
    pub photon: Option<SubsystemId>,
    pub mode: EmissionMode,
    pub succeeded: bool,
}

const EARLY: [C64; 2] = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];

fn require_active_source(state: &StateVector, source: SubsystemId) -> Result<()> {
    match state.layout().get(source) {
        None => Err(Error::Target(format!("unknown subsystem {source}"))),
        Some(e) if e.kind != SubsystemKind::Source => Err(Error::Target(format!("{source} is not a source"))),
        Some(e) if e.parked => Err(Error::Target(format!("source {source} is parked"))),
        Some(_) => Ok(()),
    }
}

/// Double-encode the source qubit into a newly generated photon.
pub fn encode_qubit_to_photon(state: &StateVector, source: SubsystemId) -> Result<(StateVector, EmissionReport)> {
    require_active_source(state, source)?;
    let (with_photon, photon) = state.append(SubsystemKind::Photon, EARLY);
    let out = with_photon.apply_unitary(&LocalUnitary::cnot(source, photon)?)?;
    Ok((
        out,
        EmissionReport { source, photon: Some(photon), mode: EmissionMode::Encode, succeeded: true },
    ))
}

/// Transfer the source qubit onto a newly generated photon and park the source.
pub fn map_source_to_photon(state: &StateVector, source: SubsystemId) -> Result<(StateVector, EmissionReport)> {
    require_active_source(state, source)?;
    let (with_photon, photon) = state.append(SubsystemKind::Photon, EARLY);
    let swapped = with_photon.apply_unitary(&LocalUnitary::swap(source, photon)?)?;
    let out = swapped.discard_parked(source).map_err(|e| match e {
        Error::Entanglement(id) => Error::Internal(format!("source {id} still entangled after mapping")),
        other => other,
    })?;
    Ok((
        out,
        EmissionReport { source, photon: Some(photon), mode: EmissionMode::Map, succeeded: true },
    ))
}

/// Map every active source, in layout order, onto its own photon. The photons
/// carry the source coefficients with `0 → E` and `1 → L`.
pub fn map_all_sources(state: &StateVector) -> Result<(StateVector, Vec<EmissionReport>)> {
    let sources = state.layout().active_of_kind(SubsystemKind::Source);
    if sources.is_empty() {
        return Err(Error::Target("no active source to map".into()));
    }
    let mut current = state.clone();
    let mut reports = Vec::with_capacity(sources.len());
    for source in sources {
        let (next, report) = map_source_to_photon(&current, source)?;
        current = next;
        reports.push(report);
    }
    Ok((current, reports))
}

/// Heralded readout: `true` iff the source sits in `|u⟩`, i.e. it has emitted
/// its mapped photon.
pub fn readout_source(state: &StateVector, source: SubsystemId) -> Result<bool> {
    match state.layout().get(source) {
        Some(e) if e.kind == SubsystemKind::Source => Ok(e.parked),
        Some(_) => Err(Error::Target(format!("{source} is not a source"))),
        None => Err(Error::Target(format!("unknown subsystem {source}"))),
    }
}

/// Per-call Bernoulli emission loss. A failed call leaves the state untouched
/// and produces no photon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmissionModel {
    pub efficiency: f64,
}

impl EmissionModel {
    pub fn new(efficiency: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::Argument(format!("emission efficiency {efficiency} outside [0, 1]")));
        }
        Ok(Self { efficiency })
    }

    pub fn ideal() -> Self {
        Self { efficiency: 1.0 }
    }

    pub fn emit<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        source: SubsystemId,
        mode: EmissionMode,
        rng: &mut R,
    ) -> Result<(StateVector, EmissionReport)> {
        require_active_source(state, source)?;
        // The whole encode/map sequence fails atomically.
        let fired = self.efficiency >= 1.0 || rng.random::<f64>() < self.efficiency;
        if !fired {
            return Ok((state.clone(), EmissionReport { source, photon: None, mode, succeeded: false }));
        }
        match mode {
            EmissionMode::Encode => encode_qubit_to_photon(state, source),
            EmissionMode::Map => map_source_to_photon(state, source),
        }
    }
}
