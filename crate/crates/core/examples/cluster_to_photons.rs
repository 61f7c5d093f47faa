//! Prepare a linear cluster state on sources, map it onto time-bin photons and
//! check that every source ends up parked.

use multiphoton::photonics::readout_source;
use multiphoton::qstate::SubsystemKind;
use multiphoton::rng::seeded;
use multiphoton::{map_all_sources, prepare_via_rus, preset_recipe, PresetKind};

fn main() -> multiphoton::Result<()> {
    let n = 4;
    let (sources, _) = prepare_via_rus(&preset_recipe(PresetKind::Cluster1d, n)?, &mut seeded(3))?;
    let (photons, reports) = map_all_sources(&sources)?;
    for r in &reports {
        println!("source {} -> photon {}, parked: {}", r.source, r.photon.unwrap(), readout_source(&photons, r.source)?);
    }
    let same = sources.amplitudes().iter().zip(photons.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-12);
    println!("photon amplitudes equal source amplitudes: {same}");
    println!("active photons: {}", photons.layout().active_of_kind(SubsystemKind::Photon).len());
    for (i, a) in photons.amplitudes().iter().enumerate() {
        println!("  |{}>  {:+.4}", photons.layout().basis_label(i), a);
    }
    Ok(())
}
