//! GHZ, W and cluster states prepared through the RUS gate and compared with
//! their closed forms.
//!
//! cargo run --example presets -- [n]

use multiphoton::rng::seeded;
use multiphoton::{prepare_via_rus, preset_recipe, preset_target, PresetKind};

fn main() -> multiphoton::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    for kind in PresetKind::ALL {
        let recipe = preset_recipe(kind, n)?;
        let (state, transcripts) = prepare_via_rus(&recipe, &mut seeded(7))?;
        let rounds: usize = transcripts.iter().map(|t| t.rounds_used).sum();
        let f = state.fidelity_up_to_phase(&preset_target(kind, n)?)?;
        println!("{kind:>9} n={n}: {} CZs, {rounds} rounds, fidelity {f:.12}", transcripts.len());
    }
    Ok(())
}
