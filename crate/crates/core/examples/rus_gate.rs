//! One repeat-until-success CZ on `|+⟩|+⟩`, round by round.
//!
//! cargo run --example rus_gate -- [seed]

use multiphoton::mubgate::{rus_cz, DEFAULT_MAX_ROUNDS};
use multiphoton::qstate::LocalUnitary;
use multiphoton::rng::seeded;
use multiphoton::{StateVector, SubsystemLayout};
use num_complex::Complex64 as C64;

fn main() -> multiphoton::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let (layout, ids) = SubsystemLayout::with_sources(2);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let input = StateVector::product_state(layout, &[[h, h], [h, h]])?;

    let (out, transcript) = rus_cz(&input, ids[0], ids[1], &mut seeded(seed), DEFAULT_MAX_ROUNDS)?;
    for (k, r) in transcript.rounds.iter().enumerate() {
        println!(
            "round {}: outcome Phi{} (p = {:.3}) -> {:?}, global phase {:.3}",
            k + 1,
            r.outcome,
            r.probability,
            r.correction.net_effect,
            r.correction.global_phase
        );
    }
    let ideal = input.apply_unitary(&LocalUnitary::cz(ids[0], ids[1])?)?;
    println!("fidelity with U_CZ|++>: {:.12}", out.fidelity_up_to_phase(&ideal)?);
    for (i, a) in out.amplitudes().iter().enumerate() {
        println!("  |{}>  {:+.6}", out.layout().basis_label(i), a);
    }
    Ok(())
}
