//! The photon-pair measurement basis: overlaps with `{EE, EL, LE, LL}` and the
//! correction attached to each outcome.

use multiphoton::mubgate::{correction_for, mub_pair_basis};

fn main() -> multiphoton::Result<()> {
    let basis = mub_pair_basis();
    let labels = ["EE", "EL", "LE", "LL"];
    println!("|<Phi_i|b>|^2");
    for (i, phi) in basis.states().iter().enumerate() {
        let row: Vec<String> = phi.iter().map(|a| format!("{:.4}", a.norm_sqr())).collect();
        println!("  Phi{}  {}", i + 1, row.join("  "));
    }
    println!("  cols  {}", labels.join("    "));
    for outcome in 1..=4u8 {
        let c = correction_for(outcome)?;
        println!("Phi{outcome}: {:?} ({:?}), phases {:?}", c.net_effect, basis.classify(outcome)?, c.local_gates);
    }
    Ok(())
}
