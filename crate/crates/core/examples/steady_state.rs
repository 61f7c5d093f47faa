//! Excited-state population of a resonantly driven atom against the drive
//! strength.

use multiphoton::interference::{bloch_generator, excited_population, steady_state_single_atom};

fn main() -> multiphoton::Result<()> {
    let gamma = 1.0;
    for omega in [0.0, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
        let rho = steady_state_single_atom(gamma, omega, 0.0)?;
        let residual = bloch_generator(gamma, omega, 0.0, &rho).norm();
        println!("Omega = {omega:6.1}: rho_ee = {:.6}, |L(rho)| = {residual:.1e}", excited_population(&rho));
    }
    Ok(())
}
