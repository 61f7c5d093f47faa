//! Load an MPS recipe from JSON, prepare it with ideal gates and print the
//! state.
//!
//! cargo run --example recipe_file -- crates/core/examples/recipes/bell_pair.json

use multiphoton::{prepare_mps, MpsRecipe};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let default = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/recipes/bell_pair.json");
    let path = std::env::args().nth(1).unwrap_or_else(|| default.to_string());
    let recipe = MpsRecipe::from_json(&std::fs::read_to_string(&path)?)?;
    let state = prepare_mps(&recipe)?;
    println!("{path}: {} qubits", recipe.n());
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm_sqr() > 1e-14 {
            println!("  |{}>  {:+.6}", state.layout().basis_label(i), a);
        }
    }
    Ok(())
}
