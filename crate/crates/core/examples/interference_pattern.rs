//! Angular emission pattern of two atoms in the symmetric Dicke state, written
//! as CSV (`theta,phi,intensity`).
//!
//! cargo run --example interference_pattern -- [out.csv]

use std::f64::consts::PI;

use multiphoton::interference::{scan_pattern, EmissionConfig, Grid, PatternSource, TwoAtomState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "symmetric_pattern.csv".into());
    let config = EmissionConfig::standard(6.0 * PI)?;
    let grid = Grid::default();
    let map = scan_pattern(&config, &PatternSource::Explicit(TwoAtomState::symmetric()), grid)?;
    map.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
    println!("wrote {path}, max intensity {:.4}", map.max());
    for (i, j) in map.local_maxima(0.5) {
        let (th, ph) = (grid.theta(i), grid.phi(j));
        println!("  maximum at theta {:6.1} deg, phi {:6.1} deg, k.dr/2pi = {:+.3}", th.to_degrees(), ph.to_degrees(), 3.0 * th.sin() * ph.cos());
    }
    Ok(())
}
