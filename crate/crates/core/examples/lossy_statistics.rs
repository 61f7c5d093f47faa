//! Rounds needed to complete the gate under photon loss, against `2 / eta²`.

use multiphoton::mubgate::{attempts_until_success, expected_attempts};
use multiphoton::rng::trial_rng;
use multiphoton::{LossModel, StateVector, SubsystemLayout};

fn main() -> multiphoton::Result<()> {
    let trials = 20_000u64;
    for eta in [1.0, 0.9, 0.7, 0.5] {
        let loss = LossModel::new(eta)?;
        let mut total = 0usize;
        for t in 0..trials {
            let mut rng = trial_rng(42, t);
            let (layout, ids) = SubsystemLayout::with_sources(2);
            let input = StateVector::random(layout, &mut rng);
            total += attempts_until_success(&input, ids[0], ids[1], &loss, &mut rng, 1 << 20)?.unwrap();
        }
        println!(
            "eta {eta:.1}: mean rounds {:.3} (expected {:.3}), per-round completion {:.4}",
            total as f64 / trials as f64,
            expected_attempts(&loss)?,
            trials as f64 / total as f64
        );
    }
    Ok(())
}
