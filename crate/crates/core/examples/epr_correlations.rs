//! Joint deflection statistics for a singlet pair with a loop detector on
//! each wing, as the loop preparation `p` varies.
//!
//! ```bash
//! cargo run --example epr_correlations
//! ```

use sgflux::epr::{joint_distribution, BellState, EprScenario, LoopRepresentation, Outcome, Wing};

fn main() -> sgflux::Result<()> {
    println!("{:>5} {:>10} {:>16} {:>16}", "p", "P(down@1)", "P(up@2|down@1)", "mixture differs");
    for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let coherent = joint_distribution(&EprScenario::new(BellState::Singlet, p, p, LoopRepresentation::Coherent)?)?;
        let mixed = joint_distribution(&EprScenario::new(BellState::Singlet, p, p, LoopRepresentation::Mixture)?)?;
        let diff = coherent.probs.iter().flatten().zip(mixed.probs.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!(
            "{p:>5.2} {:>10.4} {:>16.4} {:>16.1e}",
            coherent.marginal(Wing::One, Outcome::Down),
            coherent.conditional(Wing::One, Outcome::Down)?[0],
            diff
        );
    }
    Ok(())
}
