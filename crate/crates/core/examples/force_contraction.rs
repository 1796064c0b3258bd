//! Spin contraction of the force over a packet: how the decomposition and the
//! coherence term look for a few spin states.
//!
//! ```bash
//! cargo run --example force_contraction
//! ```

use sgflux::deflection::{contract_force, required_moments};
use sgflux::dipole::Position3;
use sgflux::moments::{SpatialMoments, WavePacket};
use sgflux::spin::NamedState;

fn main() -> sgflux::Result<()> {
    let packet = WavePacket::square(Position3::new(0.05, 0.1, 0.4), 0.01)?;
    for s in [
        NamedState::Parallel,
        NamedState::Antiparallel,
        NamedState::ParallelCoherent,
        NamedState::AntiparallelCoherent,
        NamedState::Singlet,
    ] {
        let state = s.state();
        let m = SpatialMoments::for_packet(&packet, &required_moments(&state))?;
        let f = contract_force(&state, &m, 1.0)?;
        println!("{s:>22?}: a_z = {:+.6}, basis parts = {:+.4?}, coherence = {:+.3e}", f.a_z, f.decomposition, f.extra_terms);
    }
    Ok(())
}
