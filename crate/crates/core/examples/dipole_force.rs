//! Point-dipole interaction and force operators, evaluated on the axis and
//! compared to the classical force between two aligned moments.
//!
//! ```bash
//! cargo run --example dipole_force
//! ```

use sgflux::deflection::classical_dipole_force;
use sgflux::dipole::{force_operator, interaction_hamiltonian, Position3};
use sgflux::spin::{expectation, NamedState};

fn main() -> sgflux::Result<()> {
    let h = interaction_hamiltonian(1.0);
    let f = force_operator(1.0);
    println!("{:>6} {:>14} {:>14} {:>14}", "z", "<H> up,up", "<F_z> up,up", "classical");
    for z in [0.2, 0.4, 0.8, 1.6] {
        let at = Position3::new(0.0, 0.0, z);
        let up = NamedState::Parallel.state();
        let e = expectation(&h.evaluate(at)?, &up)?;
        let a = expectation(&f.evaluate(at)?, &up)?;
        // m1 m2 / m = 1/4 in natural units.
        println!("{z:>6.2} {e:>14.6} {a:>14.6} {:>14.6}", classical_dipole_force(0.5, 0.5, z, 1.0)?);
    }
    Ok(())
}
