//! Natural length unit and coupling for the preset parameters, and how `l`
//! scales with the chosen time unit.
//!
//! ```bash
//! cargo run --example natural_units
//! ```

use sgflux::units::{derive_length_unit, thermal_speed, Dimension, PhysicalParams};

fn main() -> sgflux::Result<()> {
    let p = PhysicalParams::paper_preset();
    println!("alpha = {:.4e}, beta = {:.4e}, beta/alpha = {:.3e}", p.alpha, p.beta, p.beta / p.alpha);
    println!("B0 = {:.4e} T", p.b0);

    for tau in [1e-4, 1e-3, 1e-2] {
        let u = derive_length_unit(&p, tau)?;
        println!(
            "tau = {tau:.0e} s: l = {:.4e} m, kappa = {:.4}, 1 l/tau^2 = {:.4e} m/s^2",
            u.l,
            u.kinetic_scale(&p),
            u.from_natural(1.0, Dimension::Acceleration)
        );
    }
    println!("rms thermal speed of hydrogen at 100 C: {:.0} m/s", thermal_speed(373.15, p.mass)?);
    Ok(())
}
