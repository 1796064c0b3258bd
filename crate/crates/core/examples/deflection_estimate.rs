//! SI deflection across the negative-force region for a range of forward
//! speeds, and how it compares with the packet width.
//!
//! ```bash
//! cargo run --release --example deflection_estimate
//! ```

use sgflux::cli::{figure2, RunConfig};
use sgflux::trajectory::{estimate, separation_vs_packet};
use sgflux::units::PhysicalParams;

fn main() -> sgflux::Result<()> {
    let params = PhysicalParams::paper_preset();
    let s = figure2(&RunConfig::default())?.summary;
    println!("region width {:.4} l, mean acceleration {:.4} l/tau^2", s.region_width, s.average);
    for speed in [300.0, 1e3, 3e3] {
        let e = estimate(&params, 1e-3, speed, s.average, s.region_width)?;
        let width_m = s.width * e.l;
        println!(
            "v = {speed:>6.0} m/s: t = {:.3e} s, deflection = {:.3e} m, separation / packet width = {:.2e}",
            e.interaction_time,
            e.deflection,
            separation_vs_packet(e.deflection, width_m)?
        );
    }
    Ok(())
}
