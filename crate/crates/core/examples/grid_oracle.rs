//! Brute-force grid evolution compared with the perturbative force. Takes a
//! few seconds in release mode.
//!
//! ```bash
//! cargo run --release --example grid_oracle
//! ```

use sgflux::oracle::{run_oracle, OracleConfig};
use sgflux::spin::NamedState;
use sgflux::units::PhysicalParams;

fn main() -> sgflux::Result<()> {
    let params = PhysicalParams::paper_preset();
    for spin in [NamedState::Parallel, NamedState::Antiparallel] {
        let cfg = OracleConfig { spin, ..OracleConfig::default() };
        let r = run_oracle(&cfg, &params, 1e-3)?.report;
        println!("{spin:?}");
        println!("  contracted force  {:+.6}", r.bch_acceleration);
        println!("  -<[H,[H,z]]> grid {:+.6}", r.grid_initial_acceleration);
        println!("  fitted            {:+.6} (+- {:.1e})", r.fit.a, r.fit.sigma_a);
        if let Some(rem) = &r.remainder {
            println!("  remainder exponent {:.3}", rem.exponent);
        }
        println!("  norm drift {:.2e}, all checks pass: {}", r.norm_drift, r.all_pass());
    }

    // No dipole: the uniform field alone should not accelerate the packet.
    let free = OracleConfig { include_dipole: false, ..OracleConfig::default() };
    let r = run_oracle(&free, &params, 1e-3)?.report;
    println!("Zeeman only: fitted a = {:+.2e}, remainder: {:?}", r.zeeman_fitted_acceleration, r.remainder_error);
    Ok(())
}
