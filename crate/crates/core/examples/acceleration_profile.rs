//! Acceleration along `z` of a narrow square packet swept along `y` at
//! `x = 0`, `z = 0.4 l`, for parallel spins. Writes `profile.csv` when given a
//! path.
//!
//! ```bash
//! cargo run --release --example acceleration_profile -- profile.csv
//! ```

use sgflux::moments::{acceleration_profile, region_average, zero_crossings, RegionFilter, SweepSpec};
use sgflux::spin::NamedState;

fn main() -> sgflux::Result<()> {
    let sweep = SweepSpec::default();
    let profile = acceleration_profile(&NamedState::Parallel.state(), &sweep, 1.0)?;
    println!("crossings: {:?}", zero_crossings(&profile));
    println!("negative-region mean: {:.4} l/tau^2", region_average(&profile, RegionFilter::NegativeOnly)?);
    println!("positive-region mean: {:.4} l/tau^2", region_average(&profile, RegionFilter::PositiveOnly)?);
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, profile.to_csv())?;
        println!("wrote {path}");
    }
    Ok(())
}
