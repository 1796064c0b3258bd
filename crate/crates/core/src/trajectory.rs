//! Constant-acceleration deflection estimate in SI units.
//!
//! The particle crosses the negative-acceleration region of the profile at a
//! fixed forward speed and is deflected by `a t^2 / 2` while inside it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{derive_length_unit, Dimension, PhysicalParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeflectionEstimate {
    /// Natural length unit, m.
    pub l: f64,
    /// Natural time unit, s.
    pub tau: f64,
    /// Forward speed, m/s.
    pub speed: f64,
    /// Width of the region, in `l` and in m.
    pub region_width_natural: f64,
    pub region_width: f64,
    /// Mean acceleration along `z`, in `l / tau^2` and in m/s^2 (signed).
    pub avg_acceleration_natural: f64,
    pub avg_acceleration: f64,
    /// Time spent in the region, s.
    pub interaction_time: f64,
    /// `|a| t^2 / 2`, m.
    pub deflection: f64,
    /// `-1` towards the loop, `+1` away from it, `0` for no force.
    pub direction: f64,
}

/// Deflection for mean acceleration `avg_a_natural` acting over a region of
/// width `region_width_natural`, both in the natural units fixed by `tau`.
pub fn estimate(
    params: &PhysicalParams,
    tau: f64,
    speed: f64,
    avg_a_natural: f64,
    region_width_natural: f64,
) -> Result<DeflectionEstimate> {
    if !(speed > 0.0) || !speed.is_finite() {
        return Err(Error::InvalidInput(format!("speed must be positive, got {speed}")));
    }
    if !(region_width_natural >= 0.0) || !avg_a_natural.is_finite() {
        return Err(Error::InvalidInput("region width must be non-negative and acceleration finite".into()));
    }
    let units = derive_length_unit(params, tau)?;
    let region_width = units.from_natural(region_width_natural, Dimension::Length);
    let avg_acceleration = units.from_natural(avg_a_natural, Dimension::Acceleration);
    let interaction_time = region_width / speed;
    Ok(DeflectionEstimate {
        l: units.l,
        tau,
        speed,
        region_width_natural,
        region_width,
        avg_acceleration_natural: avg_a_natural,
        avg_acceleration,
        interaction_time,
        deflection: 0.5 * avg_acceleration.abs() * interaction_time * interaction_time,
        direction: if avg_acceleration == 0.0 { 0.0 } else { avg_acceleration.signum() },
    })
}

/// Estimate for a loop carrying no current: nothing to deflect with, and no
/// natural length to express the geometry in.
pub fn no_coupling(tau: f64, speed: f64) -> DeflectionEstimate {
    DeflectionEstimate {
        l: 0.0,
        tau,
        speed,
        region_width_natural: 0.0,
        region_width: 0.0,
        avg_acceleration_natural: 0.0,
        avg_acceleration: 0.0,
        interaction_time: 0.0,
        deflection: 0.0,
        direction: 0.0,
    }
}

/// Screen separation of the parallel and antiparallel beams relative to the
/// packet width: `2 deflection / width`.
pub fn separation_vs_packet(deflection: f64, packet_width: f64) -> Result<f64> {
    if !(packet_width > 0.0) {
        return Err(Error::InvalidInput(format!("packet width must be positive, got {packet_width}")));
    }
    Ok(2.0 * deflection / packet_width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn preset_estimate(speed: f64, a: f64) -> DeflectionEstimate {
        estimate(&PhysicalParams::paper_preset(), 1e-3, speed, a, 0.6).unwrap()
    }

    #[test]
    fn invariants_hold_exactly() {
        let e = preset_estimate(1e3, -2.22);
        assert_eq!(e.interaction_time, e.region_width / e.speed);
        assert_eq!(e.deflection, 0.5 * e.avg_acceleration.abs() * e.interaction_time.powi(2));
        assert_eq!(e.direction, -1.0);
        assert_relative_eq!(e.avg_acceleration, -2.22 * e.l / 1e-6, max_relative = 1e-14);
    }

    #[test]
    fn preset_orders_of_magnitude() {
        let e = preset_estimate(1e3, -2.22);
        assert!(e.deflection > 1e-16 && e.deflection < 1e-14, "{}", e.deflection);
        assert!(e.interaction_time > 1e-9 && e.interaction_time < 1e-7);
    }

    #[test]
    fn zero_acceleration_and_speed_scaling() {
        assert_eq!(preset_estimate(1e3, 0.0).deflection, 0.0);
        let slow = preset_estimate(1e3, -2.22);
        let fast = preset_estimate(2e3, -2.22);
        assert_relative_eq!(fast.interaction_time, slow.interaction_time / 2.0, max_relative = 1e-14);
        assert_relative_eq!(fast.deflection, slow.deflection / 4.0, max_relative = 1e-14);
        assert!(estimate(&PhysicalParams::paper_preset(), 1e-3, 0.0, -1.0, 0.6).is_err());
    }

    #[test]
    fn separation_ratio() {
        assert_relative_eq!(separation_vs_packet(1e-15, 1e-10).unwrap(), 2e-5, max_relative = 1e-12);
        assert_eq!(separation_vs_packet(3.0, 3.0).unwrap(), 2.0);
        assert_eq!(separation_vs_packet(0.0, 1e-10).unwrap(), 0.0);
        assert!(separation_vs_packet(1.0, 0.0).is_err());
    }
}
