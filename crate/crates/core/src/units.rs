//! SI parameters and the natural units of the dipole problem.
//!
//! The natural length `l` and time `tau` satisfy
//! `l^5 = (mu0 |alpha beta| hbar^2 / m) tau^2`, so that the dipole-coupling
//! prefactor of the force becomes `sign(alpha beta)`. Only `tau` is free.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 values.
pub mod constants {
    /// Elementary charge, C (exact).
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Electron mass, kg.
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    /// Proton mass, kg.
    pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;
    /// Atomic mass constant, kg.
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
    /// Hydrogen-1 atom mass, kg (1.007 825 032 23 u).
    pub const HYDROGEN_MASS: f64 = 1.007_825_032_23 * ATOMIC_MASS_UNIT;
    /// Boltzmann constant, J/K (exact).
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    /// Vacuum permeability, T m / A.
    pub const MU0: f64 = 1.256_637_062_12e-6;
    /// Reduced Planck constant, J s (exact).
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Planck constant, J s (exact).
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// 0 degrees Celsius in kelvin.
    pub const ZERO_CELSIUS: f64 = 273.15;
}

use constants::*;

/// Dimensional inputs. Gyromagnetic ratios are in A m^2 / (J s), so that the
/// magnetic moment is `ratio * S` with `S` in J s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub alpha: f64,
    pub beta: f64,
    pub mass: f64,
    #[serde(default)]
    pub b0: f64,
    #[serde(default = "default_mu0")]
    pub mu0: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

fn default_mu0() -> f64 {
    MU0
}

fn default_hbar() -> f64 {
    HBAR
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.mass, self.b0, self.mu0, self.hbar];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("physical parameters must be finite".into()));
        }
        if self.mass <= 0.0 || self.mu0 <= 0.0 || self.hbar <= 0.0 {
            return Err(Error::InvalidInput("mass, mu0 and hbar must be positive".into()));
        }
        if self.alpha * self.beta == 0.0 {
            return Err(Error::InvalidInput("alpha * beta must be non-zero".into()));
        }
        Ok(())
    }

    /// Hydrogen-like particle (`alpha = -e / 2 m_e`, proton mass) and a
    /// 1 uA, 1 um loop. The loop ratio carries the sign of `alpha`, and `B0`
    /// threads half a flux quantum through the loop.
    pub fn paper_preset() -> Self {
        let radius = 1e-6;
        let alpha = -ELEMENTARY_CHARGE / (2.0 * ELECTRON_MASS);
        let beta = alpha.signum() * beta_from_loop(1e-6, radius, HBAR).expect("positive loop");
        let half_flux_quantum = PLANCK / (2.0 * ELEMENTARY_CHARGE) / 2.0;
        Self {
            alpha,
            beta,
            mass: PROTON_MASS,
            b0: half_flux_quantum / (PI * radius * radius),
            mu0: MU0,
            hbar: HBAR,
        }
    }

    /// `mu0 alpha beta hbar^2 / m` in SI (m^5 / s^2), with sign.
    pub fn coupling_si(&self) -> f64 {
        self.mu0 * self.alpha * self.beta * self.hbar * self.hbar / self.mass
    }

    /// Sign of `alpha beta`: the coupling prefactor in natural units.
    pub fn coupling_sign(&self) -> f64 {
        (self.alpha * self.beta).signum()
    }
}

/// Natural length and time units (plus `hbar`, used for energy-like
/// conversions).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalUnits {
    pub l: f64,
    pub tau: f64,
    pub hbar: f64,
}

impl NaturalUnits {
    /// Dimensionless kinetic prefactor `kappa = hbar tau / (m l^2)`.
    pub fn kinetic_scale(&self, params: &PhysicalParams) -> f64 {
        params.hbar * self.tau / (params.mass * self.l * self.l)
    }

    /// `mu0 alpha beta hbar^2 / m` expressed in `l^5 / tau^2`.
    pub fn coupling(&self, params: &PhysicalParams) -> f64 {
        params.coupling_si() * self.tau * self.tau / self.l.powi(5)
    }

    /// Zeeman angular frequencies `(alpha B0 tau, beta B0 tau)` in `1/tau`.
    pub fn zeeman_rates(&self, params: &PhysicalParams) -> (f64, f64) {
        (params.alpha * params.b0 * self.tau, params.beta * params.b0 * self.tau)
    }

    fn scale(&self, dim: Dimension) -> f64 {
        let (l, t, h) = (self.l, self.tau, self.hbar);
        match dim {
            Dimension::Length => l,
            Dimension::Time => t,
            Dimension::Velocity => l / t,
            Dimension::Acceleration => l / (t * t),
            Dimension::Frequency => 1.0 / t,
            Dimension::Energy => h / t,
            Dimension::Momentum => h / l,
            Dimension::Force => h / (l * t),
        }
    }

    pub fn to_natural(&self, value_si: f64, dim: Dimension) -> f64 {
        value_si / self.scale(dim)
    }

    pub fn from_natural(&self, value: f64, dim: Dimension) -> f64 {
        value * self.scale(dim)
    }
}

/// Physical dimension tags understood by the unit conversions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Velocity,
    Acceleration,
    Frequency,
    Energy,
    Momentum,
    Force,
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "length" => Dimension::Length,
            "time" => Dimension::Time,
            "velocity" => Dimension::Velocity,
            "acceleration" => Dimension::Acceleration,
            "frequency" => Dimension::Frequency,
            "energy" => Dimension::Energy,
            "momentum" => Dimension::Momentum,
            "force" => Dimension::Force,
            other => return Err(Error::UnknownDimension(other.to_string())),
        })
    }
}

/// `l = (mu0 |alpha beta| hbar^2 tau^2 / m)^(1/5)`.
pub fn derive_length_unit(params: &PhysicalParams, tau: f64) -> Result<NaturalUnits> {
    params.validate()?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidInput(format!("time unit must be positive, got {tau}")));
    }
    let l = (params.coupling_si().abs() * tau * tau).powf(0.2);
    Ok(NaturalUnits { l, tau, hbar: params.hbar })
}

/// Gyromagnetic ratio of a current loop treated as a spin-1/2 moment:
/// `m = I pi R^2`, `beta = m / (hbar/2)`.
pub fn beta_from_loop(current: f64, radius: f64, hbar: f64) -> Result<f64> {
    if !(current > 0.0) || !(radius > 0.0) || !(hbar > 0.0) {
        return Err(Error::InvalidInput("loop current, radius and hbar must be positive".into()));
    }
    Ok(current * PI * radius * radius / (hbar / 2.0))
}

/// Root-mean-square thermal speed `sqrt(3 k_B T / m)`.
pub fn thermal_speed(temperature: f64, mass: f64) -> Result<f64> {
    if !(temperature > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidInput("temperature and mass must be positive".into()));
    }
    Ok((3.0 * BOLTZMANN * temperature / mass).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn preset_length_unit_is_ten_microns_order() {
        let p = PhysicalParams::paper_preset();
        let u = derive_length_unit(&p, 1e-3).unwrap();
        assert!(u.l > 3e-6 && u.l < 3e-5, "l = {}", u.l);
        // l^5 = coupling tau^2
        assert_relative_eq!(u.l.powi(5), p.coupling_si().abs() * 1e-6, max_relative = 1e-10);
    }

    #[test]
    fn length_unit_scaling() {
        let p = PhysicalParams::paper_preset();
        let a = derive_length_unit(&p, 1e-3).unwrap();
        let b = derive_length_unit(&p, 2e-3).unwrap();
        assert_relative_eq!(b.l / a.l, 2f64.powf(0.4), max_relative = 1e-12);
        let tiny = derive_length_unit(&p, 1e-30).unwrap();
        assert!(tiny.l > 0.0 && tiny.l < 1e-15);
        assert!(derive_length_unit(&p, 0.0).is_err());
        assert!(derive_length_unit(&p, -1.0).is_err());
    }

    #[test]
    fn loop_ratio() {
        let beta = beta_from_loop(1e-6, 1e-6, HBAR).unwrap();
        // I pi R^2 / (hbar/2) = 3.14159e-18 / 5.27286e-35
        assert_relative_eq!(beta, 5.958_040e16, max_relative = 1e-6);
        let alpha = ELEMENTARY_CHARGE / (2.0 * ELECTRON_MASS);
        let ratio = beta / alpha;
        assert!(ratio > 6.7e5 && ratio < 6.9e5, "ratio {ratio}");
        let half = beta_from_loop(1e-6, 0.5e-6, HBAR).unwrap();
        assert_relative_eq!(half, beta / 4.0, max_relative = 1e-14);
        assert!(beta_from_loop(0.0, 1e-6, HBAR).is_err());
    }

    #[test]
    fn oven_speed() {
        let v = thermal_speed(ZERO_CELSIUS + 100.0, HYDROGEN_MASS).unwrap();
        // sqrt(3 * 1.380649e-23 * 373.15 / 1.673533e-27)
        assert_relative_eq!(v, 3038.9, max_relative = 1e-4);
        let v4 = thermal_speed(4.0 * 373.15, HYDROGEN_MASS).unwrap();
        assert_relative_eq!(v4, 2.0 * v, max_relative = 1e-12);
        let heavy = thermal_speed(373.15, 4.0 * HYDROGEN_MASS).unwrap();
        assert_relative_eq!(heavy, v / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn coupling_is_unity_in_natural_units() {
        let p = PhysicalParams::paper_preset();
        let u = derive_length_unit(&p, 1e-3).unwrap();
        assert_relative_eq!(u.coupling(&p), 1.0, max_relative = 1e-12);
        let flipped = PhysicalParams { beta: -p.beta, ..p };
        let u = derive_length_unit(&flipped, 1e-3).unwrap();
        assert_relative_eq!(u.coupling(&flipped), -1.0, max_relative = 1e-12);
    }

    #[test]
    fn conversions() {
        let p = PhysicalParams::paper_preset();
        let u = derive_length_unit(&p, 1e-3).unwrap();
        assert_relative_eq!(u.to_natural(u.l, Dimension::Length), 1.0, max_relative = 1e-15);
        assert_relative_eq!(u.from_natural(1.0, Dimension::Acceleration), u.l / 1e-6, max_relative = 1e-15);
        assert!("speed".parse::<Dimension>().is_err());
        assert_eq!("momentum".parse::<Dimension>().unwrap(), Dimension::Momentum);
    }

    #[test]
    fn validation() {
        let p = PhysicalParams::paper_preset();
        assert!(PhysicalParams { mass: 0.0, ..p }.validate().is_err());
        assert!(PhysicalParams { beta: 0.0, ..p }.validate().is_err());
        assert!(PhysicalParams { hbar: -1.0, ..p }.validate().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const DIMS: [Dimension; 8] = [
            Dimension::Length,
            Dimension::Time,
            Dimension::Velocity,
            Dimension::Acceleration,
            Dimension::Frequency,
            Dimension::Energy,
            Dimension::Momentum,
            Dimension::Force,
        ];

        proptest! {
            #[test]
            fn round_trip(v in -1e6f64..1e6, tau in 1e-6f64..1.0, d in 0usize..8) {
                let p = PhysicalParams::paper_preset();
                let u = derive_length_unit(&p, tau).unwrap();
                let back = u.to_natural(u.from_natural(v, DIMS[d]), DIMS[d]);
                prop_assert!((back - v).abs() <= 1e-12 * v.abs().max(1e-300));
                prop_assert!((u.l.powi(5) / (p.coupling_si().abs() * tau * tau) - 1.0).abs() < 1e-10);
            }
        }
    }
}
