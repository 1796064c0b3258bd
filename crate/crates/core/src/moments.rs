//! Spatial expectation values `<x^a y^b z^c / r^n>` over a wavepacket and the
//! acceleration profile built from them.
//!
//! Integrals use a tensor-product Gauss-Legendre rule over the packet's
//! support cube, with the order raised until two successive rules agree to
//! [`QUADRATURE_REL`]. The origin is never inside the support, so the
//! integrand is smooth there.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deflection::{contract_force, required_moments};
use crate::dipole::Position3;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::spin::SpinInput;
use crate::tolerances::QUADRATURE_REL;

/// `(a, b, c, n)` for `<x^a y^b z^c / r^n>`.
pub type MomentKey = (u32, u32, u32, u32);

/// Gaussian packets are integrated over `center +- GAUSSIAN_CUTOFF * width`.
pub const GAUSSIAN_CUTOFF: f64 = 6.0;

const ORDERS: [usize; 9] = [4, 6, 8, 12, 16, 24, 32, 48, 64];

/// Shape of `|psi|^2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Uniform density over a cube of edge `width`.
    #[default]
    Square,
    /// Isotropic Gaussian density with standard deviation `width` per axis,
    /// truncated to the cube `+- 6 width` and renormalised there.
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePacket {
    pub center: Position3,
    pub width: f64,
    #[serde(default)]
    pub profile: Profile,
}

impl WavePacket {
    pub fn square(center: Position3, width: f64) -> Result<Self> {
        Self::new(center, width, Profile::Square)
    }

    pub fn gaussian(center: Position3, sigma: f64) -> Result<Self> {
        Self::new(center, sigma, Profile::Gaussian)
    }

    pub fn new(center: Position3, width: f64, profile: Profile) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidInput(format!("packet width must be positive, got {width}")));
        }
        let p = Self { center, width, profile };
        if center.norm() <= 3f64.sqrt() * p.half_support() {
            return Err(Error::SingularSupport);
        }
        Ok(p)
    }

    /// Half edge of the integration cube.
    pub fn half_support(&self) -> f64 {
        match self.profile {
            Profile::Square => 0.5 * self.width,
            Profile::Gaussian => GAUSSIAN_CUTOFF * self.width,
        }
    }

    /// Unnormalised density at displacement `d` from the center.
    fn weight(&self, d: [f64; 3]) -> f64 {
        match self.profile {
            Profile::Square => 1.0,
            Profile::Gaussian => {
                let s2 = self.width * self.width;
                (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (2.0 * s2)).exp()
            }
        }
    }

    /// `true` if `p` lies in the support cube.
    pub fn contains(&self, p: Position3) -> bool {
        let h = self.half_support();
        (p.x - self.center.x).abs() <= h && (p.y - self.center.y).abs() <= h && (p.z - self.center.z).abs() <= h
    }
}

fn monomial(p: [f64; 3], key: MomentKey) -> f64 {
    let (a, b, c, n) = key;
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32) / r.powi(n as i32)
}

/// One tensor-product rule: returns `(integral, integral of |integrand|)`,
/// both normalised by the packet's total weight.
fn tensor_rule(packet: &WavePacket, key: MomentKey, order: usize) -> (f64, f64) {
    let rule = GaussLegendre::cached(order);
    let h = packet.half_support();
    let c = packet.center.as_array();
    let (mut num, mut abs, mut norm) = (0.0, 0.0, 0.0);
    for (xi, wx) in rule.nodes.iter().zip(&rule.weights) {
        for (yi, wy) in rule.nodes.iter().zip(&rule.weights) {
            for (zi, wz) in rule.nodes.iter().zip(&rule.weights) {
                let d = [h * xi, h * yi, h * zi];
                let w = wx * wy * wz * packet.weight(d);
                let f = monomial([c[0] + d[0], c[1] + d[1], c[2] + d[2]], key);
                num += w * f;
                abs += w * f.abs();
                norm += w;
            }
        }
    }
    (num / norm, abs / norm)
}

/// `<x^a y^b z^c / r^n>` over `packet`.
pub fn moment(packet: &WavePacket, a: u32, b: u32, c: u32, n: u32) -> Result<f64> {
    if packet.center.norm() <= 3f64.sqrt() * packet.half_support() {
        return Err(Error::SingularSupport);
    }
    let key = (a, b, c, n);
    if key == (0, 0, 0, 0) {
        return Ok(1.0);
    }
    let (mut prev, _) = tensor_rule(packet, key, ORDERS[0]);
    let mut last_change = f64::INFINITY;
    for &order in &ORDERS[1..] {
        let (cur, scale) = tensor_rule(packet, key, order);
        let change = (cur - prev).abs();
        // Relative to the value, or to the mean |integrand| for moments that
        // vanish by symmetry.
        let reference = cur.abs().max(scale * 1e-2);
        if change <= QUADRATURE_REL * reference || scale == 0.0 {
            return Ok(cur);
        }
        last_change = change / reference;
        prev = cur;
    }
    Err(Error::QuadratureNotConverged(last_change))
}

/// Map of evaluated moments.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpatialMoments(BTreeMap<MomentKey, f64>);

impl SpatialMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: MomentKey, value: f64) {
        self.0.insert(key, value);
    }

    pub fn get(&self, key: MomentKey) -> Result<f64> {
        self.0.get(&key).copied().ok_or(Error::MissingMoment(key.0, key.1, key.2, key.3))
    }

    pub fn contains(&self, key: MomentKey) -> bool {
        self.0.contains_key(&key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &MomentKey> {
        self.0.keys()
    }

    /// Quadrature moments of `packet` for every key in `keys`.
    pub fn for_packet(packet: &WavePacket, keys: &[MomentKey]) -> Result<Self> {
        let mut out = Self::new();
        for &k in keys {
            out.insert(k, moment(packet, k.0, k.1, k.2, k.3)?);
        }
        Ok(out)
    }

    /// Moments of a point packet: the monomials evaluated at `at`.
    pub fn point(at: Position3, keys: &[MomentKey]) -> Result<Self> {
        if at.norm() == 0.0 {
            return Err(Error::SingularSupport);
        }
        let mut out = Self::new();
        for &k in keys {
            out.insert(k, monomial(at.as_array(), k));
        }
        Ok(out)
    }
}

/// Sweep along `y` at fixed `x`, `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub x: f64,
    pub z: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub samples: usize,
    pub width: f64,
    #[serde(default)]
    pub profile: Profile,
}

impl Default for SweepSpec {
    /// `y` in `[-0.5, 0.5]` with 201 samples at `x = 0`, `z = 0.4`, square
    /// packet of width `0.001`.
    fn default() -> Self {
        Self { x: 0.0, z: 0.4, y_min: -0.5, y_max: 0.5, samples: 201, width: 0.001, profile: Profile::Square }
    }
}

impl SweepSpec {
    pub fn ys(&self) -> Vec<f64> {
        let n = self.samples;
        (0..n)
            .map(|i| {
                if n == 1 {
                    self.y_min
                } else {
                    self.y_min + (self.y_max - self.y_min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// `(y, a_z)` samples with strictly increasing `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccelerationProfile {
    pub x: f64,
    pub z: f64,
    pub samples: Vec<(f64, f64)>,
}

impl AccelerationProfile {
    pub fn new(x: f64, z: f64, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidInput("profile y values must be strictly increasing".into()));
        }
        Ok(Self { x, z, samples })
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    /// Pointwise negation.
    pub fn mirrored(&self) -> Self {
        Self { x: self.x, z: self.z, samples: self.samples.iter().map(|&(y, a)| (y, -a)).collect() }
    }

    /// CSV text with header `y,a_z`.
    pub fn to_csv(&self) -> String {
        crate::output::csv(&["y", "a_z"], self.samples.iter().map(|&(y, a)| vec![y, a]))
    }
}

/// Acceleration `a_z(y)` for `spin` over the sweep, in units where the
/// coupling prefactor is `coupling` (unity in natural units).
pub fn acceleration_profile(spin: &impl SpinInput, sweep: &SweepSpec, coupling: f64) -> Result<AccelerationProfile> {
    if sweep.samples < 2 || !(sweep.y_max > sweep.y_min) {
        return Err(Error::InvalidInput("sweep needs at least two samples and y_max > y_min".into()));
    }
    let rho = spin.density();
    let keys = required_moments(&rho);
    let samples = sweep
        .ys()
        .into_par_iter()
        .map(|y| {
            let packet = WavePacket::new(Position3::new(sweep.x, y, sweep.z), sweep.width, sweep.profile)?;
            let m = SpatialMoments::for_packet(&packet, &keys)?;
            Ok((y, contract_force(&rho, &m, coupling)?.a_z))
        })
        .collect::<Result<Vec<_>>>()?;
    AccelerationProfile::new(sweep.x, sweep.z, samples)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionFilter {
    NegativeOnly,
    PositiveOnly,
}

/// Mean of the profile over the region where it has the filtered sign.
///
/// Each maximal run of same-signed samples is integrated with the trapezoid
/// rule, extended to the linearly interpolated zero crossings that bound it;
/// the result is the total integral over the total length.
pub fn region_average(profile: &AccelerationProfile, filter: RegionFilter) -> Result<f64> {
    let sign = match filter {
        RegionFilter::NegativeOnly => -1.0,
        RegionFilter::PositiveOnly => 1.0,
    };
    let s = &profile.samples;
    let inside = |a: f64| a * sign > 0.0;
    let (mut integral, mut length) = (0.0, 0.0);
    for w in s.windows(2) {
        let ((y0, a0), (y1, a1)) = (w[0], w[1]);
        match (inside(a0), inside(a1)) {
            (true, true) => {
                integral += 0.5 * (a0 + a1) * (y1 - y0);
                length += y1 - y0;
            }
            (true, false) | (false, true) => {
                // Partial segment up to the interpolated root.
                let t = a0 / (a0 - a1);
                let yc = y0 + t * (y1 - y0);
                let (ya, aa) = if inside(a0) { (y0, a0) } else { (y1, a1) };
                let dy = (yc - ya).abs();
                integral += 0.5 * aa * dy;
                length += dy;
            }
            (false, false) => {}
        }
    }
    if length == 0.0 {
        // A single sample can still pass the filter.
        let hits: Vec<f64> = s.iter().map(|p| p.1).filter(|&a| inside(a)).collect();
        if hits.is_empty() {
            return Err(Error::EmptySelection("no profile samples pass the sign filter".into()));
        }
        return Ok(hits.iter().sum::<f64>() / hits.len() as f64);
    }
    Ok(integral / length)
}

/// Linearly interpolated sign changes between adjacent samples.
pub fn zero_crossings(profile: &AccelerationProfile) -> Vec<f64> {
    let s = &profile.samples;
    let mut out = Vec::new();
    for (i, w) in s.windows(2).enumerate() {
        let ((y0, a0), (y1, a1)) = (w[0], w[1]);
        if a0 == 0.0 {
            // Count an exact zero once, when it separates opposite signs.
            let before = if i > 0 { s[i - 1].1 } else { 0.0 };
            if i > 0 && before * a1 < 0.0 {
                out.push(y0);
            }
            continue;
        }
        if a0 * a1 < 0.0 {
            out.push(y0 + a0 / (a0 - a1) * (y1 - y0));
        }
    }
    out
}
