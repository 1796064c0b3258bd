use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{expect_z_offset, norm_sqr, GridHamiltonian, GridState, Integrator};
use crate::error::{Error, Result};
use crate::spin::C64;
use crate::tolerances::STEP_NORM_DRIFT;

/// Largest `R dt` accepted for a Chebyshev step (bounds the term count).
pub const CHEBYSHEV_MAX_ARGUMENT: f64 = 2000.0;
/// Stability limit of RK4 on the imaginary axis.
pub const RK4_MAX_ARGUMENT: f64 = 2.0 * std::f64::consts::SQRT_2;

const BESSEL_CUTOFF: f64 = 1e-18;

/// `J_0(x) .. J_n(x)` by Miller's backward recurrence, normalised with
/// `J_0 + 2 sum J_2k = 1`.
pub fn bessel_j_sequence(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = {
        let m = n.max(x.ceil() as usize) + 30 + (10.0 * x.sqrt()) as usize;
        m + m % 2
    };
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = v / norm;
    }
    out
}

/// Expansion coefficients of `exp(-i H dt)` in Chebyshev polynomials of
/// `(H - c) / R`, without the global phase `exp(-i c dt)`.
fn chebyshev_coefficients(radius_dt: f64) -> Vec<C64> {
    let n = (radius_dt.ceil() as usize) + 40 + (4.0 * radius_dt.cbrt()) as usize;
    let j = bessel_j_sequence(radius_dt, n);
    let last = j.iter().rposition(|v| v.abs() > BESSEL_CUTOFF).unwrap_or(0);
    let mut phase = C64::new(1.0, 0.0);
    let mi = C64::new(0.0, -1.0);
    (0..=last)
        .map(|k| {
            let c = phase * j[k] * if k == 0 { 1.0 } else { 2.0 };
            phase *= mi;
            c
        })
        .collect()
}

/// Fixed-step propagator for one Hamiltonian.
pub struct Propagator<'a> {
    ham: &'a GridHamiltonian,
    integrator: Integrator,
    dt: f64,
    center: f64,
    radius: f64,
    coefs: Vec<C64>,
    work: [Vec<C64>; 4],
}

impl<'a> Propagator<'a> {
    pub fn new(ham: &'a GridHamiltonian) -> Result<Self> {
        let spec = ham.spec;
        let (lo, hi) = ham.spectral_bounds();
        let center = 0.5 * (lo + hi);
        let radius = 0.5 * (hi - lo) * 1.01 + 1e-12;
        let coefs = match spec.integrator {
            Integrator::Chebyshev => {
                if radius * spec.dt > CHEBYSHEV_MAX_ARGUMENT {
                    return Err(Error::InvalidInput(format!(
                        "dt = {} too large: spectral half-width times dt is {:.3e}, limit {CHEBYSHEV_MAX_ARGUMENT}",
                        spec.dt,
                        radius * spec.dt
                    )));
                }
                chebyshev_coefficients(radius * spec.dt)
            }
            Integrator::Rk4 => {
                if ham.spectral_radius() * spec.dt > RK4_MAX_ARGUMENT {
                    return Err(Error::InvalidInput(format!(
                        "dt = {} exceeds the RK4 stability bound {:.3e}",
                        spec.dt,
                        RK4_MAX_ARGUMENT / ham.spectral_radius()
                    )));
                }
                Vec::new()
            }
        };
        let n = spec.len();
        let work = [vec![C64::default(); n], vec![C64::default(); n], vec![C64::default(); n], vec![C64::default(); n]];
        Ok(Self { ham, integrator: spec.integrator, dt: spec.dt, center, radius, coefs, work })
    }

    /// Number of Hamiltonian applications per step.
    pub fn cost_per_step(&self) -> usize {
        match self.integrator {
            Integrator::Chebyshev => self.coefs.len().saturating_sub(1),
            Integrator::Rk4 => 4,
        }
    }

    /// Advances `psi` by one step in place.
    pub fn step(&mut self, psi: &mut [C64]) -> Result<()> {
        let before = norm_sqr(psi);
        match self.integrator {
            Integrator::Chebyshev => self.chebyshev_step(psi),
            Integrator::Rk4 => self.rk4_step(psi),
        }
        let after = norm_sqr(psi);
        let drift = (after - before).abs() / before;
        if !(drift <= STEP_NORM_DRIFT) {
            return Err(Error::UnstableStep { drift });
        }
        Ok(())
    }

    fn chebyshev_step(&mut self, psi: &mut [C64]) {
        let [prev, cur, next, acc] = &mut self.work;
        let (c, inv_r) = (self.center, 1.0 / self.radius);
        prev.copy_from_slice(psi);
        let a0 = self.coefs[0];
        acc.par_iter_mut().zip(prev.par_iter()).for_each(|(o, &p)| *o = a0 * p);
        if self.coefs.len() > 1 {
            self.ham.apply_affine(prev, cur, c, inv_r);
            let a1 = self.coefs[1];
            acc.par_iter_mut().zip(cur.par_iter()).for_each(|(o, &p)| *o += a1 * p);
            for &ak in &self.coefs[2..] {
                self.ham.apply_affine(cur, next, c, 2.0 * inv_r);
                next.par_iter_mut().zip(prev.par_iter()).for_each(|(nx, &pv)| *nx -= pv);
                acc.par_iter_mut().zip(next.par_iter()).for_each(|(o, &p)| *o += ak * p);
                std::mem::swap(prev, cur);
                std::mem::swap(cur, next);
            }
        }
        let phase = C64::from_polar(1.0, -c * self.dt);
        psi.par_iter_mut().zip(acc.par_iter()).for_each(|(p, &a)| *p = phase * a);
    }

    fn rk4_step(&mut self, psi: &mut [C64]) {
        let dt = self.dt;
        let [k, tmp, acc, _] = &mut self.work;
        let mi = C64::new(0.0, -1.0);
        acc.copy_from_slice(psi);
        tmp.copy_from_slice(psi);
        for (stage, w) in [(0, 1.0 / 6.0), (1, 1.0 / 3.0), (2, 1.0 / 3.0), (3, 1.0 / 6.0)] {
            // k = -i H tmp
            self.ham.apply(tmp, k);
            k.par_iter_mut().for_each(|v| *v *= mi);
            acc.par_iter_mut().zip(k.par_iter()).for_each(|(a, &kv)| *a += kv * (w * dt));
            let next_scale = match stage {
                0 | 1 => 0.5 * dt,
                2 => dt,
                _ => 0.0,
            };
            if stage < 3 {
                tmp.par_iter_mut().zip(psi.par_iter()).zip(k.par_iter()).for_each(|((t, &p), &kv)| *t = p + kv * next_scale);
            }
        }
        psi.copy_from_slice(acc);
    }
}

/// Single step of the state under `ham`.
pub fn evolve(state: &GridState, ham: &GridHamiltonian) -> Result<GridState> {
    let mut p = Propagator::new(ham)?;
    let mut amps = state.amplitudes.clone();
    p.step(&mut amps)?;
    Ok(GridState::from_amplitudes(amps))
}

/// One point of a time series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub z_expect: f64,
    pub norm: f64,
}

/// `<z>` series over `steps` steps, starting with `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub z_center: f64,
    /// `<z> - z_center` per sample, kept separately to avoid cancellation.
    pub z_offset: Vec<f64>,
    pub samples: Vec<Sample>,
}

impl TimeSeries {
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.samples.first().map_or(1.0, |s| s.norm);
        self.samples.iter().map(|s| (s.norm - n0).abs() / n0).fold(0.0, f64::max)
    }

    /// `(t, <z> - z_center)` pairs.
    pub fn offsets(&self) -> Vec<(f64, f64)> {
        self.samples.iter().zip(&self.z_offset).map(|(s, &z)| (s.t, z)).collect()
    }

    pub fn to_csv(&self) -> String {
        crate::output::csv(&["t", "z_expect", "norm"], self.samples.iter().map(|s| vec![s.t, s.z_expect, s.norm]))
    }
}

/// Evolves `state` for `ham.spec.steps` steps, recording `<z>` after each.
pub fn run(state: &GridState, ham: &GridHamiltonian) -> Result<(GridState, TimeSeries)> {
    let spec = ham.spec;
    let mut prop = Propagator::new(ham)?;
    let mut psi = state.amplitudes.clone();
    let zc = spec.box_center.z;
    let record = |psi: &[C64], t: f64, series: &mut TimeSeries| {
        let s = GridState::from_amplitudes(psi.to_vec());
        let off = expect_z_offset(&s, &spec);
        series.z_offset.push(off);
        series.samples.push(Sample { t, z_expect: zc + off, norm: s.norm });
    };
    let mut series = TimeSeries { z_center: zc, z_offset: Vec::new(), samples: Vec::new() };
    record(&psi, 0.0, &mut series);
    for k in 1..=spec.steps {
        prop.step(&mut psi)?;
        record(&psi, k as f64 * spec.dt, &mut series);
    }
    Ok((GridState::from_amplitudes(psi), series))
}
