use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{GridHamiltonian, GridSpec, GridState};
use super::propagate::TimeSeries;
use crate::error::{Error, Result};
use crate::spin::C64;

/// Least-squares fit `z0 + v0 t + a t^2 / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub z0: f64,
    pub v0: f64,
    pub a: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub max_residual: f64,
    /// Standard errors of `v0` and `a` from the residual.
    pub sigma_v0: f64,
    pub sigma_a: f64,
    pub samples: usize,
    pub window: f64,
}

pub fn fit_acceleration(series: &[(f64, f64)]) -> Result<QuadraticFit> {
    let n = series.len();
    if n < 4 {
        return Err(Error::DegenerateFit(format!("need at least 4 samples, got {n}")));
    }
    if series.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::DegenerateFit("sample times must be strictly increasing".into()));
    }
    let (t0, t_end) = (series[0].0, series[n - 1].0);
    let span = t_end - t0;
    // Scaled abscissa u = (t - t0) / span in [0, 1]; re-expand about t = 0.
    let a = DMatrix::from_fn(n, 3, |i, j| ((series[i].0 - t0) / span).powi(j as i32));
    let b = DVector::from_iterator(n, series.iter().map(|s| s.1));
    let svd = a.clone().svd(true, true);
    if svd.singular_values.min() <= 1e-12 * svd.singular_values.max() {
        return Err(Error::DegenerateFit("design matrix is rank deficient".into()));
    }
    let c = svd.solve(&b, 1e-14).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let resid = &b - &a * &c;
    let rss = resid.norm_squared();
    let max_residual = resid.amax();
    let s2 = if n > 3 { rss / (n - 3) as f64 } else { 0.0 };
    let cov = (a.transpose() * &a).try_inverse().ok_or_else(|| Error::DegenerateFit("singular normal matrix".into()))?;
    // Coefficients in t about t0: c1/span, 2 c2/span^2.
    let (c0, c1, c2) = (c[0], c[1] / span, c[2] / (span * span));
    // Shift the expansion point from t0 to 0.
    let z0 = c0 - c1 * t0 + c2 * t0 * t0;
    let v0 = c1 - 2.0 * c2 * t0;
    Ok(QuadraticFit {
        z0,
        v0,
        a: 2.0 * c2,
        residual: (rss / n as f64).sqrt(),
        max_residual,
        sigma_v0: (s2 * cov[(1, 1)]).sqrt() / span,
        sigma_a: 2.0 * (s2 * cov[(2, 2)]).sqrt() / (span * span),
        samples: n,
        window: span,
    })
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    let parts: Vec<C64> = a
        .par_chunks(4096)
        .zip(b.par_chunks(4096))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum())
        .collect();
    parts.into_iter().sum()
}

/// Initial velocity and acceleration of `<z>` on the grid:
/// `v0 = <i[H, z]>`, `a0 = -<[H, [H, z]]>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BchTerms {
    pub v0: f64,
    pub a0: f64,
}

pub fn bch_initial_terms(state: &GridState, ham: &GridHamiltonian) -> BchTerms {
    let spec = ham.spec;
    let n = spec.points_per_axis;
    let psi = &state.amplitudes;
    let zmul = |v: &[C64]| -> Vec<C64> { v.par_iter().enumerate().map(|(k, c)| c * spec.offset((k / 4) % n)).collect() };
    let zpsi = zmul(psi);
    let mut hpsi = vec![C64::default(); psi.len()];
    let mut hzpsi = vec![C64::default(); psi.len()];
    ham.apply(psi, &mut hpsi);
    ham.apply(&zpsi, &mut hzpsi);
    let w = inner(&hpsi, &zpsi);
    let v0 = -2.0 * w.im / state.norm;
    let zhpsi = zmul(&hpsi);
    let a0 = -(2.0 * inner(&hpsi, &hzpsi).re - 2.0 * inner(&hpsi, &zhpsi).re) / state.norm;
    BchTerms { v0, a0 }
}

/// `|<z(t)> - (z0 + v0 t + a0 t^2 / 2)|` at the chosen window ends, and the
/// log-log slope through them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderFit {
    pub exponent: f64,
    pub points: Vec<(f64, f64)>,
    pub floor: f64,
}

/// Smallest remainder distinguishable from the integration error.
pub fn noise_floor(series: &TimeSeries, grid: &GridSpec) -> f64 {
    10.0 * series.norm_drift().max(f64::EPSILON) * grid.box_half_width
}

pub fn remainder_at(series: &TimeSeries, bch: &BchTerms, t: f64) -> Result<f64> {
    let (k, s) = series
        .samples
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.t - t).abs().total_cmp(&(b.1.t - t).abs()))
        .ok_or_else(|| Error::InvalidInput("empty series".into()))?;
    let dt = if series.samples.len() > 1 { series.samples[1].t } else { 0.0 };
    if (s.t - t).abs() > 0.5 * dt.max(1e-300) {
        return Err(Error::InvalidInput(format!("window {t} is outside the simulated interval")));
    }
    let z0 = series.z_offset[0];
    let pred = z0 + bch.v0 * s.t + 0.5 * bch.a0 * s.t * s.t;
    Ok((series.z_offset[k] - pred).abs())
}

pub fn remainder_scaling(series: &TimeSeries, bch: &BchTerms, windows: &[f64], floor: f64) -> Result<RemainderFit> {
    if windows.len() < 2 {
        return Err(Error::InvalidInput("remainder scaling needs at least two windows".into()));
    }
    let mut points = Vec::with_capacity(windows.len());
    for &t in windows {
        let r = remainder_at(series, bch, t)?;
        if r < floor {
            return Err(Error::BelowResolution { remainder: r, floor });
        }
        points.push((t, r));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(t, r)| (t.ln(), r.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("remainder windows must differ".into()));
    }
    Ok(RemainderFit { exponent: sxy / sxx, points, floor })
}

/// `|| [g(z), p_z] psi - i g'(z) psi ||` on a 1-D grid of `points` nodes over
/// `[0.2, 0.6]` with Dirichlet walls, for a Gaussian test function.
///
/// `g` holds polynomial coefficients, constant first (degree at most 3).
/// The commutator is formed entrywise, `[G, P]_jk = (g_j - g_k) P_jk`.
pub fn canonical_commutator_check(g: &[f64], points: usize) -> Result<f64> {
    if g.len() > 4 {
        return Err(Error::InvalidInput("polynomial degree must be at most 3".into()));
    }
    if points < 8 {
        return Err(Error::InvalidInput("need at least 8 grid points".into()));
    }
    let (lo, hi) = (0.2, 0.6);
    let h = (hi - lo) / (points + 1) as f64;
    let z: Vec<f64> = (0..points).map(|j| lo + (j + 1) as f64 * h).collect();
    let poly = |x: f64| g.iter().rev().fold(0.0, |acc, &c| acc * x + c);
    let dpoly = |x: f64| g.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c);
    let gz: Vec<f64> = z.iter().map(|&x| poly(x)).collect();
    let psi: Vec<f64> = z.iter().map(|&x| (-(x - 0.4).powi(2) / (4.0 * 0.03f64.powi(2))).exp()).collect();
    let mut sum = 0.0;
    for j in 0..points {
        // p = -i/(2h) (shift+ - shift-)
        let up = if j + 1 < points { (gz[j] - gz[j + 1]) * psi[j + 1] } else { 0.0 };
        let down = if j > 0 { (gz[j] - gz[j - 1]) * psi[j - 1] } else { 0.0 };
        let comm = C64::new(0.0, -1.0 / (2.0 * h)) * (up - down);
        let r = comm - C64::new(0.0, dpoly(z[j]) * psi[j]);
        sum += r.norm_sqr();
    }
    Ok((sum * h).sqrt())
}

/// Residuals at `points`, `2 points + 1`, ... (spacing halved each time) and
/// the convergence order from the last two.
pub fn commutator_convergence(g: &[f64], coarse_points: usize, levels: usize) -> Result<(Vec<(f64, f64)>, f64)> {
    if levels < 2 {
        return Err(Error::InvalidInput("need at least two refinement levels".into()));
    }
    let mut out = Vec::with_capacity(levels);
    let mut n = coarse_points;
    for _ in 0..levels {
        let h = 0.4 / (n + 1) as f64;
        out.push((h, canonical_commutator_check(g, n)?));
        n = 2 * n + 1;
    }
    let (a, b) = (out[levels - 2], out[levels - 1]);
    if a.1 == 0.0 || b.1 == 0.0 {
        return Ok((out, f64::NAN));
    }
    Ok((out, (a.1 / b.1).ln() / (a.0 / b.0).ln()))
}
