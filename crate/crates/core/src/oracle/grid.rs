use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dipole::{interaction_hamiltonian, zeeman_term, Position3};
use crate::error::{Error, Result};
use crate::moments::{Profile, WavePacket};
use crate::spin::{ComplexMatrix, SpinDensity, SpinState, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Chebyshev expansion of `exp(-i H dt)`, accurate to rounding.
    #[default]
    Chebyshev,
    /// Classical fourth-order Runge-Kutta.
    Rk4,
}

/// Cubic box of `points_per_axis^3` interior nodes with zero (Dirichlet)
/// walls at `box_center +- box_half_width`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub box_center: Position3,
    pub box_half_width: f64,
    pub dt: f64,
    pub steps: usize,
    /// `kappa = hbar tau / (m l^2)`.
    pub kinetic_scale: f64,
    #[serde(default)]
    pub integrator: Integrator,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_axis < 4 {
            return Err(Error::InvalidInput("grid needs at least 4 points per axis".into()));
        }
        for (name, v) in [("box_half_width", self.box_half_width), ("dt", self.dt), ("kinetic_scale", self.kinetic_scale)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if self.box_center.norm() - 3f64.sqrt() * self.box_half_width <= 0.0 {
            return Err(Error::SingularSupport);
        }
        Ok(())
    }

    /// Node spacing.
    pub fn spacing(&self) -> f64 {
        2.0 * self.box_half_width / (self.points_per_axis + 1) as f64
    }

    /// Offset of node `i` from the box center along any axis.
    pub fn offset(&self, i: usize) -> f64 {
        -self.box_half_width + (i + 1) as f64 * self.spacing()
    }

    pub fn node(&self, ix: usize, iy: usize, iz: usize) -> Position3 {
        self.box_center.offset(self.offset(ix), self.offset(iy), self.offset(iz))
    }

    pub fn points(&self) -> usize {
        self.points_per_axis.pow(3)
    }

    /// Length of an amplitude vector (four spin components per node).
    pub fn len(&self) -> usize {
        4 * self.points()
    }

    pub fn is_empty(&self) -> bool {
        self.points_per_axis == 0
    }

    fn split(&self, p: usize) -> (usize, usize, usize) {
        let n = self.points_per_axis;
        (p / (n * n), (p / n) % n, p % n)
    }

    /// Largest eigenvalue of the kinetic term, `(kappa/2) (12/h^2)` bound.
    pub fn kinetic_bound(&self) -> f64 {
        let h = self.spacing();
        6.0 * self.kinetic_scale / (h * h)
    }
}

/// Pointwise two-spin potential plus the finite-difference kinetic term.
#[derive(Clone, Debug)]
pub struct GridHamiltonian {
    pub spec: GridSpec,
    potential: Vec<[[C64; 4]; 4]>,
    bounds: (f64, f64),
}

impl GridHamiltonian {
    /// `-(kappa/2) lap + H_int + Z` in units of `hbar / tau`.
    ///
    /// `coupling` is the natural-unit force coupling (`sign(alpha beta)`, or a
    /// multiple of it); the interaction energy carries an extra `1/kappa`.
    /// `zeeman` holds `(alpha B0 tau, beta B0 tau)`.
    pub fn new(spec: GridSpec, coupling: f64, zeeman: Option<(f64, f64)>) -> Result<Self> {
        spec.validate()?;
        let field = interaction_hamiltonian(coupling / spec.kinetic_scale);
        let z = zeeman.map(|(a, b)| zeeman_term(a, b).to_array());
        let potential = (0..spec.points())
            .into_par_iter()
            .map(|p| {
                let (ix, iy, iz) = spec.split(p);
                let mut v = if coupling == 0.0 { [[ZERO; 4]; 4] } else { field.evaluate_array(spec.node(ix, iy, iz))? };
                if let Some(z) = &z {
                    for (row, zrow) in v.iter_mut().zip(z) {
                        for (a, b) in row.iter_mut().zip(zrow) {
                            *a += b;
                        }
                    }
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        // Gershgorin bounds per node.
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in &potential {
            for i in 0..4 {
                let off: f64 = (0..4).filter(|&j| j != i).map(|j| v[i][j].norm()).sum();
                lo = lo.min(v[i][i].re - off);
                hi = hi.max(v[i][i].re + off);
            }
        }
        let bounds = (lo, hi + spec.kinetic_bound());
        Ok(Self { spec, potential, bounds })
    }

    /// Kinetic term only.
    pub fn free(spec: GridSpec) -> Result<Self> {
        Self::new(spec, 0.0, None)
    }

    /// Interval containing the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        self.bounds
    }

    pub fn spectral_radius(&self) -> f64 {
        self.bounds.0.abs().max(self.bounds.1.abs())
    }

    /// `out = (H psi - shift psi) * scale`.
    pub fn apply_affine(&self, psi: &[C64], out: &mut [C64], shift: f64, scale: f64) {
        let n = self.spec.points_per_axis;
        let h = self.spec.spacing();
        let kin = -0.5 * self.spec.kinetic_scale / (h * h);
        let (sz, sy, sx) = (4, 4 * n, 4 * n * n);
        out.par_chunks_mut(sx).enumerate().for_each(|(ix, slab)| {
            for iy in 0..n {
                for iz in 0..n {
                    let p = (ix * n + iy) * n + iz;
                    let base = 4 * p;
                    let v = &self.potential[p];
                    for s in 0..4 {
                        let k = base + s;
                        let c = psi[k];
                        let mut lap = c * -6.0;
                        if iz > 0 {
                            lap += psi[k - sz];
                        }
                        if iz + 1 < n {
                            lap += psi[k + sz];
                        }
                        if iy > 0 {
                            lap += psi[k - sy];
                        }
                        if iy + 1 < n {
                            lap += psi[k + sy];
                        }
                        if ix > 0 {
                            lap += psi[k - sx];
                        }
                        if ix + 1 < n {
                            lap += psi[k + sx];
                        }
                        let mut acc = lap * kin - c * shift;
                        for (t, &vst) in v[s].iter().enumerate() {
                            acc += vst * psi[base + t];
                        }
                        slab[(iy * n + iz) * 4 + s] = acc * scale;
                    }
                }
            }
        });
    }

    pub fn apply(&self, psi: &[C64], out: &mut [C64]) {
        self.apply_affine(psi, out, 0.0, 1.0);
    }
}

/// Amplitudes on the grid, ordered `(x, y, z, spin)` with spin fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    pub amplitudes: Vec<C64>,
    pub norm: f64,
}

impl GridState {
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Self {
        let norm = norm_sqr(&amplitudes);
        Self { amplitudes, norm }
    }
}

/// Nodes per partial sum. Fixed chunks summed in order keep reductions
/// independent of thread scheduling.
const CHUNK: usize = 1024;

/// `sum_p f(p, amplitudes at p)` over nodes, reduced deterministically.
pub(crate) fn node_sum<const K: usize, F>(amps: &[C64], f: F) -> [f64; K]
where
    F: Fn(usize, &[C64]) -> [f64; K] + Sync,
{
    let partials: Vec<[f64; K]> = amps
        .par_chunks(4 * CHUNK)
        .enumerate()
        .map(|(c, block)| {
            let mut acc = [0.0; K];
            for (i, node) in block.chunks(4).enumerate() {
                let v = f(c * CHUNK + i, node);
                for k in 0..K {
                    acc[k] += v[k];
                }
            }
            acc
        })
        .collect();
    let mut total = [0.0; K];
    for p in partials {
        for k in 0..K {
            total[k] += p[k];
        }
    }
    total
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    node_sum(v, |_, node| [node.iter().map(|c| c.norm_sqr()).sum::<f64>()])[0]
}

/// Product state `packet (x) spin` at rest.
pub fn initialize(packet: &WavePacket, spin: &SpinState, grid: &GridSpec) -> Result<GridState> {
    initialize_with_momentum(packet, spin, grid, 0.0)
}

/// Product state with the spatial part multiplied by `exp(i k_z (z - z_c))`.
pub fn initialize_with_momentum(packet: &WavePacket, spin: &SpinState, grid: &GridSpec, k_z: f64) -> Result<GridState> {
    grid.validate()?;
    let h = grid.spacing();
    let margin = grid.box_half_width - 2.0 * h;
    let c = grid.box_center;
    let d = [packet.center.x - c.x, packet.center.y - c.y, packet.center.z - c.z];
    if d.iter().any(|x| x.abs() + packet.half_support() > margin) {
        return Err(Error::InvalidInput("wavepacket does not fit in the box with a two-cell margin".into()));
    }
    let spin_amps = *spin.amplitudes();
    let mut amps = vec![ZERO; grid.len()];
    amps.par_chunks_mut(4).enumerate().for_each(|(p, chunk)| {
        let (ix, iy, iz) = grid.split(p);
        let r = grid.node(ix, iy, iz);
        let dr = [r.x - packet.center.x, r.y - packet.center.y, r.z - packet.center.z];
        let spatial = match packet.profile {
            Profile::Square => {
                if packet.contains(r) {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Gaussian => {
                let s2 = packet.width * packet.width;
                (-(dr[0] * dr[0] + dr[1] * dr[1] + dr[2] * dr[2]) / (4.0 * s2)).exp()
            }
        };
        let phase = C64::from_polar(spatial, k_z * (r.z - c.z));
        for (a, s) in chunk.iter_mut().zip(&spin_amps) {
            *a = phase * s;
        }
    });
    let total = norm_sqr(&amps);
    if total == 0.0 {
        return Err(Error::InvalidInput("wavepacket covers no grid node".into()));
    }
    let inv = 1.0 / total.sqrt();
    amps.par_iter_mut().for_each(|a| *a *= inv);
    Ok(GridState::from_amplitudes(amps))
}

/// `<r>`, normalised by the state's norm.
pub fn expect_position(state: &GridState, grid: &GridSpec) -> Position3 {
    let n = grid.points_per_axis;
    let sums = node_sum(&state.amplitudes, |p, node| {
        let w: f64 = node.iter().map(|a| a.norm_sqr()).sum();
        let (ix, iy, iz) = (p / (n * n), (p / n) % n, p % n);
        [w * grid.offset(ix), w * grid.offset(iy), w * grid.offset(iz), w]
    });
    let c = grid.box_center;
    c.offset(sums[0] / sums[3], sums[1] / sums[3], sums[2] / sums[3])
}

/// `<z> - z_c` without the cancellation of adding the box center back.
pub fn expect_z_offset(state: &GridState, grid: &GridSpec) -> f64 {
    let n = grid.points_per_axis;
    let [num, den] = node_sum(&state.amplitudes, |p, node| {
        let w: f64 = node.iter().map(|a| a.norm_sqr()).sum();
        [w * grid.offset(p % n), w]
    });
    num / den
}

/// `<p_z>` with the central-difference stencil `-i (psi_{j+1} - psi_{j-1}) / 2h`.
pub fn expect_momentum_z(state: &GridState, grid: &GridSpec) -> f64 {
    let n = grid.points_per_axis;
    let h = grid.spacing();
    let a = &state.amplitudes;
    // <p> = Im(sum conj(psi_j) psi_{j+1}) / h
    let [s] = node_sum(a, |p, node| {
        if p % n + 1 == n {
            return [0.0];
        }
        [(0..4).map(|s| (node[s].conj() * a[4 * (p + 1) + s]).im).sum::<f64>()]
    });
    s / h / state.norm
}

/// Reduced spin density, tracing out position.
pub fn spin_marginal(state: &GridState) -> Result<SpinDensity> {
    let mut rho = [[ZERO; 4]; 4];
    for chunk in state.amplitudes.chunks(4) {
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] += chunk[i] * chunk[j].conj();
            }
        }
    }
    let flat: Vec<C64> = rho.iter().flatten().map(|c| c / state.norm).collect();
    SpinDensity::new(ComplexMatrix::from_row_slice(4, 4, &flat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{basis_state, SpinState, Projection::*};
    use approx::assert_abs_diff_eq;

    fn spec(n: usize) -> GridSpec {
        GridSpec {
            points_per_axis: n,
            box_center: Position3::new(0.0, 0.0, 0.4),
            box_half_width: 0.05,
            dt: 1e-7,
            steps: 1,
            kinetic_scale: 0.876,
            integrator: Integrator::Chebyshev,
        }
    }

    fn gaussian() -> WavePacket {
        WavePacket::gaussian(Position3::new(0.0, 0.0, 0.4), 0.007).unwrap()
    }

    #[test]
    fn initial_state_properties() {
        let g = spec(32);
        let s = initialize(&gaussian(), &SpinState::parallel_coherent(), &g).unwrap();
        assert_abs_diff_eq!(s.norm, 1.0, epsilon = 1e-12);
        assert!((expect_position(&s, &g).z - 0.4).abs() < g.spacing());
        assert!(expect_momentum_z(&s, &g).abs() < 1e-10);
        let rho = spin_marginal(&s).unwrap();
        let want = SpinDensity::pure(&SpinState::parallel_coherent());
        let d = (rho.matrix() - want.matrix()).max_abs();
        assert!(d < 1e-13, "{d}");
    }

    #[test]
    fn translated_packet() {
        let g = spec(32);
        let p = WavePacket::gaussian(Position3::new(0.0, 0.0, 0.4 + 2.0 * g.spacing()), 0.005).unwrap();
        let s = initialize(&p, &basis_state(Up, Up), &g).unwrap();
        assert_abs_diff_eq!(expect_position(&s, &g).z, 0.4 + 2.0 * g.spacing(), epsilon = 1e-9);
    }

    #[test]
    fn momentum_kick() {
        let g = spec(24);
        let k = 40.0;
        let s = initialize_with_momentum(&gaussian(), &basis_state(Up, Up), &g, k).unwrap();
        // Central difference of a plane wave: sin(k h) / h, times the overlap
        // of neighbouring Gaussian samples.
        let h = g.spacing();
        let p = expect_momentum_z(&s, &g);
        let overlap = (-h * h / (8.0 * 0.007f64.powi(2))).exp();
        assert!((p - (k * h).sin() / h * overlap).abs() < 1e-3 * p.abs(), "{p}");
    }

    #[test]
    fn packet_outside_box_rejected() {
        let g = spec(16);
        let wide = WavePacket::gaussian(Position3::new(0.0, 0.0, 0.4), 0.01).unwrap();
        assert!(initialize(&wide, &basis_state(Up, Up), &g).is_err());
        let mut bad = spec(16);
        bad.box_center = Position3::new(0.0, 0.0, 0.05);
        assert!(matches!(bad.validate(), Err(Error::SingularSupport)));
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let g = spec(6);
        let ham = GridHamiltonian::new(g, 1.0, Some((3.0, -2.0))).unwrap();
        let n = g.len();
        // <e_a|H|e_b> = conj(<e_b|H|e_a>) on a sample of basis vectors.
        let mut cols = Vec::new();
        for b in [0, 5, 17, 100, n - 1] {
            let mut e = vec![ZERO; n];
            e[b] = C64::new(1.0, 0.0);
            let mut out = vec![ZERO; n];
            ham.apply(&e, &mut out);
            cols.push((b, out));
        }
        for (a, ca) in &cols {
            for (b, cb) in &cols {
                assert!((ca[*b] - cb[*a].conj()).norm() < 1e-9);
            }
        }
        let (lo, hi) = ham.spectral_bounds();
        assert!(lo < hi);
    }
}
