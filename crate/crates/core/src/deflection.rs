//! Second-order (force) term of the Heisenberg-picture expansion of `<z(t)>`.
//!
//! The force operator is a spin tensor times functions of position, so its
//! expectation on a product `|spatial> (x) |spin>` state factorises into spin
//! correlators `C_ij = <S_i^(p) S_j^(l)>` times spatial moments:
//!
//! ```text
//! a_z = (3k / 4 pi) [ sum_j C_zj <r_j/r^5> + sum_i C_iz <r_i/r^5>
//!                     - 5 sum_ij C_ij <r_i r_j z/r^7> + tr(C) <z/r^5> ]
//! ```
//!
//! with `k = mu0 alpha beta hbar^2 / m` (unity in natural units). The contact
//! term is left out.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{MomentKey, SpatialMoments};
use crate::spin::{correlators, SpinDensity, SpinInput};

const COEF_EPS: f64 = 1e-14;

/// Unit vector exponents: `r_x -> (1,0,0)`, etc.
const UNIT: [(u32, u32, u32); 3] = [(1, 0, 0), (0, 1, 0), (0, 0, 1)];

fn key_r5(i: usize) -> MomentKey {
    let (a, b, c) = UNIT[i];
    (a, b, c, 5)
}

fn key_rr_z_r7(i: usize, j: usize) -> MomentKey {
    let (a1, b1, c1) = UNIT[i];
    let (a2, b2, c2) = UNIT[j];
    (a1 + a2, b1 + b2, c1 + c2 + 1, 7)
}

/// Acceleration along `z` with its breakdown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceExpectation {
    pub a_z: f64,
    /// The four bracket terms evaluated on the state's diagonal part in the
    /// product `S_z` basis:
    /// `S_z^p (S^l.r)`, `(S^p.r) S_z^l`, `-5 (S^p.r)(S^l.r) z / r^2`, `(S^p.S^l) z`.
    pub decomposition: [f64; 4],
    /// Contribution of the coherences between product basis states (zero for
    /// product states and for mixtures of them).
    pub extra_terms: f64,
}

/// `[T1, T2, T3, T4]` before the common prefactor.
fn bracket_terms(c: &[[f64; 3]; 3], moments: &SpatialMoments) -> Result<[f64; 4]> {
    let mut t = [0.0; 4];
    let get = |key: MomentKey, coef: f64| -> Result<f64> {
        if coef.abs() <= COEF_EPS {
            Ok(0.0)
        } else {
            Ok(coef * moments.get(key)?)
        }
    };
    for j in 0..3 {
        t[0] += get(key_r5(j), c[2][j])?;
        t[1] += get(key_r5(j), c[j][2])?;
    }
    for i in 0..3 {
        for j in 0..3 {
            t[2] += get(key_rr_z_r7(i, j), -5.0 * c[i][j])?;
        }
    }
    t[3] = get(key_r5(2), c[0][0] + c[1][1] + c[2][2])?;
    Ok(t)
}

/// Moment keys with a non-zero coefficient for this spin state.
pub fn required_moments(spin: &impl SpinInput) -> Vec<MomentKey> {
    let c = correlators(spin);
    let mut keys = Vec::new();
    let mut push = |k: MomentKey, coef: f64| {
        if coef.abs() > COEF_EPS && !keys.contains(&k) {
            keys.push(k);
        }
    };
    for j in 0..3 {
        push(key_r5(j), c[2][j] + c[j][2]);
    }
    push(key_r5(2), c[0][0] + c[1][1] + c[2][2]);
    for i in 0..3 {
        for j in 0..3 {
            push(key_rr_z_r7(i, j), c[i][j]);
        }
    }
    keys.sort();
    keys
}

/// Expectation of the force operator divided by the mass, for `spin` times a
/// spatial distribution described by `moments`.
pub fn contract_force(spin: &impl SpinInput, moments: &SpatialMoments, coupling: f64) -> Result<ForceExpectation> {
    let rho: SpinDensity = spin.density();
    let pre = 3.0 * coupling / (4.0 * PI);
    let full = bracket_terms(&correlators(&rho), moments)?;
    let diag = bracket_terms(&correlators(&rho.dephased()), moments)?;
    let decomposition = diag.map(|t| pre * t);
    let a_z = pre * full.iter().sum::<f64>();
    let extra_terms = a_z - decomposition.iter().sum::<f64>();
    Ok(ForceExpectation { a_z, decomposition, extra_terms })
}

/// Closed form for `|up,up>` (or any mixture of `|up,up>` and `|down,down>`):
/// `(3k / 16 pi) (-5 <z^3/r^7> + 3 <z/r^5>)`.
pub fn parallel_closed_form(moments: &SpatialMoments, coupling: f64) -> Result<f64> {
    let m3 = moments.get((0, 0, 3, 7))?;
    let m1 = moments.get((0, 0, 1, 5))?;
    Ok(3.0 * coupling / (16.0 * PI) * (-5.0 * m3 + 3.0 * m1))
}

/// Antiparallel counterpart: the negative of [`parallel_closed_form`].
pub fn antiparallel_closed_form(moments: &SpatialMoments, coupling: f64) -> Result<f64> {
    Ok(-parallel_closed_form(moments, coupling)?)
}

/// `F_z = -3 mu0 m1 m2 z / (2 pi |z|^5)` between coaxial dipoles `m1 k` at the
/// origin and `m2 k` at `(0, 0, z)`.
pub fn classical_dipole_force(m1: f64, m2: f64, z: f64, mu0: f64) -> Result<f64> {
    if z == 0.0 {
        return Err(Error::DipoleSingularity);
    }
    Ok(-3.0 * mu0 * m1 * m2 * z / (2.0 * PI * z.abs().powi(5)))
}
