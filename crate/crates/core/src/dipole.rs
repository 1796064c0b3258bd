//! Point-dipole field, dipole-dipole interaction and the force operator.
//!
//! Operators act on the particle/loop spin space with `hbar = 1`. The
//! coupling constant `k` multiplying them is `mu0 alpha beta` in whatever unit
//! system the caller works in; in natural units with accelerations in
//! `l / tau^2` it is `sign(alpha beta)` (see [`crate::units`]).
//!
//! The contact (`delta^3(r)`) pieces of the field, Hamiltonian and force are
//! never evaluated: every position handed to these functions has `r > 0`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{spin_dot, spin_product, Axis, ComplexMatrix, TwoSpinOperator, C64};
use crate::units::{NaturalUnits, PhysicalParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn offset(&self, dx: f64, dy: f64, dz: f64) -> Self {
        Self::new(self.x + dx, self.y + dy, self.z + dz)
    }
}

/// Magnetic field of a point dipole, `(mu0 / 4 pi r^3) [3 (m.u) u - m]`.
pub fn dipole_field(moment: [f64; 3], at: Position3, mu0: f64) -> Result<[f64; 3]> {
    let r = at.norm();
    if r == 0.0 {
        return Err(Error::DipoleSingularity);
    }
    let u = at.as_array().map(|c| c / r);
    let mu: f64 = moment.iter().zip(&u).map(|(m, u)| m * u).sum();
    let pre = mu0 / (4.0 * PI * r.powi(3));
    Ok([0, 1, 2].map(|i| pre * (3.0 * mu * u[i] - moment[i])))
}

/// Spin tensor products `S_i^(p) S_j^(l)` as dense arrays, plus `S.S`.
struct SpinTables {
    products: [[[[C64; 4]; 4]; 3]; 3],
    dot: [[C64; 4]; 4],
}

fn tables() -> &'static SpinTables {
    static TABLES: OnceLock<SpinTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut products = [[[[C64::new(0.0, 0.0); 4]; 4]; 3]; 3];
        for i in Axis::ALL {
            for j in Axis::ALL {
                products[i.index()][j.index()] = spin_product(i, j).to_array();
            }
        }
        SpinTables { products, dot: spin_dot().to_array() }
    })
}

/// `sum_ij coef[i][j] S_i^(p) S_j^(l) + dot_coef S^(p).S^(l)` as a dense 4x4 array.
pub(crate) fn spin_tensor(coef: &[[f64; 3]; 3], dot_coef: f64) -> [[C64; 4]; 4] {
    let t = tables();
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            let mut acc = t.dot[r][c] * dot_coef;
            for i in 0..3 {
                for j in 0..3 {
                    if coef[i][j] != 0.0 {
                        acc += t.products[i][j][r][c] * coef[i][j];
                    }
                }
            }
            *v = acc;
        }
    }
    out
}

fn to_operator(a: [[C64; 4]; 4]) -> TwoSpinOperator {
    let flat: Vec<C64> = a.iter().flatten().copied().collect();
    TwoSpinOperator::new(ComplexMatrix::from_row_slice(4, 4, &flat)).expect("4x4")
}

/// Coefficients of the interaction Hamiltonian at `r`:
/// `-(k / 4 pi r^3) [3 (S.u)(S.u) - S.S]` as (tensor, dot) parts.
pub(crate) fn interaction_coefficients(k: f64, at: Position3) -> Result<([[f64; 3]; 3], f64)> {
    let r = at.norm();
    if r == 0.0 {
        return Err(Error::DipoleSingularity);
    }
    let v = at.as_array();
    let pre = -k / (4.0 * PI * r.powi(3));
    let mut coef = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            coef[i][j] = pre * 3.0 * v[i] * v[j] / (r * r);
        }
    }
    Ok((coef, -pre))
}

/// Coefficients of the force operator at `r`:
/// `(3k / 4 pi r^5) [S_z^p (S^l.r) + (S^p.r) S_z^l - 5 (S^p.r)(S^l.r) z / r^2 + (S.S) z]`.
pub(crate) fn force_coefficients(k: f64, at: Position3) -> Result<([[f64; 3]; 3], f64)> {
    let r = at.norm();
    if r == 0.0 {
        return Err(Error::DipoleSingularity);
    }
    let v = at.as_array();
    let z = at.z;
    let r2 = r * r;
    let pre = 3.0 * k / (4.0 * PI * r.powi(5));
    let mut coef = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut c = -5.0 * v[i] * v[j] * z / r2;
            if i == 2 {
                c += v[j];
            }
            if j == 2 {
                c += v[i];
            }
            coef[i][j] = pre * c;
        }
    }
    Ok((coef, pre * z))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Interaction,
    Force,
}

/// Position-dependent two-spin operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorField {
    pub kind: FieldKind,
    /// `mu0 alpha beta` in the caller's unit system.
    pub coupling: f64,
    /// The contact term is tracked here only; it never enters evaluation.
    pub includes_delta_term: bool,
}

impl OperatorField {
    pub fn evaluate(&self, at: Position3) -> Result<TwoSpinOperator> {
        Ok(to_operator(self.evaluate_array(at)?))
    }

    pub fn evaluate_array(&self, at: Position3) -> Result<[[C64; 4]; 4]> {
        let (coef, dot) = match self.kind {
            FieldKind::Interaction => interaction_coefficients(self.coupling, at)?,
            FieldKind::Force => force_coefficients(self.coupling, at)?,
        };
        Ok(spin_tensor(&coef, dot))
    }
}

/// `H_int(r) = -(k / 4 pi r^3) [3 (S^p.u)(S^l.u) - S^p.S^l]`.
pub fn interaction_hamiltonian(coupling: f64) -> OperatorField {
    OperatorField { kind: FieldKind::Interaction, coupling, includes_delta_term: false }
}

/// The force operator `-dH_int/dz`. Its expectation divided by the particle
/// mass is the Ehrenfest acceleration; with `k = mu0 alpha beta hbar^2 / m`
/// (unity in natural units) it is the acceleration directly.
pub fn force_operator(coupling: f64) -> OperatorField {
    OperatorField { kind: FieldKind::Force, coupling, includes_delta_term: false }
}

/// `-(a S_z^(p) + b S_z^(l))`, where `a = alpha B0` and `b = beta B0` in the
/// caller's energy unit (per unit `hbar`).
pub fn zeeman_term(alpha_b0: f64, beta_b0: f64) -> TwoSpinOperator {
    // S_z (x) I and I (x) S_z are diagonal: (+-1/2) per factor.
    let d = |p: f64, l: f64| C64::new(-(alpha_b0 * p + beta_b0 * l), 0.0);
    let diag = [d(0.5, 0.5), d(0.5, -0.5), d(-0.5, 0.5), d(-0.5, -0.5)];
    TwoSpinOperator::new(ComplexMatrix::from_diagonal(&diag)).expect("4x4")
}

/// Zeeman operator in natural units (energies in `hbar / tau`).
pub fn zeeman_natural(params: &PhysicalParams, units: &NaturalUnits) -> TwoSpinOperator {
    let (a, b) = units.zeeman_rates(params);
    zeeman_term(a, b)
}
