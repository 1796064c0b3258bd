//! Finite-dimensional spin-1/2 algebra for the particle/loop pair.
//!
//! Units: `hbar = 1`. Two-spin objects use the product basis
//! `{|up,up>, |up,down>, |down,up>, |down,down>}` with the particle index
//! varying slowest, i.e. `|particle> (x) |loop>`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::{EXPECTATION_IMAG, SPIN_EXACT, WEIGHT_SUM};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    /// Row-major constructor. Panics if `entries.len() != rows * cols`.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[C64]) -> Self {
        Self(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[(r, c)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self(&self.0 * &other.0))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self(&self.0 + &other.0))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.0.shape() != other.0.shape() {
            return Err(Error::Dimension(format!(
                "shape {:?} vs {:?}",
                self.0.shape(),
                other.0.shape()
            )));
        }
        Ok(())
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.try_mul(other)?;
        let ba = other.try_mul(self)?;
        Ok(Self(ab.0 - ba.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows() == self.cols() && (&self.0 - self.0.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(SPIN_EXACT * self.max_abs().max(1.0)) {
            return Err(Error::InvalidInput("eigenvalues requested for non-Hermitian matrix".into()));
        }
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        Ok(ev)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols() {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols())));
        }
        let out = &self.0 * DVector::from_column_slice(v);
        Ok(out.iter().copied().collect())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

// Operator-style arithmetic for same-shape matrices. Shape mismatch is a
// programming error here, use the `try_` methods when shapes are not fixed.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Particle,
    Loop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    Up,
    Down,
}

/// Single spin-1/2 operator (2x2), in units of `hbar`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOperator(ComplexMatrix);

impl SpinOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn identity() -> Self {
        Self(ComplexMatrix::identity(2))
    }
}

/// Operator on the four-dimensional particle/loop spin space.
///
/// Not necessarily Hermitian: products of observables are representable too.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSpinOperator(ComplexMatrix);

impl TwoSpinOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::Dimension(format!("two-spin operator must be 4x4, got {}x{}", m.rows(), m.cols())));
        }
        Ok(Self(m))
    }

    pub fn zero() -> Self {
        Self(ComplexMatrix::zeros(4, 4))
    }

    pub fn identity() -> Self {
        Self(ComplexMatrix::identity(4))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale_re(s))
    }

    pub fn is_hermitian(&self) -> bool {
        self.0.is_hermitian(SPIN_EXACT * self.0.max_abs().max(1.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&(&self.0 * &other.0) - &(&other.0 * &self.0))
    }

    /// Dense row-major copy of the entries.
    pub fn to_array(&self) -> [[C64; 4]; 4] {
        let mut out = [[ZERO; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.0.get(r, c);
            }
        }
        out
    }
}

impl Add for &TwoSpinOperator {
    type Output = TwoSpinOperator;
    fn add(self, rhs: Self) -> TwoSpinOperator {
        TwoSpinOperator(&self.0 + &rhs.0)
    }
}

impl Sub for &TwoSpinOperator {
    type Output = TwoSpinOperator;
    fn sub(self, rhs: Self) -> TwoSpinOperator {
        TwoSpinOperator(&self.0 - &rhs.0)
    }
}

impl Mul for &TwoSpinOperator {
    type Output = TwoSpinOperator;
    fn mul(self, rhs: Self) -> TwoSpinOperator {
        TwoSpinOperator(&self.0 * &rhs.0)
    }
}

/// `(hbar/2)` times the Pauli matrix for `axis`.
pub fn spin_generator(axis: Axis) -> SpinOperator {
    let h = C64::new(0.5, 0.0);
    let m = match axis {
        Axis::X => [ZERO, h, h, ZERO],
        Axis::Y => [ZERO, -I * h, I * h, ZERO],
        Axis::Z => [h, ZERO, ZERO, -h],
    };
    SpinOperator(ComplexMatrix::from_row_slice(2, 2, &m))
}

/// Lift a single-spin operator onto the pair: `op (x) I` or `I (x) op`.
pub fn embed(op: &SpinOperator, slot: Slot) -> TwoSpinOperator {
    let id = ComplexMatrix::identity(2);
    match slot {
        Slot::Particle => TwoSpinOperator(op.0.kron(&id)),
        Slot::Loop => TwoSpinOperator(id.kron(&op.0)),
    }
}

/// `S_i^(p) S_j^(l)`.
pub fn spin_product(i: Axis, j: Axis) -> TwoSpinOperator {
    &embed(&spin_generator(i), Slot::Particle) * &embed(&spin_generator(j), Slot::Loop)
}

/// `S^(p) . S^(l)`: `1/4` on the triplet, `-3/4` on the singlet.
pub fn spin_dot() -> TwoSpinOperator {
    Axis::ALL
        .iter()
        .fold(TwoSpinOperator::zero(), |acc, &a| &acc + &spin_product(a, a))
}

/// Normalised pure state of the particle/loop pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState([C64; 4]);

impl SpinState {
    /// Normalises `amps`; fails for the zero vector.
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= f64::MIN_POSITIVE {
            return Err(Error::DegenerateSuperposition);
        }
        Ok(Self(amps.map(|z| z / norm)))
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn singlet() -> Self {
        superpose(&[basis_state(Projection::Up, Projection::Down), basis_state(Projection::Down, Projection::Up)], &[ONE, -ONE])
            .expect("singlet is non-degenerate")
    }

    /// `(|up,up> + |down,down>)/sqrt 2`, the coherent parallel combination.
    pub fn parallel_coherent() -> Self {
        superpose(&[basis_state(Projection::Up, Projection::Up), basis_state(Projection::Down, Projection::Down)], &[ONE, ONE])
            .expect("non-degenerate")
    }

    /// `(|up,down> + |down,up>)/sqrt 2`, the coherent antiparallel combination.
    pub fn antiparallel_coherent() -> Self {
        superpose(&[basis_state(Projection::Up, Projection::Down), basis_state(Projection::Down, Projection::Up)], &[ONE, ONE])
            .expect("non-degenerate")
    }
}

/// Spin preparations selectable by name in configuration files.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedState {
    /// `|up,up>`
    #[default]
    Parallel,
    /// `|up,down>`
    Antiparallel,
    ParallelCoherent,
    AntiparallelCoherent,
    Singlet,
}

impl NamedState {
    pub fn state(self) -> SpinState {
        match self {
            NamedState::Parallel => basis_state(Projection::Up, Projection::Up),
            NamedState::Antiparallel => basis_state(Projection::Up, Projection::Down),
            NamedState::ParallelCoherent => SpinState::parallel_coherent(),
            NamedState::AntiparallelCoherent => SpinState::antiparallel_coherent(),
            NamedState::Singlet => SpinState::singlet(),
        }
    }
}

pub fn basis_state(particle: Projection, loop_: Projection) -> SpinState {
    let idx = |p: Projection| match p {
        Projection::Up => 0,
        Projection::Down => 1,
    };
    let mut amps = [ZERO; 4];
    amps[2 * idx(particle) + idx(loop_)] = ONE;
    SpinState(amps)
}

/// Normalised linear combination `sum_k c_k |psi_k>`.
pub fn superpose(states: &[SpinState], amplitudes: &[C64]) -> Result<SpinState> {
    if states.len() != amplitudes.len() {
        return Err(Error::InvalidInput(format!(
            "{} states but {} amplitudes",
            states.len(),
            amplitudes.len()
        )));
    }
    let mut acc = [ZERO; 4];
    for (s, &c) in states.iter().zip(amplitudes) {
        for (a, &v) in acc.iter_mut().zip(&s.0) {
            *a += c * v;
        }
    }
    SpinState::new(acc)
}

/// Density matrix on the pair: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinDensity(ComplexMatrix);

impl SpinDensity {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::Dimension("density must be 4x4".into()));
        }
        if !m.is_hermitian(SPIN_EXACT) {
            return Err(Error::InvalidInput("density is not Hermitian".into()));
        }
        if (m.trace() - ONE).norm() > SPIN_EXACT {
            return Err(Error::InvalidInput("density trace differs from one".into()));
        }
        let min = m.hermitian_eigenvalues()?[0];
        if min < -SPIN_EXACT {
            return Err(Error::InvalidInput(format!("density has negative eigenvalue {min:e}")));
        }
        Ok(Self(m))
    }

    pub fn pure(state: &SpinState) -> Self {
        let mut m = ComplexMatrix::zeros(4, 4).0;
        for r in 0..4 {
            for c in 0..4 {
                m[(r, c)] = state.0[r] * state.0[c].conj();
            }
        }
        Self(ComplexMatrix(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// Keeps only the diagonal in the product `S_z` basis.
    pub fn dephased(&self) -> Self {
        let diag: Vec<C64> = (0..4).map(|i| self.0.get(i, i)).collect();
        Self(ComplexMatrix::from_diagonal(&diag))
    }
}

/// `sum_k w_k |psi_k><psi_k|`.
pub fn mixture(states: &[SpinState], weights: &[f64]) -> Result<SpinDensity> {
    if states.len() != weights.len() || states.is_empty() {
        return Err(Error::InvalidInput("mixture needs one weight per state".into()));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::InvalidInput("mixture weights must be non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM {
        return Err(Error::InvalidInput(format!("mixture weights sum to {total}")));
    }
    let m = states
        .iter()
        .zip(weights)
        .fold(ComplexMatrix::zeros(4, 4), |acc, (s, &w)| &acc + &SpinDensity::pure(s).0.scale_re(w));
    Ok(SpinDensity(m))
}

/// Anything that can be reduced to a density matrix on the pair.
pub trait SpinInput {
    fn density(&self) -> SpinDensity;
}

impl SpinInput for SpinState {
    fn density(&self) -> SpinDensity {
        SpinDensity::pure(self)
    }
}

impl SpinInput for SpinDensity {
    fn density(&self) -> SpinDensity {
        self.clone()
    }
}

impl<T: SpinInput + ?Sized> SpinInput for &T {
    fn density(&self) -> SpinDensity {
        (**self).density()
    }
}

/// `tr(rho O)`, required to be real.
pub fn expectation(op: &TwoSpinOperator, state: &impl SpinInput) -> Result<f64> {
    let rho = state.density();
    let v = (&rho.0 * &op.0).trace();
    if v.im.abs() >= EXPECTATION_IMAG {
        return Err(Error::NonHermitianExpectation { imag: v.im });
    }
    Ok(v.re)
}

/// Two-point spin correlators `C[i][j] = <S_i^(p) S_j^(l)>`.
pub fn correlators(state: &impl SpinInput) -> [[f64; 3]; 3] {
    let rho = state.density();
    let mut c = [[0.0; 3]; 3];
    for i in Axis::ALL {
        for j in Axis::ALL {
            // S_i (x) S_j is Hermitian, so the trace is real.
            c[i.index()][j.index()] = (&rho.0 * &spin_product(i, j).0).trace().re;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    use Projection::{Down, Up};

    fn assert_mat_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        assert!((a - b).max_abs() < tol, "{a:?} != {b:?}");
    }

    #[test]
    fn sz_is_half_diag() {
        let sz = spin_generator(Axis::Z);
        let expect = ComplexMatrix::from_diagonal(&[C64::new(0.5, 0.0), C64::new(-0.5, 0.0)]);
        assert_mat_close(sz.matrix(), &expect, 1e-15);
    }

    #[test]
    fn generators_square_to_quarter_identity() {
        for a in Axis::ALL {
            let s = spin_generator(a);
            let sq = s.matrix() * s.matrix();
            assert_mat_close(&sq, &ComplexMatrix::identity(2).scale_re(0.25), 1e-15);
        }
    }

    #[test]
    fn su2_commutators() {
        let cyc = [(Axis::X, Axis::Y, Axis::Z), (Axis::Y, Axis::Z, Axis::X), (Axis::Z, Axis::X, Axis::Y)];
        for (a, b, c) in cyc {
            let comm = spin_generator(a).matrix().commutator(spin_generator(b).matrix()).unwrap();
            assert_mat_close(&comm, &spin_generator(c).matrix().scale(I), 1e-15);
        }
        for a in Axis::ALL {
            let comm = spin_generator(a).matrix().commutator(spin_generator(a).matrix()).unwrap();
            assert!(comm.max_abs() == 0.0);
        }
    }

    #[test]
    fn embedding_diagonals() {
        let sz = spin_generator(Axis::Z);
        let p = embed(&sz, Slot::Particle);
        let l = embed(&sz, Slot::Loop);
        let d = |v: [f64; 4]| ComplexMatrix::from_diagonal(&v.map(|x| C64::new(x, 0.0)));
        assert_mat_close(p.matrix(), &d([0.5, 0.5, -0.5, -0.5]), 1e-15);
        assert_mat_close(l.matrix(), &d([0.5, -0.5, 0.5, -0.5]), 1e-15);
    }

    #[test]
    fn double_flip_on_up_up() {
        let op = spin_product(Axis::X, Axis::X);
        let out = op.matrix().apply(basis_state(Up, Up).amplitudes()).unwrap();
        let expect = [ZERO, ZERO, ZERO, C64::new(0.25, 0.0)];
        for (o, e) in out.iter().zip(expect) {
            assert!((o - e).norm() < 1e-15);
        }
    }

    #[test]
    fn particle_and_loop_operators_commute() {
        for a in Axis::ALL {
            for b in Axis::ALL {
                let pa = embed(&spin_generator(a), Slot::Particle);
                let lb = embed(&spin_generator(b), Slot::Loop);
                assert!(pa.commutator(&lb).matrix().max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn spin_dot_values() {
        let sd = spin_dot();
        assert_abs_diff_eq!(expectation(&sd, &basis_state(Up, Up)).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(expectation(&sd, &SpinState::singlet()).unwrap(), -0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(expectation(&sd, &basis_state(Up, Down)).unwrap(), -0.25, epsilon = 1e-15);
        let ev = sd.matrix().hermitian_eigenvalues().unwrap();
        let expect = [-0.75, 0.25, 0.25, 0.25];
        for (e, x) in ev.iter().zip(expect) {
            assert_abs_diff_eq!(*e, x, epsilon = 1e-12);
        }
    }

    #[test]
    fn basis_ordering() {
        let one = |i: usize| {
            let mut a = [ZERO; 4];
            a[i] = ONE;
            a
        };
        assert_eq!(basis_state(Up, Up).amplitudes(), &one(0));
        assert_eq!(basis_state(Up, Down).amplitudes(), &one(1));
        assert_eq!(basis_state(Down, Up).amplitudes(), &one(2));
        assert_eq!(basis_state(Down, Down).amplitudes(), &one(3));
    }

    #[test]
    fn superposition_normalises() {
        let s = SpinState::parallel_coherent();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - r).abs() < 1e-15);
        assert!((s.amplitudes()[3].re - r).abs() < 1e-15);
        let s = superpose(&[basis_state(Up, Up)], &[C64::new(3.0, 0.0)]).unwrap();
        assert_eq!(s, basis_state(Up, Up));
        let singlet = SpinState::singlet();
        assert!((singlet.amplitudes()[1].re - r).abs() < 1e-15);
        assert!((singlet.amplitudes()[2].re + r).abs() < 1e-15);
    }

    #[test]
    fn degenerate_superposition_errors() {
        let s = basis_state(Up, Up);
        let err = superpose(&[s.clone(), s], &[ONE, -ONE]).unwrap_err();
        assert!(matches!(err, Error::DegenerateSuperposition));
        assert!(superpose(&[basis_state(Up, Up)], &[]).is_err());
    }

    #[test]
    fn mixtures() {
        let rho = mixture(&[basis_state(Up, Up), basis_state(Down, Down)], &[0.5, 0.5]).unwrap();
        let d = ComplexMatrix::from_diagonal(&[0.5, 0.0, 0.0, 0.5].map(|x| C64::new(x, 0.0)));
        assert_mat_close(rho.matrix(), &d, 1e-15);

        let pure = mixture(&[basis_state(Up, Up)], &[1.0]).unwrap();
        assert_mat_close(&(pure.matrix() * pure.matrix()), pure.matrix(), 1e-15);
        assert!((mixture(&[SpinState::singlet()], &[1.0]).unwrap().purity() - 1.0).abs() < 1e-12);

        let all = [basis_state(Up, Up), basis_state(Up, Down), basis_state(Down, Up), basis_state(Down, Down)];
        let flat = mixture(&all, &[0.25; 4]).unwrap();
        assert_mat_close(flat.matrix(), &ComplexMatrix::identity(4).scale_re(0.25), 1e-15);

        assert!(mixture(&[basis_state(Up, Up)], &[-0.1]).is_err());
        assert!(mixture(&[basis_state(Up, Up), basis_state(Down, Down)], &[0.5, 0.6]).is_err());
    }

    #[test]
    fn expectations_on_coherent_parallel() {
        let psi = SpinState::parallel_coherent();
        assert_abs_diff_eq!(expectation(&spin_product(Axis::Z, Axis::Z), &basis_state(Up, Up)).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(expectation(&spin_product(Axis::X, Axis::X), &psi).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(expectation(&spin_product(Axis::Y, Axis::Y), &psi).unwrap(), -0.25, epsilon = 1e-15);
    }

    #[test]
    fn non_hermitian_expectation_rejected() {
        // S_x^(p) S_y^(p) = (i/2) S_z^(p) has imaginary expectation on |up,up>.
        let op = &embed(&spin_generator(Axis::X), Slot::Particle) * &embed(&spin_generator(Axis::Y), Slot::Particle);
        let err = expectation(&op, &basis_state(Up, Up)).unwrap_err();
        assert!(matches!(err, Error::NonHermitianExpectation { .. }));
    }

    #[test]
    fn density_validation() {
        let bad = ComplexMatrix::from_diagonal(&[1.2, -0.2, 0.0, 0.0].map(|x| C64::new(x, 0.0)));
        assert!(SpinDensity::new(bad).is_err());
        let ok = ComplexMatrix::from_diagonal(&[0.7, 0.3, 0.0, 0.0].map(|x| C64::new(x, 0.0)));
        assert!(SpinDensity::new(ok).is_ok());
    }

    #[test]
    fn singlet_correlators_are_isotropic() {
        let c = correlators(&SpinState::singlet());
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { -0.25 } else { 0.0 };
                assert_abs_diff_eq!(c[i][j], e, epsilon = 1e-15);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn amp() -> impl Strategy<Value = C64> {
            (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
        }

        proptest! {
            #[test]
            fn hermitian_expectations_are_real(a in amp(), b in amp(), c in amp(), d in amp(), i in 0usize..3, j in 0usize..3) {
                prop_assume!(a.norm() + b.norm() + c.norm() + d.norm() > 1e-3);
                let psi = SpinState::new([a, b, c, d]).unwrap();
                prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
                let op = spin_product(Axis::ALL[i], Axis::ALL[j]);
                prop_assert!(expectation(&op, &psi).is_ok());
                prop_assert!(expectation(&spin_dot(), &psi).is_ok());
            }
        }
    }
}
