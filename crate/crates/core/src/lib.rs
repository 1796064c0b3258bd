//! Simulation of a Stern-Gerlach setup in which the deflecting field comes from
//! a two-state magnetic dipole (a superconducting flux qubit) instead of a
//! classical magnet.
//!
//! The crate is organised around the computation chain:
//!
//! - [`spin`]: one- and two-spin-1/2 operators, states and density matrices.
//! - [`units`]: SI parameters, the natural length/time units `l` and `tau`.
//! - [`dipole`]: the point-dipole field, interaction Hamiltonian and the
//!   position-dependent force operator.
//! - [`moments`]: spatial expectation values over a wavepacket by tensor
//!   Gauss-Legendre quadrature, and the acceleration profile along `y`.
//! - [`deflection`]: spin contraction of the force operator (the second-order
//!   commutator term) and its closed forms.
//! - [`oracle`]: brute-force grid evolution of the four-component
//!   Schrödinger equation, used to check the perturbative force.
//! - [`trajectory`]: order-of-magnitude deflection estimate in SI units.
//! - [`epr`]: joint deflection statistics for an EPR pair with two qubit
//!   detectors.
//! - [`cli`]: configuration, presets and the report-writing commands behind
//!   the `sgflux` binary.
//!
//! Internally `hbar = 1`, and dynamical quantities are expressed in the
//! natural units where `mu0 * alpha * beta * hbar^2 / m = 1`.

pub mod cli;
pub mod deflection;
pub mod dipole;
pub mod epr;
pub mod error;
pub mod moments;
pub mod oracle;
pub mod output;
pub mod quadrature;
pub mod spin;
pub mod tolerances;
pub mod trajectory;
pub mod units;

pub use error::{Error, Result};
