//! Brute-force check of the perturbative force: the four-component
//! Schrödinger equation on a 3-D grid.
//!
//! Natural units with `hbar = 1`: time in `tau`, lengths in `l`, energies in
//! `1/tau`. The Hamiltonian is
//! `H = -(kappa/2) lap + H_int / kappa + Z`, where `kappa = hbar tau/(m l^2)`;
//! with this scaling `d^2<z>/dt^2` equals the natural-unit force expectation.

mod analysis;
mod grid;
mod propagate;
mod run;

pub use analysis::{
    bch_initial_terms, canonical_commutator_check, commutator_convergence, fit_acceleration, noise_floor, remainder_at,
    remainder_scaling, BchTerms, QuadraticFit, RemainderFit,
};
pub use grid::{
    expect_momentum_z, expect_position, expect_z_offset, initialize, initialize_with_momentum, spin_marginal, GridHamiltonian,
    GridSpec, GridState, Integrator,
};
pub use propagate::{bessel_j_sequence, evolve, run, Propagator, Sample, TimeSeries};
pub use run::{
    fit_window, run_oracle, OracleConfig, OracleOutcome, OracleReport, OracleSetup, ACCELERATION_TOLERANCE,
    EXPONENT_TOLERANCE, RUN_NORM_TOLERANCE,
};
