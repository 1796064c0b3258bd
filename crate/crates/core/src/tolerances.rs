//! Shared numerical tolerances.

/// Hermiticity, normalisation and trace checks on spin objects.
pub const SPIN_EXACT: f64 = 1e-12;

/// Largest imaginary part tolerated when an expectation value is taken as real.
pub const EXPECTATION_IMAG: f64 = 1e-10;

/// Relative change between successive quadrature refinements.
pub const QUADRATURE_REL: f64 = 1e-10;

/// Per-step norm drift above which grid evolution is aborted.
pub const STEP_NORM_DRIFT: f64 = 1e-6;

/// Norm conservation demanded of a complete grid run.
pub const RUN_NORM_DRIFT: f64 = 1e-8;

/// Probability weights must sum to one within this.
pub const WEIGHT_SUM: f64 = 1e-12;
