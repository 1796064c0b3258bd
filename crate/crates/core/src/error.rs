use thiserror::Error;

/// Errors raised by the simulation library.
///
/// Variants fall in two families, reported by [`Error::is_validation`]:
/// invalid inputs (exit code 1 in the CLI) and numerical failures (exit code 2).
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate superposition: resulting vector has zero norm")]
    DegenerateSuperposition,

    #[error("non-Hermitian expectation: imaginary part {imag:e} exceeds tolerance")]
    NonHermitianExpectation { imag: f64 },

    #[error("dipole singularity: operator evaluated at r = 0")]
    DipoleSingularity,

    #[error("singular support: wavepacket region touches the origin")]
    SingularSupport,

    #[error("unstable step: norm drifted by {drift:e} in a single step")]
    UnstableStep { drift: f64 },

    #[error("below resolution: remainder {remainder:e} is under the noise floor {floor:e}")]
    BelowResolution { remainder: f64, floor: f64 },

    #[error("missing spatial moment (a={0}, b={1}, c={2}, n={3})")]
    MissingMoment(u32, u32, u32, u32),

    #[error("quadrature did not converge: last relative change {0:e}")]
    QuadratureNotConverged(f64),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown dimension tag `{0}`")]
    UnknownDimension(String),

    #[error("empty selection: {0}")]
    EmptySelection(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSuperposition
                | Error::DipoleSingularity
                | Error::SingularSupport
                | Error::MissingMoment(..)
                | Error::Dimension(_)
                | Error::InvalidInput(_)
                | Error::UnknownDimension(_)
                | Error::EmptySelection(_)
                | Error::Config(_)
                | Error::Json(_)
        )
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        if self.is_validation() {
            1
        } else {
            2
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
