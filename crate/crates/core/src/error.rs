use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("site {site} out of range for {n} atoms")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("operator is not Hermitian (max |H - H^dagger| = {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("operator is not unitary (max |U U^dagger - I| = {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("measurement branch has zero probability ({probability:e})")]
    ZeroProbabilityBranch { probability: f64 },
    #[error("site {site} is entangled with the rest of the register (dominant weight {dominant})")]
    ResidualEntanglement { site: usize, dominant: f64 },
    #[error("singular coupling denominator: |M^3 - W^3| = {magnitude:e}")]
    SingularDenominator { magnitude: f64 },
    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),
    #[error("operator leaks out of the subspace (max leakage {leakage:e})")]
    Leakage { leakage: f64 },
    #[error("invalid party roles: {0}")]
    InvalidRoles(String),
    #[error("receiver laser strength must be positive, got {0}")]
    ZeroReceiverGamma(f64),
    #[error("sender laser strength must be positive, got {0}")]
    ZeroSenderGamma(f64),
    #[error("fidelity undefined: success probability {probability:e} at theta = {theta}")]
    UndefinedFidelity { theta: f64, probability: f64 },
    #[error("integrand singular: success probability {probability:e} at theta = {theta}")]
    SingularIntegrand { theta: f64, probability: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
