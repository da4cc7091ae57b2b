use thiserror::Error;

/// Errors raised by constructors, builders and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H^dagger| = {0:e})")]
    NonHermitian(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::numerics::MAX_DIM)]
    DimensionTooLarge(usize),

    #[error("coefficient vector is identically zero")]
    ZeroVector,

    #[error("negative Schmidt coefficient {0}")]
    NegativeCoefficient(f64),

    #[error("{name} = {value} is out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("cannot embed dimension {from} into smaller dimension {to}")]
    ShrinkNotAllowed { from: usize, to: usize },

    #[error("dimension {0} is not prime")]
    NotPrime(usize),

    #[error("dimension {0} is too small for this construction")]
    DimensionTooSmall(usize),

    #[error("{m} bases requested but at least {min} are required")]
    TooFewBases { m: usize, min: usize },

    #[error("basis is not unbiased with the standard basis")]
    BasisNotUnbiased,

    #[error("SeparableState: the largest Schmidt coefficient is 1, state is not entangled")]
    SeparableState,

    #[error("OutOfRangeP: p = {p} outside [{lo}, {hi})")]
    OutOfRangeP { p: f64, lo: f64, hi: f64 },

    #[error("top eigenvalue of the verification operator is {0}, expected 1")]
    TopEigenvalueNotOne(f64),

    #[error("top eigenvector overlaps the target with |<Psi|v>|^2 = {0}")]
    TargetNotTopEigenvector(f64),

    #[error("second eigenvalue {numeric} disagrees with closed form {closed}")]
    ClosedFormMismatch { numeric: f64, closed: f64 },

    #[error("no eigenvector with eigenvalue beta orthogonal to the target")]
    DegenerateSpectrum,

    #[error("beta = 0 makes the adversarial sample count singular")]
    BetaZero,

    #[error("beta = 1 makes the pass rate independent of fidelity")]
    BetaOne,

    #[error("strategy is not homogeneous")]
    NotHomogeneous,

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
