use thiserror::Error;

/// Every failure mode of the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("integral of x^-1 has no Laurent antiderivative: {0}")]
    LogObstruction(String),
    #[error("no closed-form antiderivative: {0}")]
    NoClosedAntiderivative(String),
    #[error("coefficient requested beyond the known truncation order: {0}")]
    TruncationExceeded(String),
    #[error("operator is not Fuchsian at 0: {0}")]
    NotFuchsian(String),
    #[error("indicial polynomial has irrational or complex roots: {0}")]
    IrrationalIndicialRoots(String),
    #[error("resonant exponents {0} and {1}")]
    ResonantObstruction(String, String),
    #[error("fundamental system has a degenerate Wronskian")]
    WronskianDegenerate,
    #[error("boundary evaluation matrix is singular")]
    SingularEvaluationMatrix,
    #[error("boundary space is not semi-regular: {0}")]
    NotSemiRegular(String),
    #[error("kernel contains a point evaluation or derivative: {0}")]
    DistributionalKernel(String),
    #[error("coefficient functional needs infinitely many terms: {0}")]
    NotFinitary(String),
    #[error("value is not rational: {0}")]
    NonRationalValue(String),
    #[error("coefficient has a pole in the interval: {0}")]
    PoleInInterval(String),
    #[error("quadrature did not converge at x = {x}: estimate {estimate}")]
    QuadratureNonconvergent { x: f64, estimate: f64 },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
