use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("non-positive entry at index {index}")]
    NonPositive { index: usize },
    #[error("quotients decrease at index {index}")]
    NonMonotoneQuotients { index: usize },
    #[error("sequence is not log-convex at index {index}")]
    NonLogConvex { index: usize },
    #[error("truncation {got} too short, need at least {need}")]
    TruncationTooShort { got: usize, need: usize },
    #[error("argument {t} beyond trusted range {limit} and no tail model")]
    OutOfTrustedRange { t: f64, limit: f64 },
    #[error("series terms do not decay within the horizon at t = {t}")]
    NoDecayWithinK { t: f64 },
    #[error("supremum attained at the domain boundary for k = {k}")]
    SupAtBoundary { k: usize },
    #[error("Young conjugate unbounded: log t = o(omega) fails")]
    Unbounded,
    #[error("weight function is not o(t)")]
    NotSublinear,
    #[error("weight is quasianalytic; integral diverges")]
    QuasianalyticWeight,
    #[error("no tail model and |z| = {modulus} is near the trusted limit {limit}")]
    TailUnbounded { modulus: f64, limit: f64 },
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("quantified condition needs at least {need} rows, got {got}")]
    InsufficientRows { got: usize, need: usize },
    #[error("index {what} not found within the horizon K = {k}")]
    HorizonExceeded { what: String, k: usize },
    #[error("no witness for row {row}")]
    WitnessMissing { row: String },
    #[error("selection stalls at level {level}: {what} not found within K = {k}")]
    SelectionStalls { level: usize, what: String, k: usize },
    #[error("jet is not in the Beurling class: {0}")]
    JetNotInClass(String),
    #[error("theta sequence violates {invariant}")]
    PropertyViolation { invariant: String, diagnostics: Box<crate::constructions::ThetaDiagnostics> },
    #[error("verification {0} failed")]
    VerificationFailed(String),
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("derivative order {order} exceeds the cap {cap}")]
    DerivativeOrderExceeded { order: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
