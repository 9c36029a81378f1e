use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tridiagonal solve broke down at row {row} (pivot {pivot})")]
    SolverBreakdown { row: usize, pivot: f64 },

    #[error("simulation produced a non-finite field at t = {t}")]
    NonFiniteField { t: f64 },

    #[error("barrier clock expired: t = {t} >= T0 = {t0}")]
    ClockExpired { t: f64, t0: f64 },

    #[error("comparison precondition violated: {0}")]
    OrderingPrecondition(String),

    #[error("no bubble yet: origin gradient {gradient} below {required}")]
    NoBubble { gradient: f64, required: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("stereographic projection undefined at the pole")]
    PoleProjection,
}
