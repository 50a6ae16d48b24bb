use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("integration produced a non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("comparison window [{start}, {end}] contains no grid points")]
    EmptyWindow { start: f64, end: f64 },

    #[error("peak P2 = {max_p2} never reaches the threshold 1 - P_cr = {threshold}")]
    ThresholdNotReached { max_p2: f64, threshold: f64 },

    #[error("pulse has zero action at t = {time}; cannot normalize")]
    ZeroAction { time: f64 },

    #[error("derivative order {0} outside the supported range 1..=10")]
    DerivativeOrder(usize),

    #[error("no optimizer candidate reached P2 >= 1 - P_cr")]
    NoViableCandidate,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
