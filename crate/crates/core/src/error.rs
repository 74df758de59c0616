use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin: 2S = {0} (must satisfy 1 <= 2S <= {max})", max = crate::spin::MAX_TWICE_SPIN)]
    InvalidSpin(u32),
    #[error("invalid magnetic quantum number 2M = {twice_m} for 2S = {twice_s}")]
    InvalidMagnetic { twice_s: u32, twice_m: i32 },
    #[error("invalid angle {name} = {value}")]
    InvalidAngle { name: &'static str, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("state vector has zero or non-finite norm")]
    ZeroVector,
    #[error("polynomial has no nonzero coefficient")]
    ZeroPolynomial,
    #[error("index k = {k} outside [{lo}, {hi}]")]
    IndexOutOfRange { k: i64, lo: i64, hi: i64 },
    #[error("slot {slot} out of range for {slots} slots")]
    SlotOutOfRange { slot: usize, slots: usize },
    #[error("hidden variable {0} outside [-1, 1]")]
    InvalidHiddenVariable(f64),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("cannot write a mixed state as a uniform mixture of {0} pure state(s)")]
    Infeasible(usize),
    #[error("cascade has no unmeasured slot left")]
    EmptyCascade,
    #[error("outcome branch has zero probability")]
    ZeroProbabilityBranch,
    #[error("invalid measurement order")]
    InvalidOrder,
    #[error("a simulation needs at least one trial")]
    NoTrials,
}

pub type Result<T> = std::result::Result<T, Error>;
