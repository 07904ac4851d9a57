use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("table limit {limit} outside the supported range 2..=2^40")]
    LimitOutOfRange { limit: u64 },

    #[error("failed to allocate {bytes} bytes for the complexity table")]
    Allocation { bytes: usize },

    #[error("{n} is outside the table range 1..={limit}")]
    OutOfRange { n: u64, limit: u64 },

    #[error("k must be at least 1")]
    KTooSmall,

    #[error("table limit {limit} too small for k = {k}: largest value with that complexity is {needed}")]
    TableTooSmall { k: u64, needed: BigUint, limit: u64 },

    #[error("invalid threshold: {0}")]
    InvalidThreshold(&'static str),

    #[error("step size must satisfy 0 < alpha < 1 (got alpha {0} bound)")]
    AlphaNotInUnitInterval(&'static str),

    #[error("the multiplicative pruning bound requires alpha <= 1/2")]
    AlphaAboveHalf,

    #[error("index mismatch: expected i + j = k + 2 with 2 <= i, j")]
    LemmaIndexMismatch,

    #[error("prior snapshots are inconsistent with the requested step or bound")]
    InconsistentPriors,

    #[error("horizon {horizon} puts {n}*3^{horizon} beyond the table limit {limit}")]
    HorizonOutOfRange { n: u64, horizon: u32, limit: u64 },

    #[error("factor multisets are limited to 16 elements (got {0})")]
    TooManyFactors(usize),

    #[error("factor multiset must be nonempty with every factor > 1")]
    BadFactorSet,

    #[error("part sums must satisfy sum < k + 1")]
    PartitionSumTooLarge,

    #[error("partition inputs must be strictly positive rationals")]
    NonPositivePart,

    #[error("growth fits need at least 3 sample points")]
    TooFewPoints,

    #[error("bound {x} exceeds the table limit {limit}")]
    BoundExceedsLimit { x: u64, limit: u64 },

    #[error("the power-of-two verification is only backed up to a = 21 (got {0})")]
    ExponentBeyondProof(u32),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
