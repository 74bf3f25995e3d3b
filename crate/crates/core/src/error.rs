use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cap exceeded: {what} = {value} is above the configured limit {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("exponent tuple {0:?} is not weakly decreasing")]
    NotWeaklyDecreasing(Vec<u32>),

    #[error("groups over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),

    #[error("group rank {rank} exceeds matrix dimension {d}")]
    RankExceedsD { rank: usize, d: usize },

    #[error("label sets differ: {0}")]
    LabelMismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// An exact computation produced an impossible intermediate (e.g. a nonzero
    /// remainder in a division that must be exact).
    #[error("internal arithmetic error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
