use crate::combinatorics::PartitionClass;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("input sequence is empty")]
    EmptySequence,

    #[error("partition enumeration of n = {n} exceeds the configured limit of {limit}")]
    EnumerationLimit { n: usize, limit: usize },

    #[error("series order {order} exceeds the cap of {cap}")]
    SeriesCap { order: usize, cap: usize },

    #[error("order {n} is not valid for the {class} bound")]
    InvalidOrder { class: PartitionClass, n: usize },

    #[error("missing mixed moment for exponent vector {0:?}")]
    MissingMixedMoment(Vec<u32>),

    #[error("missing absolute moment of order {0}")]
    MissingAbsMoment(usize),

    #[error("missing central absolute moment of order {0}")]
    MissingCentralAbsMoment(usize),

    #[error("sequence is flagged symmetric but m_{0} is nonzero")]
    SymmetryViolated(usize),

    #[error("sequence is flagged centered but m_1 is nonzero")]
    MeanNotZero,

    #[error("cumulant sequence is not centered (kappa_1 = {0})")]
    NotCentered(String),

    #[error("moment sequence inconsistent at order {order}: {reason}")]
    Inconsistent { order: usize, reason: String },

    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error(
        "moment growth condition E|X - EX|^{order} <= v L^({order}-2) fails ({moment} > {limit})"
    )]
    MomentGrowth {
        order: usize,
        moment: f64,
        limit: f64,
    },
}
