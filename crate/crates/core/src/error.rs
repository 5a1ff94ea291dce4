use thiserror::Error;

/// Errors raised by the group, distribution and measure layers and by the
/// input parsers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a group needs at least one cyclic factor")]
    NoFactors,

    #[error("modulus at position {position} must be at least 1, got {value}")]
    InvalidModulus { position: usize, value: i128 },

    #[error("group order {order} exceeds the cap of {cap}")]
    OrderCapExceeded { order: u128, cap: usize },

    #[error("elements or sets come from different groups ({left} vs {right})")]
    GroupMismatch { left: String, right: String },

    #[error("element has {found} coordinates, the group has {expected} factors")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {value} on axis {axis} is outside [0, {modulus})")]
    CoordinateOutOfRange { axis: usize, value: i128, modulus: usize },

    #[error("set is not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("group order {order} exceeds the subgroup enumeration cap of {cap}; supply candidate subgroups")]
    EnumerationCapExceeded { order: usize, cap: usize },

    #[error("group has more than {cap} subgroups; supply candidate subgroups")]
    SubgroupCountExceeded { cap: usize },

    #[error("operation needs a non-empty set")]
    EmptySet,

    #[error("candidate subgroup list is empty")]
    NoCandidates,

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("epsilon {0} is outside [0, 1]")]
    InvalidEpsilon(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("exact mass arithmetic overflowed")]
    Overflow,

    #[error("unknown family {0:?}; expected delete, add, mixed or random")]
    UnknownFamily(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid group spec {spec:?}: {message}")]
    GroupSpec { spec: String, message: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
