use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("inconsistent multiplication table: {0}")]
    InconsistentTable(String),
    #[error("algebra has no involution")]
    MissingInvolution,
    #[error("norm undefined: a*involute(a) is not a scalar multiple of the unit")]
    NormUndefined,
    #[error("expected a quaternion element (dimension 4, basis 1,i,j,k)")]
    NotQuaternion,
    #[error("expected an octonion element")]
    NotOctonion,
    #[error("element has components along 1 or e7; J is defined on V only")]
    NotInV,
    #[error("unassigned symbol: {0}")]
    UnassignedSymbol(String),
    #[error("field index {0} exceeds the retained coefficient range K={1}")]
    FieldOutOfRange(u32, u32),
    #[error("insufficient depth or coefficient range: {0}")]
    DepthInsufficient(String),
    #[error("operator is not monic of the requested order: {0}")]
    NotMonic(String),
    #[error("nonzero sub-leading coefficient at order n-1; normalization is out of scope")]
    SubLeadingTerm,
    #[error("inconsistent constraint system: {0}")]
    InconsistentSystem(String),
    #[error("daggered symbols are not supported here: {0}")]
    DaggerUnsupported(String),
    #[error("quaternion is not invertible (zero norm)")]
    NotInvertible,
    #[error("u is not an imaginary unit (need scalar part 0 and u^2 = -1)")]
    NotImaginaryUnit,
    #[error("nonzero coefficient at exponent {0} >= 0 in a flow commutator")]
    FlowNotNegative(i64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
