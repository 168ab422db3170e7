use thiserror::Error;

/// Every failure the library can report. The CLI maps these onto exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("unsupported degree {0} (cap {1})")]
    UnsupportedDegree(usize, usize),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires a dyadic field")]
    NonDyadicField,
    #[error("operation requires a non-dyadic field")]
    NonDyadicExpected,
    #[error("value outside the domain: {0}")]
    DomainError(String),
    #[error("objects live over different fields ({0} vs {1})")]
    TowerMismatch(String, String),
    #[error("not a good BONG: index {index}: {condition}")]
    NotAGoodBong { index: usize, condition: String },
    #[error("unsupported lattice: {0}")]
    UnsupportedLattice(String),
    #[error("phi_a is undefined because a is not in S")]
    PhiUndefined,
    #[error("a is not in the set A")]
    NotInA,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("rank order violated: rank N = {0} exceeds rank M = {1}")]
    RankOrder(usize, usize),
    #[error("N is not represented by M")]
    NotRepresented,
    #[error("degenerate form")]
    DegenerateForm,
    #[error("oracle inconclusive: {0}")]
    OracleInconclusive(String),
    #[error("law violation: {0}")]
    LawViolation(String),
    #[error("extension degree must be odd")]
    OddDegreeRequired,
    #[error("lattice is not integral")]
    NotIntegral,
    #[error("verdict mismatch: {0}")]
    VerdictMismatch(String),
    #[error("no witness found in the search family: {0}")]
    WitnessGap(String),
    #[error("internal branch gap: {0}")]
    InternalBranchGap(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown field: {0}")]
    UnknownField(String),
}

pub type Result<T> = std::result::Result<T, Error>;
