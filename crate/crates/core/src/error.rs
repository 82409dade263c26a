use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("variable x{index} out of range for n = {n}")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("constant polynomial")]
    ConstantPolynomial,
    #[error("polynomial is not quasi-homogeneous")]
    NotQuasiHomogeneous,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("covector has a negative entry")]
    NegativeCovector,
    #[error("domain of {points} points exceeds budget {budget}")]
    BudgetExceeded { points: u128, budget: u128 },
    #[error("modulus {0} too large for an exact histogram")]
    ModulusTooLarge(u128),
    #[error("support of {size} points exceeds the face enumeration limit {limit}")]
    EnumerationLimit { size: usize, limit: usize },
    #[error("modulus polynomial is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("0 is not a critical point")]
    OriginNotCritical,
    #[error("dimension estimate inconclusive (slope {0:.3})")]
    InconclusiveDimension(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
