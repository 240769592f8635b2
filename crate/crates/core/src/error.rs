use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field context mismatch: r={0} vs r={1}")]
    ContextMismatch(u32, u32),
    #[error("{0} is not a unit modulo {1}")]
    NotAUnit(i64, u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("element is not in the totally real subfield")]
    NotTotallyReal,
    #[error("valuation of zero is infinite")]
    ZeroValuation,
    #[error("denominator divisible by the residue characteristic {0}")]
    NonIntegral(u64),
    #[error("no generator with coordinates in [-{bound},{bound}] for {missing} ideal(s) above {q} (residue degree {f}, {count} ideals)")]
    GeneratorSearchExhausted { q: u64, f: u32, count: usize, missing: usize, bound: i64 },
    #[error("identity check failed: {0}")]
    IdentityFailed(String),
    #[error("singular curve")]
    Singular,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("norm bound exceeded: {norm} > {bound}")]
    NormBound { norm: u64, bound: u64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
