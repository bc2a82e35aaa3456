use thiserror::Error;

/// Errors raised by the arithmetic, decomposition and extraction routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a Pauli monomial: {0}")]
    NotAMonomial(String),
    #[error("determinant is {0}, expected 1 for SL(2)")]
    NotInSl2(u64),
    #[error("zero matrix has no reduction")]
    ZeroMatrix,
    #[error("matrix is not in Sp(4, F_p)")]
    NotSymplectic,
    #[error("matrix lies in the block subgroup <D1,D2,D3>; it has no S(k) reduction")]
    InSubgroupH,
    #[error("matrix satisfies neither X^T J X = J nor X^T J X = -J")]
    NotInGroup,
    #[error("automorphism does not normalize the Pauli group: {0}")]
    NotInNormalizer(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by malformed input text rather than by the mathematics.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::NotPrime(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
