use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("scalar backends differ: {0} vs {1}")]
    BackendMismatch(&'static str, &'static str),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix size {0} is odd, an even size is required")]
    OddSize(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not skew-symmetric")]
    NotSkewSymmetric,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not Hamiltonian")]
    NotHamiltonian,
    #[error("invalid block parameters: {0}")]
    InvalidBlock(String),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("characteristic polynomial is not a power of the given polynomial")]
    NotPowerOfIrreducible,
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("nilpotent matrix has {0} Jordan blocks, exactly one is required")]
    MultipleBlocks(usize),
    #[error("value is not an eigenvalue")]
    NotAnEigenvalue,
    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),
    #[error("numerically indeterminate: {0}")]
    Indeterminate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Malformed,
    Precondition,
    Indeterminate,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) | Error::BackendMismatch(..) => ErrorKind::Malformed,
            Error::Indeterminate(_) => ErrorKind::Indeterminate,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
