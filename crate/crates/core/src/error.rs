use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("extension degree {0} is outside the supported range 2..=10")]
    InvalidDegree(u32),

    #[error("polynomial {poly:#x} does not have degree {degree}")]
    PolynomialDegree { poly: u32, degree: u32 },

    #[error("polynomial {0:#x} is reducible over GF(2)")]
    Reducible(u32),

    #[error("division by zero")]
    DivisionByZero,

    #[error("element {value:#x} does not fit in GF(2^{degree})")]
    ElementOutOfRange { value: u32, degree: u32 },

    #[error("index ({row}, {col}) out of bounds for {nrows}x{ncols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operands live in different fields (f = {left:#x} vs f = {right:#x})")]
    FieldMismatch { left: u32, right: u32 },

    #[error("triangular matrix is singular: zero on the diagonal at index {index}")]
    Singular { index: usize },

    #[error("invalid permutation vector: entry {index} is {value} (length {len}, dimension {dim})")]
    InvalidPermutation {
        index: usize,
        value: usize,
        len: usize,
        dim: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
