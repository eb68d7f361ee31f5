use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid factor context: {0}")]
    InvalidContext(String),

    #[error("shape mismatch: expected {expected}x{expected}, found {rows}x{cols}")]
    ShapeMismatch { expected: usize, rows: usize, cols: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("SingularInput: smallest singular value ratio {margin:e} is below tolerance {tol:e}")]
    SingularInput { margin: f64, tol: f64 },

    #[error("IllConditioned: condition number {cond:e} exceeds limit {limit:e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("NotUnitary: residual {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("NotPositiveDefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("NotCyclicSeparating: margin {margin:e}")]
    NotCyclicSeparating { margin: f64 },

    #[error("FormulaMismatch in {what}: {left} vs {right}")]
    FormulaMismatch { what: &'static str, left: f64, right: f64 },

    #[error("InvalidSpectralData: {0}")]
    InvalidSpectralData(String),

    #[error("IndexOutOfHead: index {index} but head has {len} entries")]
    IndexOutOfHead { index: usize, len: usize },

    #[error("EqualMultiplicities: swapping entries {k} and {l} changes nothing")]
    EqualMultiplicities { k: usize, l: usize },

    #[error("TypeIForbidden: type I multiplicities must stay integral")]
    TypeIForbidden,

    #[error("EpsTooLarge: eps {eps} must be below m_l = {available}")]
    EpsTooLarge { eps: f64, available: f64 },

    #[error("UnsupportedTarget: target is not an exponent lattice and no grid was given")]
    UnsupportedTarget,

    #[error("DimensionTooLarge: total multiplicity {dim} exceeds {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("format error: {0}")]
    Format(String),
}
