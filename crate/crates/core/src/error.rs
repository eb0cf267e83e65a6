use thiserror::Error;

/// Errors raised by dataset construction, training, estimation and ingestion.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("label {value} at row {row} is not +1 or -1")]
    InvalidLabel { row: usize, value: f64 },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("feature norm {norm} at row {row} exceeds the basis bound {bound}")]
    FeatureBound { row: usize, norm: f64, bound: f64 },

    #[error("hypothesis norm {norm} exceeds the class bound {bound}")]
    NormBound { norm: f64, bound: f64 },

    #[error("training diverged at epoch {epoch}: objective is not finite")]
    Divergence { epoch: usize },

    #[error("the hypothesis class has no enumeration grid")]
    MissingGrid,

    #[error("grid is not closed under negation: member {index} has no negation")]
    AsymmetricGrid { index: usize },

    #[error(
        "grid has {members} members, above the cap of {cap}; subsample the data or raise the cap"
    )]
    GridTooLarge { members: usize, cap: usize },

    #[error("weight scheme violated: {0}")]
    WeightScheme(String),

    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),

    #[error("IDX parse error at byte offset {offset}: {kind}")]
    Idx { offset: usize, kind: IdxErrorKind },

    #[error("instance file line {line}: {message}")]
    Instance { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdxErrorKind {
    #[error("bad magic bytes {0:#04x} {1:#04x} (expected 0x00 0x00)")]
    BadMagic(u8, u8),
    #[error("unsupported type code {0:#04x}")]
    UnsupportedType(u8),
    #[error("truncated stream: needed {needed} bytes, found {found}")]
    Truncated { needed: usize, found: usize },
    #[error("trailing bytes after payload: {0}")]
    Trailing(usize),
}

impl Error {
    /// Whether the failure is numeric (as opposed to a data or input problem).
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Divergence { .. } | Error::DimensionOverflow(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
