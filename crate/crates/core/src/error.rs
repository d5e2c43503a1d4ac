use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("raw pair {index} is inverted: birth level {birth} < death level {death}")]
    RawPairInverted { index: usize, birth: f64, death: f64 },
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("empty scalar field")]
    EmptyField,
    #[error("max_dim must be 0 or 1, got {0}")]
    BadMaxDim(usize),
    #[error("cannot tile {rows}x{cols} field into {tiles_r}x{tiles_c} tiles")]
    BadTiling {
        rows: usize,
        cols: usize,
        tiles_r: usize,
        tiles_c: usize,
    },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("bandwidth must be positive, got {0}")]
    BadBandwidth(f64),
    #[error("field has {0} pixels, at least 6 are needed for a local quadratic fit")]
    TooFewPixels(usize),
    #[error("silhouette has zero total weight")]
    EmptySilhouette,
    #[error("diagram has no off-diagonal points")]
    EmptyDiagram,
    #[error("curve grids, kinds or order counts differ")]
    GridMismatch,
    #[error("no curves supplied")]
    EmptyInput,
    #[error("metric exponent must be positive, got {0}")]
    BadP(f64),
    #[error("at least {needed} curves are required, got {got}")]
    TooFewCurves { needed: usize, got: usize },
    #[error("pointwise standard deviation is zero everywhere")]
    DegenerateSigma,
    #[error("group is empty")]
    EmptyGroup,
    #[error("invalid k = {k} for {n} training curves")]
    BadK { k: usize, n: usize },
    #[error("no candidate k values supplied")]
    EmptyCandidates,
    #[error("invalid embedding dimension {out_dim} for {n} points")]
    BadDim { out_dim: usize, n: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical procedure rather than of its input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::DegenerateSigma)
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
        Error::Parse {
            line,
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
