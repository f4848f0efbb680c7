use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid capacity exceeded: {base}^{depth} cells do not fit in a 64-bit index")]
    Capacity { base: u32, depth: u32 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("level {level} out of range 0..={depth}")]
    LevelOutOfRange { level: u32, depth: u32 },

    #[error("cell index {index} out of range at level {level} (limit {limit})")]
    IndexOutOfRange { level: u32, index: u64, limit: u64 },

    #[error("level {level} has zero occupied cells; cannot take its logarithm")]
    EmptyLevel { level: u32 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("measure support is empty")]
    EmptySupport,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("steps_log2 = {0} is outside 1..=30")]
    StepsOutOfRange(u32),

    #[error("local time is zero; ratio undefined")]
    ZeroLocalTime,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
