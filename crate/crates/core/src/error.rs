use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too coarse: {0} normal cells, need at least 8")]
    GridTooCoarse(usize),

    #[error("unsupported dimension {0}, expected 1 or 2")]
    Dimension(usize),

    #[error("periodic direction needs at least 4 cells, got {0}")]
    PeriodicTooCoarse(usize),

    #[error("epsilon not grid-aligned: {epsilon} is not a multiple of h = {h}; snap epsilon to the grid")]
    NotAligned { epsilon: f64, h: f64 },

    #[error("layer too wide: 2 * epsilon = {0} must be below 1")]
    LayerTooWide(f64),

    #[error("node index {index} out of range for {count} nodes")]
    NodeIndex { index: usize, count: usize },

    #[error("tabulated profile queried at d = {d}, outside its table [{lo}, {hi}]")]
    TableRange { d: f64, lo: f64, hi: f64 },

    #[error("non-integrable reciprocal: conductivity vanishes inside (0, epsilon)")]
    NonIntegrable,

    #[error("kappa undeclared for a custom capacity family")]
    KappaUndeclared,

    #[error("inconsistent inputs: {0}")]
    Mismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("conjugate gradients stalled at relative residual {residual:e} after {iterations} iterations")]
    CgNotConverged { residual: f64, iterations: usize },

    #[error("root not bracketed on ({lo}, {hi})")]
    RootNotBracketed { lo: f64, hi: f64 },

    #[error("Reilly identity out of stated scope: {0}")]
    ReillyScope(String),

    #[error("empty ledger")]
    EmptyLedger,

    #[error("snapshot-time mismatch: {0}")]
    SnapshotMismatch(String),

    #[error("unknown oracle expression {0:?}")]
    UnknownExpression(String),

    #[error("memory guard: {0} nodes exceed the 10^6 limit")]
    MemoryGuard(usize),

    #[error("at epsilon = {epsilon}: {source}")]
    SweepPoint {
        epsilon: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Config(#[from] crate::experiments::config::ConfigError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Configuration problems map to exit code 1, everything else to 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::SweepPoint { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
