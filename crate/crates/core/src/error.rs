use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("coarse step {dt} is not an integer multiple of the base step {delta}")]
    StepAlignment { dt: f64, delta: f64 },

    #[error("wavefunction is not normalized: norm^2 = {norm2}")]
    NotNormalized { norm2: f64 },

    #[error("degenerate wavefunction (zero or non-finite values)")]
    DegenerateState,

    #[error("linear solve failed at step {step}: {reason}")]
    SolveFailure { step: usize, reason: String },

    #[error("measurement impossible: zero overlap with the selected region")]
    MeasurementImpossible,

    #[error("decomposition degenerate: fraction {masked_fraction:.2} of nodes below the density floor")]
    DecompositionDegenerate { masked_fraction: f64 },

    #[error("snapshot cadence mismatch: {0}")]
    CadenceMismatch(String),

    #[error("unresolvable phase jump (|dtheta| > pi) at node {node}")]
    PhaseJump { node: usize },

    #[error("scale ladder invalid: {0}")]
    ScaleLadder(String),

    #[error("walker {index} reached a non-finite position at t = {t}")]
    WalkerDiverged { index: usize, t: f64 },

    #[error("empty ensemble after selection")]
    EmptySelection,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("nonpositive field value where a positive one is required")]
    NonPositiveField,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: config errors are 2, everything else 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            _ => 1,
        }
    }
}
