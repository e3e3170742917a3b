use thiserror::Error;

/// Errors raised by the toolkit.
///
/// `SpecInput` and `Hypothesis` map to CLI exit code 2, everything else that
/// reaches the CLI as an error maps to exit code 1 or 2 depending on origin
/// (see `cli::run`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid sequence spec: {0}")]
    SpecInput(String),

    #[error("grid too small: chart must contain the escape disc; required half_width >= {required_half_width}")]
    GridTooSmall { required_half_width: f64 },

    #[error("mask is not doubly connected: complement has {components} component(s)")]
    NotDoublyConnected { components: usize },

    #[error("point list is empty")]
    EmptyPointList,

    #[error("mask is empty")]
    EmptyMask,

    #[error("base points diverge: {0}")]
    BasepointsDiverge(String),

    #[error("not convergent at this resolution: {0}")]
    NotConvergent(String),

    #[error("root finding failed for polynomial {poly}: {detail}")]
    RootFinding { poly: String, detail: String },

    #[error("level set disconnected at this resolution; try doubling the grid resolution")]
    LevelSetDisconnected,

    #[error("curve tracing failed: {0}; try a larger B or a finer grid")]
    CurveTracing(String),

    #[error("preimage not compactly contained at time {time}; rho too small")]
    NotCompactlyContained { time: usize },

    #[error("horizon exhausted: depth {depth} from time {time} exceeds horizon {horizon}")]
    HorizonExhausted {
        time: usize,
        depth: usize,
        horizon: usize,
    },

    #[error("outside Theorem 7.1 hypothesis")]
    Hypothesis,

    #[error("point outside domain: {0}")]
    OutsideDomain(String),

    #[error("depth unsuitable: {0}")]
    DepthUnsuitable(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
