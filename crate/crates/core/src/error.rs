use thiserror::Error;

/// Errors raised while assembling games, running the seeker or analysing results.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("duplicate player {player} in coalition {coalition}")]
    DuplicatePlayer { coalition: usize, player: usize },

    #[error("coalition {0} has no players")]
    EmptyCoalition(usize),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("invalid box [{lower}, {upper}]")]
    InvalidBox { lower: f64, upper: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid weight {0}; expected a value in (0, 1)")]
    InvalidWeight(f64),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("cost oracle failed for player ({coalition}, {player}): {reason}")]
    OracleFailure {
        coalition: usize,
        player: usize,
        reason: String,
    },

    #[error("initial action {value} of global coordinate {coord} lies outside [{lower}, {upper}]")]
    X0OutOfBounds {
        coord: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("non-finite state at iteration {t}: {detail}")]
    NumericalOverflow { t: usize, detail: String },

    #[error("tracker conservation violated at iteration {t}: residual {residual:e} > {tol:e}")]
    ConservationViolation { t: usize, residual: f64, tol: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("player ({coalition}, {player}) has no analytic subgradient")]
    NoAnalyticGradient { coalition: usize, player: usize },

    #[error("reference solver did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
