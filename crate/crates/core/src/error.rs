use thiserror::Error;

/// Errors raised by the finite Gauss library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a regular polygon needs at least 3 sides, got {0}")]
    TooFewSides(usize),

    #[error("angle {phi} is the excluded pole of the stereographic chart")]
    ChartSingularity { phi: f64 },

    #[error("point {t} lies outside [{lo}, {hi}]")]
    OutOfInterval { t: f64, lo: f64, hi: f64 },

    #[error("interval endpoints are inverted: {a} > {b}")]
    InvertedInterval { a: f64, b: f64 },

    #[error("density is singular at t = {t}")]
    Singularity { t: f64 },

    #[error("map has a pole at t = {t}")]
    Pole { t: f64 },

    #[error("matrix is singular (determinant {det:e})")]
    SingularMatrix { det: f64 },

    #[error("the identity map fixes every point")]
    IdentityMap,

    #[error("symbol {k} is outside the alphabet 1..={max}")]
    InvalidSymbol { k: usize, max: usize },

    #[error("word must be nonempty")]
    EmptyWord,

    #[error("word length {len} exceeds the cap of {max}")]
    WordTooLong { len: usize, max: usize },

    #[error("exact arithmetic is only available for the n = 4 oriented map, got n = {0}")]
    ExactUnavailable(usize),

    #[error("triangle parameter a = {0} puts a branch pole inside its domain")]
    InvalidTriangleParam(f64),

    #[error("no fixed point of branch {k} lies in its domain")]
    NoFixedPointInBranch { k: usize },

    #[error("both fixed points of branch {k} lie in its domain: {roots:?}")]
    AmbiguousFixedPoint { k: usize, roots: [f64; 2] },

    #[error("circle orbit of branch {k} fixed point did not return within {n} steps")]
    NoReturn { k: usize, n: usize },

    #[error("invalid simulation parameters: {0}")]
    InvalidSimulation(String),

    #[error("norm drift {drift:e} exceeded the abort threshold")]
    NormDrift { drift: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
