use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("uniformity must be at least 2, got {0}")]
    UniformityTooSmall(usize),
    #[error("vertex count {n} is smaller than uniformity {r}")]
    TooFewVertices { n: usize, r: usize },
    #[error("edge {edge:?} must have exactly {r} distinct vertices")]
    MalformedEdge { edge: Vec<usize>, r: usize },
    #[error("vertex id {v} out of range (n = {n})")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("subset size {w} exceeds vertex count {n}")]
    SubsetTooLarge { w: usize, n: usize },
    #[error("binomial ratio arguments must satisfy n >= w >= h, got n={n} w={w} h={h}")]
    BadBinomArgs { n: usize, w: usize, h: usize },
    #[error("pattern must have more than r = {r} vertices, got {h}")]
    PatternTooSmall { h: usize, r: usize },
    #[error("pattern must have at least two edges, got {0}")]
    TooFewPatternEdges(usize),
    #[error("uniformity mismatch: host has r = {host}, pattern has r = {pattern}")]
    UniformityMismatch { host: usize, pattern: usize },
    #[error("alpha must satisfy 0 < alpha < r = {r}, got {alpha}")]
    BadAlpha { alpha: String, r: usize },
    #[error("pattern is not r-partite; the balanced-family construction requires it")]
    NotRPartite,
    #[error("family is empty")]
    EmptyFamily,
    #[error("tau must be positive, got {0}")]
    BadTau(f64),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("admissibility violated: {0}")]
    Inadmissible(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
