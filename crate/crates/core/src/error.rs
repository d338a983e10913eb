use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid fraction {num}/{den}")]
    InvalidFraction { num: i64, den: i64 },

    #[error("no Karpelevič arc of order {n} has denominators {a} and {b}: {reason}")]
    InvalidArc {
        n: i64,
        a: i64,
        b: i64,
        reason: &'static str,
    },

    #[error("order must be at least {min}, got {n}")]
    OrderTooSmall { n: i64, min: i64 },

    #[error("angle {theta} is outside the argument set of arc K_{n}({q},{s})")]
    AngleOutsideArc { n: i64, q: i64, s: i64, theta: f64 },

    #[error("arc K_{n}({q},{s}) has a reduced Ito polynomial of degree below n")]
    UnsupportedArc { n: i64, q: i64, s: i64 },

    #[error("arc K_{n}({q},{s}) is {found}, expected {expected}")]
    WrongArcType {
        n: i64,
        q: i64,
        s: i64,
        expected: &'static str,
        found: &'static str,
    },

    #[error("alpha = {0} must lie strictly between 0 and 1")]
    AlphaOutOfRange(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("star operation is undefined for this source arc and exponent {c}")]
    StarUndefined { c: i64 },

    #[error("no arc-power relation: {0}")]
    NoPowerRelation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("duplicate vertex {0} in vertex sequence")]
    DuplicateVertex(usize),

    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("budget exceeded: {what} is {value}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("unexpected digraph shape: {0}")]
    Structure(String),

    #[error("matrix is not stochastic: {0}")]
    NotStochastic(String),

    #[error("root finder did not converge: {0}")]
    NonConvergence(String),
}
