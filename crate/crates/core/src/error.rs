use thiserror::Error;

/// A metric-axiom or construction failure, with the witnessing indices.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("distance matrix is {rows}x{cols}, expected {expected}x{expected}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("space needs at least one point")]
    Empty,
    #[error("labels {first} and {second} coincide")]
    DuplicateLabel { first: usize, second: usize },
    #[error("base index {base} out of range for {points} points")]
    BaseOutOfRange { base: usize, points: usize },
    #[error("d({i},{i}) is nonzero")]
    NonzeroDiagonal { i: usize },
    #[error("d({i},{j}) != d({j},{i})")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("d({i},{j}) is negative")]
    NegativeDistance { i: usize, j: usize },
    #[error("distinct points {i} and {j} are at distance zero")]
    ZeroDistanceDistinctPoints { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("{points} points exceed the cap of {cap}")]
    CapExceeded { points: usize, cap: usize },
    #[error("depth must be at least 1")]
    ZeroDepth,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("pivot magnitude below threshold at iteration {iteration}")]
    NumericalBreakdown { iteration: usize },
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("right-hand side is not in the range of the constraint matrix")]
    NoPreimage,
}

/// Errors from the Lipschitz, free-space and lifting layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("objects live on different metric spaces")]
    SpaceMismatch,
    #[error("points coincide (index {0}); molecules need distinct points")]
    EqualPoints(usize),
    #[error("point map sends the base point to index {0} instead of the base")]
    BaseNotPreserved(usize),
    #[error("point map has {got} entries, expected {expected}")]
    MapLength { got: usize, expected: usize },
    #[error("point map entry {index} is out of range")]
    MapOutOfRange { index: usize },
    #[error("epsilon must be nonnegative")]
    NegativeEpsilon,
    #[error("scalar must be nonzero")]
    ZeroScalar,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point index {0} out of range")]
    PointOutOfRange(usize),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
