use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("unsupported value c = {0}; only c = 0 and c = 1 are meaningful")]
    UnsupportedC(f64),
    #[error("root finding failed: {0}")]
    RootFindingFailed(String),
    #[error("point outside the chart domain: {0}")]
    PointOutOfDomain(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("degree {0} exceeds dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error("operation needs a form of positive degree")]
    ZeroDegree,
    #[error("operation needs a fully covariant tensor")]
    MixedValence,
    #[error("bad contraction slots ({0}, {1})")]
    BadSlots(usize, usize),
    #[error("metric is singular or not positive definite")]
    SingularMetric,
    #[error("form degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("field `{field}` provides derivatives up to order {available}, {requested} requested")]
    DerivativeOrder {
        field: String,
        available: usize,
        requested: usize,
    },
    #[error("step size underflow at t = {0}")]
    StepFailure(f64),
    #[error("degenerate phase state: {0}")]
    DegenerateState(String),
    #[error("unknown invariant `{0}`")]
    UnknownInvariant(String),
    #[error("bad initial state: {0}")]
    BadInitialState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
