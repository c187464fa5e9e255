use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("grid: {0}")]
    Grid(String),
    #[error("weight spec: {0}")]
    Weight(String),
    #[error("sequence spec: {0}")]
    Sequence(String),
    #[error("function spec: {0}")]
    Function(String),
    #[error("jet: {0}")]
    Jet(String),
    #[error("reading {path}: {message}")]
    Table { path: String, message: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("t = {t} lies outside the tabulated range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("no maximum of s*t - phi(t) found for s = {s} (objective still increasing at t = {t_reached}); the weight may violate log(1+t^2) = o(omega)")]
    NoMaximum { s: f64, t_reached: f64 },
    #[error("conjugate argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("L = {l} violates omega(e t) <= L (1 + omega(t)) at t = {t}")]
    InvalidDilation { l: u64, t: f64 },
    #[error("no closed-form conjugate for {0}")]
    NoClosedForm(String),
    #[error("associated weight truncated at t = {t}: maximizing index reached pmax = {pmax}")]
    Truncated { t: f64, pmax: usize },
    #[error("sequence index {p} outside the table (length {len})")]
    SequenceOutOfTable { p: usize, len: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FdbError {
    #[error("jet of order {have} cannot supply derivative order {need}")]
    Arity { need: usize, have: usize },
    #[error("outer jet is not based at the inner jet's value")]
    BasePoint,
    #[error("outer jet has nonzero entries at orders {0:?} besides the distinguished one")]
    NotSingle(Vec<usize>),
    #[error("order {0} exceeds the supported range")]
    OrderTooLarge(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("{family} does not support {what}")]
    Capability { family: String, what: String },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Fdb(#[from] FdbError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parameter regime: {0}")]
    Regime(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
