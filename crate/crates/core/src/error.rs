use thiserror::Error;

/// Every failure mode of the workbench. Variants carry enough context to be
/// reported verbatim by the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zeta pole: |s - 1| = {dist:e}")]
    PoleAtOne { dist: f64 },
    #[error("completed zeta pole: s = {re}+{im}i lies within the exclusion disk around 0 or 1")]
    PoleAtZeroOrOne { re: f64, im: f64 },
    #[error("tolerance {tol:e} unreachable within {budget} summation terms")]
    PrecisionUnreachable { tol: f64, budget: usize },
    #[error("denominator {modulus:e} too close to zero at s = {re}+{im}i")]
    NearZeroDenominator { re: f64, im: f64, modulus: f64 },
    #[error("logarithmic derivative is singular at t = {t:e}")]
    SingularAtZero { t: f64 },
    #[error("Euler product tail bound {bound:e} exceeds tolerance {tol:e}")]
    InsufficientPrimes { bound: f64, tol: f64 },
    #[error("Dirichlet series outside its region of absolute convergence (Re s = {re})")]
    OutsideConvergence { re: f64 },
    #[error("reduction did not terminate after {steps} steps")]
    NonTermination { steps: usize },
    #[error("adaptive quadrature exhausted {intervals} intervals with error estimate {error:e}")]
    BudgetExceeded { intervals: usize, error: f64 },
    #[error("sigma = {sigma} exceeds the safe threshold {limit}")]
    SigmaTooLarge { sigma: f64, limit: f64 },
    #[error("grid too coarse: |Im nu| * step = {product}")]
    GridTooCoarse { product: f64 },
    #[error("transform grid ends at {available} but {required} is needed")]
    GridTooShort { required: f64, available: f64 },
    #[error("Eisenstein series pole at s = {re}+{im}i")]
    PoleOfEisenstein { re: f64, im: f64 },
    #[error("Fourier depth {depth} leaves a tail of {tail:e}")]
    DepthInsufficient { depth: usize, tail: f64 },
    #[error("removable singularity: denominator {denominator:e} in the four-term formula")]
    RemovableSingularity { denominator: f64 },
    #[error("dataset is empty")]
    DatasetEmpty,
    #[error("dataset complete to {completeness} but {requested} was requested")]
    IncompleteDataset { completeness: f64, requested: f64 },
    #[error("intertwining factor R({re}+{im}i) sits at a pole")]
    FactorAtPole { re: f64, im: f64 },
    #[error("denominator {modulus:e} too small for Weyl pair ({s1}, {s2})")]
    DenominatorNearZero { s1: String, s2: String, modulus: f64 },
    #[error("parameters within {distance:e} of a wall")]
    WallSingularity { distance: f64 },
    #[error("evaluation point within {distance:e} of a pole")]
    PoleProximity { distance: f64 },
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("validation failed for rows {rows:?}: {message}")]
    ValidationError { rows: Vec<usize>, message: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
