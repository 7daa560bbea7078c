use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families: input that is malformed or violates a
/// precondition, and hypothesis refusals where an operation declines to run
/// because its guarantee would not apply. The CLI maps the latter to a
/// distinct exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed polynomial spec: {0}")]
    Parse(String),
    #[error("duplicate root {0}")]
    DuplicateRoot(String),
    #[error("leading coefficient is zero")]
    ZeroLeading,
    #[error("polynomial has no roots (degree 0)")]
    ConstantPolynomial,
    #[error("non-integral coefficient {0}; scale the polynomial first")]
    NonIntegral(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("value is zero at n = {0}")]
    ZeroValue(String),
    #[error("exponent e = {0} must be at least 2")]
    BadExponent(u64),
    #[error("polynomial is a perfect power (e = {0})")]
    PerfectPower(u64),
    #[error("root multiplicity {mult} outside [1, {max}]")]
    MultiplicityOutOfRange { mult: u32, max: u64 },
    #[error("polynomial is not separable")]
    NotSeparable,
    #[error("zero argument: {0}")]
    ZeroArgument(&'static str),
    #[error("zeta argument s = {0} is below 2")]
    ZetaRange(i64),
    #[error("root localization not applicable: ord_{p}(f(n)) = {ord} is not > 2*lambda = {twice_lambda}")]
    HenselNotApplicable { p: u64, ord: i64, twice_lambda: i64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// True for refusals caused by a failed mathematical hypothesis rather
    /// than malformed input or a bug.
    pub fn is_hypothesis_refusal(&self) -> bool {
        matches!(self, Error::Hypothesis(_) | Error::PerfectPower(_) | Error::HenselNotApplicable { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
