use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// Function evaluated outside its domain (negative base of a fractional
    /// power, argument outside [0, 1] for a curve, and so on).
    #[error("domain error at x = {x}: {reason}")]
    Domain { x: f64, reason: String },

    /// Requested recursion depth exceeds the configured maximum.
    #[error("depth {requested} exceeds maximum {max}")]
    Depth { requested: u32, max: u32 },

    /// Parameter outside the validated range of an operation.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// Quadrature could not reach its internal error target.
    #[error("quadrature failed to converge: estimated error {estimate:e} over {nodes} nodes")]
    Quadrature { estimate: f64, nodes: usize },

    /// A numerical derivative collapsed (window left the domain or produced
    /// non-finite values).
    #[error("degenerate derivative at x = {x}")]
    DegenerateDerivative { x: f64 },

    /// An algebra-rule check needs every constituent velocity to be finite.
    #[error("rule inapplicable: {0}")]
    RuleInapplicable(String),

    /// Ratio of two estimates where the denominator is zero or not finite.
    #[error("ratio undefined: {0}")]
    RatioUndefined(String),

    /// Not enough usable samples to classify a sequence.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Expression parse failure with a byte offset into the input.
    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },
}

pub type Result<T> = std::result::Result<T, Error>;
