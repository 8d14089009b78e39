use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not hyperbolic: eigenvalue modulus {0} is 1")]
    NonHyperbolic(f64),

    #[error("incompatible points: {0}")]
    IncompatiblePoints(String),

    #[error("symbolic window too small: need radius {needed}, have {available}")]
    InsufficientWindow { needed: usize, available: usize },

    #[error("point is not in the phase space: {0}")]
    NotInPhaseSpace(String),

    #[error("unsupported query: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("system `{system}` has no {constant}")]
    MissingConstant {
        system: String,
        constant: &'static str,
    },

    #[error("zero mass ball at a support point ({0})")]
    ZeroMass(String),

    #[error("fit rejected: {0}")]
    FitRejected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
