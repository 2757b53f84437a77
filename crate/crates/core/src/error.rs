use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {value} outside the validated strip |Im y| * beta <= {limit}")]
    OutsideStrip { value: f64, limit: f64 },

    #[error("kernel argument must be positive, got {0}")]
    NonPositiveArgument(f64),

    #[error("kernel argument {0} below evaluation floor 1e-12")]
    BelowEvaluationFloor(f64),

    #[error("quadrature panel cap exceeded ({panels} > {cap})")]
    PanelCap { panels: usize, cap: usize },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("Weyl integral diverges for the {0} family (f decays too slowly)")]
    DivergentWeylIntegral(&'static str),

    #[error("statistic has non-negligible imaginary part {0}")]
    ComplexResidue(f64),

    #[error("tridiagonal eigenvalue iteration did not converge at index {0}")]
    EigenNonConvergence(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
