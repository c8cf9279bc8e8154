use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    #[error("invalid selection: {0}")]
    Selection(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unphysical scaling c = {c}: must satisfy 0 < c < 1/lambda_max = {bound}")]
    UnphysicalScaling { c: f64, bound: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("state is not pure: largest symplectic eigenvalue {max_symplectic_eigenvalue}")]
    Impure { max_symplectic_eigenvalue: f64 },

    #[error("decomposition failed: symplectic defect {defect:.3e}")]
    Decomposition { defect: f64 },

    #[error("purity {purity} not achievable with l = {l}, b = {b}; achievable range is [{min}, {max}]")]
    InfeasiblePurity {
        l: usize,
        b: f64,
        purity: f64,
        min: f64,
        max: f64,
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("empty distribution: {0}")]
    EmptyDistribution(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from user input rather than a runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::DegenerateGraph(_)
                | Error::Selection(_)
                | Error::Parameter(_)
                | Error::UnphysicalScaling { .. }
                | Error::InfeasiblePurity { .. }
                | Error::Shape(_)
                | Error::Capacity(_)
                | Error::Config(_)
                | Error::Parse { .. }
                | Error::Validation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
