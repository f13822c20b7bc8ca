use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Hilbert-space configuration: {0}")]
    InvalidConfig(String),

    #[error("Fock truncation too small: {0}")]
    Truncation(String),

    #[error("cat superposition is degenerate: {0}")]
    DegenerateCat(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: i64, max: i64 },

    #[error("invalid angular momentum arguments: {0}")]
    InvalidAngularMomentum(String),

    #[error("step size too large: {quantity} drifted by {drift:.3e} at t = {time:.6}")]
    StepSizeTooLarge {
        quantity: &'static str,
        drift: f64,
        time: f64,
    },

    #[error("density matrix lost positivity: eigenvalue {eigenvalue:.3e} at t = {time:.6}")]
    PositivityViolation { eigenvalue: f64, time: f64 },

    #[error("Wigner function has imaginary residue {residue:.3e}")]
    RealityViolation { residue: f64 },

    #[error("config error in {field}: {message}")]
    Config { field: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// True for errors caused by the input configuration rather than the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::InvalidConfig(_)
        )
    }
}
