use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlopError {
    /// Caller violated a precondition.
    #[error("contract error: {0}")]
    Contract(String),
    /// An identity that must hold exactly (or to tolerance) did not; usually a sign-convention defect.
    #[error("consistency failure: {0}")]
    Consistency(String),
    /// Precision or step control exhausted.
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("series error: {0}")]
    Series(#[from] crate::exact::SeriesError),
    #[error("division by zero in exact arithmetic")]
    DivByZero,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<crate::exact::DivByZero> for FlopError {
    fn from(_: crate::exact::DivByZero) -> Self {
        FlopError::DivByZero
    }
}

impl FlopError {
    pub fn exit_code(&self) -> i32 {
        match self {
            FlopError::Contract(_) | FlopError::Series(_) => 2,
            FlopError::Consistency(_) | FlopError::DivByZero => 3,
            FlopError::Numeric(_) => 4,
            FlopError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, FlopError>;
