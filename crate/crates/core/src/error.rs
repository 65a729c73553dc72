use thiserror::Error;

#[derive(Debug, Error)]
pub enum SglError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("degenerate problem: {0}")]
    DegenerateProblem(String),
    #[error("step size error: {0}")]
    StepSize(String),
    #[error("load error at row {row}, column {column}: {message}")]
    Load {
        row: usize,
        column: String,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SglError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SglError::InvalidInput(msg.into()))
}
