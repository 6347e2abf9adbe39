use thiserror::Error;

#[derive(Debug, Error)]
pub enum QkzError {
    #[error("pole: {0}")]
    Pole(String),
    #[error("non-generic parameters: {0}")]
    NonGeneric(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QkzError>;
