use thiserror::Error;

use crate::mathcore::MathError;
use crate::modem::MappingError;
use crate::qrcodec::QrError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Math(#[from] MathError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Qr(#[from] QrError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("no result rows to write")]
    EmptyResults,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
