use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: String },

    #[error("bit window too short: need indices {need_lo}..={need_hi}, have {have}")]
    WindowTooShort { need_lo: i64, need_hi: i64, have: usize },

    #[error("unstable or non-causal filter: {0}")]
    Filter(String),

    #[error("malformed SBR file {path}: {msg}")]
    SbrFormat { path: PathBuf, msg: String },

    #[error("loss of lock: {0}")]
    LossOfLock(String),

    #[error("empty measurement: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("config serialize error: {0}")]
    TomlSer(#[from] toml::ser::Error),
}

impl Error {
    /// Process exit status: 2 for loss of lock, 3 for configuration
    /// problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::LossOfLock(_) => 2,
            Error::Config(_)
            | Error::OutOfRange { .. }
            | Error::Filter(_)
            | Error::SbrFormat { .. }
            | Error::Toml(_)
            | Error::TomlSer(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn range(what: &'static str, value: impl ToString) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
        }
    }
}
