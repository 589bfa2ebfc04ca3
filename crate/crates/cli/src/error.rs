use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Parse(String),
    #[error("config: key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("{}: {source}", .path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<CliError>,
    },
    #[error("io: {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{tag}: {source}", tag = module_tag(.source))]
    Model {
        #[from]
        source: biphoton::Error,
    },
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(key: &str, message: &str) -> Self {
        CliError::Config {
            key: key.to_string(),
            message: message.to_string(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn in_file(self, path: &Path) -> Self {
        CliError::InFile {
            path: path.to_path_buf(),
            source: Box::new(self),
        }
    }
}

/// Which part of the model raised the error.
fn module_tag(e: &biphoton::Error) -> &'static str {
    match e {
        biphoton::Error::Domain { .. } | biphoton::Error::Materials(_) => "dispersion",
        biphoton::Error::Config(_) => "config",
        biphoton::Error::DegenerateInput(_) => "propagation",
        biphoton::Error::Numeric(_) => "numeric",
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
