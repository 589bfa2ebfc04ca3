use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Wavelength outside the validity window of a dispersion model.
    #[error("{model}: wavelength {wavelength_um:.4} um outside validity range [{min_um}, {max_um}] um")]
    Domain {
        model: String,
        wavelength_um: f64,
        min_um: f64,
        max_um: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("materials file: {0}")]
    Materials(String),
}
