use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{freq} Hz is not below the Nyquist limit of a {sample_rate} Hz sample rate")]
    NyquistViolation { freq: f64, sample_rate: f64 },

    #[error("value {0} is outside the quantizer range [-1, 1]")]
    OutOfRange(f64),

    /// Input above the ADC's absolute maximum rating.
    #[error("{volts} V exceeds the absolute maximum input of {limit} V")]
    OverVoltage { volts: f64, limit: f64 },

    #[error("SPI frame has {0} bits, expected 34")]
    Framing(usize),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
