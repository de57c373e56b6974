//! Error classification for process exit codes: 2 usage, 3 data, 4
//! numeric failure.

use survext::distributions::DistributionError;
use survext::empirical::EstimateError;
use survext::image::ImageError;
use survext::lifetime::LifetimeError;
use survext::measures::MeasureError;
use survext::quadrature::QuadratureError;
use survext::uniformity::TestError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<DistributionError> for CliError {
    fn from(e: DistributionError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<QuadratureError> for CliError {
    fn from(e: QuadratureError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::InvalidSample { .. } => CliError::Data(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<TestError> for CliError {
    fn from(e: TestError) -> Self {
        match e {
            TestError::WindowError { .. } | TestError::MissingCriticalValue { .. } => {
                CliError::Usage(e.to_string())
            }
            TestError::ZeroMean | TestError::DomainError(_) => CliError::Data(e.to_string()),
            TestError::Distribution(d) => CliError::Usage(d.to_string()),
        }
    }
}

impl From<ImageError> for CliError {
    fn from(e: ImageError) -> Self {
        match e {
            ImageError::Estimate(inner) => inner.into(),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<LifetimeError> for CliError {
    fn from(e: LifetimeError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
