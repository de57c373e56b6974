//! Report types carrying a measure value together with the configuration
//! that produced it, so any emitted number can be traced back.

use serde::{Deserialize, Serialize};

use crate::empirical::SurvivalConvention;
use crate::quadrature::QuadratureConfig;

/// A named measure value plus provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureReport {
    pub measure: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<SurvivalConvention>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_sizes: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replications: Option<u64>,
}

impl MeasureReport {
    pub fn new(measure: impl Into<String>, value: f64) -> Self {
        MeasureReport {
            measure: measure.into(),
            value,
            f: None,
            g: None,
            t: None,
            quadrature: None,
            convention: None,
            sample_sizes: None,
            seed: None,
            replications: None,
        }
    }
}
