//! Survival-extropy based inaccuracy and divergence measures.
//!
//! The crate provides closed-form (quadrature) evaluation of survival
//! extropy, inaccuracy and divergence measures and their dynamic
//! (residual-life) variants, nonparametric plug-in estimators for raw
//! samples, a Monte Carlo goodness-of-fit test for uniformity, an
//! inaccuracy-ratio image classifier, and a grouped lifetime-data
//! divergence analyzer.

pub mod distributions;
pub mod empirical;
pub mod image;
pub mod lifetime;
pub mod measures;
pub mod model;
pub mod quadrature;
pub mod report;
pub mod uniformity;

pub use model::{ContinuousModel, DynamicPoint, Mixture};
pub use quadrature::QuadratureConfig;
