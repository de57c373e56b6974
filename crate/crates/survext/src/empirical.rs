//! Nonparametric plug-in estimators built from order statistics and
//! empirical survival functions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("sample must hold at least {min} finite values")]
    InvalidSample { min: usize },
    #[error("empirical survival at t = {t} is zero")]
    ZeroSurvivalAtT { t: f64 },
    #[error("denominator is degenerate (all spacings zero)")]
    DegenerateDenominator,
}

/// Convention for the empirical survival function at a point.
///
/// `Strict` counts values strictly greater than x; `Inclusive` counts
/// values greater than or equal to x. The spacing estimators use
/// `Strict`; the inaccuracy-ratio estimator uses `Inclusive` to match
/// its P(X >= X_(i)) form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurvivalConvention {
    Strict,
    Inclusive,
}

/// A sorted batch of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    /// Sorts the input; requires at least two finite values.
    pub fn new(mut values: Vec<f64>) -> Result<Self, EstimateError> {
        if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
            return Err(EstimateError::InvalidSample { min: 2 });
        }
        values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(EmpiricalSample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// Empirical survival at `x` under the given convention.
    pub fn survival(&self, x: f64, convention: SurvivalConvention) -> f64 {
        let n = self.values.len();
        let below = match convention {
            SurvivalConvention::Strict => self.values.partition_point(|&v| v <= x),
            SurvivalConvention::Inclusive => self.values.partition_point(|&v| v < x),
        };
        (n - below) as f64 / n as f64
    }
}

/// Spacing estimator of SJ(F-bar | G-bar): the directed divergence
/// evaluated on x's order statistics under the strict convention.
pub fn estimate_sed(x: &EmpiricalSample, y: &EmpiricalSample) -> f64 {
    let xs = x.values();
    let mut acc = 0.0;
    for i in 0..xs.len() - 1 {
        let dx = xs[i + 1] - xs[i];
        if dx == 0.0 {
            continue;
        }
        let fx = x.survival(xs[i], SurvivalConvention::Strict);
        let gx = y.survival(xs[i], SurvivalConvention::Strict);
        acc += (fx - gx) * fx * dx;
    }
    0.5 * acc
}

/// Spacing estimator of the dynamic divergence SJ(F-bar_t | G-bar_t),
/// restricted to order statistics at or above `t`.
pub fn estimate_dsed(
    x: &EmpiricalSample,
    y: &EmpiricalSample,
    t: f64,
) -> Result<f64, EstimateError> {
    let ft = x.survival(t, SurvivalConvention::Strict);
    let gt = y.survival(t, SurvivalConvention::Strict);
    if ft == 0.0 || gt == 0.0 {
        return Err(EstimateError::ZeroSurvivalAtT { t });
    }
    let xs = x.values();
    let mut acc = 0.0;
    for i in 0..xs.len() - 1 {
        if xs[i] < t {
            continue;
        }
        let dx = xs[i + 1] - xs[i];
        if dx == 0.0 {
            continue;
        }
        let fx = x.survival(xs[i], SurvivalConvention::Strict) / ft;
        let gx = y.survival(xs[i], SurvivalConvention::Strict) / gt;
        acc += (fx - gx) * fx * dx;
    }
    Ok(0.5 * acc)
}

/// Plug-in estimator of the inaccuracy ratio I xi(X, Y), inclusive
/// convention matching its P(X >= X_(i)) form.
pub fn estimate_inaccuracy_ratio(
    x: &EmpiricalSample,
    y: &EmpiricalSample,
) -> Result<f64, EstimateError> {
    let xs = x.values();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..xs.len() - 1 {
        let dx = xs[i + 1] - xs[i];
        if dx == 0.0 {
            continue;
        }
        let px = x.survival(xs[i], SurvivalConvention::Inclusive);
        let py = y.survival(xs[i], SurvivalConvention::Inclusive);
        num += px * py * dx;
        den += px * px * dx;
    }
    if den == 0.0 {
        return Err(EstimateError::DegenerateDenominator);
    }
    Ok(num / den)
}

/// Standalone spacing estimator of J_s: -(1/2) sum F-bar_n(x_(i))^2 dx.
pub fn estimate_survival_extropy(x: &EmpiricalSample, convention: SurvivalConvention) -> f64 {
    let xs = x.values();
    let mut acc = 0.0;
    for i in 0..xs.len() - 1 {
        let dx = xs[i + 1] - xs[i];
        if dx == 0.0 {
            continue;
        }
        let fx = x.survival(xs[i], convention);
        acc += fx * fx * dx;
    }
    -0.5 * acc
}

/// SSJ estimate: (1/8)(SJ-hat(F|G) + SJ-hat(G|F)), each directed term on
/// its own first-sample grid.
pub fn estimate_symmetric_sed(x: &EmpiricalSample, y: &EmpiricalSample) -> f64 {
    (estimate_sed(x, y) + estimate_sed(y, x)) / 8.0
}

/// Dynamic SSJ estimate at truncation age `t`.
pub fn estimate_symmetric_dsed(
    x: &EmpiricalSample,
    y: &EmpiricalSample,
    t: f64,
) -> Result<f64, EstimateError> {
    Ok((estimate_dsed(x, y, t)? + estimate_dsed(y, x, t)?) / 8.0)
}

/// Read a sample from single-column CSV (optional header) or
/// whitespace-separated text. Values must be finite and non-negative.
pub fn parse_sample_text(text: &str) -> Result<EmpiricalSample, EstimateError> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        for token in line.split(|c: char| c.is_whitespace() || c == ',') {
            let token = token.trim();
            if token.is_empty() {
                continue;
            }
            match token.parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => values.push(v),
                // A non-numeric first line is treated as a header.
                _ if lineno == 0 => continue,
                _ => return Err(EstimateError::InvalidSample { min: 2 }),
            }
        }
    }
    EmpiricalSample::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> EmpiricalSample {
        EmpiricalSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn empirical_survival_conventions() {
        let x = s(&[1.0, 2.0, 3.0]);
        assert!((x.survival(2.0, SurvivalConvention::Strict) - 1.0 / 3.0).abs() < 1e-15);
        assert!((x.survival(2.0, SurvivalConvention::Inclusive) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(x.survival(0.0, SurvivalConvention::Strict), 1.0);
        assert_eq!(x.survival(0.0, SurvivalConvention::Inclusive), 1.0);
        assert_eq!(x.survival(5.0, SurvivalConvention::Strict), 0.0);
    }

    #[test]
    fn estimate_sed_hand_values() {
        let x = s(&[1.0, 2.0, 3.0]);
        assert_eq!(estimate_sed(&x, &x), 0.0);
        let a = s(&[1.0, 2.0]);
        let b = s(&[2.0, 3.0]);
        assert!((estimate_sed(&a, &b) + 0.125).abs() < 1e-15);
    }

    #[test]
    fn estimate_dsed_consistency() {
        let x = s(&[1.0, 2.0, 4.0]);
        let y = s(&[1.5, 3.0, 5.0]);
        // t below both minima reduces to the static estimator.
        let d = estimate_dsed(&x, &y, 0.5).unwrap();
        assert!((d - estimate_sed(&x, &y)).abs() < 1e-15);
        assert_eq!(estimate_dsed(&x, &x, 2.0).unwrap(), 0.0);
        assert!(matches!(
            estimate_dsed(&x, &y, 10.0),
            Err(EstimateError::ZeroSurvivalAtT { .. })
        ));
    }

    #[test]
    fn inaccuracy_ratio_hand_values() {
        let x = s(&[1.0, 2.0, 0.3, 7.0]);
        assert!((estimate_inaccuracy_ratio(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let a = s(&[1.0, 2.0]);
        let b = s(&[2.0, 3.0]);
        assert!((estimate_inaccuracy_ratio(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        let flat = s(&[1.0, 1.0]);
        assert!(matches!(
            estimate_inaccuracy_ratio(&flat, &a),
            Err(EstimateError::DegenerateDenominator)
        ));
    }

    #[test]
    fn survival_extropy_hand_values() {
        let x = s(&[0.0, 1.0]);
        assert!((estimate_survival_extropy(&x, SurvivalConvention::Inclusive) + 0.5).abs() < 1e-15);
        // Scaling: estimate on c x = c estimate on x.
        let a = s(&[0.2, 0.9, 1.4, 3.0]);
        let c = 2.5;
        let b = s(&[0.5, 2.25, 3.5, 7.5]);
        let ea = estimate_survival_extropy(&a, SurvivalConvention::Strict);
        let eb = estimate_survival_extropy(&b, SurvivalConvention::Strict);
        assert!((eb - c * ea).abs() < 1e-12);
    }

    #[test]
    fn symmetric_estimators() {
        let x = s(&[0.4, 1.0, 2.0]);
        let y = s(&[0.7, 1.1, 3.0]);
        assert_eq!(estimate_symmetric_sed(&x, &y), estimate_symmetric_sed(&y, &x));
        assert_eq!(estimate_symmetric_sed(&x, &x), 0.0);
        let d1 = estimate_symmetric_dsed(&x, &y, 0.5).unwrap();
        let d2 = estimate_symmetric_dsed(&y, &x, 0.5).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn ties_contribute_zero_spacing() {
        let x = s(&[1.0, 1.0, 1.0, 2.0]);
        let y = s(&[1.0, 1.5, 2.0, 2.0]);
        let v = estimate_sed(&x, &y);
        assert!(v.is_finite());
    }

    #[test]
    fn parse_sample_inputs() {
        let a = parse_sample_text("value\n1.0\n2.5\n0.3\n").unwrap();
        assert_eq!(a.len(), 3);
        let b = parse_sample_text("1 2 3\n4 5").unwrap();
        assert_eq!(b.len(), 5);
        assert!(parse_sample_text("1.0\n-2.0\n").is_err());
        assert!(parse_sample_text("").is_err());
    }
}
