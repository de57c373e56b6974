//! The analytic distribution substrate consumed by every closed-form measure.

/// A continuous non-negative lifetime model.
///
/// Implementations must keep `survival` non-increasing with
/// `survival(0) <= 1` and `survival(t) -> 0`, have `density` integrate to
/// one over the support, and keep `quantile` consistent with `survival`.
pub trait ContinuousModel: Send + Sync {
    /// P(X > x).
    fn survival(&self, x: f64) -> f64;
    /// Probability density at `x`.
    fn density(&self, x: f64) -> f64;
    /// Inverse CDF: the x with P(X <= x) = u, for u in (0, 1).
    fn quantile(&self, u: f64) -> f64;
    fn mean(&self) -> f64;
    fn second_moment(&self) -> f64;
    /// Finite upper support bound, when one exists.
    fn support_upper(&self) -> Option<f64> {
        None
    }
    fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }
    /// Truncation point for improper integrals: where the survival
    /// probability falls below `cutoff`.
    fn tail_point(&self, cutoff: f64) -> f64 {
        match self.support_upper() {
            Some(b) => b,
            None => self.quantile(1.0 - cutoff),
        }
    }
}

/// Truncation age for the dynamic (residual-life) measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicPoint {
    pub t: f64,
}

impl DynamicPoint {
    pub fn new(t: f64) -> Self {
        assert!(t >= 0.0 && t.is_finite(), "truncation age must be finite and >= 0");
        DynamicPoint { t }
    }
}

/// Equal-weight mixture wrapper with survival `(F + G)/2`.
pub struct Mixture<'a> {
    pub f: &'a dyn ContinuousModel,
    pub g: &'a dyn ContinuousModel,
}

impl<'a> Mixture<'a> {
    pub fn new(f: &'a dyn ContinuousModel, g: &'a dyn ContinuousModel) -> Self {
        Mixture { f, g }
    }
}

impl ContinuousModel for Mixture<'_> {
    fn survival(&self, x: f64) -> f64 {
        0.5 * (self.f.survival(x) + self.g.survival(x))
    }

    fn density(&self, x: f64) -> f64 {
        0.5 * (self.f.density(x) + self.g.density(x))
    }

    fn quantile(&self, u: f64) -> f64 {
        // Bisection between the parents' quantiles, which bracket the
        // mixture quantile.
        let qa = self.f.quantile(u);
        let qb = self.g.quantile(u);
        let (mut lo, mut hi) = if qa <= qb { (qa, qb) } else { (qb, qa) };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi.abs().max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn mean(&self) -> f64 {
        0.5 * (self.f.mean() + self.g.mean())
    }

    fn second_moment(&self) -> f64 {
        0.5 * (self.f.second_moment() + self.g.second_moment())
    }

    fn support_upper(&self) -> Option<f64> {
        match (self.f.support_upper(), self.g.support_upper()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        }
    }
}
