//! Closed-form (quadrature-backed) evaluation of the survival-extropy
//! measures over analytic models.
//!
//! Naming: `survival_extropy` is J_s, `sei` the survival extropy
//! inaccuracy, `sed` the directed survival extropy divergence, and the
//! `dynamic_`/`d`-prefixed variants are the residual-life versions
//! truncated at an age `t`.

use thiserror::Error;

use crate::model::{ContinuousModel, DynamicPoint};
use crate::quadrature::{integrate, QuadratureConfig, QuadratureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    NonConvergent(#[from] QuadratureError),
    #[error("survival function is zero at the truncation age")]
    ZeroSurvival,
    #[error("survival extropy of the base model is zero")]
    DegenerateBase,
}

/// Truncation point where both survival functions are below the tail
/// cutoff (or the finite support bound when one exists).
fn pair_upper(f: &dyn ContinuousModel, g: &dyn ContinuousModel, q: &QuadratureConfig) -> f64 {
    f.tail_point(q.tail_cutoff_probability)
        .max(g.tail_point(q.tail_cutoff_probability))
}

/// J_s(X) = -(1/2) int F-bar^2.
pub fn survival_extropy(
    f: &dyn ContinuousModel,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    let upper = f.tail_point(q.tail_cutoff_probability);
    let v = integrate(&|x| f.survival(x).powi(2), 0.0, upper, q)?;
    Ok(-0.5 * v)
}

/// Density-based extropy divergence J(f|g) = (1/2) int (f - g) f.
pub fn extropy_divergence_density(
    f: &dyn ContinuousModel,
    g: &dyn ContinuousModel,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    let upper = pair_upper(f, g, q);
    let v = integrate(&|x| (f.density(x) - g.density(x)) * f.density(x), 0.0, upper, q)?;
    Ok(0.5 * v)
}

/// Survival extropy inaccuracy xi J_s(X, Y) = -(1/2) int F-bar G-bar.
pub fn sei(
    f: &dyn ContinuousModel,
    g: &dyn ContinuousModel,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    let upper = pair_upper(f, g, q);
    let v = integrate(&|x| f.survival(x) * g.survival(x), 0.0, upper, q)?;
    Ok(-0.5 * v)
}

/// Inaccuracy ratio I xi(X, Y) = xi J_s(X, Y) / J_s(X).
pub fn inaccuracy_ratio(
    f: &dyn ContinuousModel,
    g: &dyn ContinuousModel,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    let base = survival_extropy(f, q)?;
    if base == 0.0 {
        return Err(MeasureError::DegenerateBase);
    }
    Ok(sei(f, g, q)? / base)
}

/// Directed survival extropy divergence SJ(F-bar | G-bar)
/// = (1/2) int (F-bar - G-bar) F-bar.
pub fn sed(
    f: &dyn ContinuousModel,
    g: &dyn ContinuousModel,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    let upper = pair_upper(f, g, q);
    let v = integrate(
        &|x| (f.survival(x) - g.survival(x)) * f.survival(x),
        0.0,
        upper,
        q,
    )?;
    Ok(0.5 * v)
}

/// Symmetric divergence SSJ = (1/8)(SJ(F|G) + SJ(G|F)).
pub fn symmetric_sed(
    f: &dyn ContinuousModel,
    g: &dyn ContinuousModel,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    Ok((sed(f, g, q)? + sed(g, f, q)?) / 8.0)
}

fn survival_at(f: &dyn ContinuousModel, t: f64) -> Result<f64, MeasureError> {
    let s = f.survival(t);
    if s <= 0.0 {
        Err(MeasureError::ZeroSurvival)
    } else {
        Ok(s)
    }
}

/// Dynamic survival extropy J_s(X; t) = -(1/2) int_t (F-bar/F-bar(t))^2.
pub fn dynamic_survival_extropy(
    f: &dyn ContinuousModel,
    t: DynamicPoint,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    let st = survival_at(f, t.t)?;
    let upper = f.tail_point(q.tail_cutoff_probability).max(t.t);
    let v = integrate(&|x| (f.survival(x) / st).powi(2), t.t, upper, q)?;
    Ok(-0.5 * v)
}

/// Dynamic inaccuracy (DSEI)
/// = -(1/2) int_t (F-bar/F-bar(t)) (G-bar/G-bar(t)).
pub fn dynamic_sei(
    f: &dyn ContinuousModel,
    g: &dyn ContinuousModel,
    t: DynamicPoint,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    let sf = survival_at(f, t.t)?;
    let sg = survival_at(g, t.t)?;
    let upper = pair_upper(f, g, q).max(t.t);
    let v = integrate(
        &|x| (f.survival(x) / sf) * (g.survival(x) / sg),
        t.t,
        upper,
        q,
    )?;
    Ok(-0.5 * v)
}

/// Dynamic divergence (DSED)
/// = (1/2) int_t (F-bar/F-bar(t) - G-bar/G-bar(t)) (F-bar/F-bar(t)).
pub fn dsed(
    f: &dyn ContinuousModel,
    g: &dyn ContinuousModel,
    t: DynamicPoint,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    let sf = survival_at(f, t.t)?;
    let sg = survival_at(g, t.t)?;
    let upper = pair_upper(f, g, q).max(t.t);
    let v = integrate(
        &|x| {
            let rf = f.survival(x) / sf;
            (rf - g.survival(x) / sg) * rf
        },
        t.t,
        upper,
        q,
    )?;
    Ok(0.5 * v)
}

/// Symmetric dynamic divergence = (1/8)(DSED(F|G) + DSED(G|F)).
pub fn symmetric_dsed(
    f: &dyn ContinuousModel,
    g: &dyn ContinuousModel,
    t: DynamicPoint,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    Ok((dsed(f, g, t, q)? + dsed(g, f, t, q)?) / 8.0)
}

/// Hazard rate h(t) = f(t) / F-bar(t).
pub fn hazard_rate(f: &dyn ContinuousModel, t: f64) -> Result<f64, MeasureError> {
    let s = survival_at(f, t)?;
    Ok(f.density(t) / s)
}

/// Residual of the DSEI differential equation
/// d/dt xi J_s = (h_X + h_Y) xi J_s + 1/2, by central differences.
pub fn dsei_ode_residual(
    f: &dyn ContinuousModel,
    g: &dyn ContinuousModel,
    t: DynamicPoint,
    delta: f64,
    q: &QuadratureConfig,
) -> Result<f64, MeasureError> {
    let lo = DynamicPoint::new((t.t - delta).max(0.0));
    let hi = DynamicPoint::new(t.t + delta);
    let derivative =
        (dynamic_sei(f, g, hi, q)? - dynamic_sei(f, g, lo, q)?) / (hi.t - lo.t);
    let rhs = (hazard_rate(f, t.t)? + hazard_rate(g, t.t)?) * dynamic_sei(f, g, t, q)? + 0.5;
    Ok((derivative - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_model, DistributionSpec};
    use crate::model::Mixture;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn exp(rate: f64) -> Box<dyn ContinuousModel> {
        make_model(DistributionSpec::Exponential { rate }).unwrap()
    }

    fn unit_uniform() -> Box<dyn ContinuousModel> {
        make_model(DistributionSpec::Uniform { b: 1.0 }).unwrap()
    }

    #[test]
    fn survival_extropy_exponential() {
        // -1/(4 lambda)
        assert!((survival_extropy(exp(1.0).as_ref(), &q()).unwrap() + 0.25).abs() < 1e-10);
        assert!((survival_extropy(exp(2.0).as_ref(), &q()).unwrap() + 0.125).abs() < 1e-10);
    }

    #[test]
    fn survival_extropy_uniform() {
        // -b/6
        assert!((survival_extropy(unit_uniform().as_ref(), &q()).unwrap() + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn extropy_divergence_density_values() {
        let f = exp(1.0);
        let g = exp(3.0);
        assert!(extropy_divergence_density(f.as_ref(), f.as_ref(), &q()).unwrap().abs() < 1e-12);
        // lambda1/4 - lambda1 lambda2 / (2(l1+l2)) = 1/4 - 3/8
        let v = extropy_divergence_density(f.as_ref(), g.as_ref(), &q()).unwrap();
        assert!((v + 0.125).abs() < 1e-10, "got {v}");
        let h = exp(2.0);
        assert!(extropy_divergence_density(h.as_ref(), h.as_ref(), &q()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sei_values() {
        let f = exp(1.0);
        assert!((sei(f.as_ref(), f.as_ref(), &q()).unwrap() + 0.25).abs() < 1e-10);
        // -(1/2) int e^{-5x} = -0.1 for rates 3 and 2
        let a = exp(3.0);
        let b = exp(2.0);
        assert!((sei(a.as_ref(), b.as_ref(), &q()).unwrap() + 0.1).abs() < 1e-10);
        let u = unit_uniform();
        assert!((sei(u.as_ref(), u.as_ref(), &q()).unwrap() + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn sei_equals_survival_extropy_on_diagonal() {
        let m = exp(1.7);
        let a = sei(m.as_ref(), m.as_ref(), &q()).unwrap();
        let b = survival_extropy(m.as_ref(), &q()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn inaccuracy_ratio_values() {
        let f = exp(1.0);
        assert!((inaccuracy_ratio(f.as_ref(), f.as_ref(), &q()).unwrap() - 1.0).abs() < 1e-10);
        // 2 l1 / (l1 + l2)
        let g = exp(3.0);
        assert!((inaccuracy_ratio(f.as_ref(), g.as_ref(), &q()).unwrap() - 0.5).abs() < 1e-10);
        let h = exp(2.0);
        assert!((inaccuracy_ratio(h.as_ref(), h.as_ref(), &q()).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sed_values() {
        let f = exp(3.0);
        let g = exp(2.0);
        let v = sed(f.as_ref(), g.as_ref(), &q()).unwrap();
        assert!((v + 1.0 / 60.0).abs() < 1e-10, "got {v}");
        let a = exp(1.0);
        let b = exp(3.0);
        assert!((sed(a.as_ref(), b.as_ref(), &q()).unwrap() - 0.125).abs() < 1e-10);
        let u = unit_uniform();
        assert!(sed(u.as_ref(), u.as_ref(), &q()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sed_identity_with_sei() {
        let f = exp(1.3);
        let g = exp(0.6);
        let lhs = sed(f.as_ref(), g.as_ref(), &q()).unwrap();
        let rhs = sei(f.as_ref(), g.as_ref(), &q()).unwrap()
            - survival_extropy(f.as_ref(), &q()).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn symmetric_sed_is_symmetric() {
        let f = unit_uniform();
        let g = exp(1.0);
        let a = symmetric_sed(f.as_ref(), g.as_ref(), &q()).unwrap();
        let b = symmetric_sed(g.as_ref(), f.as_ref(), &q()).unwrap();
        assert!((a - b).abs() < 1e-12);
        let e = exp(1.0);
        assert!(symmetric_sed(e.as_ref(), e.as_ref(), &q()).unwrap().abs() < 1e-12);
        // Reduction to the directed pair.
        let f3 = exp(3.0);
        let g2 = exp(2.0);
        let direct = symmetric_sed(f3.as_ref(), g2.as_ref(), &q()).unwrap();
        let built = (sed(f3.as_ref(), g2.as_ref(), &q()).unwrap()
            + sed(g2.as_ref(), f3.as_ref(), &q()).unwrap())
            / 8.0;
        assert!((direct - built).abs() < 1e-12);
    }

    #[test]
    fn dynamic_survival_extropy_memoryless() {
        let f = exp(1.0);
        let v = dynamic_survival_extropy(f.as_ref(), DynamicPoint::new(0.5), &q()).unwrap();
        assert!((v + 0.25).abs() < 1e-10);
        let v0 = dynamic_survival_extropy(f.as_ref(), DynamicPoint::new(0.0), &q()).unwrap();
        assert!((v0 + 0.25).abs() < 1e-10);
        let u = unit_uniform();
        let vu = dynamic_survival_extropy(u.as_ref(), DynamicPoint::new(0.0), &q()).unwrap();
        assert!((vu + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn dynamic_sei_values() {
        let f = exp(1.0);
        let g = exp(3.0);
        let v = dynamic_sei(f.as_ref(), g.as_ref(), DynamicPoint::new(0.7), &q()).unwrap();
        assert!((v + 0.125).abs() < 1e-10, "got {v}");
        // t = 0 consistency
        let at0 = dynamic_sei(f.as_ref(), g.as_ref(), DynamicPoint::new(0.0), &q()).unwrap();
        let stat = sei(f.as_ref(), g.as_ref(), &q()).unwrap();
        assert!((at0 - stat).abs() < 1e-10);
        let e2 = exp(2.0);
        let c = dynamic_sei(e2.as_ref(), e2.as_ref(), DynamicPoint::new(1.0), &q()).unwrap();
        assert!((c + 0.125).abs() < 1e-10);
    }

    #[test]
    fn dsed_values() {
        let f = exp(1.0);
        let g = exp(3.0);
        for t in [0.0, 0.3, 1.0, 2.0] {
            let v = dsed(f.as_ref(), g.as_ref(), DynamicPoint::new(t), &q()).unwrap();
            assert!((v - 0.125).abs() < 1e-9, "t={t} got {v}");
        }
        let u = unit_uniform();
        assert!(dsed(u.as_ref(), u.as_ref(), DynamicPoint::new(0.2), &q()).unwrap().abs() < 1e-10);
    }

    #[test]
    fn dsed_identity() {
        let f = make_model(DistributionSpec::Gompertz { a: 5.0, b: 3.0 }).unwrap();
        let g = exp(1.0);
        let t = DynamicPoint::new(0.25);
        let lhs = dsed(f.as_ref(), g.as_ref(), t, &q()).unwrap();
        let rhs = dynamic_sei(f.as_ref(), g.as_ref(), t, &q()).unwrap()
            - dynamic_survival_extropy(f.as_ref(), t, &q()).unwrap();
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn symmetric_dsed_symmetry() {
        let f = exp(1.0);
        let g = exp(3.0);
        let t = DynamicPoint::new(0.5);
        let a = symmetric_dsed(f.as_ref(), g.as_ref(), t, &q()).unwrap();
        let b = symmetric_dsed(g.as_ref(), f.as_ref(), t, &q()).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(symmetric_dsed(f.as_ref(), f.as_ref(), t, &q()).unwrap().abs() < 1e-10);
    }

    #[test]
    fn hazard_rate_values() {
        let e = exp(2.0);
        assert!((hazard_rate(e.as_ref(), 5.0).unwrap() - 2.0).abs() < 1e-12);
        let u = unit_uniform();
        assert!((hazard_rate(u.as_ref(), 0.5).unwrap() - 2.0).abs() < 1e-12);
        // Gompertz hazard is increasing.
        let g = make_model(DistributionSpec::Gompertz { a: 5.0, b: 3.0 }).unwrap();
        let mut prev = 0.0;
        for i in 0..5 {
            let h = hazard_rate(g.as_ref(), 0.1 * i as f64).unwrap();
            assert!(h > prev);
            prev = h;
        }
    }

    #[test]
    fn ode_residual_small() {
        let f = exp(1.0);
        let g = exp(3.0);
        let r = dsei_ode_residual(f.as_ref(), g.as_ref(), DynamicPoint::new(0.5), 1e-4, &q())
            .unwrap();
        assert!(r < 1e-6, "residual {r}");
        let u = unit_uniform();
        let r2 = dsei_ode_residual(u.as_ref(), u.as_ref(), DynamicPoint::new(0.3), 1e-4, &q())
            .unwrap();
        assert!(r2 < 1e-4, "residual {r2}");
        let go = make_model(DistributionSpec::Gompertz { a: 5.0, b: 3.0 }).unwrap();
        let r3 = dsei_ode_residual(go.as_ref(), f.as_ref(), DynamicPoint::new(0.2), 1e-4, &q())
            .unwrap();
        assert!(r3 < 1e-4, "residual {r3}");
    }

    #[test]
    fn zero_survival_is_reported() {
        let u = unit_uniform();
        let err = dynamic_survival_extropy(u.as_ref(), DynamicPoint::new(1.5), &q());
        assert!(matches!(err, Err(MeasureError::ZeroSurvival)));
    }

    #[test]
    fn mixture_theorems() {
        let f = exp(3.0);
        let g = exp(2.0);
        let mix = Mixture::new(f.as_ref(), g.as_ref());
        // SJ(mix|G) + SJ(mix|F) = 0
        let s1 = sed(&mix, g.as_ref(), &q()).unwrap();
        let s2 = sed(&mix, f.as_ref(), &q()).unwrap();
        assert!((s1 + s2).abs() < 1e-10);
        // SJ(F|G) = 2 SJ(F|mix)
        let whole = sed(f.as_ref(), g.as_ref(), &q()).unwrap();
        let half = sed(f.as_ref(), &mix, &q()).unwrap();
        assert!((whole - 2.0 * half).abs() < 1e-10);
    }
}
