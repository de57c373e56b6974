//! Concrete lifetime distribution families and seeded inverse-transform
//! sampling.

pub mod special;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ContinuousModel;
use crate::quadrature::{self, QuadratureConfig};
use special::{inc_beta, inv_inc_beta, ln_beta, newton_polish};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse distribution spec `{0}`")]
    Parse(String),
}

/// A named distribution family with its parameters.
///
/// Canonical textual forms: `exp:rate=2`, `uniform:b=1`, `beta:a=0.5,b=1`,
/// `gompertz:a=5,b=3`, `ck:k=1.5` (case-insensitive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistributionSpec {
    Exponential { rate: f64 },
    Uniform { b: f64 },
    Beta { shape1: f64, shape2: f64 },
    Gompertz { a: f64, b: f64 },
    Ck { k: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<(), DistributionError> {
        let ok = match *self {
            DistributionSpec::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            DistributionSpec::Uniform { b } => b > 0.0 && b.is_finite(),
            DistributionSpec::Beta { shape1, shape2 } => {
                shape1 > 0.0 && shape2 > 0.0 && shape1.is_finite() && shape2.is_finite()
            }
            DistributionSpec::Gompertz { a, b } => {
                a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()
            }
            DistributionSpec::Ck { k } => k >= 1.0 && k.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(DistributionError::InvalidParameter(self.to_string()))
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistributionSpec::Exponential { rate } => write!(f, "exp:rate={rate}"),
            DistributionSpec::Uniform { b } => write!(f, "uniform:b={b}"),
            DistributionSpec::Beta { shape1, shape2 } => write!(f, "beta:a={shape1},b={shape2}"),
            DistributionSpec::Gompertz { a, b } => write!(f, "gompertz:a={a},b={b}"),
            DistributionSpec::Ck { k } => write!(f, "ck:k={k}"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = DistributionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DistributionError::Parse(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        let (family, rest) = lower.split_once(':').ok_or_else(err)?;
        let mut kv = std::collections::HashMap::new();
        for part in rest.split(',') {
            let (k, v) = part.split_once('=').ok_or_else(err)?;
            let v: f64 = v.trim().parse().map_err(|_| err())?;
            kv.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(err);
        let spec = match family.trim() {
            "exp" | "exponential" => DistributionSpec::Exponential { rate: get("rate")? },
            "uniform" | "unif" => DistributionSpec::Uniform { b: get("b")? },
            "beta" => DistributionSpec::Beta {
                shape1: get("a")?,
                shape2: get("b")?,
            },
            "gompertz" => DistributionSpec::Gompertz {
                a: get("a")?,
                b: get("b")?,
            },
            "ck" => DistributionSpec::Ck { k: get("k")? },
            _ => return Err(err()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Deterministic sub-stream of a seeded generator. Identical
/// `(seed, stream_index)` reproduce identical draws regardless of thread
/// schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        SeededStream { seed, stream_index }
    }

    /// ChaCha8 keyed by the seed, with the stream index as the nonce.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Construct the analytic model for a family spec.
pub fn make_model(spec: DistributionSpec) -> Result<Box<dyn ContinuousModel>, DistributionError> {
    spec.validate()?;
    Ok(match spec {
        DistributionSpec::Exponential { rate } => Box::new(Exponential::new(rate)),
        DistributionSpec::Uniform { b } => Box::new(Uniform::new(b)),
        DistributionSpec::Beta { shape1, shape2 } => Box::new(Beta::new(shape1, shape2)),
        DistributionSpec::Gompertz { a, b } => Box::new(Gompertz::new(a, b)),
        DistributionSpec::Ck { k } => Box::new(Ck::new(k)),
    })
}

/// `n` inverse-transform draws from `model`, sorted ascending.
pub fn sample(model: &dyn ContinuousModel, n: usize, stream: SeededStream) -> Vec<f64> {
    let mut rng = stream.rng();
    let mut out: Vec<f64> = (0..n).map(|_| model.quantile(rng.gen::<f64>())).collect();
    out.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// `sample` for a spec, constructing the model on the fly.
pub fn sample_spec(
    spec: DistributionSpec,
    n: usize,
    stream: SeededStream,
) -> Result<Vec<f64>, DistributionError> {
    Ok(sample(make_model(spec)?.as_ref(), n, stream))
}

// ---------------------------------------------------------------------------
// Exponential(rate)

pub struct Exponential {
    rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Self {
        assert!(rate > 0.0);
        Exponential { rate }
    }
}

impl ContinuousModel for Exponential {
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.rate * x).exp()
        }
    }

    fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        -(-u).ln_1p() / self.rate
    }

    fn mean(&self) -> f64 {
        1.0 / self.rate
    }

    fn second_moment(&self) -> f64 {
        2.0 / (self.rate * self.rate)
    }
}

// ---------------------------------------------------------------------------
// Uniform(0, b)

pub struct Uniform {
    b: f64,
}

impl Uniform {
    pub fn new(b: f64) -> Self {
        assert!(b > 0.0);
        Uniform { b }
    }
}

impl ContinuousModel for Uniform {
    fn survival(&self, x: f64) -> f64 {
        (1.0 - x / self.b).clamp(0.0, 1.0)
    }

    fn density(&self, x: f64) -> f64 {
        if (0.0..=self.b).contains(&x) {
            1.0 / self.b
        } else {
            0.0
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        u * self.b
    }

    fn mean(&self) -> f64 {
        0.5 * self.b
    }

    fn second_moment(&self) -> f64 {
        self.b * self.b / 3.0
    }

    fn support_upper(&self) -> Option<f64> {
        Some(self.b)
    }
}

// ---------------------------------------------------------------------------
// Beta(shape1, shape2) on [0, 1]

pub struct Beta {
    a: f64,
    b: f64,
    ln_beta_ab: f64,
    // Coarse quantile grid built on first use; gives Newton a warm start
    // so bulk sampling stays cheap.
    grid: OnceLock<Vec<f64>>,
}

const BETA_GRID: usize = 1024;

impl Beta {
    pub fn new(a: f64, b: f64) -> Self {
        assert!(a > 0.0 && b > 0.0);
        Beta {
            a,
            b,
            ln_beta_ab: ln_beta(a, b),
            grid: OnceLock::new(),
        }
    }

    fn quantile_grid(&self) -> &[f64] {
        self.grid.get_or_init(|| {
            (0..=BETA_GRID)
                .map(|i| inv_inc_beta(self.a, self.b, i as f64 / BETA_GRID as f64))
                .collect()
        })
    }
}

impl ContinuousModel for Beta {
    fn survival(&self, x: f64) -> f64 {
        1.0 - inc_beta(self.a, self.b, x)
    }

    fn density(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        ((self.a - 1.0) * x.ln() + (self.b - 1.0) * (1.0 - x).ln() - self.ln_beta_ab).exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        inc_beta(self.a, self.b, x)
    }

    fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let grid = self.quantile_grid();
        let pos = u * BETA_GRID as f64;
        let i = (pos.floor() as usize).min(BETA_GRID - 1);
        let lo = grid[i];
        let hi = grid[i + 1];
        let x0 = lo + (pos - i as f64) * (hi - lo);
        newton_polish(self.a, self.b, u, x0, lo, hi)
    }

    fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    fn second_moment(&self) -> f64 {
        let s = self.a + self.b;
        self.a * (self.a + 1.0) / (s * (s + 1.0))
    }

    fn support_upper(&self) -> Option<f64> {
        Some(1.0)
    }
}

// ---------------------------------------------------------------------------
// Gompertz(a, b): survival exp(-(a/b)(e^{bx} - 1)), initial hazard a,
// shape b.

pub struct Gompertz {
    a: f64,
    b: f64,
    mean: f64,
    second: f64,
}

impl Gompertz {
    pub fn new(a: f64, b: f64) -> Self {
        assert!(a > 0.0 && b > 0.0);
        let mut g = Gompertz {
            a,
            b,
            mean: f64::NAN,
            second: f64::NAN,
        };
        // E[X] = int F-bar, E[X^2] = 2 int x F-bar; cached once.
        let cfg = QuadratureConfig::default();
        let upper = g.quantile(1.0 - 1e-13);
        g.mean = quadrature::integrate(&|x| g.survival(x), 0.0, upper, &cfg).unwrap_or(f64::NAN);
        g.second =
            quadrature::integrate(&|x| 2.0 * x * g.survival(x), 0.0, upper, &cfg).unwrap_or(f64::NAN);
        g
    }
}

impl ContinuousModel for Gompertz {
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-(self.a / self.b) * ((self.b * x).exp() - 1.0)).exp()
        }
    }

    fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.a * (self.b * x).exp() * self.survival(x)
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        // F-bar(x) = 1-u  =>  x = (1/b) ln(1 - (b/a) ln(1-u))
        let ln_p = (-u).ln_1p();
        ((1.0 - (self.b / self.a) * ln_p).ln()) / self.b
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn second_moment(&self) -> f64 {
        self.second
    }
}

// ---------------------------------------------------------------------------
// C_k family on [0, 1]

pub struct Ck {
    k: f64,
    second: f64,
}

impl Ck {
    pub fn new(k: f64) -> Self {
        assert!(k >= 1.0);
        let mut c = Ck { k, second: f64::NAN };
        let cfg = QuadratureConfig::default();
        c.second =
            quadrature::integrate(&|x| 2.0 * x * c.survival(x), 0.0, 1.0, &cfg).unwrap_or(f64::NAN);
        c
    }
}

/// Piecewise C_k CDF on [0, 1].
pub fn ck_cdf(k: f64, x: f64) -> f64 {
    assert!(k >= 1.0, "k must be >= 1");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1]");
    let scale = 2.0f64.powf(k - 1.0);
    if x <= 0.5 {
        0.5 - scale * (0.5 - x).powf(k)
    } else {
        0.5 + scale * (x - 0.5).powf(k)
    }
}

impl ContinuousModel for Ck {
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else if x >= 1.0 {
            0.0
        } else {
            1.0 - ck_cdf(self.k, x)
        }
    }

    fn density(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let scale = 2.0f64.powf(self.k - 1.0);
        self.k * scale * (0.5 - x).abs().powf(self.k - 1.0)
    }

    fn cdf(&self, x: f64) -> f64 {
        ck_cdf(self.k, x.clamp(0.0, 1.0))
    }

    fn quantile(&self, u: f64) -> f64 {
        let scale = 2.0f64.powf(self.k - 1.0);
        if u < 0.5 {
            0.5 - ((0.5 - u) / scale).powf(1.0 / self.k)
        } else {
            0.5 + ((u - 0.5) / scale).powf(1.0 / self.k)
        }
    }

    fn mean(&self) -> f64 {
        0.5
    }

    fn second_moment(&self) -> f64 {
        self.second
    }

    fn support_upper(&self) -> Option<f64> {
        Some(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing_round_trip() {
        for s in [
            "exp:rate=2",
            "uniform:b=1",
            "beta:a=0.5,b=1",
            "gompertz:a=5,b=3",
            "ck:k=1.5",
        ] {
            let spec: DistributionSpec = s.parse().unwrap();
            let back: DistributionSpec = spec.to_string().parse().unwrap();
            assert_eq!(spec, back);
        }
        assert!("EXP:RATE=2".parse::<DistributionSpec>().is_ok());
        assert!("exp:rate=-1".parse::<DistributionSpec>().is_err());
        assert!("gaussian:mu=0".parse::<DistributionSpec>().is_err());
    }

    #[test]
    fn exponential_moments() {
        let m = make_model("exp:rate=2".parse().unwrap()).unwrap();
        assert!((m.mean() - 0.5).abs() < 1e-15);
        assert!((m.second_moment() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn uniform_moments() {
        let m = make_model("uniform:b=1".parse().unwrap()).unwrap();
        assert!((m.mean() - 0.5).abs() < 1e-15);
        assert!((m.second_moment() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ck_cdf_values() {
        assert!((ck_cdf(2.0, 0.25) - 0.375).abs() < 1e-15);
        assert!((ck_cdf(1.5, 0.5) - 0.5).abs() < 1e-15);
        assert!((ck_cdf(2.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((ck_cdf(2.0, 0.0)).abs() < 1e-15);
        let m = make_model("ck:k=2".parse().unwrap()).unwrap();
        assert!((m.cdf(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic() {
        let stream = SeededStream::new(42, 3);
        let a = sample_spec("uniform:b=1".parse().unwrap(), 1, stream).unwrap();
        let b = sample_spec("uniform:b=1".parse().unwrap(), 1, stream).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exponential_sample_mean_lln() {
        let xs = sample_spec(
            DistributionSpec::Exponential { rate: 1.0 },
            100_000,
            SeededStream::new(7, 0),
        )
        .unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn ck_sample_matches_cdf() {
        let xs = sample_spec(DistributionSpec::Ck { k: 2.0 }, 100_000, SeededStream::new(7, 1))
            .unwrap();
        let below = xs.iter().filter(|&&x| x <= 0.25).count() as f64 / xs.len() as f64;
        assert!((below - 0.375).abs() < 0.005, "ecdf {below}");
    }

    #[test]
    fn gompertz_quantile_survival_inverse() {
        let m = Gompertz::new(5.0, 3.0);
        for u in [0.01, 0.1, 0.5, 0.9, 0.99] {
            let x = m.quantile(1.0 - u);
            assert!((m.survival(x) - u).abs() < 1e-12, "u={u}");
        }
        assert!(m.mean().is_finite() && m.mean() > 0.0);
        assert!(m.second_moment() > 0.0);
    }
}
