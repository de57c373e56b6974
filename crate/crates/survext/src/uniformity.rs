//! Goodness-of-fit testing for the uniform distribution: the T_n
//! statistic, classical competitors, Monte Carlo critical values, and a
//! power-study harness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{make_model, sample, DistributionError, DistributionSpec, SeededStream};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TestError {
    #[error("sample mean is zero")]
    ZeroMean,
    #[error("statistic requires values in [0, 1], found {0}")]
    DomainError(f64),
    #[error("window size {m} invalid for sample size {n} (need 1 <= m < n/2)")]
    WindowError { m: usize, n: usize },
    #[error("no critical value for (n = {n}, alpha = {alpha})")]
    MissingCriticalValue { n: usize, alpha: f64 },
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

/// Which tail of the null distribution rejects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tail {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Statistic {
    Tn,
    Ks,
    Ad,
    Cm,
    Tb,
    Tu,
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::Tn => "Tn",
            Statistic::Ks => "KS",
            Statistic::Ad => "AD",
            Statistic::Cm => "CM",
            Statistic::Tb => "TB",
            Statistic::Tu => "TU",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tn" => Some(Statistic::Tn),
            "ks" => Some(Statistic::Ks),
            "ad" => Some(Statistic::Ad),
            "cm" => Some(Statistic::Cm),
            "tb" => Some(Statistic::Tb),
            "tu" => Some(Statistic::Tu),
            _ => None,
        }
    }

    /// TB is an entropy-type statistic that shrinks under departures, so
    /// it rejects in the left tail; everything else is right-tailed.
    pub fn tail(&self) -> Tail {
        match self {
            Statistic::Tb => Tail::Left,
            _ => Tail::Right,
        }
    }

    pub fn needs_window(&self) -> bool {
        matches!(self, Statistic::Tb | Statistic::Tu)
    }
}

/// Default spacing window: round(sqrt(n) + 0.5).
pub fn default_window(n: usize) -> usize {
    ((n as f64).sqrt() + 0.5).round() as usize
}

/// T_n = sum x_i^2 / (8 n x-bar) - x-bar / 6, computed on raw data.
pub fn t_n(values: &[f64]) -> Result<f64, TestError> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(TestError::ZeroMean);
    }
    let sum_sq: f64 = values.iter().map(|x| x * x).sum();
    Ok(sum_sq / (8.0 * n * mean) - mean / 6.0)
}

fn check_unit_domain(values: &[f64]) -> Result<(), TestError> {
    for &v in values {
        if !(0.0..=1.0).contains(&v) {
            return Err(TestError::DomainError(v));
        }
    }
    Ok(())
}

fn check_window(m: usize, n: usize) -> Result<(), TestError> {
    if m >= 1 && 2 * m < n {
        Ok(())
    } else {
        Err(TestError::WindowError { m, n })
    }
}

/// Kolmogorov-Smirnov statistic for U(0,1) on sorted values.
pub fn ks(sorted: &[f64]) -> Result<f64, TestError> {
    check_unit_domain(sorted)?;
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let i1 = (i + 1) as f64;
        d = d.max(i1 / n - x).max(x - i as f64 / n);
    }
    Ok(d)
}

/// Anderson-Darling statistic for U(0,1) on sorted values.
pub fn ad(sorted: &[f64]) -> Result<f64, TestError> {
    check_unit_domain(sorted)?;
    let n = sorted.len() as f64;
    let mut acc = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let i1 = (i + 1) as f64;
        acc += (i1 - 0.5) * x.ln() + (n - i1 + 0.5) * (1.0 - x).ln();
    }
    Ok(-2.0 / n * acc - n)
}

/// Cramer-von Mises statistic (with the classical square) on sorted values.
pub fn cm(sorted: &[f64]) -> Result<f64, TestError> {
    check_unit_domain(sorted)?;
    let n = sorted.len() as f64;
    let mut acc = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let d = x - (2.0 * (i + 1) as f64 - 1.0) / (2.0 * n);
        acc += d * d;
    }
    Ok(acc + 1.0 / (12.0 * n))
}

/// Order statistic with the edge convention X_(i) = X_(1) for i < 1 and
/// X_(i) = X_(n) for i > n; `i` is 1-based and may be out of range.
fn order_stat(sorted: &[f64], i: isize) -> f64 {
    let n = sorted.len() as isize;
    sorted[(i.clamp(1, n) - 1) as usize]
}

/// Zamanzade's modified cdf estimate at each order statistic.
fn fn_hat(sorted: &[f64]) -> Vec<f64> {
    let n = sorted.len();
    (1..=n)
        .map(|i| {
            let prev = order_stat(sorted, i as isize - 1);
            let next = order_stat(sorted, i as isize + 1);
            let denom = next - prev;
            let frac = if denom == 0.0 {
                0.5
            } else {
                (sorted[i - 1] - prev) / denom
            };
            (i as f64 + frac) / (n as f64 + 2.0)
        })
        .collect()
}

/// Zamanzade spacing statistic TB (rejects for small values).
pub fn tb(sorted: &[f64], m: usize) -> Result<f64, TestError> {
    check_unit_domain(sorted)?;
    check_window(m, sorted.len())?;
    let n = sorted.len();
    let fhat = fn_hat(sorted);
    let f_at = |i: isize| fhat[(i.clamp(1, n as isize) - 1) as usize];
    let mut weights = Vec::with_capacity(n);
    let mut spacings = Vec::with_capacity(n);
    let mut weight_sum = 0.0;
    for i in 1..=n as isize {
        let d = order_stat(sorted, i + m as isize) - order_stat(sorted, i - m as isize);
        let e = f_at(i + m as isize) - f_at(i - m as isize);
        spacings.push(d);
        weights.push(e);
        weight_sum += e;
    }
    let mut acc = 0.0;
    for (d, e) in spacings.iter().zip(&weights) {
        if *d > 0.0 && *e > 0.0 {
            acc += (d / e).ln() * (e / weight_sum);
        }
    }
    Ok(acc)
}

/// Extropy-based spacing statistic TU (rejects for large values).
pub fn tu(sorted: &[f64], m: usize) -> Result<f64, TestError> {
    check_unit_domain(sorted)?;
    let n = sorted.len();
    check_window(m, n)?;
    let nf = n as f64;
    let mf = m as f64;
    let mut acc = 0.0;
    for i in 1..=n {
        let c = if i <= m {
            1.0 + (i as f64 - 1.0) / mf
        } else if i >= n - m + 1 {
            1.0 + (nf - i as f64) / mf
        } else {
            2.0
        };
        let d = order_stat(sorted, i as isize + m as isize)
            - order_stat(sorted, i as isize - m as isize);
        if d > 0.0 {
            acc += c * mf / nf / d;
        }
    }
    Ok(acc / (2.0 * nf))
}

/// Evaluate `stat` on a sorted sample. `window` applies to TB/TU only
/// and defaults to `default_window(n)`.
pub fn compute_statistic(
    stat: Statistic,
    sorted: &[f64],
    window: Option<usize>,
) -> Result<f64, TestError> {
    match stat {
        Statistic::Tn => t_n(sorted),
        Statistic::Ks => ks(sorted),
        Statistic::Ad => ad(sorted),
        Statistic::Cm => cm(sorted),
        Statistic::Tb => tb(sorted, window.unwrap_or_else(|| default_window(sorted.len()))),
        Statistic::Tu => tu(sorted, window.unwrap_or_else(|| default_window(sorted.len()))),
    }
}

/// Type-7 empirical quantile of sorted data.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalValueEntry {
    pub n: usize,
    pub alpha: f64,
    pub value: f64,
}

/// Monte Carlo critical values of a statistic under H0: U(0, 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalValueTable {
    pub statistic: Statistic,
    pub tail: Tail,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_m: Option<usize>,
    pub entries: Vec<CriticalValueEntry>,
    pub replications: u64,
    pub seed: u64,
}

impl CriticalValueTable {
    pub fn lookup(&self, n: usize, alpha: f64) -> Result<f64, TestError> {
        self.entries
            .iter()
            .find(|e| e.n == n && (e.alpha - alpha).abs() < 1e-12)
            .map(|e| e.value)
            .ok_or(TestError::MissingCriticalValue { n, alpha })
    }
}

/// splitmix64 step, used to derive independent sub-seeds for the
/// different Monte Carlo phases of a study.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Null-hypothesis statistic values over `replications` seeded U(0, 1)
/// samples of size `n`, sorted ascending. Replications map to RNG
/// streams one-to-one, so the result is identical for any thread count.
fn null_statistic_values(
    stat: Statistic,
    n: usize,
    replications: u64,
    seed: u64,
    window: Option<usize>,
) -> Result<Vec<f64>, TestError> {
    let uniform = make_model(DistributionSpec::Uniform { b: 1.0 })?;
    let mut values: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let xs = sample(uniform.as_ref(), n, SeededStream::new(seed, rep));
            compute_statistic(stat, &xs, window)
        })
        .collect::<Result<_, _>>()?;
    values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(values)
}

/// Monte Carlo critical values for each requested level.
pub fn critical_values(
    stat: Statistic,
    n: usize,
    alphas: &[f64],
    replications: u64,
    seed: u64,
    window: Option<usize>,
) -> Result<CriticalValueTable, TestError> {
    let window = if stat.needs_window() {
        Some(window.unwrap_or_else(|| default_window(n)))
    } else {
        None
    };
    let values = null_statistic_values(stat, n, replications, seed, window)?;
    let entries = alphas
        .iter()
        .map(|&alpha| {
            let p = match stat.tail() {
                Tail::Right => 1.0 - alpha,
                Tail::Left => alpha,
            };
            CriticalValueEntry {
                n,
                alpha,
                value: quantile_type7(&values, p),
            }
        })
        .collect();
    Ok(CriticalValueTable {
        statistic: stat,
        tail: stat.tail(),
        window_m: window,
        entries,
        replications,
        seed,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic_name: String,
    pub value: f64,
    pub n: usize,
    pub alpha: f64,
    pub critical_value: f64,
    pub reject: bool,
}

/// Apply the decision rule for `stat` at level `alpha` using `table`.
pub fn run_test(
    values: &[f64],
    stat: Statistic,
    alpha: f64,
    table: &CriticalValueTable,
) -> Result<TestResult, TestError> {
    let n = values.len();
    let critical_value = table.lookup(n, alpha)?;
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let value = compute_statistic(stat, &sorted, table.window_m)?;
    let reject = match stat.tail() {
        Tail::Right => value >= critical_value,
        Tail::Left => value <= critical_value,
    };
    Ok(TestResult {
        statistic_name: stat.name().to_string(),
        value,
        n,
        alpha,
        critical_value,
        reject,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerStudyConfig {
    pub statistics: Vec<Statistic>,
    pub alternatives: Vec<DistributionSpec>,
    pub sample_sizes: Vec<usize>,
    pub alphas: Vec<f64>,
    pub replications: u64,
    /// Replications used for the on-the-fly critical value tables.
    pub critical_replications: u64,
    pub seed: u64,
    pub window_m: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerRow {
    pub statistic: String,
    pub alternative: String,
    pub n: usize,
    pub alpha: f64,
    pub power: f64,
    pub replications: u64,
    pub seed: u64,
}

/// Monte Carlo power of each statistic against each alternative.
/// Alternatives are sampled directly (the paper's alternatives live on
/// [0, 1]) and every statistic is applied to the raw sample.
pub fn power_study(config: &PowerStudyConfig) -> Result<Vec<PowerRow>, TestError> {
    let mut rows = Vec::new();
    for &stat in &config.statistics {
        for &n in &config.sample_sizes {
            let crit_seed = derive_seed(config.seed, 0x5eed_0001 ^ n as u64);
            let table = critical_values(
                stat,
                n,
                &config.alphas,
                config.critical_replications,
                crit_seed,
                config.window_m,
            )?;
            for (alt_idx, &alt) in config.alternatives.iter().enumerate() {
                let model = make_model(alt)?;
                let alt_seed =
                    derive_seed(config.seed, 0xa17_0000 ^ ((alt_idx as u64) << 32) ^ n as u64);
                // One statistic value per replication, shared across levels.
                let stats: Vec<f64> = (0..config.replications)
                    .into_par_iter()
                    .map(|rep| {
                        let xs = sample(model.as_ref(), n, SeededStream::new(alt_seed, rep));
                        compute_statistic(stat, &xs, table.window_m)
                    })
                    .collect::<Result<_, _>>()?;
                for &alpha in &config.alphas {
                    let crit = table.lookup(n, alpha)?;
                    let rejected = stats
                        .iter()
                        .filter(|&&v| match stat.tail() {
                            Tail::Right => v >= crit,
                            Tail::Left => v <= crit,
                        })
                        .count();
                    rows.push(PowerRow {
                        statistic: stat.name().to_string(),
                        alternative: alt.to_string(),
                        n,
                        alpha,
                        power: rejected as f64 / config.replications as f64,
                        replications: config.replications,
                        seed: config.seed,
                    });
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_n_hand_values() {
        let v = t_n(&[0.25, 0.75]).unwrap();
        assert!((v - (0.625 / 8.0 - 0.5 / 6.0)).abs() < 1e-15);
        // Constant sample c: c/8 - c/6 = -c/24.
        let c = 0.6;
        let v = t_n(&[c; 5]).unwrap();
        assert!((v + c / 24.0).abs() < 1e-15);
        assert!(matches!(t_n(&[0.0, 0.0]), Err(TestError::ZeroMean)));
    }

    #[test]
    fn t_n_scales_linearly() {
        let xs = [0.1, 0.4, 0.9, 0.33];
        let scaled: Vec<f64> = xs.iter().map(|x| 3.0 * x).collect();
        let a = t_n(&xs).unwrap();
        let b = t_n(&scaled).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-14);
    }

    #[test]
    fn ks_hand_value() {
        assert!((ks(&[0.5]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ad_hand_value() {
        let v = ad(&[0.5]).unwrap();
        assert!((v - (2.0 * 2.0f64.ln() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn cm_regular_sample() {
        let n = 8;
        let xs: Vec<f64> = (1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect();
        let v = cm(&xs).unwrap();
        assert!((v - 1.0 / (12.0 * n as f64)).abs() < 1e-15);
    }

    #[test]
    fn domain_and_window_errors() {
        assert!(matches!(ks(&[1.5]), Err(TestError::DomainError(_))));
        assert!(matches!(
            tb(&[0.1, 0.2, 0.3, 0.4], 2),
            Err(TestError::WindowError { .. })
        ));
        assert!(tu(&[0.1, 0.2, 0.3, 0.4, 0.5], 2).is_ok());
    }

    #[test]
    fn critical_values_monotone_in_alpha() {
        let table = critical_values(Statistic::Tn, 20, &[0.01, 0.05], 2000, 11, None).unwrap();
        let a01 = table.lookup(20, 0.01).unwrap();
        let a05 = table.lookup(20, 0.05).unwrap();
        assert!(a01 >= a05);
        assert!(matches!(
            table.lookup(21, 0.05),
            Err(TestError::MissingCriticalValue { .. })
        ));
    }

    #[test]
    fn critical_values_reproducible() {
        let a = critical_values(Statistic::Ks, 10, &[0.05], 500, 3, None).unwrap();
        let b = critical_values(Statistic::Ks, 10, &[0.05], 500, 3, None).unwrap();
        assert_eq!(a.lookup(10, 0.05).unwrap(), b.lookup(10, 0.05).unwrap());
    }

    #[test]
    fn run_test_level_roughly_calibrated() {
        let n = 20;
        let reps = 2000u64;
        let table = critical_values(Statistic::Tn, n, &[0.05], 20_000, 5, None).unwrap();
        let uniform = make_model(DistributionSpec::Uniform { b: 1.0 }).unwrap();
        let mut rejects = 0;
        for rep in 0..reps {
            let xs = sample(uniform.as_ref(), n, SeededStream::new(99, rep));
            if run_test(&xs, Statistic::Tn, 0.05, &table).unwrap().reject {
                rejects += 1;
            }
        }
        let rate = rejects as f64 / reps as f64;
        assert!((rate - 0.05).abs() < 0.02, "rate {rate}");
    }

    #[test]
    fn power_study_detects_beta() {
        let config = PowerStudyConfig {
            statistics: vec![Statistic::Tn],
            alternatives: vec![DistributionSpec::Beta {
                shape1: 0.1,
                shape2: 0.5,
            }],
            sample_sizes: vec![40],
            alphas: vec![0.05],
            replications: 300,
            critical_replications: 5000,
            seed: 17,
            window_m: None,
        };
        let rows = power_study(&config).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].power > 0.95, "power {}", rows[0].power);
    }

    #[test]
    fn t_n_consistent_under_null() {
        let uniform = make_model(DistributionSpec::Uniform { b: 1.0 }).unwrap();
        let xs = sample(uniform.as_ref(), 1_000_000, SeededStream::new(2, 0));
        let v = t_n(&xs).unwrap();
        assert!(v.abs() < 0.002, "Tn {v}");
    }
}
