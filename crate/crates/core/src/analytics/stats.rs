//! Goodness-of-fit tests with asymptotic critical values.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

pub const DEFAULT_LEVEL: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestMethod {
    Ks,
    Ks2,
    ChiSquare,
    MomentZ,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub method: TestMethod,
    pub statistic: f64,
    pub critical: f64,
    pub samples: usize,
    pub level: f64,
    pub pass: bool,
}

impl TestReport {
    fn new(method: TestMethod, statistic: f64, critical: f64, samples: usize, level: f64) -> Self {
        TestReport {
            method,
            statistic,
            critical,
            samples,
            level,
            pass: statistic <= critical,
        }
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("test level {level} outside (0, 1)")))
    }
}

/// Asymptotic Kolmogorov coefficient c(α) = (−ln(α/2)/2)^{1/2}.
pub fn ks_coefficient(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("sample contains NaN"));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, level: f64) -> Result<TestReport> {
    check_level(level)?;
    let n = samples.len();
    if n < 50 {
        return Err(Error::UndersizedSample { got: n, needed: 50 });
    }
    let v = sorted(samples)?;
    let nf = n as f64;
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        })
        .fold(0.0, f64::max);
    Ok(TestReport::new(TestMethod::Ks, d, ks_coefficient(level) / nf.sqrt(), n, level))
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<TestReport> {
    check_level(level)?;
    let (n, m) = (a.len(), b.len());
    if n.min(m) < 100 {
        return Err(Error::UndersizedSample { got: n.min(m), needed: 100 });
    }
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let (nf, mf) = (n as f64, m as f64);
    let critical = ks_coefficient(level) * ((nf + mf) / (nf * mf)).sqrt();
    Ok(TestReport::new(TestMethod::Ks2, d, critical, n + m, level))
}

/// Pearson chi-square test of observed counts against expected counts;
/// k bins give k − 1 degrees of freedom.
pub fn chi_square(counts: &[u64], expected: &[f64], level: f64) -> Result<TestReport> {
    check_level(level)?;
    if counts.len() != expected.len() || counts.len() < 2 {
        return Err(Error::DimensionMismatch { left: counts.len(), right: expected.len() });
    }
    if let Some((bin, &e)) = expected.iter().enumerate().find(|(_, &e)| !(e >= 5.0)) {
        return Err(Error::SparseBin { bin, expected: e });
    }
    let stat: f64 = counts
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).map_err(|e| Error::domain(e.to_string()))?;
    let critical = dist.inverse_cdf(1.0 - level);
    let total = counts.iter().sum::<u64>() as usize;
    Ok(TestReport::new(TestMethod::ChiSquare, stat, critical, total, level))
}

/// |estimate − exact| / se against a z threshold. A zero standard error
/// passes only on exact agreement.
pub fn moment_z(estimate: f64, std_error: f64, exact: f64, z_max: f64, samples: usize) -> TestReport {
    let z = if std_error > 0.0 {
        (estimate - exact).abs() / std_error
    } else if (estimate - exact).abs() <= 1e-15 * exact.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY
    };
    TestReport::new(TestMethod::MomentZ, z, z_max, samples, 0.0)
}

/// Sample mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Expected counts of a Poisson(1) sample of size `total` in bins
/// 0, 1, …, k−2 and a final tail bin ≥ k−1.
pub fn poisson_one_bins(k: usize, total: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k);
    let mut p = (-1.0f64).exp();
    let mut used = 0.0;
    for i in 0..k - 1 {
        out.push(total * p);
        used += p;
        p /= (i + 1) as f64;
    }
    out.push(total * (1.0 - used));
    out
}
