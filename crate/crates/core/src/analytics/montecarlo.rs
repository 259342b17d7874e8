//! Monte Carlo estimators over Haar samples: entry moments and the
//! group average (Reynolds operator) of a function of a matrix and a point.

use serde::Serialize;

use super::stats::mean_and_se;
use super::{moment_joint, MomentSpec};
use crate::error::{Error, Result};
use crate::linalg::{Kind, SquareMatrix, ONE};
use crate::rng::{batch, RandomStream};
use crate::samplers::{haar_so_euler, sample, GroupId, Method, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Self {
        let (mean, std_error) = mean_and_se(values);
        Estimate {
            mean,
            std_error,
            samples: values.len(),
        }
    }
}

/// Exact value against a Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub z_score: f64,
    pub pass: bool,
    pub in_derivation_range: bool,
}

const Z_MAX: f64 = 5.0;

/// Draws `count` Haar SO(N) samples over `lanes` streams and returns the
/// pairs (X_{N,N}, X_{N−1,N−1}).
pub fn diagonal_corner_samples(seed: u64, first_stream: u64, lanes: usize, n: usize, count: usize) -> Vec<(f64, f64)> {
    batch(seed, first_stream, lanes, count, |s| {
        let x = haar_so_euler(s, n);
        (x.get(n - 1, n - 1).re, x.get(n - 2, n - 2).re)
    })
}

/// Compares ⟨|X_{N,N}|^{2p} |X_{N−1,N−1}|^{2q}⟩ over the given corner
/// samples with the closed form.
pub fn moment_report(spec: MomentSpec, corners: &[(f64, f64)]) -> Result<MomentReport> {
    if corners.is_empty() {
        return Err(Error::UndersizedSample { got: 0, needed: 1 });
    }
    let exact = moment_joint(spec.n, spec.p, spec.q)?;
    let values: Vec<f64> = corners
        .iter()
        .map(|&(a, b)| pow_abs(a, 2.0 * spec.p) * pow_abs(b, 2.0 * spec.q))
        .collect();
    let est = Estimate::from_values(&values);
    let z = super::stats::moment_z(est.mean, est.std_error, exact, Z_MAX, values.len());
    Ok(MomentReport {
        n: spec.n,
        p: spec.p,
        q: spec.q,
        exact,
        estimate: est.mean,
        std_error: est.std_error,
        z_score: z.statistic,
        pass: z.pass,
        in_derivation_range: spec.joint_in_derivation_range(),
    })
}

fn pow_abs(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.abs().powf(e)
    }
}

/// Monte Carlo check of ⟨|X_{N,N}|^{2p}⟩ over Haar SO(N).
pub fn estimate_single_moment(seed: u64, lanes: usize, n: usize, p: f64, samples: usize) -> Result<MomentReport> {
    let spec = MomentSpec::new(n, p, 0.0)?;
    moment_report(spec, &diagonal_corner_samples(seed, 0, lanes, n, samples))
}

/// Monte Carlo check of ⟨|X_{N,N}|^{2p}|X_{N−1,N−1}|^{2q}⟩ over Haar SO(N).
pub fn estimate_joint_moment(seed: u64, lanes: usize, n: usize, p: f64, q: f64, samples: usize) -> Result<MomentReport> {
    let spec = MomentSpec::new(n, p, q)?;
    moment_report(spec, &diagonal_corner_samples(seed, 0, lanes, n, samples))
}

/// Haar average (1/K) Σ f(S_k, x) over K samples from `group`, with its
/// standard error. S_N samples are passed to `f` as permutation matrices.
pub fn reynolds_average<F>(f: F, group: GroupId, s: &mut RandomStream, samples: usize, x: &[f64]) -> Result<Estimate>
where
    F: Fn(&SquareMatrix, &[f64]) -> f64,
{
    if samples < 2 {
        return Err(Error::UndersizedSample { got: samples, needed: 2 });
    }
    let method = if matches!(group, GroupId::Sn(_)) {
        Method::Bubble
    } else {
        Method::Euler
    };
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let m = match sample(s, group, method)? {
            Sample::Matrix(m) => m,
            Sample::Permutation(p) => p.to_matrix(),
        };
        values.push(f(&m, x));
    }
    Ok(Estimate::from_values(&values))
}

/// Exact average of f(P, x) over all N! permutation matrices P, N ≤ 8.
pub fn reynolds_exact_permutations<F>(f: F, n: usize, x: &[f64]) -> Result<f64>
where
    F: Fn(&SquareMatrix, &[f64]) -> f64,
{
    if n == 0 || n > 8 {
        return Err(Error::domain(format!("exact enumeration supports 1 ≤ N ≤ 8, got {n}")));
    }
    // Heap's algorithm
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut total = f(&permutation_matrix(&perm), x);
    let mut count = 1usize;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            total += f(&permutation_matrix(&perm), x);
            count += 1;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(total / count as f64)
}

fn permutation_matrix(images: &[usize]) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(images.len(), Kind::Real);
    for (c, &r) in images.iter().enumerate() {
        m.set(r, c, ONE);
    }
    m
}

/// (Sx)₁ for a real matrix S, the building block of the tests below.
pub fn first_coordinate(m: &SquareMatrix, x: &[f64]) -> f64 {
    m.row(0).iter().zip(x).map(|(a, b)| a.re * b).sum()
}
