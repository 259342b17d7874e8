//! Seeded, stream-addressable randomness.
//!
//! Each `RandomStream` wraps a ChaCha8 generator keyed by `seed` with the
//! ChaCha stream counter set to `stream_id`. Sibling streams with distinct
//! ids draw from disjoint keystreams, so batches can run in parallel and
//! still reproduce bit-exactly.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream {
            seed,
            stream_id,
            rng,
            spare: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on [0, 1) with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval (0, 1).
    pub fn open_unit(&mut self) -> f64 {
        loop {
            let u = self.unit();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Uniform on [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!("uniform needs lo < hi, got [{lo}, {hi})")));
        }
        let x = lo + (hi - lo) * self.unit();
        // rounding can land exactly on hi for wide intervals
        Ok(if x < hi { x } else { lo })
    }

    /// Uniform angle on [0, 2π).
    pub fn angle(&mut self) -> f64 {
        let t = TAU * self.unit();
        if t < TAU {
            t
        } else {
            0.0
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Index uniform in 0..n.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.unit() * n as f64) as usize).min(n - 1)
    }

    /// Standard normal variate by the Marsaglia polar method. Each accepted
    /// pair yields two variates; the second is cached for the next call.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(g) = self.spare.take() {
            return g;
        }
        loop {
            let u = 2.0 * self.unit() - 1.0;
            let v = 2.0 * self.unit() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    /// Standard complex normal (g₁ + i g₂)/√2, so E|z|² = 1.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let re = self.gaussian();
        let im = self.gaussian();
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// cos θ for the SO(N) Euler angle with first index j: the last
    /// coordinate of a normalized Gaussian (j+1)-vector. Its density on
    /// (−1, 1) is proportional to (1 − s²)^{(j−2)/2}.
    pub fn cos_theta_so(&mut self, j: usize) -> f64 {
        assert!(j >= 1, "angle index must be positive");
        loop {
            let mut sum = 0.0;
            let mut last = 0.0;
            for _ in 0..=j {
                last = self.gaussian();
                sum += last * last;
            }
            if sum > 0.0 {
                return (last / sum.sqrt()).clamp(-1.0, 1.0);
            }
        }
    }

    /// φ ∈ [0, π/2] with density ∝ cos φ (sin φ)^{2j−1}.
    pub fn phi_unitary(&mut self, j: usize) -> f64 {
        assert!(j >= 1, "angle index must be positive");
        phi_unitary_from_uniform(self.open_unit(), j)
    }

    /// ρ ∈ [0, π/2] with density ∝ cos³ρ (sin ρ)^{4j−1}.
    ///
    /// sin²ρ ~ Beta(2j, 2), drawn as the product of independent
    /// Beta(2j, 1) and Beta(2j+1, 1) variates.
    pub fn rho_symplectic(&mut self, j: usize) -> f64 {
        assert!(j >= 1, "angle index must be positive");
        let a = self.open_unit().powf(1.0 / (2 * j) as f64);
        let b = self.open_unit().powf(1.0 / (2 * j + 1) as f64);
        (a * b).sqrt().asin().clamp(0.0, FRAC_PI_2)
    }

    /// φ ∈ [0, π/2] with density ∝ sin 2φ.
    pub fn sin2phi_quaternion(&mut self) -> f64 {
        sin2phi_from_uniform(self.unit())
    }
}

/// arcsin(ξ^{1/(2j)}): the inverse-CDF map behind [`RandomStream::phi_unitary`].
pub fn phi_unitary_from_uniform(xi: f64, j: usize) -> f64 {
    xi.clamp(0.0, 1.0).powf(1.0 / (2 * j) as f64).asin()
}

/// arcsin(√ξ): the inverse-CDF map behind [`RandomStream::sin2phi_quaternion`].
pub fn sin2phi_from_uniform(xi: f64) -> f64 {
    xi.clamp(0.0, 1.0).sqrt().asin()
}

/// Runs `count` draws split over `lanes` sibling streams
/// `first_stream, first_stream + 1, …` in parallel.
///
/// Lane i produces a contiguous chunk of the output and the chunks are
/// concatenated in lane order, so the result depends only on
/// `(seed, first_stream, lanes, count)`.
pub fn batch<T, F>(seed: u64, first_stream: u64, lanes: usize, count: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream) -> T + Sync,
{
    let lanes = lanes.max(1);
    let base = count / lanes;
    let extra = count % lanes;
    let chunks: Vec<Vec<T>> = (0..lanes)
        .into_par_iter()
        .map(|lane| {
            let mut s = RandomStream::new(seed, first_stream + lane as u64);
            let n = base + usize::from(lane < extra);
            (0..n).map(|_| draw(&mut s)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}
