//! Eigenvalue-only models of Haar SO(N): the single coset factor E_{N−1}
//! (lower Hessenberg), the five-diagonal CMV product, their α/ρ
//! coefficient description and characteristic-polynomial recurrence, and
//! the trace series whose limits are standard normal and Poisson(1).

use crate::error::{Error, Result};
use crate::linalg::{eigenphases, EigenPhaseList, SquareMatrix, C64, ONE};
use crate::rng::RandomStream;

/// Coefficients c_i = cos θ_{i,N}, i = 1..N−1, of the coset factor E_{N−1}.
///
/// Derived quantities: α_{i−1} = (−1)^{i−1} c_i, ρ_i = (1 − α_i²)^{1/2},
/// with boundary values α_{−1} = −1 and α_{N−1} = (−1)^{N−1}.
#[derive(Debug, Clone, PartialEq)]
pub struct HessenbergCoeffs {
    n: usize,
    c: Vec<f64>,
}

impl HessenbergCoeffs {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if let Some(bad) = c.iter().find(|x| !(x.abs() <= 1.0)) {
            return Err(Error::domain(format!("coefficient {bad} outside [−1, 1]")));
        }
        Ok(HessenbergCoeffs { n: c.len() + 1, c })
    }

    /// Draws c_i as cos θ_{i,N} with the Haar angle law for first index i.
    pub fn sample(s: &mut RandomStream, n: usize) -> Self {
        assert!(n >= 1);
        HessenbergCoeffs {
            n,
            c: (1..n).map(|i| s.cos_theta_so(i)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// α_k for −1 ≤ k ≤ N−1.
    pub fn alpha(&self, k: isize) -> f64 {
        let n = self.n as isize;
        assert!((-1..n).contains(&k), "α index {k} out of range");
        if k == -1 {
            -1.0
        } else if k == n - 1 {
            if (n - 1) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        } else {
            let c = self.c[k as usize];
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        }
    }

    /// ρ_k = (1 − α_k²)^{1/2} for −1 ≤ k ≤ N−1.
    pub fn rho(&self, k: isize) -> f64 {
        let a = self.alpha(k);
        (1.0 - a * a).max(0.0).sqrt()
    }

    fn sin_cos(&self, i: usize) -> (f64, f64) {
        let c = self.c[i - 1];
        ((1.0 - c * c).max(0.0).sqrt(), c)
    }
}

/// Product R_{order[0]} R_{order[1]} ⋯ with R_i = R_i(θ_{i,N}), cos θ = c_i, θ ∈ [0, π].
pub fn ordered_rotation_product(c: &HessenbergCoeffs, order: &[usize]) -> Result<SquareMatrix> {
    let n = c.n;
    let mut m = SquareMatrix::identity(n);
    for &i in order {
        if i == 0 || i >= n {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        let (s, cs) = c.sin_cos(i);
        m.right_rotate(i - 1, cs, s);
    }
    Ok(m)
}

/// E_{N−1} = R_{N−1} ⋯ R₁ built from coefficients.
pub fn rotation_product(c: &HessenbergCoeffs) -> SquareMatrix {
    let order: Vec<usize> = (1..c.n).rev().collect();
    ordered_rotation_product(c, &order).expect("indices in range")
}

/// A Haar-distributed coset factor E_{N−1}: lower Hessenberg, with the
/// eigenvalue distribution of Haar SO(N).
pub fn hessenberg_e(s: &mut RandomStream, n: usize) -> SquareMatrix {
    rotation_product(&HessenbergCoeffs::sample(s, n))
}

/// Closed-form entries of E_{N−1} together with the rotation product.
#[derive(Debug, Clone)]
pub struct HessenbergEntries {
    /// The rotation product, which is authoritative.
    pub matrix: SquareMatrix,
    pub closed_form: SquareMatrix,
    /// Max entrywise difference between the two.
    pub discrepancy: f64,
}

/// E_{N−1} from the α/ρ formulas (1-based indices):
///
/// * diagonal (i, i): −α_{i−2} α_{i−1};
/// * superdiagonal (i, i+1): ρ_{i−1};
/// * below the diagonal (i > j): −α_{j−2} α_{i−1} ∏_{l=j−1}^{i−2} ρ_l.
///
/// The product in the last line runs over ρ_{j−1}, …, ρ_{i−2}; with that
/// range the formulas agree with the rotation product for every N.
pub fn hessenberg_entries(c: &HessenbergCoeffs) -> HessenbergEntries {
    let n = c.n;
    let mut closed = SquareMatrix::identity(n);
    for i in 1..=n {
        for j in 1..=n {
            let (ii, jj) = (i as isize, j as isize);
            let v = if i == j {
                -c.alpha(ii - 2) * c.alpha(ii - 1)
            } else if j == i + 1 {
                c.rho(ii - 1)
            } else if i > j {
                let prod: f64 = (jj - 1..=ii - 2).map(|l| c.rho(l)).product();
                -c.alpha(jj - 2) * c.alpha(ii - 1) * prod
            } else {
                0.0
            };
            closed.set(i - 1, j - 1, C64::new(v, 0.0));
        }
    }
    let matrix = rotation_product(c);
    let discrepancy = matrix.max_abs_diff(&closed).expect("same dimension");
    HessenbergEntries {
        matrix,
        closed_form: closed,
        discrepancy,
    }
}

/// Runs the coupled recurrence
/// χ_k = λ χ_{k−1} − α_{k−1} χ̃_{k−1}, χ̃_k = χ̃_{k−1} − λ α_{k−1} χ_{k−1}
/// from χ₀ = χ̃₀ = 1 and returns all pairs (χ_k, χ̃_k), k = 0..N.
pub fn charpoly_sequence(c: &HessenbergCoeffs, lambda: C64) -> Vec<(C64, C64)> {
    let mut out = Vec::with_capacity(c.n + 1);
    let (mut chi, mut tilde) = (ONE, ONE);
    out.push((chi, tilde));
    for k in 1..=c.n {
        let a = c.alpha(k as isize - 1);
        let next = lambda * chi - tilde * a;
        tilde = tilde - lambda * chi * a;
        chi = next;
        out.push((chi, tilde));
    }
    out
}

/// χ_N(λ) = det(λI − E_{N−1}) by the coefficient recurrence.
pub fn charpoly_recurrence(c: &HessenbergCoeffs, lambda: C64) -> C64 {
    charpoly_sequence(c, lambda).last().expect("nonempty").0
}

/// R_odd R_even with R_odd = R₁R₃⋯ and R_even = R₂R₄⋯ built from coefficients.
pub fn cmv_from_coeffs(c: &HessenbergCoeffs) -> SquareMatrix {
    let odd = (1..c.n).step_by(2);
    let even = (2..c.n).step_by(2);
    let order: Vec<usize> = odd.chain(even).collect();
    ordered_rotation_product(c, &order).expect("indices in range")
}

/// A five-diagonal matrix with the eigenvalue distribution of Haar SO(N).
pub fn cmv_matrix(s: &mut RandomStream, n: usize) -> SquareMatrix {
    cmv_from_coeffs(&HessenbergCoeffs::sample(s, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceForm {
    /// Y₁Y₂ + ⋯ + Y_{n−1}Y_n + Y_n, distributed as tr of Haar SO(n).
    Finite,
    /// Y₁Y₂ + ⋯ + Y_{n−1}Y_n, a truncation of the infinite series.
    Series,
}

/// Y_i = Z_i / (Z₁² + ⋯ + Z_i²)^{1/2} summed as Σ Y_i Y_{i+1}, plus Y_n in the finite form.
pub fn trace_series_so(s: &mut RandomStream, terms: usize, form: TraceForm) -> Result<f64> {
    if terms < 2 {
        return Err(Error::domain("trace series needs at least 2 terms"));
    }
    let mut sum_sq = 0.0;
    let mut prev = 0.0;
    let mut total = 0.0;
    for i in 1..=terms {
        let y = loop {
            let z = s.gaussian();
            if i > 1 || z != 0.0 {
                sum_sq += z * z;
                break z / sum_sq.sqrt();
            }
        };
        if i > 1 {
            total += prev * y;
        }
        prev = y;
    }
    if form == TraceForm::Finite {
        total += prev;
    }
    Ok(total)
}

/// Y_i = 1 with probability 1/i, else 0; returns Σ Y_i Y_{i+1} for i < terms.
pub fn trace_series_perm(s: &mut RandomStream, terms: usize) -> Result<u64> {
    if terms < 2 {
        return Err(Error::domain("trace series needs at least 2 terms"));
    }
    let mut prev = true;
    let mut total = 0;
    for i in 2..=terms {
        let y = s.bernoulli(1.0 / i as f64);
        if prev && y {
            total += 1;
        }
        prev = y;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralModel {
    Full,
    Hessenberg,
    Cmv,
}

/// Eigenphases of one Haar SO(N) draw from the chosen model.
pub fn sample_spectrum(s: &mut RandomStream, n: usize, model: SpectralModel) -> Result<EigenPhaseList> {
    let m = match model {
        SpectralModel::Full => crate::samplers::haar_so_euler(s, n),
        SpectralModel::Hessenberg => hessenberg_e(s, n),
        SpectralModel::Cmv => cmv_matrix(s, n),
    };
    eigenphases(&m)
}

/// Drops the eigenvalue +1 that every odd-dimensional SO(N) element has,
/// leaving the N−1 phases that carry distributional information.
pub fn exclude_forced_one(phases: &EigenPhaseList) -> Vec<f64> {
    let mut v = phases.phases().to_vec();
    if v.len() % 2 == 1 {
        let dist = |t: f64| t.min(std::f64::consts::TAU - t);
        let (idx, _) = v
            .iter()
            .enumerate()
            .min_by(|a, b| dist(*a.1).total_cmp(&dist(*b.1)))
            .expect("nonempty");
        v.remove(idx);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::stats::{chi_square, ks_test, ks_two_sample, poisson_one_bins};
    use crate::linalg::{adjoint_residual, charpoly_eval};

    fn uniform_coeffs(s: &mut RandomStream, n: usize) -> HessenbergCoeffs {
        HessenbergCoeffs::new((1..n).map(|_| s.uniform(-1.0, 1.0).unwrap()).collect()).unwrap()
    }

    #[test]
    fn coefficient_identities() {
        let mut s = RandomStream::new(1, 0);
        let c = uniform_coeffs(&mut s, 7);
        for k in -1..7isize {
            assert!(c.alpha(k).abs() <= 1.0);
            assert!(c.rho(k) >= 0.0);
        }
        for k in 0..=5isize {
            assert!((c.rho(k).powi(2) + c.alpha(k).powi(2) - 1.0).abs() < 1e-15);
        }
        assert_eq!(c.alpha(-1), -1.0);
        assert_eq!(c.alpha(6), 1.0);
        assert!(HessenbergCoeffs::new(vec![0.5, 1.5]).is_err());
    }

    #[test]
    fn hessenberg_structure() {
        let mut s = RandomStream::new(2, 0);
        for n in 2..=9 {
            let e = hessenberg_e(&mut s, n);
            for i in 0..n {
                for j in i + 2..n {
                    assert!(e.get(i, j).norm() <= 1e-15);
                }
            }
            assert!(adjoint_residual(&e) <= 1e-13 * n as f64);
        }
        let c = HessenbergCoeffs::new(vec![0.3]).unwrap();
        let e = rotation_product(&c);
        assert!((e.trace().re - 0.6).abs() < 1e-15);
    }

    #[test]
    fn closed_form_entries() {
        let theta: f64 = 1.2;
        let c = HessenbergCoeffs::new(vec![theta.cos()]).unwrap();
        let h = hessenberg_entries(&c);
        assert!((h.closed_form.get(0, 0).re - theta.cos()).abs() < 1e-15);
        assert!((h.closed_form.get(1, 1).re - theta.cos()).abs() < 1e-15);
        assert!((h.closed_form.get(0, 1).re - theta.sin()).abs() < 1e-15);
        assert!(h.discrepancy <= 1e-15);

        let c = HessenbergCoeffs::new(vec![1.0; 4]).unwrap();
        let h = hessenberg_entries(&c);
        assert!(h.discrepancy <= 1e-15);
        for k in 0..4isize {
            assert_eq!(c.rho(k), 0.0);
        }

        let mut s = RandomStream::new(3, 0);
        for n in 2..=6 {
            for _ in 0..50 {
                let c = uniform_coeffs(&mut s, n);
                assert!(hessenberg_entries(&c).discrepancy <= 1e-13);
            }
        }
    }

    #[test]
    fn recurrence_matches_determinant() {
        let c = HessenbergCoeffs::new(vec![0.4]).unwrap();
        let seq = charpoly_sequence(&c, C64::new(0.7, 0.2));
        assert!((seq[1].0 - (C64::new(0.7, 0.2) - 0.4)).norm() < 1e-15);

        let mut s = RandomStream::new(4, 0);
        for n in 2..=10 {
            for _ in 0..20 {
                let c = uniform_coeffs(&mut s, n);
                let e = rotation_product(&c);
                let zero = charpoly_recurrence(&c, C64::new(0.0, 0.0));
                assert!((zero - charpoly_eval(&e, C64::new(0.0, 0.0))).norm() < 1e-12);
                for _ in 0..20 {
                    let lam = C64::new(s.uniform(-2.0, 2.0).unwrap(), s.uniform(-2.0, 2.0).unwrap());
                    let a = charpoly_recurrence(&c, lam);
                    let b = charpoly_eval(&e, lam);
                    assert!((a - b).norm() <= 1e-10 * (1.0 + lam.norm()).powi(n as i32));
                }
            }
        }
    }

    #[test]
    fn reversed_polynomial_identity() {
        let mut s = RandomStream::new(5, 0);
        let c = uniform_coeffs(&mut s, 8);
        for _ in 0..20 {
            let lam = C64::new(s.uniform(-2.0, 2.0).unwrap(), s.uniform(-2.0, 2.0).unwrap());
            let fwd = charpoly_sequence(&c, lam);
            let inv = charpoly_sequence(&c, ONE / lam);
            for (k, ((_, tilde), (chi_inv, _))) in fwd.iter().zip(&inv).enumerate() {
                let want = lam.powu(k as u32) * chi_inv;
                assert!((tilde - want).norm() <= 1e-9 * want.norm().max(1.0));
            }
        }
    }

    #[test]
    fn cmv_structure() {
        let mut s = RandomStream::new(6, 0);
        for n in 2..=9 {
            let m = cmv_matrix(&mut s, n);
            for i in 0..n {
                for j in 0..n {
                    if i.abs_diff(j) > 2 {
                        assert!(m.get(i, j).norm() <= 1e-15);
                    }
                }
            }
            assert!(adjoint_residual(&m) <= 1e-13 * n as f64);
        }
        // N = 3: R₁R₂ explicitly
        let c = HessenbergCoeffs::new(vec![0.2, -0.5]).unwrap();
        let m = cmv_from_coeffs(&c);
        let (s1, c1) = ((1.0f64 - 0.04).sqrt(), 0.2);
        let (s2, c2) = ((1.0f64 - 0.25).sqrt(), -0.5);
        let want = SquareMatrix::from_rows_real(&[
            &[c1, s1 * c2, s1 * s2],
            &[-s1, c1 * c2, c1 * s2],
            &[0.0, -s2, c2],
        ])
        .unwrap();
        assert!(m.max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn orderings_share_spectrum_law() {
        let n = 6;
        let orders: [Vec<usize>; 3] = [vec![5, 4, 3, 2, 1], vec![1, 2, 3, 4, 5], vec![1, 3, 5, 2, 4]];
        let samples: Vec<Vec<f64>> = orders
            .iter()
            .enumerate()
            .map(|(k, order)| {
                let mut s = RandomStream::new(7, k as u64);
                (0..10_000)
                    .map(|_| {
                        let c = HessenbergCoeffs::sample(&mut s, n);
                        let m = ordered_rotation_product(&c, order).unwrap();
                        eigenphases(&m).unwrap().phases()[0]
                    })
                    .collect()
            })
            .collect();
        for a in 0..3 {
            for b in a + 1..3 {
                assert!(ks_two_sample(&samples[a], &samples[b], 0.001).unwrap().pass);
            }
        }
    }

    #[test]
    fn trace_series_cases() {
        let mut s = RandomStream::new(8, 0);
        assert!(trace_series_so(&mut s, 1, TraceForm::Series).is_err());
        assert!(trace_series_perm(&mut s, 1).is_err());

        let a: Vec<f64> = (0..10_000)
            .map(|_| trace_series_so(&mut s, 20, TraceForm::Finite).unwrap())
            .collect();
        let b: Vec<f64> = (0..10_000).map(|_| hessenberg_e(&mut s, 20).trace().re).collect();
        assert!(ks_two_sample(&a, &b, 0.001).unwrap().pass);

        let z: Vec<f64> = (0..20_000)
            .map(|_| trace_series_so(&mut s, 200, TraceForm::Series).unwrap())
            .collect();
        let normal = statrs::distribution::Normal::standard();
        use statrs::distribution::ContinuousCDF;
        assert!(ks_test(&z, |x| normal.cdf(x), 0.001).unwrap().pass);
    }

    #[test]
    fn perm_series_is_poisson() {
        let mut s = RandomStream::new(9, 0);
        let total = 20_000;
        let mut counts = vec![0u64; 6];
        for _ in 0..total {
            counts[(trace_series_perm(&mut s, 500).unwrap() as usize).min(5)] += 1;
        }
        let expected = poisson_one_bins(6, total as f64);
        assert!(chi_square(&counts, &expected, 0.001).unwrap().pass);
    }

    #[test]
    fn forced_eigenvalue_is_removed_for_odd_dimension() {
        let mut s = RandomStream::new(10, 0);
        let e = sample_spectrum(&mut s, 5, SpectralModel::Hessenberg).unwrap();
        let kept = exclude_forced_one(&e);
        assert_eq!(kept.len(), 4);
        let e = sample_spectrum(&mut s, 4, SpectralModel::Cmv).unwrap();
        assert_eq!(exclude_forced_one(&e).len(), 4);
    }
}
