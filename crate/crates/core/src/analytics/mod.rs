//! Closed-form quantities for the classical groups (entry moments, volumes,
//! sphere areas, circular-ensemble normalizations), together with the
//! quadrature, Monte Carlo and hypothesis-test tools used to check samplers
//! against them.

pub mod montecarlo;
pub mod quad;
pub mod stats;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub use montecarlo::{
    estimate_joint_moment, estimate_single_moment, reynolds_average, reynolds_exact_permutations,
    Estimate, MomentReport,
};
pub use stats::{chi_square, ks_test, ks_two_sample, TestMethod, TestReport};

/// Exponents of an entry-moment query ⟨|R_{N,N}|^{2p} |R_{N−1,N−1}|^{2q}⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSpec {
    pub n: usize,
    pub p: f64,
    pub q: f64,
}

impl MomentSpec {
    pub fn new(n: usize, p: f64, q: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("moments need N ≥ 2, got {n}")));
        }
        if !(p >= 0.0 && p.is_finite() && q >= 0.0 && q.is_finite()) {
            return Err(Error::domain(format!("exponents must be finite and nonnegative, got p={p}, q={q}")));
        }
        Ok(MomentSpec { n, p, q })
    }

    /// The joint formula is derived from four distinct Euler angles, which
    /// exist only for N ≥ 4. Smaller N evaluate the same expression.
    pub fn joint_in_derivation_range(&self) -> bool {
        self.q == 0.0 || self.n >= 4
    }
}

/// ln Γ(x). Integer and half-integer arguments up to 40 use the
/// recursion from Γ(1) = 1 or Γ(½) = √π, which is accurate to a few ulps
/// where the general routine is not.
fn lg(x: f64) -> f64 {
    let twice = 2.0 * x;
    if x > 0.0 && x <= 40.0 && twice == twice.round() {
        let (mut g, mut t) = if (twice as u64).is_multiple_of(2) { (1.0, 1.0) } else { (std::f64::consts::PI.sqrt(), 0.5) };
        while t < x {
            g *= t;
            t += 1.0;
        }
        return g.ln();
    }
    ln_gamma(x)
}

/// ⟨|R_{N,N}|^{2p}⟩ over Haar SO(N) = Γ(p+½)Γ(N/2) / (Γ(½)Γ(p+N/2)).
pub fn moment_single(n: usize, p: f64) -> Result<f64> {
    let spec = MomentSpec::new(n, p, 0.0)?;
    Ok(log_single(spec).exp())
}

fn log_single(spec: MomentSpec) -> f64 {
    let h = spec.n as f64 / 2.0;
    let a = lg(spec.p + 0.5) - lg(0.5);
    let d = lg(h) - lg(h + spec.p);
    a + d
}

/// ⟨|R_{N,N}|^{2p} |R_{N−1,N−1}|^{2q}⟩ over Haar SO(N):
///
/// Γ(p+½)Γ(q+½)Γ((N−1)/2+p+q)Γ(N/2)Γ((N−1)/2)
/// / (Γ(½)² Γ((N−1)/2+p) Γ((N−1)/2+q) Γ(N/2+p+q)).
///
/// Evaluated as a sum of log-gamma differences arranged so that q = 0
/// reproduces [`moment_single`] bit for bit.
pub fn moment_joint(n: usize, p: f64, q: f64) -> Result<f64> {
    let spec = MomentSpec::new(n, p, q)?;
    let h = n as f64 / 2.0;
    let g = (n as f64 - 1.0) / 2.0;
    let a = lg(p + 0.5) - lg(0.5);
    let b = lg(q + 0.5) - lg(0.5);
    let c = lg(g + p + q) - lg(g + p);
    let d = lg(h) - lg(h + p + q);
    let e = lg(g) - lg(g + q);
    debug_assert!(spec.q != 0.0 || (b == 0.0 && c == 0.0 && e == 0.0));
    Ok((a + b + c + d + e).exp())
}

/// T(α, β) = ∫₀^π |sin θ|^α |cos θ|^β dθ = Γ((α+1)/2)Γ((β+1)/2)/Γ((α+β)/2+1).
pub fn beta_integral_t(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::domain(format!("T(α, β) needs α, β > −1, got ({alpha}, {beta})")));
    }
    Ok((lg((alpha + 1.0) / 2.0) + lg((beta + 1.0) / 2.0) - lg((alpha + beta) / 2.0 + 1.0)).exp())
}

/// Groups and quotients with closed-form volumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeTag {
    SO(usize),
    O(usize),
    /// O(N)/O(1)^N
    OModSigns(usize),
    U(usize),
    /// U(N)/U(1)^N
    UModPhases(usize),
    /// U(N)/O(N)
    UModO(usize),
}

impl VolumeTag {
    fn n(&self) -> usize {
        match *self {
            VolumeTag::SO(n)
            | VolumeTag::O(n)
            | VolumeTag::OModSigns(n)
            | VolumeTag::U(n)
            | VolumeTag::UModPhases(n)
            | VolumeTag::UModO(n) => n,
        }
    }
}

fn ln_half_integer_product(n: usize) -> f64 {
    // Σ_{k=1}^N [ (k/2) ln π − ln Γ(k/2) ]
    (1..=n)
        .map(|k| k as f64 / 2.0 * std::f64::consts::PI.ln() - lg(k as f64 / 2.0))
        .sum()
}

/// ln vol for each supported tag.
pub fn ln_volume(tag: VolumeTag) -> Result<f64> {
    let n = tag.n();
    if n == 0 {
        return Err(Error::domain("volume needs N ≥ 1"));
    }
    let nf = n as f64;
    let ln2 = std::f64::consts::LN_2;
    let ln_so = -ln2 + nf * (nf + 3.0) / 4.0 * ln2 + ln_half_integer_product(n);
    let ln_u = nf * (nf + 1.0) / 2.0 * ln2
        + (1..=n)
            .map(|k| k as f64 * std::f64::consts::PI.ln() - lg(k as f64))
            .sum::<f64>();
    Ok(match tag {
        VolumeTag::SO(_) => ln_so,
        VolumeTag::O(_) => ln_so + ln2,
        VolumeTag::OModSigns(_) => ln_so + ln2 - nf * ln2,
        VolumeTag::U(_) => ln_u,
        VolumeTag::UModPhases(_) => ln_u - nf * std::f64::consts::TAU.ln(),
        VolumeTag::UModO(_) => nf * (nf + 1.0) / 2.0 * ln2 + ln_u - (ln_so + ln2),
    })
}

/// Volume with respect to the metric in which Euler-angle densities carry
/// the powers of 2 shown in `euler::density_*`.
///
/// vol(SO(N)) = ½ 2^{N(N+3)/4} ∏_{k=1}^N π^{k/2}/Γ(k/2); O(N) doubles it and
/// O(N)/O(1)^N divides that by 2^N. vol(U(N)) = 2^{N(N+1)/2} ∏ π^k/Γ(k) and
/// U(N)/U(1)^N divides by (2π)^N. vol(U(N)/O(N)) is the ratio
/// 2^{N(N+1)/2} vol(U(N))/vol(O(N)); see [`volume_u_mod_o_product_form`].
pub fn volume(tag: VolumeTag) -> Result<f64> {
    ln_volume(tag).map(f64::exp)
}

/// The product 2^{3N/4} ∏_{l=1}^N π^{(l+1)/2}/Γ((l+1)/2). It equals the
/// ratio form of vol(U(N)/O(N)) times 2^{−N²/4}, so the two are not
/// interchangeable; the ratio form is the one consistent with the COE
/// normalization.
pub fn volume_u_mod_o_product_form(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("volume needs N ≥ 1"));
    }
    let nf = n as f64;
    let s: f64 = (1..=n)
        .map(|l| (l as f64 + 1.0) / 2.0 * std::f64::consts::PI.ln() - lg((l as f64 + 1.0) / 2.0))
        .sum();
    Ok((0.75 * nf * std::f64::consts::LN_2 + s).exp())
}

/// Surface area A_{n−1}(R) = R^{n−1} 2π^{n/2}/Γ(n/2) of the radius-R sphere in ℝⁿ.
pub fn sphere_area(n: usize, radius: f64) -> Result<f64> {
    if n == 0 || !(radius > 0.0) {
        return Err(Error::domain(format!("sphere_area needs n ≥ 1 and R > 0, got ({n}, {radius})")));
    }
    let nf = n as f64;
    Ok(((nf - 1.0) * radius.ln() + std::f64::consts::LN_2 + nf / 2.0 * std::f64::consts::PI.ln() - lg(nf / 2.0)).exp())
}

/// vol(SO(N))/vol(SO(N−1)), which should equal A_{N−1}(√2).
pub fn so_volume_ratio(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("ratio needs N ≥ 2"));
    }
    Ok((ln_volume(VolumeTag::SO(n))? - ln_volume(VolumeTag::SO(n - 1))?).exp())
}

/// vol(U(N))/vol(U(N−1)), which should equal A_{2N−1}(√2)/√2.
pub fn u_volume_ratio(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("ratio needs N ≥ 2"));
    }
    Ok((ln_volume(VolumeTag::U(n))? - ln_volume(VolumeTag::U(n - 1))?).exp())
}

fn ln_factorial(n: usize) -> f64 {
    lg(n as f64 + 1.0)
}

/// C_N = Γ(N/2+1)/Γ(3/2)^N. This is the eigenvalue integral
/// ∫ ∏_{j<k} |e^{iθ_k} − e^{iθ_j}| dθ over [0, 2π)^N divided by (2π)^N.
pub fn coe_normalization(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("normalization needs N ≥ 1"));
    }
    Ok((lg(n as f64 / 2.0 + 1.0) - n as f64 * lg(1.5)).exp())
}

/// The raw COE eigenvalue integral, (2π)^N C_N.
pub fn coe_normalization_raw(n: usize) -> Result<f64> {
    Ok(coe_normalization(n)? * std::f64::consts::TAU.powi(n as i32))
}

/// C_N from the volumes: N!·vol(U(N)/O(N))/vol(O(N)/O(1)^N)·(2π)^{−N}.
pub fn coe_normalization_from_volumes(n: usize) -> Result<f64> {
    let ln = ln_factorial(n) + ln_volume(VolumeTag::UModO(n))? - ln_volume(VolumeTag::OModSigns(n))?
        - n as f64 * std::f64::consts::TAU.ln();
    Ok(ln.exp())
}

/// C̃_N = (2π)^N N!, the raw integral ∫ ∏_{j<k} |e^{iθ_k} − e^{iθ_j}|² dθ.
pub fn cue_normalization(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("normalization needs N ≥ 1"));
    }
    Ok((n as f64 * std::f64::consts::TAU.ln() + ln_factorial(n)).exp())
}

#[cfg(test)]
mod tests {
    use super::quad::{integrate, integrate_2d};
    use super::*;
    use std::f64::consts::{PI, SQRT_2, TAU};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn single_moment_cases() {
        for n in 2..10 {
            assert_eq!(moment_single(n, 0.0).unwrap(), 1.0);
        }
        assert!(rel(moment_single(2, 1.0).unwrap(), 0.5) < 1e-14);
        assert!(rel(moment_single(3, 2.0).unwrap(), 0.2) < 1e-14);
        assert!(rel(moment_single(5, 1.0).unwrap(), 0.2) < 1e-14);
        assert!(moment_single(1, 1.0).is_err());
        assert!(moment_single(3, -1.0).is_err());
        // quadrature of the defining integral at N = 3, p = 2
        let num = integrate(|t: f64| t.cos().powi(4) * t.sin(), 0.0, PI, 1e-14);
        let den = integrate(|t: f64| t.sin(), 0.0, PI, 1e-14);
        assert!((num / den - 0.2).abs() < 1e-12);
    }

    #[test]
    fn joint_moment_cases() {
        assert!(rel(moment_joint(3, 1.0, 1.0).unwrap(), 2.0 / 15.0) < 1e-14);
        for n in 2..=10 {
            for p in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
                let a = moment_joint(n, p, 0.0).unwrap();
                let b = moment_single(n, p).unwrap();
                assert!(((a - b) / b).abs() <= 1e-14);
                for q in [0.5, 1.0, 2.0] {
                    assert!(rel(moment_joint(n, p, q).unwrap(), moment_joint(n, q, p).unwrap()) < 1e-14);
                }
            }
        }
        assert!(!MomentSpec::new(3, 1.0, 1.0).unwrap().joint_in_derivation_range());
        assert!(MomentSpec::new(4, 1.0, 1.0).unwrap().joint_in_derivation_range());
    }

    #[test]
    fn joint_moment_matches_weingarten_for_o_n() {
        // ⟨O₁₁² O₂₂²⟩ = (N+1)/((N−1)N(N+2)) over O(N)
        for n in 3..=8 {
            let nf = n as f64;
            let w = (nf + 1.0) / ((nf - 1.0) * nf * (nf + 2.0));
            assert!(rel(moment_joint(n, 1.0, 1.0).unwrap(), w) < 1e-13);
        }
    }

    #[test]
    fn beta_integral_cases() {
        assert!((beta_integral_t(0.0, 0.0).unwrap() - PI).abs() < 1e-14);
        assert!((beta_integral_t(1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(beta_integral_t(-1.0, 0.0).is_err());
        let mut s = crate::rng::RandomStream::new(1, 0);
        for _ in 0..20 {
            let a = s.uniform(0.0, 4.0).unwrap();
            let b = s.uniform(0.0, 4.0).unwrap();
            let q = integrate(|t: f64| t.sin().abs().powf(a) * t.cos().abs().powf(b), 0.0, PI / 2.0, 1e-13)
                + integrate(|t: f64| t.sin().abs().powf(a) * t.cos().abs().powf(b), PI / 2.0, PI, 1e-13);
            assert!(rel(q, beta_integral_t(a, b).unwrap()) < 1e-8, "({a}, {b})");
        }
    }

    #[test]
    fn volume_values() {
        assert!(rel(volume(VolumeTag::U(1)).unwrap(), TAU) < 1e-14);
        assert!(rel(volume(VolumeTag::SO(2)).unwrap(), 2f64.powf(1.5) * PI) < 1e-14);
        assert!(rel(volume(VolumeTag::SO(3)).unwrap(), 2f64.powf(4.5) * PI * PI) < 1e-14);
        assert!(rel(volume(VolumeTag::U(2)).unwrap(), 8.0 * PI.powi(3)) < 1e-14);
    }

    #[test]
    fn volume_relations() {
        for n in 1..=20 {
            let so = volume(VolumeTag::SO(n)).unwrap();
            let o = volume(VolumeTag::O(n)).unwrap();
            assert!(rel(o, 2.0 * so) < 1e-12);
            assert!(rel(volume(VolumeTag::OModSigns(n)).unwrap(), o * 2f64.powi(-(n as i32))) < 1e-12);
            let ratio = 2f64.powf((n * (n + 1)) as f64 / 2.0) * volume(VolumeTag::U(n)).unwrap() / o;
            assert!(rel(volume(VolumeTag::UModO(n)).unwrap(), ratio) < 1e-12);
            let prod = volume_u_mod_o_product_form(n).unwrap();
            assert!(rel(prod, ratio * 2f64.powf(-((n * n) as f64) / 4.0)) < 1e-12);
            assert!(rel(
                volume(VolumeTag::UModPhases(n)).unwrap(),
                volume(VolumeTag::U(n)).unwrap() / TAU.powi(n as i32)
            ) < 1e-12);
        }
    }

    #[test]
    fn sphere_areas_and_ratios() {
        assert!(rel(sphere_area(2, 1.0).unwrap(), TAU) < 1e-14);
        assert!(rel(sphere_area(3, 1.0).unwrap(), 4.0 * PI) < 1e-14);
        for n in 2..=20 {
            assert!(rel(so_volume_ratio(n).unwrap(), sphere_area(n, SQRT_2).unwrap()) < 1e-12);
            assert!(rel(u_volume_ratio(n).unwrap(), sphere_area(2 * n, SQRT_2).unwrap() / SQRT_2) < 1e-12);
        }
        assert!(sphere_area(0, 1.0).is_err());
        assert!(sphere_area(2, 0.0).is_err());
    }

    #[test]
    fn circular_normalizations() {
        assert!(rel(cue_normalization(2).unwrap(), 8.0 * PI * PI) < 1e-14);
        assert!(rel(coe_normalization(2).unwrap(), 4.0 / PI) < 1e-14);
        assert!(rel(cue_normalization(1).unwrap(), TAU) < 1e-14);
        assert!(rel(coe_normalization(1).unwrap(), 1.0) < 1e-14);
        for n in 1..=12 {
            assert!(rel(coe_normalization_from_volumes(n).unwrap(), coe_normalization(n).unwrap()) < 1e-12);
        }
        let raw1 = integrate_2d(|a, b| 2.0 * ((a - b) / 2.0).sin().abs(), (0.0, TAU), (0.0, TAU), 1e-10);
        assert!(rel(raw1, 16.0 * PI) < 1e-8);
        assert!(rel(raw1, coe_normalization_raw(2).unwrap()) < 1e-8);
        let raw2 = integrate_2d(|a, b| 4.0 * ((a - b) / 2.0).sin().powi(2), (0.0, TAU), (0.0, TAU), 1e-10);
        assert!(rel(raw2, cue_normalization(2).unwrap()) < 1e-8);
    }

    #[test]
    fn three_dimensional_coe_integral() {
        // C₃ by direct quadrature: fix θ₁ = 0 by rotation invariance
        let f = |p: &[f64]| {
            let d = |a: f64, b: f64| 2.0 * ((a - b) / 2.0).sin().abs();
            d(0.0, p[0]) * d(0.0, p[1]) * d(p[0], p[1])
        };
        // split at the kinks |θ₂ − θ₃| = 0 by integrating over the two triangles
        let tri = |lower: bool| {
            integrate(
                |x| {
                    let (a, b) = if lower { (0.0, x) } else { (x, TAU) };
                    integrate(|y| f(&[x, y]), a, b, 1e-11)
                },
                0.0,
                TAU,
                1e-10,
            )
        };
        let raw = TAU * (tri(true) + tri(false));
        assert!(rel(raw / TAU.powi(3), coe_normalization(3).unwrap()) < 1e-8);
    }
}
