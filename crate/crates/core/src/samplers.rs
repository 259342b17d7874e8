//! Haar samplers for SO(N), O(N), U(N), Sp(2N) and S_N, plus the circular
//! orthogonal and symplectic ensembles.
//!
//! Each continuous group has up to three independent constructions:
//! Euler-angle products, Gaussian QR with a positive-diagonal R, and chains
//! of Householder reflectors built from normalized Gaussian vectors.

use std::fmt;

use crate::error::{Error, Result};
use crate::euler::{
    compose_so, compose_sp, compose_u, EulerAnglesSO, EulerAnglesSp, EulerAnglesU, QuatAngles,
};
use crate::linalg::{multiply, Kind, SquareMatrix, C64, ONE, ZERO};
use crate::rng::{batch, RandomStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupId {
    SO(usize),
    O(usize),
    U(usize),
    /// Sp(2N) with quaternion dimension N; matrices are 2N×2N.
    Sp(usize),
    Sn(usize),
}

impl GroupId {
    pub fn n(&self) -> usize {
        match *self {
            GroupId::SO(n) | GroupId::O(n) | GroupId::U(n) | GroupId::Sp(n) | GroupId::Sn(n) => n,
        }
    }

    /// Side length of the matrices representing the group.
    pub fn matrix_dim(&self) -> usize {
        match *self {
            GroupId::Sp(n) => 2 * n,
            other => other.n(),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            GroupId::SO(_) => "so",
            GroupId::O(_) => "o",
            GroupId::U(_) => "u",
            GroupId::Sp(_) => "sp",
            GroupId::Sn(_) => "sn",
        }
    }

    pub fn from_tag(tag: &str, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("group dimension must be at least 1"));
        }
        Ok(match tag {
            "so" => GroupId::SO(n),
            "o" => GroupId::O(n),
            "u" => GroupId::U(n),
            "sp" => GroupId::Sp(n),
            "sn" => GroupId::Sn(n),
            other => return Err(Error::Unsupported(format!("group tag {other:?}"))),
        })
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupId::SO(n) => write!(f, "SO({n})"),
            GroupId::O(n) => write!(f, "O({n})"),
            GroupId::U(n) => write!(f, "U({n})"),
            GroupId::Sp(n) => write!(f, "Sp({})", 2 * n),
            GroupId::Sn(n) => write!(f, "S_{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Euler,
    Qr,
    Householder,
    Hessenberg,
    Cmv,
    Bubble,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Euler => "euler",
            Method::Qr => "qr",
            Method::Householder => "householder",
            Method::Hessenberg => "hessenberg",
            Method::Cmv => "cmv",
            Method::Bubble => "bubble",
        }
    }
}

/// Sampler output: a dense matrix, or a permutation for S_N.
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Matrix(SquareMatrix),
    Permutation(PermutationWord),
}

pub fn sample_so_angles(s: &mut RandomStream, n: usize) -> EulerAnglesSO {
    EulerAnglesSO::from_fn(n, |j, _| {
        if j == 1 {
            s.angle()
        } else {
            s.cos_theta_so(j).acos()
        }
    })
    .expect("sampled angles lie in range")
}

/// Haar SO(N) through independent Euler angles.
pub fn haar_so_euler(s: &mut RandomStream, n: usize) -> SquareMatrix {
    compose_so(&sample_so_angles(s, n))
}

/// Haar O(N): an SO(N) Euler sample with its first row negated on a fair coin.
pub fn haar_o_euler(s: &mut RandomStream, n: usize) -> SquareMatrix {
    let mut v = haar_so_euler(s, n);
    if s.bernoulli(0.5) {
        v.scale_row(0, -ONE);
    }
    v
}

pub fn sample_u_angles(s: &mut RandomStream, n: usize) -> EulerAnglesU {
    let mut a = EulerAnglesU::zeros(n);
    for k in 2..=n {
        for j in 1..k {
            let phi = s.phi_unitary(j);
            let psi = s.angle();
            a.set_pair(j, k, phi, psi).expect("sampled angles lie in range");
        }
    }
    for l in 1..=n {
        let alpha = s.angle();
        a.set_alpha(l, alpha).expect("sampled angles lie in range");
    }
    a
}

pub fn haar_u_euler(s: &mut RandomStream, n: usize) -> SquareMatrix {
    compose_u(&sample_u_angles(s, n))
}

fn sample_quat(s: &mut RandomStream) -> QuatAngles {
    let phi = s.sin2phi_quaternion();
    let psi = s.angle();
    let alpha = s.angle();
    QuatAngles::new(phi, psi, alpha).expect("sampled angles lie in range")
}

pub fn sample_sp_angles(s: &mut RandomStream, n: usize) -> EulerAnglesSp {
    let mut a = EulerAnglesSp::identity(n);
    for k in 2..=n {
        for j in 1..k {
            let rho = s.rho_symplectic(j);
            let q = sample_quat(s);
            a.set_pair(j, k, rho, q).expect("sampled angles lie in range");
        }
    }
    for j in 1..=n {
        let q = sample_quat(s);
        a.set_lead(j, q).expect("sampled angles lie in range");
    }
    a
}

/// Haar Sp(2N) through Euler angles; returns a 2N×2N matrix.
pub fn haar_sp_euler(s: &mut RandomStream, n: usize) -> SquareMatrix {
    compose_sp(&sample_sp_angles(s, n))
}

fn real_or_complex(group: GroupId) -> Result<(usize, bool)> {
    match group {
        GroupId::O(n) => Ok((n, true)),
        GroupId::U(n) => Ok((n, false)),
        other => Err(Error::Unsupported(format!("{other} for this method"))),
    }
}

/// Haar O(N) or U(N) by orthonormalizing the columns of a Gaussian matrix.
///
/// Classical Gram–Schmidt with one reorthogonalization pass; the implied R
/// factor has positive diagonal, which makes Q Haar distributed.
pub fn haar_qr(s: &mut RandomStream, group: GroupId) -> Result<SquareMatrix> {
    let (n, real) = real_or_complex(group)?;
    'draw: loop {
        let mut cols: Vec<Vec<C64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if real {
                            C64::new(s.gaussian(), 0.0)
                        } else {
                            s.complex_gaussian()
                        }
                    })
                    .collect()
            })
            .collect();
        for c in 0..n {
            let start = norm(&cols[c]);
            for _pass in 0..2 {
                for p in 0..c {
                    let proj: C64 = cols[p].iter().zip(&cols[c]).map(|(q, x)| q.conj() * x).sum();
                    let (done, rest) = cols.split_at_mut(c);
                    for (x, q) in rest[0].iter_mut().zip(&done[p]) {
                        *x -= proj * q;
                    }
                }
            }
            let r = norm(&cols[c]);
            if !(r > 1e-10 * start.max(1e-300)) {
                continue 'draw;
            }
            cols[c].iter_mut().for_each(|x| *x /= r);
        }
        let mut q = SquareMatrix::zeros(n, if real { Kind::Real } else { Kind::Complex });
        for (c, col) in cols.iter().enumerate() {
            for (r, &x) in col.iter().enumerate() {
                q.data_mut()[r * n + c] = x;
            }
        }
        return Ok(q);
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn unit_gaussian_vector(s: &mut RandomStream, m: usize, real: bool) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..m)
            .map(|_| {
                if real {
                    C64::new(s.gaussian(), 0.0)
                } else {
                    s.complex_gaussian()
                }
            })
            .collect();
        let r = norm(&v);
        if r > 0.0 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// The m×m reflector −e^{iθ}(I − 2ww†) sending e_m to the unit vector z,
/// with θ = arg z_m (a sign in the real case). Row-major entries.
pub fn householder_coset(z: &[C64]) -> Vec<C64> {
    let m = z.len();
    let zm = z[m - 1];
    let phase = if zm.norm() > 0.0 { zm / zm.norm() } else { ONE };
    // u = e^{−iθ} z has a nonnegative real last coordinate
    let mut w: Vec<C64> = z.iter().map(|x| x * phase.conj()).collect();
    w[m - 1] = C64::new(w[m - 1].re, 0.0) + ONE;
    let wn = norm(&w);
    w.iter_mut().for_each(|x| *x /= wn);
    let mut out = vec![ZERO; m * m];
    for i in 0..m {
        for j in 0..m {
            let h = if i == j { ONE } else { ZERO } - w[i] * w[j].conj() * 2.0;
            out[i * m + j] = -phase * h;
        }
    }
    out
}

/// Haar O(N) or U(N) as a product of Householder cosets
/// X = E_{N−1} diag(E_{N−2}, 1) ⋯ diag(E₀, I_{N−1}), where the m×m coset
/// maps e_m to a fresh uniform unit vector in the leading m coordinates.
pub fn haar_householder(s: &mut RandomStream, group: GroupId) -> Result<SquareMatrix> {
    let (n, real) = real_or_complex(group)?;
    let mut x = SquareMatrix::identity(n);
    if !real {
        x.force_kind(Kind::Complex);
    }
    for m in (1..=n).rev() {
        let z = unit_gaussian_vector(s, m, real);
        let block = householder_coset(&z);
        x.right_apply_block(0, m, &block);
    }
    if real {
        // reflector arithmetic keeps imaginary parts at exactly zero
        x.force_kind(Kind::Real);
    }
    Ok(x)
}

/// Bubble-sort factorization word of a permutation: bits μ_{l,j} for
/// 1 ≤ l ≤ j ≤ N−1 and the resulting permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationWord {
    n: usize,
    bits: Vec<bool>,
    images: Vec<usize>,
}

impl PermutationWord {
    /// Builds the word from bits listed as μ_{1,1}, μ_{1,2}, μ_{2,2}, μ_{1,3}, …
    ///
    /// The coset factor E_j = T_j(μ_{j,j}) ⋯ T_1(μ_{1,j}) multiplies on the
    /// right, where T_l(1) swaps coordinates l and l+1 and T_l(0) = I.
    pub fn from_bits(n: usize, bits: Vec<bool>) -> Result<Self> {
        let need = n * n.saturating_sub(1) / 2;
        if n == 0 || bits.len() != need {
            return Err(Error::DimensionMismatch { left: need, right: bits.len() });
        }
        let mut images: Vec<usize> = (0..n).collect();
        let mut idx = 0;
        for j in 1..n {
            let block = &bits[idx..idx + j];
            for l in (1..=j).rev() {
                if block[l - 1] {
                    images.swap(l - 1, l);
                }
            }
            idx += j;
        }
        Ok(PermutationWord { n, bits, images })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// One-line notation σ(1), …, σ(N), 1-based. The permutation matrix P
    /// satisfies P e_c = e_{σ(c)}.
    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(c, &i)| *c == i).count()
    }

    pub fn to_matrix(&self) -> SquareMatrix {
        let mut m = SquareMatrix::zeros(self.n, Kind::Real);
        for (c, &r) in self.images.iter().enumerate() {
            m.set(r, c, ONE);
        }
        m
    }
}

/// Uniform permutation of N: each μ_{l,j} is 1 with probability l/(l+1).
pub fn sample_permutation(s: &mut RandomStream, n: usize) -> PermutationWord {
    let mut bits = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 1..n {
        for l in 1..=j {
            bits.push(s.bernoulli(l as f64 / (l + 1) as f64));
        }
    }
    PermutationWord::from_bits(n, bits).expect("bit count matches")
}

/// Circular orthogonal ensemble: S = UᵀU with U Haar on U(N).
pub fn coe_sample(s: &mut RandomStream, n: usize) -> SquareMatrix {
    let u = haar_qr(s, GroupId::U(n)).expect("U(N) is supported");
    multiply(&u.transpose(), &u).expect("same dimension")
}

/// Circular symplectic ensemble: S̃ = Z⁻¹UᵀZ U with U Haar on U(2N).
pub fn cse_sample(s: &mut RandomStream, n: usize) -> SquareMatrix {
    let u = haar_qr(s, GroupId::U(2 * n)).expect("U(N) is supported");
    let z = SquareMatrix::quaternion_unit(n);
    let dual = multiply(&multiply(&z.transpose(), &u.transpose()).unwrap(), &z).unwrap();
    multiply(&dual, &u).unwrap()
}

/// Draws one element of `group` by `method`.
pub fn sample(s: &mut RandomStream, group: GroupId, method: Method) -> Result<Sample> {
    let n = group.n();
    let m = match (group, method) {
        (GroupId::SO(_), Method::Euler) => haar_so_euler(s, n),
        (GroupId::O(_), Method::Euler) => haar_o_euler(s, n),
        (GroupId::U(_), Method::Euler) => haar_u_euler(s, n),
        (GroupId::Sp(_), Method::Euler) => haar_sp_euler(s, n),
        (GroupId::O(_) | GroupId::U(_), Method::Qr) => haar_qr(s, group)?,
        (GroupId::O(_) | GroupId::U(_), Method::Householder) => haar_householder(s, group)?,
        (GroupId::SO(_), Method::Qr | Method::Householder) => {
            // fold the reflection coset onto SO(N) by flipping one column
            let mut x = if method == Method::Qr {
                haar_qr(s, GroupId::O(n))?
            } else {
                haar_householder(s, GroupId::O(n))?
            };
            if crate::linalg::determinant(&x).re < 0.0 {
                x.scale_column(0, -ONE);
            }
            x
        }
        (GroupId::Sn(_), Method::Bubble | Method::Euler) => {
            return Ok(Sample::Permutation(sample_permutation(s, n)))
        }
        (g, m) => {
            return Err(Error::Unsupported(format!("method {} for {g}", m.tag())));
        }
    };
    Ok(Sample::Matrix(m))
}

/// Draws `count` samples over `lanes` parallel sibling streams starting at
/// `first_stream`; output order is deterministic.
pub fn batch_samples(
    seed: u64,
    first_stream: u64,
    lanes: usize,
    count: usize,
    group: GroupId,
    method: Method,
) -> Result<Vec<Sample>> {
    // validate the combination once before fanning out
    sample(&mut RandomStream::new(seed, u64::MAX), group, method)?;
    Ok(batch(seed, first_stream, lanes, count, |s| {
        sample(s, group, method).expect("combination validated")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::stats::{chi_square, ks_test, ks_two_sample, mean_and_se};
    use crate::linalg::{
        adjoint_residual, determinant, eigenphases, self_dual_residual, symmetry_residual,
        symplectic_residual,
    };
    use std::f64::consts::TAU;

    fn means(xs: &[f64]) -> (f64, f64) {
        mean_and_se(xs)
    }

    #[test]
    fn so_euler_two_dim_trace() {
        let mut s = RandomStream::new(1, 0);
        let tr: Vec<f64> = (0..100_000).map(|_| haar_so_euler(&mut s, 2).trace().re).collect();
        let (m, se) = means(&tr);
        assert!(m.abs() <= 5.0 * se);
    }

    #[test]
    fn so_euler_entry_second_moment() {
        let mut s = RandomStream::new(2, 0);
        for n in [3, 5] {
            let xs: Vec<f64> = (0..100_000).map(|_| haar_so_euler(&mut s, n).get(0, 0).re.powi(2)).collect();
            let (m, se) = means(&xs);
            assert!((m - 1.0 / n as f64).abs() <= 5.0 * se, "n={n}: {m}");
        }
    }

    #[test]
    fn so_euler_first_column_is_sphere_uniform() {
        // first coordinate of a uniform unit vector: cos_theta_so(N−1) marginal
        let n = 5;
        let mut s = RandomStream::new(3, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| haar_so_euler(&mut s, n).get(0, 0).re).collect();
        let mut t = RandomStream::new(3, 1);
        let ys: Vec<f64> = (0..20_000).map(|_| t.cos_theta_so(n - 1)).collect();
        assert!(ks_two_sample(&xs, &ys, 0.001).unwrap().pass);
    }

    #[test]
    fn u_euler_cases() {
        let mut s = RandomStream::new(4, 0);
        let re: Vec<f64> = (0..100_000).map(|_| haar_u_euler(&mut s, 1).get(0, 0).re).collect();
        let (m, se) = means(&re);
        assert!(m.abs() <= 5.0 * se);

        let n = 4;
        let xs: Vec<f64> = (0..100_000).map(|_| haar_u_euler(&mut s, n).get(0, 0).norm_sqr()).collect();
        let (m, se) = means(&xs);
        assert!((m - 0.25).abs() <= 5.0 * se);

        let phases: Vec<f64> = (0..20_000)
            .map(|_| {
                let d = determinant(&haar_u_euler(&mut s, 3));
                d.im.atan2(d.re).rem_euclid(TAU)
            })
            .collect();
        assert!(ks_test(&phases, |x| (x / TAU).clamp(0.0, 1.0), 0.001).unwrap().pass);
    }

    #[test]
    fn u_euler_matches_qr_on_moments() {
        let mut s = RandomStream::new(5, 0);
        let a: Vec<f64> = (0..20_000).map(|_| haar_u_euler(&mut s, 3).trace().norm_sqr()).collect();
        let b: Vec<f64> = (0..20_000)
            .map(|_| haar_qr(&mut s, GroupId::U(3)).unwrap().trace().norm_sqr())
            .collect();
        assert!(ks_two_sample(&a, &b, 0.001).unwrap().pass);
        // E|tr V|² = 1 for Haar U(N), N ≥ 1
        let (m, se) = means(&a);
        assert!((m - 1.0).abs() <= 5.0 * se);
    }

    #[test]
    fn sp_euler_cases() {
        let mut s = RandomStream::new(6, 0);
        for n in 1..=4 {
            for _ in 0..1000 {
                let v = haar_sp_euler(&mut s, n);
                assert!(adjoint_residual(&v) <= 1e-12 * n as f64);
                assert!(symplectic_residual(&v).unwrap() <= 1e-12 * n as f64);
            }
        }
        let xs: Vec<f64> = (0..100_000).map(|_| haar_sp_euler(&mut s, 1).get(0, 0).norm_sqr()).collect();
        let (m, se) = means(&xs);
        assert!((m - 0.5).abs() <= 5.0 * se);

        let v = haar_sp_euler(&mut s, 3);
        let e = eigenphases(&v).unwrap();
        let ph = e.phases();
        for &t in ph {
            let mirror = if t == 0.0 { 0.0 } else { TAU - t };
            assert!(ph.iter().any(|&u| (u - mirror).abs() < 1e-8));
        }
    }

    #[test]
    fn sp_euler_trace_moments() {
        // Haar Sp(2N): E[tr V] = 0, E[(tr V)²] = 1 for N ≥ 1
        let mut s = RandomStream::new(7, 0);
        let tr: Vec<f64> = (0..100_000).map(|_| haar_sp_euler(&mut s, 3).trace().re).collect();
        let (m, se) = means(&tr);
        assert!(m.abs() <= 5.0 * se);
        let sq: Vec<f64> = tr.iter().map(|t| t * t).collect();
        let (m, se) = means(&sq);
        assert!((m - 1.0).abs() <= 5.0 * se, "{m}");
    }

    #[test]
    fn qr_cases() {
        let mut s = RandomStream::new(8, 0);
        let mut positive = 0usize;
        let total = 20_000;
        for _ in 0..total {
            let q = haar_qr(&mut s, GroupId::O(4)).unwrap();
            assert!(adjoint_residual(&q) <= 1e-13 * 4.0);
            assert!(q.is_real());
            if determinant(&q).re > 0.0 {
                positive += 1;
            }
        }
        let f = positive as f64 / total as f64;
        let se = (0.25 / total as f64).sqrt();
        assert!((f - 0.5).abs() <= 5.0 * se);
        for _ in 0..100 {
            assert!(adjoint_residual(&haar_qr(&mut s, GroupId::U(6)).unwrap()) <= 6e-13);
        }
        assert!(haar_qr(&mut s, GroupId::SO(3)).is_err());
    }

    #[test]
    fn qr_matches_euler_after_det_conditioning() {
        let n = 5;
        let mut s = RandomStream::new(9, 0);
        let mut a = Vec::new();
        while a.len() < 10_000 {
            let q = haar_qr(&mut s, GroupId::O(n)).unwrap();
            if determinant(&q).re > 0.0 {
                a.push(q.get(0, 0).re);
            }
        }
        let b: Vec<f64> = (0..10_000).map(|_| haar_so_euler(&mut s, n).get(0, 0).re).collect();
        assert!(ks_two_sample(&a, &b, 0.001).unwrap().pass);
    }

    #[test]
    fn householder_cases() {
        let mut s = RandomStream::new(10, 0);
        let one = haar_householder(&mut s, GroupId::O(1)).unwrap();
        assert!(one.get(0, 0) == ONE || one.get(0, 0) == -ONE);
        let one = haar_householder(&mut s, GroupId::U(1)).unwrap();
        assert!((one.get(0, 0).norm() - 1.0).abs() < 1e-15);

        for real in [true, false] {
            for m in 1..=6 {
                let z = unit_gaussian_vector(&mut s, m, real);
                let b = householder_coset(&z);
                for i in 0..m {
                    assert!((b[i * m + m - 1] - z[i]).norm() <= 1e-13);
                }
                let bm = SquareMatrix::from_complex(m, b).unwrap();
                assert!(adjoint_residual(&bm) <= 1e-14);
            }
        }

        let a: Vec<f64> = (0..20_000)
            .map(|_| haar_householder(&mut s, GroupId::U(6)).unwrap().get(0, 0).norm_sqr())
            .collect();
        let b: Vec<f64> = (0..20_000)
            .map(|_| haar_qr(&mut s, GroupId::U(6)).unwrap().get(0, 0).norm_sqr())
            .collect();
        assert!(ks_two_sample(&a, &b, 0.001).unwrap().pass);
        for _ in 0..100 {
            let x = haar_householder(&mut s, GroupId::O(7)).unwrap();
            assert!(x.is_real());
            assert!(adjoint_residual(&x) <= 7e-13);
        }
    }

    #[test]
    fn permutation_two_dim() {
        let mut s = RandomStream::new(11, 0);
        let n = 100_000;
        let swaps = (0..n).filter(|_| sample_permutation(&mut s, 2).one_line() == vec![2, 1]).count();
        let f = swaps as f64 / n as f64;
        assert!((f - 0.5).abs() <= 5.0 * (0.25 / n as f64).sqrt());
    }

    fn enumerate_exact(n: usize) -> (std::collections::HashMap<Vec<usize>, u64>, u64) {
        // weight of a bit pattern is ∏ (l if μ_{l,·} = 1 else 1) over ∏ (l+1)
        let nbits = n * (n - 1) / 2;
        let levels: Vec<usize> = (1..n).flat_map(|j| 1..=j).collect();
        let denom: u64 = levels.iter().map(|&l| (l + 1) as u64).product();
        let mut weights = std::collections::HashMap::new();
        for mask in 0u64..(1 << nbits) {
            let bits: Vec<bool> = (0..nbits).map(|b| mask >> b & 1 == 1).collect();
            let w: u64 = bits
                .iter()
                .zip(&levels)
                .map(|(&b, &l)| if b { l as u64 } else { 1 })
                .product();
            let p = PermutationWord::from_bits(n, bits).unwrap();
            *weights.entry(p.one_line()).or_insert(0) += w;
        }
        (weights, denom)
    }

    #[test]
    fn permutation_exact_uniformity() {
        for n in 2..=5 {
            let (weights, denom) = enumerate_exact(n);
            let fact: u64 = (1..=n as u64).product();
            assert_eq!(weights.len() as u64, fact);
            for (_, w) in weights {
                assert_eq!(w * fact, denom);
            }
        }
    }

    #[test]
    fn permutation_matches_transposition_product() {
        let n = 4;
        let nbits = 6;
        for mask in 0u64..(1 << nbits) {
            let bits: Vec<bool> = (0..nbits).map(|b| mask >> b & 1 == 1).collect();
            let p = PermutationWord::from_bits(n, bits.clone()).unwrap();
            let mut v = SquareMatrix::identity(n);
            let mut idx = 0;
            for j in 1..n {
                for l in (1..=j).rev() {
                    if bits[idx + l - 1] {
                        // T_l swaps coordinates l and l+1
                        let mut swap = SquareMatrix::identity(n);
                        swap.set(l - 1, l, ONE);
                        swap.set(l, l - 1, ONE);
                        swap.set(l - 1, l - 1, ZERO);
                        swap.set(l, l, ZERO);
                        v = multiply(&v, &swap).unwrap();
                    }
                }
                idx += j;
            }
            assert_eq!(v, p.to_matrix());
        }
    }

    #[test]
    fn permutation_fixed_points_poisson() {
        let mut s = RandomStream::new(12, 0);
        let n = 100_000;
        let mut counts = vec![0u64; 6];
        for _ in 0..n {
            let k = sample_permutation(&mut s, 50).fixed_points();
            counts[k.min(5)] += 1;
        }
        let expected = crate::analytics::stats::poisson_one_bins(6, n as f64);
        assert!(chi_square(&counts, &expected, 0.001).unwrap().pass);
    }

    #[test]
    fn coe_cases() {
        let mut s = RandomStream::new(13, 0);
        for n in 1..=6 {
            let m = coe_sample(&mut s, n);
            assert!(symmetry_residual(&m) <= 1e-13 * n as f64);
            assert!(adjoint_residual(&m) <= 1e-13 * n as f64);
        }
        let one = coe_sample(&mut s, 1);
        assert!((one.get(0, 0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coe_two_dim_gap_density() {
        // joint density ∝ |e^{iθ₁} − e^{iθ₂}| ⟹ gap δ has density ∝ sin(δ/2) on [0, 2π)
        let mut s = RandomStream::new(14, 0);
        let bins = 20;
        let total = 50_000;
        let mut counts = vec![0u64; bins];
        for _ in 0..total {
            let e = eigenphases(&coe_sample(&mut s, 2)).unwrap();
            let d = (e.phases()[1] - e.phases()[0]).rem_euclid(TAU);
            let d = if s.bernoulli(0.5) { d } else { TAU - d };
            counts[((d / TAU * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let expected: Vec<f64> = (0..bins)
            .map(|b| {
                let lo = b as f64 * TAU / bins as f64;
                let hi = lo + TAU / bins as f64;
                // ∫ sin(δ/2)/4 dδ over [lo, hi]
                total as f64 * ((lo / 2.0).cos() - (hi / 2.0).cos()) / 2.0
            })
            .collect();
        assert!(chi_square(&counts, &expected, 0.001).unwrap().pass);
    }

    #[test]
    fn cse_cases() {
        let mut s = RandomStream::new(15, 0);
        for n in 1..=4 {
            let m = cse_sample(&mut s, n);
            assert!(self_dual_residual(&m).unwrap() <= 1e-12 * n as f64);
            assert!(adjoint_residual(&m) <= 1e-12 * n as f64);
            let e = eigenphases(&m).unwrap();
            for (_, k) in e.clusters(1e-8) {
                assert_eq!(k % 2, 0);
            }
        }
        let one = cse_sample(&mut s, 1);
        assert!((one.get(0, 0) - one.get(1, 1)).norm() < 1e-13);
        assert!(one.get(0, 1).norm() < 1e-13 && one.get(1, 0).norm() < 1e-13);
        assert!((one.get(0, 0).norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn dispatcher_and_batch() {
        let mut s = RandomStream::new(16, 0);
        assert!(sample(&mut s, GroupId::Sp(2), Method::Qr).is_err());
        match sample(&mut s, GroupId::Sn(5), Method::Bubble).unwrap() {
            Sample::Permutation(p) => assert_eq!(p.n(), 5),
            _ => panic!("expected a permutation"),
        }
        for method in [Method::Euler, Method::Qr, Method::Householder] {
            for _ in 0..20 {
                match sample(&mut s, GroupId::SO(4), method).unwrap() {
                    Sample::Matrix(m) => assert!((determinant(&m) - ONE).norm() < 1e-12),
                    _ => panic!("expected a matrix"),
                }
            }
        }
        let a = batch_samples(3, 0, 4, 9, GroupId::U(3), Method::Householder).unwrap();
        let b = batch_samples(3, 0, 4, 9, GroupId::U(3), Method::Householder).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 9);
    }
}
