//! Euler-angle factorizations of SO(N), U(N) and Sp(2N).
//!
//! Every group element is built as V = V₁ E₁ E₂ ⋯ E_{N−1}, where V₁ is the
//! 1×1 (or one-quaternion) seed and the coset factor E_j acts on the leading
//! j+1 coordinates only:
//!
//! * SO(N): E_j = R_j(θ_{j,j+1}) ⋯ R₁(θ_{1,j+1}), V₁ = 1;
//! * U(N):  E_j = U_j(φ_{j,j+1}, ψ_{j,j+1}, α_{j+1}) U_{j−1}(·, ·, 0) ⋯ U₁(·, ·, 0), V₁ = e^{iα₁};
//! * Sp(2N): the same pattern with quaternion blocks, the free unit quaternion
//!   𝐪_{j+1} sitting in the leftmost factor of E_j and V₁ = 𝐪₁.
//!
//! The extra phase (or quaternion) of each coset lives in the leftmost
//! factor. With that placement the angle-to-matrix map has full rank and
//! independent angles with the product densities below give Haar measure.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{adjoint_residual, determinant, Kind, SquareMatrix, C64, ZERO};

/// Position of the pair (j, k), 1 ≤ j < k, in column-major pair storage.
fn pair_index(j: usize, k: usize) -> usize {
    debug_assert!(1 <= j && j < k);
    (k - 1) * (k - 2) / 2 + (j - 1)
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn check_pair(j: usize, k: usize, n: usize) -> Result<()> {
    if j == 0 || j >= k {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, dim: n });
    }
    Ok(())
}

fn wrap_angle(t: f64) -> f64 {
    let mut t = t.rem_euclid(TAU) + 0.0;
    if t >= TAU {
        t = 0.0;
    }
    t
}

fn in_closed(t: f64, lo: f64, hi: f64) -> bool {
    t.is_finite() && t >= lo && t <= hi
}

fn in_circle(t: f64) -> bool {
    t.is_finite() && (0.0..TAU).contains(&t)
}

/// Euler angles θ_{j,k}, 1 ≤ j < k ≤ N, of an SO(N) element.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerAnglesSO {
    dim: usize,
    theta: Vec<f64>,
}

impl EulerAnglesSO {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        EulerAnglesSO {
            dim,
            theta: vec![0.0; pair_count(dim)],
        }
    }

    /// Builds a record from a generator `f(j, k)`, checking the ranges
    /// θ_{1,k} ∈ [0, 2π) and θ_{j,k} ∈ [0, π] for j ≥ 2.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut a = Self::zeros(dim);
        for k in 2..=dim {
            for j in 1..k {
                a.set(j, k, f(j, k))?;
            }
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.theta[pair_index(j, k)]
    }

    pub fn set(&mut self, j: usize, k: usize, theta: f64) -> Result<()> {
        check_pair(j, k, self.dim)?;
        let ok = if j == 1 {
            in_circle(theta)
        } else {
            in_closed(theta, 0.0, PI)
        };
        if !ok {
            return Err(Error::domain(format!("θ_{{{j},{k}}} = {theta} outside its range")));
        }
        self.theta[pair_index(j, k)] = theta;
        Ok(())
    }

    /// All angles in (k, j) order: θ_{1,2}, θ_{1,3}, θ_{2,3}, θ_{1,4}, …
    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }
}

/// A unit quaternion as its SU(2) parameters (φ, ψ, α).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuatAngles {
    pub phi: f64,
    pub psi: f64,
    pub alpha: f64,
}

impl QuatAngles {
    pub const IDENTITY: QuatAngles = QuatAngles {
        phi: 0.0,
        psi: 0.0,
        alpha: 0.0,
    };

    pub fn new(phi: f64, psi: f64, alpha: f64) -> Result<Self> {
        let q = QuatAngles { phi, psi, alpha };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if in_closed(self.phi, 0.0, FRAC_PI_2) && in_circle(self.psi) && in_circle(self.alpha) {
            Ok(())
        } else {
            Err(Error::domain(format!("quaternion angles {self:?} outside range")))
        }
    }

    /// The SU(2) block [[cos φ e^{iα}, sin φ e^{iψ}], [−sin φ e^{−iψ}, cos φ e^{−iα}]].
    pub fn su2(&self) -> [[C64; 2]; 2] {
        su2_block(self.phi, self.psi, self.alpha)
    }
}

fn su2_block(phi: f64, psi: f64, alpha: f64) -> [[C64; 2]; 2] {
    let (s, c) = phi.sin_cos();
    let ea = Complex64::from_polar(1.0, alpha);
    let ep = Complex64::from_polar(1.0, psi);
    [[ea * c, ep * s], [-ep.conj() * s, ea.conj() * c]]
}

/// Euler angles of a U(N) element: φ_{j,k} ∈ [0, π/2], ψ_{j,k} ∈ [0, 2π)
/// for 1 ≤ j < k ≤ N, and phases α_l ∈ [0, 2π) for l = 1..N.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerAnglesU {
    dim: usize,
    phi: Vec<f64>,
    psi: Vec<f64>,
    alpha: Vec<f64>,
}

impl EulerAnglesU {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        EulerAnglesU {
            dim,
            phi: vec![0.0; pair_count(dim)],
            psi: vec![0.0; pair_count(dim)],
            alpha: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phi(&self, j: usize, k: usize) -> f64 {
        self.phi[pair_index(j, k)]
    }

    pub fn psi(&self, j: usize, k: usize) -> f64 {
        self.psi[pair_index(j, k)]
    }

    /// Phase α_l, 1-based.
    pub fn alpha(&self, l: usize) -> f64 {
        self.alpha[l - 1]
    }

    pub fn set_pair(&mut self, j: usize, k: usize, phi: f64, psi: f64) -> Result<()> {
        check_pair(j, k, self.dim)?;
        if !in_closed(phi, 0.0, FRAC_PI_2) || !in_circle(psi) {
            return Err(Error::domain(format!("(φ, ψ)_{{{j},{k}}} = ({phi}, {psi}) outside range")));
        }
        let i = pair_index(j, k);
        self.phi[i] = phi;
        self.psi[i] = psi;
        Ok(())
    }

    pub fn set_alpha(&mut self, l: usize, alpha: f64) -> Result<()> {
        if l == 0 || l > self.dim {
            return Err(Error::IndexOutOfRange { index: l, dim: self.dim });
        }
        if !in_circle(alpha) {
            return Err(Error::domain(format!("α_{l} = {alpha} outside [0, 2π)")));
        }
        self.alpha[l - 1] = alpha;
        Ok(())
    }

    /// Number of real parameters, N².
    pub fn parameter_count(&self) -> usize {
        self.phi.len() + self.psi.len() + self.alpha.len()
    }
}

/// Euler angles of an Sp(2N) element: ρ_{j,k} ∈ [0, π/2] and quaternions
/// 𝐐_{j,k} for 1 ≤ j < k ≤ N, plus the quaternions 𝐪_j for j = 1..N.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerAnglesSp {
    n: usize,
    rho: Vec<f64>,
    big_q: Vec<QuatAngles>,
    small_q: Vec<QuatAngles>,
}

impl EulerAnglesSp {
    /// Identity record for Sp(2n).
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        EulerAnglesSp {
            n,
            rho: vec![0.0; pair_count(n)],
            big_q: vec![QuatAngles::IDENTITY; pair_count(n)],
            small_q: vec![QuatAngles::IDENTITY; n],
        }
    }

    /// Quaternion dimension N; the matrix size is 2N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self, j: usize, k: usize) -> f64 {
        self.rho[pair_index(j, k)]
    }

    pub fn big_q(&self, j: usize, k: usize) -> QuatAngles {
        self.big_q[pair_index(j, k)]
    }

    pub fn small_q(&self, j: usize) -> QuatAngles {
        self.small_q[j - 1]
    }

    pub fn set_pair(&mut self, j: usize, k: usize, rho: f64, q: QuatAngles) -> Result<()> {
        check_pair(j, k, self.n)?;
        if !in_closed(rho, 0.0, FRAC_PI_2) {
            return Err(Error::domain(format!("ρ_{{{j},{k}}} = {rho} outside [0, π/2]")));
        }
        q.validate()?;
        let i = pair_index(j, k);
        self.rho[i] = rho;
        self.big_q[i] = q;
        Ok(())
    }

    pub fn set_lead(&mut self, j: usize, q: QuatAngles) -> Result<()> {
        if j == 0 || j > self.n {
            return Err(Error::IndexOutOfRange { index: j, dim: self.n });
        }
        q.validate()?;
        self.small_q[j - 1] = q;
        Ok(())
    }

    /// Number of real parameters, 2N² + N.
    pub fn parameter_count(&self) -> usize {
        4 * self.rho.len() + 3 * self.small_q.len()
    }
}

/// Plane rotation R_j(θ): identity except [[cos θ, sin θ], [−sin θ, cos θ]]
/// on coordinates (j, j+1), 1-based.
pub fn rotation_r(j: usize, theta: f64, n: usize) -> Result<SquareMatrix> {
    if j == 0 || j >= n {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    let mut m = SquareMatrix::identity(n);
    let (s, c) = theta.sin_cos();
    m.right_rotate(j - 1, c, s);
    Ok(m)
}

/// U_j(φ, ψ, α): identity except the SU(2) block on coordinates (j, j+1).
pub fn unitary_u(j: usize, phi: f64, psi: f64, alpha: f64, n: usize) -> Result<SquareMatrix> {
    if j == 0 || j >= n {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    let mut m = SquareMatrix::identity(n);
    m.force_kind(Kind::Complex);
    m.right_apply_2x2(j - 1, su2_block(phi, psi, alpha));
    Ok(m)
}

fn quaternion_block_entries(rho: f64, q: &QuatAngles, big: &QuatAngles) -> [C64; 16] {
    let (s, c) = rho.sin_cos();
    let a = q.su2();
    let b = big.su2();
    let adj = |m: &[[C64; 2]; 2]| [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]];
    let mul = |x: &[[C64; 2]; 2], y: &[[C64; 2]; 2]| {
        let mut z = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        z
    };
    let bd = adj(&b);
    // Q†q†Q equals q† when q and Q commute
    let d = mul(&mul(&bd, &adj(&a)), &b);
    let mut out = [ZERO; 16];
    for r in 0..2 {
        for col in 0..2 {
            out[r * 4 + col] = a[r][col] * c;
            out[r * 4 + col + 2] = b[r][col] * s;
            out[(r + 2) * 4 + col] = -bd[r][col] * s;
            out[(r + 2) * 4 + col + 2] = d[r][col] * c;
        }
    }
    out
}

/// The 4×4 block [[q cos ρ, Q sin ρ], [−Q† sin ρ, Q†q†Q cos ρ]].
pub fn quaternion_block(rho: f64, q: QuatAngles, big_q: QuatAngles) -> Result<SquareMatrix> {
    if !in_closed(rho, 0.0, FRAC_PI_2) {
        return Err(Error::domain(format!("ρ = {rho} outside [0, π/2]")));
    }
    q.validate()?;
    big_q.validate()?;
    SquareMatrix::from_complex(4, quaternion_block_entries(rho, &q, &big_q).to_vec()).map(SquareMatrix::normalized)
}

fn apply_coset_so(v: &mut SquareMatrix, angles: &EulerAnglesSO, j: usize) {
    for l in (1..=j).rev() {
        let (s, c) = angles.get(l, j + 1).sin_cos();
        v.right_rotate(l - 1, c, s);
    }
}

/// E_j = R_j(θ_{j,j+1}) ⋯ R₁(θ_{1,j+1}).
pub fn coset_e_so(angles: &EulerAnglesSO, j: usize) -> Result<SquareMatrix> {
    if j == 0 || j >= angles.dim {
        return Err(Error::IndexOutOfRange { index: j, dim: angles.dim });
    }
    let mut m = SquareMatrix::identity(angles.dim);
    apply_coset_so(&mut m, angles, j);
    Ok(m)
}

/// V = E₁ E₂ ⋯ E_{N−1} ∈ SO(N).
pub fn compose_so(angles: &EulerAnglesSO) -> SquareMatrix {
    let mut v = SquareMatrix::identity(angles.dim);
    for j in 1..angles.dim {
        apply_coset_so(&mut v, angles, j);
    }
    v
}

fn apply_coset_u(v: &mut SquareMatrix, angles: &EulerAnglesU, j: usize) {
    for l in (1..=j).rev() {
        let alpha = if l == j { angles.alpha(j + 1) } else { 0.0 };
        v.right_apply_2x2(l - 1, su2_block(angles.phi(l, j + 1), angles.psi(l, j + 1), alpha));
    }
}

/// E_j = U_j(φ_{j,j+1}, ψ_{j,j+1}, α_{j+1}) U_{j−1}(φ_{j−1,j+1}, ψ_{j−1,j+1}, 0) ⋯ U₁(φ_{1,j+1}, ψ_{1,j+1}, 0).
pub fn coset_e_u(angles: &EulerAnglesU, j: usize) -> Result<SquareMatrix> {
    if j == 0 || j >= angles.dim {
        return Err(Error::IndexOutOfRange { index: j, dim: angles.dim });
    }
    let mut m = SquareMatrix::identity(angles.dim);
    m.force_kind(Kind::Complex);
    apply_coset_u(&mut m, angles, j);
    Ok(m)
}

/// V = diag(e^{iα₁}, 1, …, 1) E₁ ⋯ E_{N−1} ∈ U(N).
pub fn compose_u(angles: &EulerAnglesU) -> SquareMatrix {
    let mut v = SquareMatrix::identity(angles.dim);
    v.force_kind(Kind::Complex);
    v.scale_row(0, Complex64::from_polar(1.0, angles.alpha(1)));
    for j in 1..angles.dim {
        apply_coset_u(&mut v, angles, j);
    }
    v
}

fn apply_coset_sp(v: &mut SquareMatrix, angles: &EulerAnglesSp, j: usize) {
    for l in (1..=j).rev() {
        let q = if l == j { angles.small_q(j + 1) } else { QuatAngles::IDENTITY };
        let block = quaternion_block_entries(angles.rho(l, j + 1), &q, &angles.big_q(l, j + 1));
        v.right_apply_block(2 * (l - 1), 4, &block);
    }
}

/// The coset factor E_j of Sp(2N), acting on the leading 2(j+1) coordinates.
pub fn coset_e_sp(angles: &EulerAnglesSp, j: usize) -> Result<SquareMatrix> {
    if j == 0 || j >= angles.n {
        return Err(Error::IndexOutOfRange { index: j, dim: angles.n });
    }
    let mut m = SquareMatrix::identity(2 * angles.n);
    m.force_kind(Kind::Complex);
    apply_coset_sp(&mut m, angles, j);
    Ok(m)
}

/// V = diag(𝐪₁, I_{2N−2}) E₁ ⋯ E_{N−1} ∈ Sp(2N), a 2N×2N complex matrix.
pub fn compose_sp(angles: &EulerAnglesSp) -> SquareMatrix {
    let mut v = SquareMatrix::identity(2 * angles.n);
    v.force_kind(Kind::Complex);
    v.right_apply_2x2(0, angles.small_q(1).su2());
    for j in 1..angles.n {
        apply_coset_sp(&mut v, angles, j);
    }
    v
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Recovers Euler angles of an SO(N) element by zeroing the bottom row of
/// each leading block in turn with R₁ᵀ, R₂ᵀ, …, then descending a dimension.
///
/// At an exact degeneracy (a vanishing partial row) the angles of that
/// block that no longer matter come out as 0.
pub fn extract_angles_so(v: &SquareMatrix) -> Result<EulerAnglesSO> {
    let n = v.dim();
    if !v.is_real() {
        return Err(Error::domain("SO(N) extraction needs a real matrix"));
    }
    let residual = adjoint_residual(v);
    if residual > 1e-10 * n as f64 {
        return Err(Error::NotUnitary { residual });
    }
    let det = determinant(v).re;
    if (det + 1.0).abs() < 0.5 {
        return Err(Error::Reflection);
    }
    if (det - 1.0).abs() > 1e-8 {
        return Err(Error::domain(format!("determinant {det} is not 1")));
    }

    let mut w = v.clone();
    let mut angles = EulerAnglesSO::zeros(n);
    for m in (2..=n).rev() {
        let x: Vec<f64> = w.row(m - 1)[..m].iter().map(|z| z.re).collect();
        let mut prefix = vec![0.0f64; m + 1];
        for l in 1..=m {
            prefix[l] = prefix[l - 1].hypot(x[l - 1]);
        }
        for l in 2..m {
            let t = prefix[l].atan2(sign(m - l - 1) * x[l] + 0.0);
            angles.theta[pair_index(l, m)] = t.clamp(0.0, PI);
        }
        let t1 = (sign(m - 1) * x[0] + 0.0).atan2(sign(m) * x[1] + 0.0);
        angles.theta[pair_index(1, m)] = wrap_angle(t1);
        // undo E_{m−1}: W ← W R₁ᵀ R₂ᵀ ⋯ R_{m−1}ᵀ
        for l in 1..m {
            let (s, c) = angles.get(l, m).sin_cos();
            w.right_rotate(l - 1, c, -s);
        }
    }
    Ok(angles)
}

const TINY: f64 = 1e-13;

fn arg(z: C64) -> f64 {
    (z.im + 0.0).atan2(z.re + 0.0)
}

/// Recovers Euler angles of a U(N) element, level by level like
/// [`extract_angles_so`]; the phases α absorb det(v).
pub fn extract_angles_u(v: &SquareMatrix) -> Result<EulerAnglesU> {
    let n = v.dim();
    let residual = adjoint_residual(v);
    if residual > 1e-10 * n as f64 {
        return Err(Error::NotUnitary { residual });
    }
    let mut w = v.clone();
    w.force_kind(Kind::Complex);
    let mut a = EulerAnglesU::zeros(n);
    for m in (2..=n).rev() {
        let x: Vec<C64> = w.row(m - 1)[..m].to_vec();
        let mut prefix = vec![0.0f64; m + 1];
        for l in 1..=m {
            prefix[l] = prefix[l - 1].hypot(x[l - 1].norm());
        }
        for l in 1..m {
            a.phi[pair_index(l, m)] = prefix[l].atan2(x[l].norm()).clamp(0.0, FRAC_PI_2);
        }
        // phase of the running product P_l, with P_m = 1
        let mut arg_next = 0.0;
        for l in (1..m).rev() {
            if prefix[l] <= TINY {
                break;
            }
            let arg_here = if l == 1 || x[l - 1].norm() > TINY {
                arg(x[l - 1])
            } else {
                arg_next + PI
            };
            a.psi[pair_index(l, m)] = wrap_angle(PI + arg_next - arg_here);
            arg_next = arg_here;
        }
        a.alpha[m - 1] = if x[m - 1].norm() > TINY {
            wrap_angle(-arg(x[m - 1]))
        } else {
            0.0
        };
        // undo E_{m−1}: W ← W U₁† U₂† ⋯ U_{m−1}†
        for l in 1..m {
            let alpha = if l == m - 1 { a.alpha(m) } else { 0.0 };
            let g = su2_block(a.phi(l, m), a.psi(l, m), alpha);
            let adj = [[g[0][0].conj(), g[1][0].conj()], [g[0][1].conj(), g[1][1].conj()]];
            w.right_apply_2x2(l - 1, adj);
        }
    }
    a.alpha[0] = wrap_angle(arg(w.get(0, 0)));
    Ok(a)
}

fn check_so_ranges(angles: &EulerAnglesSO) -> Result<()> {
    for k in 2..=angles.dim {
        for j in 1..k {
            let t = angles.get(j, k);
            let ok = if j == 1 { in_circle(t) } else { in_closed(t, 0.0, PI) };
            if !ok {
                return Err(Error::domain(format!("θ_{{{j},{k}}} = {t} outside its range")));
            }
        }
    }
    Ok(())
}

/// Invariant density 2^{N(N−1)/4} ∏_{j<k} (sin θ_{j,k})^{j−1}.
pub fn density_so(angles: &EulerAnglesSO) -> Result<f64> {
    check_so_ranges(angles)?;
    let n = angles.dim;
    let mut d = 2f64.powf((n * (n - 1)) as f64 / 4.0);
    for k in 2..=n {
        for j in 2..k {
            d *= angles.get(j, k).sin().powi(j as i32 - 1);
        }
    }
    Ok(d.max(0.0))
}

/// Invariant density 2^{N(N−1)/2} ∏_{j<k} cos φ_{j,k} (sin φ_{j,k})^{2j−1}.
pub fn density_u(angles: &EulerAnglesU) -> Result<f64> {
    let n = angles.dim;
    let mut d = 2f64.powf((n * (n - 1)) as f64 / 2.0);
    for k in 2..=n {
        for j in 1..k {
            let phi = angles.phi(j, k);
            if !in_closed(phi, 0.0, FRAC_PI_2) || !in_circle(angles.psi(j, k)) {
                return Err(Error::domain("unitary Euler angle outside range"));
            }
            d *= phi.cos() * phi.sin().powi(2 * j as i32 - 1);
        }
    }
    if angles.alpha.iter().any(|&t| !in_circle(t)) {
        return Err(Error::domain("phase outside [0, 2π)"));
    }
    Ok(d.max(0.0))
}

/// Invariant density
/// 2^{N(N−1)} ∏_{j<k} cos³ρ_{j,k} (sin ρ_{j,k})^{4j−1} ½ sin 2φ_{j,k} · ∏_j ½ sin 2φ_j.
pub fn density_sp(angles: &EulerAnglesSp) -> Result<f64> {
    let n = angles.n;
    let mut d = 2f64.powi((n * (n - 1)) as i32);
    for k in 2..=n {
        for j in 1..k {
            let rho = angles.rho(j, k);
            let q = angles.big_q(j, k);
            if !in_closed(rho, 0.0, FRAC_PI_2) {
                return Err(Error::domain("ρ outside [0, π/2]"));
            }
            q.validate()?;
            d *= rho.cos().powi(3) * rho.sin().powi(4 * j as i32 - 1) * 0.5 * (2.0 * q.phi).sin();
        }
    }
    for q in &angles.small_q {
        q.validate()?;
        d *= 0.5 * (2.0 * q.phi).sin();
    }
    Ok(d.max(0.0))
}
