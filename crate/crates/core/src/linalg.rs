//! Dense square matrices over the complex numbers, with the handful of
//! operations the samplers and their checks need: products, residuals
//! against the defining relations of the groups, determinants, and
//! eigenphases of unitary-class matrices.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Whether a matrix is known to have purely real entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Real,
    Complex,
}

impl Kind {
    fn join(self, other: Kind) -> Kind {
        if self == Kind::Real && other == Kind::Real {
            Kind::Real
        } else {
            Kind::Complex
        }
    }
}

/// Row-major N×N matrix. A `Kind::Real` matrix has every imaginary part
/// exactly zero; any operation that could introduce a nonzero imaginary part
/// promotes the kind to `Complex`.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<C64>,
    kind: Kind,
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{}, {:?})", self.dim, self.dim, self.kind)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    if self.kind == Kind::Real {
                        format!("{:+.6}", z.re)
                    } else {
                        format!("{:+.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl SquareMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, Kind::Real);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn zeros(dim: usize, kind: Kind) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        SquareMatrix {
            dim,
            data: vec![ZERO; dim * dim],
            kind,
        }
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(SquareMatrix {
            dim,
            data: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
            kind: Kind::Real,
        })
    }

    /// Builds a complex matrix from row-major entries.
    pub fn from_complex(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(SquareMatrix {
            dim,
            data: entries,
            kind: Kind::Complex,
        })
    }

    pub fn from_rows_real(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_real(dim, &flat)
    }

    /// The constant Z_{2N} = I_N ⊗ [[0, -1], [1, 0]] defining quaternion duality.
    pub fn quaternion_unit(n: usize) -> Self {
        let mut z = Self::zeros(2 * n, Kind::Real);
        for b in 0..n {
            z.data[(2 * b) * 2 * n + 2 * b + 1] = C64::new(-1.0, 0.0);
            z.data[(2 * b + 1) * 2 * n + 2 * b] = ONE;
        }
        z
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), Kind::Complex);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * entries.len() + i] = z;
        }
        m.normalize_kind();
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_real(&self) -> bool {
        self.kind == Kind::Real
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    /// Sets an entry; writing a value with nonzero imaginary part promotes
    /// the matrix to complex kind.
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        if z.im != 0.0 {
            self.kind = Kind::Complex;
        }
        self.data[i * self.dim + j] = z;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut t = Self::zeros(n, self.kind);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        if t.kind == Kind::Complex {
            t.data.iter_mut().for_each(|z| *z = z.conj());
        }
        t
    }

    pub fn scale(&self, z: C64) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|x| *x *= z);
        if z.im != 0.0 {
            m.kind = Kind::Complex;
        }
        m
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SquareMatrix) -> Result<f64> {
        check_dims(self, other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Returns a copy with `Kind::Real` if every imaginary part is exactly zero.
    pub fn normalized(mut self) -> Self {
        self.normalize_kind();
        self
    }

    fn normalize_kind(&mut self) {
        if self.data.iter().all(|z| z.im == 0.0) {
            self.kind = Kind::Real;
        }
    }

    /// Embeds `self` as the leading block of a larger identity matrix.
    pub fn embed_leading(&self, dim: usize) -> Self {
        let mut m = Self::identity(dim);
        m.kind = self.kind;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.data[i * dim + j] = self.get(i, j);
            }
        }
        m
    }

    /// Leading k×k sub-block.
    pub fn leading_block(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.dim);
        let mut m = Self::zeros(k, self.kind);
        for i in 0..k {
            for j in 0..k {
                m.data[i * k + j] = self.get(i, j);
            }
        }
        m
    }

    /// In-place `self ← self · R` where R is the identity except for the real
    /// plane rotation [[c, s], [-s, c]] on coordinates (p, p+1).
    pub(crate) fn right_rotate(&mut self, p: usize, c: f64, s: f64) {
        let n = self.dim;
        for r in 0..n {
            let a = self.data[r * n + p];
            let b = self.data[r * n + p + 1];
            self.data[r * n + p] = a * c - b * s;
            self.data[r * n + p + 1] = a * s + b * c;
        }
    }

    /// In-place `self ← self · G` where G is the identity except for the
    /// complex 2×2 block `g` on coordinates (p, p+1).
    pub(crate) fn right_apply_2x2(&mut self, p: usize, g: [[C64; 2]; 2]) {
        let n = self.dim;
        for r in 0..n {
            let a = self.data[r * n + p];
            let b = self.data[r * n + p + 1];
            self.data[r * n + p] = a * g[0][0] + b * g[1][0];
            self.data[r * n + p + 1] = a * g[0][1] + b * g[1][1];
        }
        if g.iter().flatten().any(|z| z.im != 0.0) {
            self.kind = Kind::Complex;
        }
    }

    /// In-place `self ← self · B` where B is the identity except for the
    /// k×k row-major block `block` starting at coordinate `offset`.
    pub(crate) fn right_apply_block(&mut self, offset: usize, k: usize, block: &[C64]) {
        debug_assert_eq!(block.len(), k * k);
        let n = self.dim;
        let mut tmp = vec![ZERO; k];
        for r in 0..n {
            let row = &mut self.data[r * n + offset..r * n + offset + k];
            for (c, t) in tmp.iter_mut().enumerate() {
                *t = (0..k).map(|m| row[m] * block[m * k + c]).sum();
            }
            row.copy_from_slice(&tmp);
        }
        if block.iter().any(|z| z.im != 0.0) {
            self.kind = Kind::Complex;
        }
    }

    /// In-place left multiplication of row `i` by a scalar.
    pub(crate) fn scale_row(&mut self, i: usize, z: C64) {
        let n = self.dim;
        self.data[i * n..(i + 1) * n].iter_mut().for_each(|x| *x *= z);
        if z.im != 0.0 {
            self.kind = Kind::Complex;
        }
    }

    pub(crate) fn scale_column(&mut self, j: usize, z: C64) {
        let n = self.dim;
        for i in 0..n {
            self.data[i * n + j] *= z;
        }
        if z.im != 0.0 {
            self.kind = Kind::Complex;
        }
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub(crate) fn force_kind(&mut self, kind: Kind) {
        self.kind = kind;
    }
}

fn check_dims(a: &SquareMatrix, b: &SquareMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

pub fn multiply(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    check_dims(a, b)?;
    let n = a.dim;
    let mut out = SquareMatrix::zeros(n, a.kind.join(b.kind));
    for i in 0..n {
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik == ZERO {
                continue;
            }
            let brow = &b.data[k * n..(k + 1) * n];
            let orow = &mut out.data[i * n..(i + 1) * n];
            for (o, &bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

pub fn add(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    check_dims(a, b)?;
    let mut out = a.clone();
    out.kind = a.kind.join(b.kind);
    out.data.iter_mut().zip(&b.data).for_each(|(x, y)| *x += y);
    Ok(out)
}

/// Max-norm of m†m − I (mᵀm − I for real matrices).
pub fn adjoint_residual(m: &SquareMatrix) -> f64 {
    let n = m.dim;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for k in 0..n {
                acc += m.data[k * n + i].conj() * m.data[k * n + j];
            }
            if i == j {
                acc -= ONE;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// Max-norm of mᵀ Z m − Z with Z = I_N ⊗ [[0, -1], [1, 0]].
pub fn symplectic_residual(m: &SquareMatrix) -> Result<f64> {
    if !m.dim.is_multiple_of(2) {
        return Err(Error::OddDimension(m.dim));
    }
    let z = SquareMatrix::quaternion_unit(m.dim / 2);
    let lhs = multiply(&multiply(&m.transpose(), &z)?, m)?;
    lhs.max_abs_diff(&z)
}

/// Max-norm of m − mᵀ.
pub fn symmetry_residual(m: &SquareMatrix) -> f64 {
    m.max_abs_diff(&m.transpose()).expect("same dimension")
}

/// Quaternion dual Z⁻¹ mᵀ Z of an even-dimensional matrix.
pub fn quaternion_dual(m: &SquareMatrix) -> Result<SquareMatrix> {
    if !m.dim.is_multiple_of(2) {
        return Err(Error::OddDimension(m.dim));
    }
    let z = SquareMatrix::quaternion_unit(m.dim / 2);
    // Z⁻¹ = Zᵀ since Z is orthogonal
    multiply(&multiply(&z.transpose(), &m.transpose())?, &z)
}

/// Max-norm of Z⁻¹ mᵀ Z − m.
pub fn self_dual_residual(m: &SquareMatrix) -> Result<f64> {
    quaternion_dual(m)?.max_abs_diff(m)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &SquareMatrix) -> C64 {
    lu_determinant(m.data.clone(), m.dim)
}

fn lu_determinant(mut a: Vec<C64>, n: usize) -> C64 {
    let mut det = ONE;
    for col in 0..n {
        let (piv, pmag) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag == 0.0 {
            return ZERO;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f == ZERO {
                continue;
            }
            for j in col + 1..n {
                let v = a[col * n + j];
                a[r * n + j] -= f * v;
            }
        }
    }
    det
}

/// det(λI − m).
pub fn charpoly_eval(m: &SquareMatrix, lambda: C64) -> C64 {
    let n = m.dim;
    let mut a: Vec<C64> = m.data.iter().map(|z| -z).collect();
    for i in 0..n {
        a[i * n + i] += lambda;
    }
    lu_determinant(a, n)
}

/// Eigenphases of a unitary-class matrix, sorted ascending in [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPhaseList {
    phases: Vec<f64>,
}

impl EigenPhaseList {
    pub fn new(mut phases: Vec<f64>) -> Result<Self> {
        if phases.iter().any(|t| !(0.0..TAU).contains(t)) {
            return Err(Error::domain("eigenphases must lie in [0, 2π)"));
        }
        phases.sort_by(f64::total_cmp);
        Ok(EigenPhaseList { phases })
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.phases
    }

    /// Groups phases closer than `tol` and returns (phase, multiplicity).
    pub fn clusters(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &t in &self.phases {
            match out.last_mut() {
                Some((p, k)) if t - *p <= tol => *k += 1,
                _ => out.push((t, 1)),
            }
        }
        out
    }
}

const CLUSTER_TOL: f64 = 1e-9;
const REAL_AXIS_TOL: f64 = 1e-12;

/// Eigenphases of a matrix whose eigenvalues lie on the unit circle.
///
/// Eigenvalues come from a Householder reduction to Hessenberg form followed
/// by Wilkinson-shifted complex QR sweeps. Phases closer than 1e-9 are
/// reported as one cluster with multiplicity. For real input the result is
/// symmetrized so the multiset is closed under θ ↦ 2π − θ.
pub fn eigenphases(m: &SquareMatrix) -> Result<EigenPhaseList> {
    let n = m.dim;
    let residual = adjoint_residual(m);
    if residual > 1e-8 * n as f64 {
        return Err(Error::NotUnitary { residual });
    }
    let eig = hessenberg_qr_eigenvalues(m.data.clone(), n)?;
    let mut phases = if m.is_real() {
        conjugate_symmetric_phases(&eig).unwrap_or_else(|| eig.iter().map(|z| phase_of(*z)).collect())
    } else {
        eig.iter().map(|z| phase_of(*z)).collect()
    };
    phases.sort_by(f64::total_cmp);
    merge_clusters(&mut phases);
    EigenPhaseList::new(phases)
}

fn phase_of(z: C64) -> f64 {
    let mut t = z.im.atan2(z.re) + 0.0;
    if t < 0.0 {
        t += TAU;
    }
    if t >= TAU - 1e-12 {
        t = 0.0;
    }
    t
}

fn conjugate_symmetric_phases(eig: &[C64]) -> Option<Vec<f64>> {
    let mut upper: Vec<f64> = Vec::new();
    let mut lower: Vec<f64> = Vec::new();
    let mut out = Vec::with_capacity(eig.len());
    for z in eig {
        if z.im > REAL_AXIS_TOL {
            upper.push(phase_of(*z));
        } else if z.im < -REAL_AXIS_TOL {
            lower.push(TAU - phase_of(*z));
        } else {
            out.push(if z.re >= 0.0 { 0.0 } else { PI });
        }
    }
    if upper.len() != lower.len() {
        return None;
    }
    upper.sort_by(f64::total_cmp);
    lower.sort_by(f64::total_cmp);
    for (u, l) in upper.iter().zip(&lower) {
        let t = 0.5 * (u + l);
        out.push(t);
        out.push(TAU - t);
    }
    Some(out)
}

fn merge_clusters(sorted: &mut [f64]) {
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] - sorted[end - 1] <= CLUSTER_TOL {
            end += 1;
        }
        if end - start > 1 {
            let mean = sorted[start..end].iter().sum::<f64>() / (end - start) as f64;
            sorted[start..end].iter_mut().for_each(|t| *t = mean);
        }
        start = end;
    }
}

/// Eigenvalues of a general complex matrix via Hessenberg reduction and
/// shifted QR. Well conditioned for the normal matrices used here.
pub(crate) fn hessenberg_qr_eigenvalues(mut a: Vec<C64>, n: usize) -> Result<Vec<C64>> {
    reduce_to_hessenberg(&mut a, n);
    let mut eig = Vec::with_capacity(n);
    let mut hi = n;
    let mut iterations = 0usize;
    let mut total = 0usize;
    let max_total = 100 * n.max(1);
    while hi > 0 {
        let h = hi - 1;
        // find the start of the unreduced block ending at row h
        let mut l = h;
        while l > 0 {
            let sub = a[l * n + l - 1].norm();
            let scale = a[l * n + l].norm() + a[(l - 1) * n + l - 1].norm();
            if sub <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                a[l * n + l - 1] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == h {
            eig.push(a[h * n + h]);
            hi -= 1;
            iterations = 0;
            continue;
        }
        iterations += 1;
        total += 1;
        if total > max_total {
            return Err(Error::NoConvergence { iterations: total });
        }
        let shift = if iterations.is_multiple_of(11) {
            // exceptional shift to break cycles
            a[h * n + h] + C64::new(0.75 * a[h * n + h - 1].norm(), 0.0)
        } else {
            wilkinson_shift(
                a[(h - 1) * n + h - 1],
                a[(h - 1) * n + h],
                a[h * n + h - 1],
                a[h * n + h],
            )
        };
        qr_sweep(&mut a, n, l, h, shift);
    }
    Ok(eig)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_sweep(a: &mut [C64], n: usize, lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        a[i * n + i] -= shift;
    }
    let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let x = a[k * n + k];
        let y = a[(k + 1) * n + k];
        let (c, s) = givens(x, y);
        for j in k..=hi {
            let u = a[k * n + j];
            let v = a[(k + 1) * n + j];
            a[k * n + j] = u * c + s * v;
            a[(k + 1) * n + j] = -s.conj() * u + v * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let top = (k + 2).min(hi);
        for r in lo..=top {
            let u = a[r * n + k];
            let v = a[r * n + k + 1];
            a[r * n + k] = u * c + v * s.conj();
            a[r * n + k + 1] = -u * s + v * c;
        }
    }
    for i in lo..=hi {
        a[i * n + i] += shift;
    }
}

/// Rotation [[c, s], [-s̄, c]] with real c mapping (x, y) to (r, 0).
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn reduce_to_hessenberg(a: &mut [C64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|r| a[r * n + k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for r in k + 1..n {
            v[r] = a[r * n + k];
        }
        v[k + 1] -= alpha;
        let vnorm: f64 = (k + 1..n).map(|r| v[r].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for r in k + 1..n {
            v[r] /= vnorm;
        }
        // A ← H A with H = I − 2vv†
        for c in k..n {
            let dot: C64 = (k + 1..n).map(|s| v[s].conj() * a[s * n + c]).sum();
            for r in k + 1..n {
                a[r * n + c] -= v[r] * dot * 2.0;
            }
        }
        // A ← A H
        for r in 0..n {
            let dot: C64 = (k + 1..n).map(|s| a[r * n + s] * v[s]).sum();
            for c in k + 1..n {
                a[r * n + c] -= dot * v[c].conj() * 2.0;
            }
        }
        for r in k + 2..n {
            a[r * n + k] = ZERO;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot2(theta: f64) -> SquareMatrix {
        let (s, c) = theta.sin_cos();
        SquareMatrix::from_rows_real(&[&[c, s], &[-s, c]]).unwrap()
    }

    fn lcg_matrix(n: usize, seed: u64) -> SquareMatrix {
        let mut x = seed;
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 11) as f64) / (1u64 << 53) as f64 - 0.5
        };
        let data = (0..n * n).map(|_| C64::new(next(), next())).collect();
        SquareMatrix::from_complex(n, data).unwrap()
    }

    fn naive_product(a: &SquareMatrix, b: &SquareMatrix) -> Vec<C64> {
        let n = a.dim();
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[i * n + j] += a.get(i, k) * b.get(k, j);
                }
            }
        }
        out
    }

    fn cofactor_det(m: &[C64], n: usize) -> C64 {
        if n == 1 {
            return m[0];
        }
        let mut total = ZERO;
        for j in 0..n {
            let minor: Vec<C64> = (1..n)
                .flat_map(|r| (0..n).filter(move |&c| c != j).map(move |c| (r, c)))
                .map(|(r, c)| m[r * n + c])
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            total += m[j] * sign * cofactor_det(&minor, n - 1);
        }
        total
    }

    #[test]
    fn identity_is_multiplicative_unit() {
        let a = lcg_matrix(3, 1);
        let p = multiply(&SquareMatrix::identity(3), &a).unwrap();
        assert_eq!(p, a);
    }

    #[test]
    fn quarter_turn_squared_is_half_turn() {
        let r = rot2(std::f64::consts::FRAC_PI_2);
        let p = multiply(&r, &r).unwrap();
        let expect = SquareMatrix::from_rows_real(&[&[-1.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert!(p.max_abs_diff(&expect).unwrap() < 1e-15);
        assert!(p.is_real());
    }

    #[test]
    fn product_matches_triple_loop() {
        let a = lcg_matrix(4, 2);
        let b = lcg_matrix(4, 3);
        let p = multiply(&a, &b).unwrap();
        let q = naive_product(&a, &b);
        for (x, y) in p.entries().iter().zip(&q) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn product_rejects_mismatched_dims() {
        let err = multiply(&SquareMatrix::identity(2), &SquareMatrix::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 3 });
    }

    #[test]
    fn adjoint_residual_cases() {
        assert_eq!(adjoint_residual(&SquareMatrix::identity(5)), 0.0);
        for k in 0..20 {
            assert!(adjoint_residual(&rot2(0.37 * k as f64)) <= 1e-15);
        }
        let d = SquareMatrix::from_rows_real(&[&[2.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert_eq!(adjoint_residual(&d), 3.0);
    }

    #[test]
    fn determinant_cases() {
        assert_eq!(determinant(&SquareMatrix::identity(4)), ONE);
        assert!((determinant(&rot2(1.1)) - ONE).norm() < 1e-15);
        for seed in 0..5 {
            let m = lcg_matrix(5, 10 + seed);
            let d = determinant(&m);
            let oracle = cofactor_det(m.entries(), 5);
            assert!((d - oracle).norm() <= 1e-10 * (1.0 + oracle.norm()), "{d} vs {oracle}");
        }
    }

    #[test]
    fn charpoly_cases() {
        assert_eq!(charpoly_eval(&SquareMatrix::identity(2), ONE), ZERO);
        let zero = SquareMatrix::zeros(2, Kind::Real);
        let lam = C64::new(0.3, -1.7);
        assert!((charpoly_eval(&zero, lam) - lam * lam).norm() < 1e-15);
        // orthogonal 4x4: product of two rotation blocks
        let mut q = SquareMatrix::identity(4);
        q.right_rotate(0, 0.2f64.cos(), 0.2f64.sin());
        q.right_rotate(1, 1.3f64.cos(), 1.3f64.sin());
        q.right_rotate(2, 2.9f64.cos(), 2.9f64.sin());
        let lam = C64::new(2.0, 0.0);
        let mut shifted: Vec<C64> = q.entries().iter().map(|z| -z).collect();
        for i in 0..4 {
            shifted[i * 4 + i] += lam;
        }
        let oracle = cofactor_det(&shifted, 4);
        assert!((charpoly_eval(&q, lam) - oracle).norm() < 1e-10);
    }

    #[test]
    fn eigenphases_of_simple_matrices() {
        let e = eigenphases(&SquareMatrix::identity(3)).unwrap();
        assert_eq!(e.phases(), &[0.0, 0.0, 0.0]);
        assert_eq!(e.clusters(1e-9), vec![(0.0, 3)]);

        let theta = 1.234;
        let e = eigenphases(&rot2(theta)).unwrap();
        assert!((e.phases()[0] - theta).abs() < 1e-12);
        assert!((e.phases()[1] - (TAU - theta)).abs() < 1e-12);

        let swap = SquareMatrix::from_rows_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = eigenphases(&swap).unwrap();
        assert_eq!(e.phases(), &[0.0, PI]);
    }

    #[test]
    fn eigenphases_reject_non_unitary() {
        let d = SquareMatrix::from_rows_real(&[&[2.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(eigenphases(&d), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn symplectic_residual_cases() {
        let z = SquareMatrix::quaternion_unit(1);
        assert_eq!(symplectic_residual(&z).unwrap(), 0.0);
        assert_eq!(symplectic_residual(&SquareMatrix::identity(6)).unwrap(), 0.0);
        assert_eq!(
            symplectic_residual(&SquareMatrix::identity(3)),
            Err(Error::OddDimension(3))
        );
    }

    #[test]
    fn hessenberg_reduction_preserves_spectrum_of_diagonal_conjugate() {
        // a unitary with known spectrum: Q D Q† where Q is a product of rotations
        let phases = [0.3, 1.9, 2.5, 4.0, 5.5];
        let d = SquareMatrix::diagonal(&phases.map(|t| C64::from_polar(1.0, t)));
        let mut q = SquareMatrix::identity(5);
        for (p, t) in [(0, 0.4), (1, 1.2), (2, 2.2), (3, 0.9), (0, 2.7), (2, 0.5)] {
            q.right_rotate(p, f64::cos(t), f64::sin(t));
        }
        let m = multiply(&multiply(&q, &d).unwrap(), &q.adjoint()).unwrap();
        let e = eigenphases(&m).unwrap();
        for (a, b) in e.phases().iter().zip(phases) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
