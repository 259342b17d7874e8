//! Numerical quadrature: adaptive Gauss–Kronrod (7, 15) in one and two
//! dimensions and tensor Gauss–Legendre for smooth low-dimensional volumes.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, whole: (f64, f64), depth: u32) -> f64 {
    let (value, err) = whole;
    if err <= tol || depth == 0 || (b - a).abs() < 1e-14 * a.abs().max(1.0) {
        return value;
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    adapt(f, a, m, 0.5 * tol, left, depth - 1) + adapt(f, m, b, 0.5 * tol, right, depth - 1)
}

/// ∫_a^b f by adaptive bisection with a Gauss–Kronrod 7–15 pair, to absolute
/// tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = gk15(&f, a, b);
    adapt(&f, a, b, tol, whole, 40)
}

/// ∫∫ f(x, y) over a rectangle by nested one-dimensional adaptive rules.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(f: F, x: (f64, f64), y: (f64, f64), tol: f64) -> f64 {
    let width = (y.1 - y.0).abs().max(1e-300);
    integrate(|u| integrate(|v| f(u, v), y.0, y.1, 0.1 * tol / width), x.0, x.1, tol)
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Tensor-product Gauss–Legendre with `points` nodes per axis.
pub fn tensor_integrate<F: Fn(&[f64]) -> f64>(f: &F, bounds: &[(f64, f64)], points: usize) -> f64 {
    let (x, w) = gauss_legendre(points);
    let d = bounds.len();
    let mut idx = vec![0usize; d];
    let mut pt = vec![0.0; d];
    let scale: f64 = bounds.iter().map(|(a, b)| 0.5 * (b - a)).product();
    let mut total = 0.0;
    loop {
        let mut weight = 1.0;
        for k in 0..d {
            let (a, b) = bounds[k];
            pt[k] = 0.5 * (a + b) + 0.5 * (b - a) * x[idx[k]];
            weight *= w[idx[k]];
        }
        total += weight * f(&pt);
        let mut k = 0;
        loop {
            if k == d {
                return total * scale;
            }
            idx[k] += 1;
            if idx[k] < points {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Tensor rule at `points` and `2·points` nodes per axis. Returns the finer
/// value and the relative change between the two, which bounds the error
/// of the coarser one for rapidly converging smooth integrands.
pub fn tensor_integrate_checked<F: Fn(&[f64]) -> f64>(f: &F, bounds: &[(f64, f64)], points: usize) -> (f64, f64) {
    let coarse = tensor_integrate(f, bounds, points);
    let fine = tensor_integrate(f, bounds, 2 * points);
    (fine, ((fine - coarse) / fine).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn one_dimensional_rules() {
        assert!((integrate(|x: f64| x.sin(), 0.0, PI, 1e-12) - 2.0).abs() < 1e-12);
        assert!((integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12) - 2.0 / 3.0).abs() < 1e-11);
        assert!((integrate(|x: f64| (x.sin() * x.cos()).abs(), 0.0, PI, 1e-12) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            // exact for polynomials of degree 2n − 1
            let deg = 2 * n - 2;
            let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((v - 2.0 / (deg + 1) as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn tensor_rule_volume() {
        let f = |p: &[f64]| p[0].sin() * p[1].cos().powi(2) * (1.0 + p[2]);
        let (v, rel) = tensor_integrate_checked(&f, &[(0.0, PI), (0.0, PI), (0.0, 1.0)], 16);
        assert!((v - 2.0 * (PI / 2.0) * 1.5).abs() < 1e-12);
        assert!(rel < 1e-12);
    }

    #[test]
    fn two_dimensional_rule() {
        let v = integrate_2d(|x, y| x * y, (0.0, 1.0), (0.0, 2.0), 1e-12);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
