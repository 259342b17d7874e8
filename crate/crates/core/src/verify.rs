//! The verification suite: twelve reproducible checks of the samplers and
//! closed forms. Each check draws from its own block of stream ids, so the
//! outcome depends only on the seed.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::analytics::montecarlo::{diagonal_corner_samples, first_coordinate, moment_report};
use crate::analytics::quad::{integrate, tensor_integrate_checked};
use crate::analytics::stats::{chi_square, ks_test, ks_two_sample, poisson_one_bins, DEFAULT_LEVEL};
use crate::analytics::{
    coe_normalization, cue_normalization, moment_joint, moment_single, reynolds_average, so_volume_ratio,
    sphere_area, u_volume_ratio, volume, MomentSpec, TestReport, VolumeTag,
};
use crate::euler::{density_so, density_u, EulerAnglesSO, EulerAnglesU};
use crate::linalg::{
    adjoint_residual, charpoly_eval, determinant, eigenphases, self_dual_residual, symmetry_residual,
    symplectic_residual, SquareMatrix, C64,
};
use crate::rng::{batch, RandomStream};
use crate::samplers::{
    coe_sample, cse_sample, haar_householder, haar_o_euler, haar_qr, haar_so_euler, haar_sp_euler,
    haar_u_euler, sample_permutation, GroupId, PermutationWord,
};
use crate::spectra::{
    charpoly_recurrence, cmv_matrix, hessenberg_e, rotation_product, trace_series_perm, trace_series_so,
    HessenbergCoeffs, TraceForm,
};

/// Seed of the fixed group elements Q₀ used by the invariance check.
pub const INVARIANCE_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub reports: Vec<TestReport>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {:<28} {}  {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

/// Settings shared by all checks.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub lanes: usize,
    pub level: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 1,
            lanes: 8,
            level: DEFAULT_LEVEL,
        }
    }
}

impl VerifyConfig {
    /// First stream id of sub-block `part` of criterion `id`.
    fn stream(&self, id: u32, part: u32) -> u64 {
        (u64::from(id) << 32) | (u64::from(part) << 16)
    }

    fn draw<T: Send>(&self, id: u32, part: u32, count: usize, f: impl Fn(&mut RandomStream) -> T + Sync) -> Vec<T> {
        batch(self.seed, self.stream(id, part), self.lanes, count, f)
    }
}

struct Builder {
    id: u32,
    name: &'static str,
    pass: bool,
    notes: Vec<String>,
    reports: Vec<TestReport>,
}

impl Builder {
    fn new(id: u32, name: &'static str) -> Self {
        Builder {
            id,
            name,
            pass: true,
            notes: Vec::new(),
            reports: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, note: String) {
        if !ok {
            self.pass = false;
            self.notes.push(format!("failed: {note}"));
        }
    }

    fn report(&mut self, label: &str, r: TestReport) {
        if !r.pass {
            self.pass = false;
            self.notes.push(format!(
                "failed: {label} statistic {:.4e} > critical {:.4e}",
                r.statistic, r.critical
            ));
        }
        self.reports.push(r);
    }

    fn error(&mut self, label: &str, e: crate::Error) {
        self.pass = false;
        self.notes.push(format!("error in {label}: {e}"));
    }

    fn finish(self, summary: String) -> CriterionResult {
        let detail = if self.notes.is_empty() {
            summary
        } else {
            format!("{summary}; {}", self.notes.join("; "))
        };
        CriterionResult {
            id: self.id,
            name: self.name,
            pass: self.pass,
            detail,
            reports: self.reports,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// 1. Entry moments ⟨X_{NN}^{2p}⟩ over Haar SO(N), N = 2..8, p ∈ {½, 1, 2, 3}.
pub fn moment_oracle(cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(1, "moment oracle");
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=8usize {
        let corners = diagonal_corner_samples(cfg.seed, cfg.stream(1, n as u32), cfg.lanes, n, 100_000);
        for p in [0.5, 1.0, 2.0, 3.0] {
            match MomentSpec::new(n, p, 0.0).and_then(|spec| moment_report(spec, &corners)) {
                Ok(r) => {
                    worst = worst.max(r.z_score);
                    b.check(r.pass, format!("N={n} p={p} z={:.2}", r.z_score));
                }
                Err(e) => b.error("moment", e),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    b.check(secs <= 60.0, format!("runtime {secs:.1}s exceeds 60s"));
    b.finish(format!("28 moments, max |z| = {worst:.2}, {secs:.1}s"))
}

/// 2. The joint moment at (3, 1, 1) by Monte Carlo and the q = 0 reduction.
pub fn joint_moment_oracle(cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(2, "joint-moment oracle");
    let corners = diagonal_corner_samples(cfg.seed, cfg.stream(2, 0), cfg.lanes, 3, 1_000_000);
    let mut z = f64::NAN;
    match MomentSpec::new(3, 1.0, 1.0).and_then(|spec| moment_report(spec, &corners)) {
        Ok(r) => {
            z = r.z_score;
            b.check(rel(r.exact, 2.0 / 15.0) <= 1e-14, format!("exact value {}", r.exact));
            b.check(r.pass, format!("MC estimate {} vs 2/15, z={:.2}", r.estimate, r.z_score));
        }
        Err(e) => b.error("joint moment", e),
    }
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        for p in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
            let (j, s) = (moment_joint(n, p, 0.0), moment_single(n, p));
            if let (Ok(j), Ok(s)) = (j, s) {
                worst = worst.max(rel(j, s));
            } else {
                b.check(false, format!("evaluation failed at N={n}, p={p}"));
            }
        }
    }
    b.check(worst <= 1e-14, format!("reduction deviation {worst:e}"));
    b.finish(format!("MC z = {z:.2}, reduction deviation {worst:.1e}"))
}

/// 3. Quadrature of the Euler-angle densities against the closed-form
/// volumes, plus the sphere-area ratio identities.
pub fn volumes(_cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(3, "volumes");
    let so = |n: usize, p: &[f64]| {
        let mut it = p.iter();
        EulerAnglesSO::from_fn(n, |_, _| *it.next().unwrap())
            .and_then(|a| density_so(&a))
            .unwrap_or(f64::NAN)
    };
    let cases: Vec<(&str, f64, f64, f64)> = vec![
        {
            let (v, r) = tensor_integrate_checked(&|p: &[f64]| so(2, p), &[(0.0, TAU)], 8);
            ("SO(2)", v, r, volume(VolumeTag::SO(2)).unwrap_or(f64::NAN))
        },
        {
            // angle order θ₁₂, θ₁₃, θ₂₃
            let (v, r) = tensor_integrate_checked(&|p: &[f64]| so(3, p), &[(0.0, TAU), (0.0, TAU), (0.0, PI)], 12);
            ("SO(3)", v, r, volume(VolumeTag::SO(3)).unwrap_or(f64::NAN))
        },
        {
            let f = |p: &[f64]| {
                let mut a = EulerAnglesU::zeros(1);
                a.set_alpha(1, p[0]).and_then(|_| density_u(&a)).unwrap_or(f64::NAN)
            };
            let (v, r) = tensor_integrate_checked(&f, &[(0.0, TAU)], 8);
            ("U(1)", v, r, volume(VolumeTag::U(1)).unwrap_or(f64::NAN))
        },
        {
            let f = |p: &[f64]| {
                let mut a = EulerAnglesU::zeros(2);
                a.set_pair(1, 2, p[0], p[1])
                    .and_then(|_| a.set_alpha(1, p[2]))
                    .and_then(|_| a.set_alpha(2, p[3]))
                    .and_then(|_| density_u(&a))
                    .unwrap_or(f64::NAN)
            };
            let (v, r) = tensor_integrate_checked(&f, &[(0.0, FRAC_PI_2), (0.0, TAU), (0.0, TAU), (0.0, TAU)], 10);
            ("U(2)", v, r, volume(VolumeTag::U(2)).unwrap_or(f64::NAN))
        },
    ];
    let mut worst: f64 = 0.0;
    for (name, v, refine, exact) in &cases {
        let e = rel(*v, *exact);
        worst = worst.max(e);
        b.check(e <= 1e-6, format!("{name}: quadrature {v} vs {exact}"));
        b.check(*refine <= 1e-6, format!("{name}: refinement change {refine:e}"));
    }
    let mut ratio_worst: f64 = 0.0;
    for n in 2..=20 {
        let r1 = so_volume_ratio(n).and_then(|r| sphere_area(n, 2f64.sqrt()).map(|a| rel(r, a)));
        let r2 = u_volume_ratio(n).and_then(|r| sphere_area(2 * n, 2f64.sqrt()).map(|a| rel(r, a / 2f64.sqrt())));
        match (r1, r2) {
            (Ok(x), Ok(y)) => ratio_worst = ratio_worst.max(x).max(y),
            _ => b.check(false, format!("ratio evaluation failed at N={n}")),
        }
    }
    b.check(ratio_worst <= 1e-12, format!("ratio identity deviation {ratio_worst:e}"));
    b.finish(format!(
        "volume deviation {worst:.1e}, ratio deviation {ratio_worst:.1e}"
    ))
}

/// Raw ∫∫ |e^{ia} − e^{ib}|^β over [0, 2π)², split along the diagonal kink.
pub fn raw_pair_integral(beta: f64) -> f64 {
    let f = |a: f64, c: f64| (2.0 * ((a - c) / 2.0).sin().abs()).powf(beta);
    integrate(
        |a| integrate(|c| f(a, c), 0.0, a, 1e-13) + integrate(|c| f(a, c), a, TAU, 1e-13),
        0.0,
        TAU,
        1e-11,
    )
}

/// 4. The circular-ensemble normalizations at N = 2.
pub fn normalizations(_cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(4, "normalizations");
    let raw1 = raw_pair_integral(1.0);
    let raw2 = raw_pair_integral(2.0);
    let c2 = coe_normalization(2).unwrap_or(f64::NAN);
    let ct2 = cue_normalization(2).unwrap_or(f64::NAN);
    let checks = [
        ("raw β=1 vs 16π", rel(raw1, 16.0 * PI)),
        ("raw β=2 vs 8π²", rel(raw2, 8.0 * PI * PI)),
        ("C₂ vs 4/π", rel(c2, 4.0 / PI)),
        ("raw/(2π)² vs C₂", rel(raw1 / (TAU * TAU), c2)),
        ("C̃₂ vs raw", rel(ct2, raw2)),
    ];
    let mut worst: f64 = 0.0;
    for (label, e) in checks {
        worst = worst.max(e);
        b.check(e <= 1e-8, format!("{label}: relative {e:e}"));
    }
    b.finish(format!("raw β=1 {raw1:.10}, raw β=2 {raw2:.10}, max deviation {worst:.1e}"))
}

fn det_conditioned(cfg: &VerifyConfig, id: u32, part: u32, count: usize, draw: fn(&mut RandomStream) -> SquareMatrix) -> Vec<SquareMatrix> {
    // each lane rejects det = −1 draws until it has its share
    cfg.draw(id, part, count, move |s| loop {
        let x = draw(s);
        if determinant(&x).re > 0.0 {
            return x;
        }
    })
}

/// 5. Euler, QR and Householder samplers of SO(6) agree.
pub fn cross_sampler(cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(5, "cross-sampler equivalence");
    let n = 6;
    let count = 10_000;
    let euler = cfg.draw(5, 0, count, |s| haar_so_euler(s, n));
    let qr = det_conditioned(cfg, 5, 1, count, |s| haar_qr(s, GroupId::O(6)).expect("O(N) supported"));
    let hh = det_conditioned(cfg, 5, 2, count, |s| haar_householder(s, GroupId::O(6)).expect("O(N) supported"));
    let sets = [("euler", &euler), ("qr", &qr), ("householder", &hh)];
    for i in 0..3 {
        for j in i + 1..3 {
            for (stat, f) in [
                ("trace", (|m: &SquareMatrix| m.trace().re) as fn(&SquareMatrix) -> f64),
                ("entry(1,1)", |m: &SquareMatrix| m.get(0, 0).re),
            ] {
                let a: Vec<f64> = sets[i].1.iter().map(f).collect();
                let c: Vec<f64> = sets[j].1.iter().map(f).collect();
                match ks_two_sample(&a, &c, cfg.level) {
                    Ok(r) => b.report(&format!("{} vs {} {stat}", sets[i].0, sets[j].0), r),
                    Err(e) => b.error("ks", e),
                }
            }
        }
    }
    let max = b.reports.iter().map(|r| r.statistic / r.critical).fold(0.0, f64::max);
    b.finish(format!("6 two-sample KS tests, max D/critical = {max:.3}"))
}

fn phase_summaries(m: &SquareMatrix) -> (f64, f64) {
    let e = eigenphases(m).expect("orthogonal input");
    let smallest = e.phases()[0];
    let largest_upper = e.phases().iter().copied().filter(|&t| t <= PI).fold(0.0, f64::max);
    (smallest, largest_upper)
}

/// 6. Full product, Hessenberg and CMV models share the SO(6) spectrum law.
pub fn spectral_equivalence(cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(6, "spectral equivalence");
    let n = 6;
    let count = 10_000;
    let full = cfg.draw(6, 0, count, |s| phase_summaries(&haar_so_euler(s, n)));
    let hess = cfg.draw(6, 1, count, |s| {
        let m = hessenberg_e(s, n);
        let above = (0..n)
            .flat_map(|i| (i + 2..n).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).norm())
            .fold(0.0, f64::max);
        (phase_summaries(&m), above)
    });
    let cmv = cfg.draw(6, 2, count, |s| {
        let m = cmv_matrix(s, n);
        let outside = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i.abs_diff(*j) > 2)
            .map(|(i, j)| m.get(i, j).norm())
            .fold(0.0, f64::max);
        (phase_summaries(&m), outside)
    });
    let hess_zero = hess.iter().map(|x| x.1).fold(0.0, f64::max);
    let cmv_zero = cmv.iter().map(|x| x.1).fold(0.0, f64::max);
    b.check(hess_zero <= 1e-15, format!("Hessenberg pattern violation {hess_zero:e}"));
    b.check(cmv_zero <= 1e-15, format!("CMV bandwidth violation {cmv_zero:e}"));
    let sets: [(&str, Vec<(f64, f64)>); 3] = [
        ("full", full),
        ("hessenberg", hess.into_iter().map(|x| x.0).collect()),
        ("cmv", cmv.into_iter().map(|x| x.0).collect()),
    ];
    for i in 0..3 {
        for j in i + 1..3 {
            for (stat, pick) in [("smallest phase", 0usize), ("largest phase in [0,π]", 1)] {
                let get = |v: &(f64, f64)| if pick == 0 { v.0 } else { v.1 };
                let a: Vec<f64> = sets[i].1.iter().map(get).collect();
                let c: Vec<f64> = sets[j].1.iter().map(get).collect();
                match ks_two_sample(&a, &c, cfg.level) {
                    Ok(r) => b.report(&format!("{} vs {} {stat}", sets[i].0, sets[j].0), r),
                    Err(e) => b.error("ks", e),
                }
            }
        }
    }
    let max = b.reports.iter().map(|r| r.statistic / r.critical).fold(0.0, f64::max);
    b.finish(format!(
        "6 two-sample KS tests, max D/critical = {max:.3}; zero patterns {hess_zero:.0e}/{cmv_zero:.0e}"
    ))
}

/// 7. The α-recurrence reproduces det(λI − E_{N−1}).
pub fn recurrence_oracle(cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(7, "recurrence oracle");
    let mut s = RandomStream::new(cfg.seed, cfg.stream(7, 0));
    let mut worst: f64 = 0.0;
    for set in 0..100 {
        let n = 1 + set % 10;
        let c = HessenbergCoeffs::new((1..n).map(|_| 2.0 * s.unit() - 1.0).collect()).expect("in range");
        let e = rotation_product(&c);
        for _ in 0..20 {
            let lam = C64::from_polar(2.0 * s.unit(), s.angle());
            let err = (charpoly_recurrence(&c, lam) - charpoly_eval(&e, lam)).norm();
            let scaled = err / (1.0 + lam.norm()).powi(n as i32);
            worst = worst.max(scaled);
        }
    }
    b.check(worst <= 1e-10, format!("scaled error {worst:e}"));
    b.finish(format!("2000 evaluations, max scaled error {worst:.1e}"))
}

/// 8. Normal limit of the trace series; Poisson(1) limits of the
/// permutation series and of fixed-point counts.
pub fn limit_laws(cfg: &VerifyConfig) -> CriterionResult {
    use statrs::distribution::{ContinuousCDF, Normal};
    let mut b = Builder::new(8, "limit laws");
    let z = cfg.draw(8, 0, 100_000, |s| trace_series_so(s, 200, TraceForm::Series).expect("terms ≥ 2"));
    let normal = Normal::standard();
    match ks_test(&z, |x| normal.cdf(x), cfg.level) {
        Ok(r) => b.report("trace series vs N(0,1)", r),
        Err(e) => b.error("ks", e),
    }
    let bins = 6;
    let expected = poisson_one_bins(bins, 100_000.0);
    let tally = |xs: Vec<usize>| {
        let mut counts = vec![0u64; bins];
        for x in xs {
            counts[x.min(bins - 1)] += 1;
        }
        counts
    };
    let perm = tally(cfg.draw(8, 1, 100_000, |s| trace_series_perm(s, 500).expect("terms ≥ 2") as usize));
    match chi_square(&perm, &expected, cfg.level) {
        Ok(r) => b.report("permutation series vs Poisson(1)", r),
        Err(e) => b.error("chi-square", e),
    }
    let fixed = tally(cfg.draw(8, 2, 100_000, |s| sample_permutation(s, 50).fixed_points()));
    match chi_square(&fixed, &expected, cfg.level) {
        Ok(r) => b.report("fixed points of S_50 vs Poisson(1)", r),
        Err(e) => b.error("chi-square", e),
    }
    let r = &b.reports;
    let summary = if r.len() == 3 {
        format!(
            "KS {:.4}/{:.4}, χ² {:.2}/{:.2}, χ² {:.2}/{:.2}",
            r[0].statistic, r[0].critical, r[1].statistic, r[1].critical, r[2].statistic, r[2].critical
        )
    } else {
        "incomplete".to_string()
    };
    b.finish(summary)
}

/// Exact probability of each permutation of N under the bubble-sort bits,
/// as (one-line notation, numerator) over a common denominator.
pub fn exact_permutation_weights(n: usize) -> (Vec<(Vec<usize>, u64)>, u64) {
    let nbits = n * n.saturating_sub(1) / 2;
    let levels: Vec<u64> = (1..n).flat_map(|j| 1..=j as u64).collect();
    let denom: u64 = levels.iter().map(|l| l + 1).product();
    let mut weights = std::collections::BTreeMap::new();
    for mask in 0u64..(1u64 << nbits) {
        let bits: Vec<bool> = (0..nbits).map(|i| mask >> i & 1 == 1).collect();
        let w: u64 = bits.iter().zip(&levels).map(|(&bit, &l)| if bit { l } else { 1 }).product();
        let p = PermutationWord::from_bits(n, bits).expect("bit count matches");
        *weights.entry(p.one_line()).or_insert(0) += w;
    }
    (weights.into_iter().collect(), denom)
}

/// 9. Exact uniformity at N = 4 and an empirical check at N = 6.
pub fn permutation_uniformity(cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(9, "permutation uniformity");
    let (weights, denom) = exact_permutation_weights(4);
    b.check(weights.len() == 24, format!("{} distinct permutations", weights.len()));
    let exact = weights.iter().all(|(_, w)| w * 24 == denom);
    b.check(exact, "a weight differs from 1/24".to_string());

    let count = 100_000;
    let perms = cfg.draw(9, 0, count, |s| sample_permutation(s, 6).one_line());
    let mut index = std::collections::HashMap::new();
    let mut counts: Vec<u64> = Vec::new();
    for p in perms {
        let next = index.len();
        let k = *index.entry(p).or_insert(next);
        if k == counts.len() {
            counts.push(0);
        }
        counts[k] += 1;
    }
    counts.resize(720, 0);
    let expected = vec![count as f64 / 720.0; 720];
    match chi_square(&counts, &expected, cfg.level) {
        Ok(r) => b.report("S_6 chi-square", r),
        Err(e) => b.error("chi-square", e),
    }
    let chi = b.reports.first().map(|r| (r.statistic, r.critical)).unwrap_or((f64::NAN, f64::NAN));
    b.finish(format!(
        "N=4 weights all {}/{denom} = 1/24; S_6 χ² {:.1}/{:.1}",
        denom / 24,
        chi.0,
        chi.1
    ))
}

/// 10. Defining relations of every emitted matrix.
pub fn structural_residuals(cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(10, "structural residuals");
    let per = 200;
    let mut worst = [0.0f64; 5];
    for n in 1..=8usize {
        let nf = n as f64;
        let part = n as u32 * 16;
        let orth: Vec<(&str, Vec<SquareMatrix>)> = vec![
            ("so-euler", cfg.draw(10, part, per, |s| haar_so_euler(s, n))),
            ("o-euler", cfg.draw(10, part + 1, per, |s| haar_o_euler(s, n))),
            ("u-euler", cfg.draw(10, part + 2, per, |s| haar_u_euler(s, n))),
            ("o-qr", cfg.draw(10, part + 3, per, |s| haar_qr(s, GroupId::O(n)).unwrap())),
            ("u-qr", cfg.draw(10, part + 4, per, |s| haar_qr(s, GroupId::U(n)).unwrap())),
            ("o-householder", cfg.draw(10, part + 5, per, |s| haar_householder(s, GroupId::O(n)).unwrap())),
            ("u-householder", cfg.draw(10, part + 6, per, |s| haar_householder(s, GroupId::U(n)).unwrap())),
            ("permutation", cfg.draw(10, part + 7, per, |s| sample_permutation(s, n).to_matrix())),
            ("coe", cfg.draw(10, part + 8, per, |s| coe_sample(s, n))),
        ];
        for (name, ms) in &orth {
            let r = ms.iter().map(adjoint_residual).fold(0.0, f64::max);
            worst[0] = worst[0].max(r / nf);
            b.check(r <= 1e-13 * nf, format!("{name} N={n}: unitarity residual {r:e}"));
        }
        if n >= 2 {
            for (name, ms) in [
                ("hessenberg", cfg.draw(10, part + 9, per, |s| hessenberg_e(s, n))),
                ("cmv", cfg.draw(10, part + 10, per, |s| cmv_matrix(s, n))),
            ] {
                let r = ms.iter().map(adjoint_residual).fold(0.0, f64::max);
                worst[0] = worst[0].max(r / nf);
                b.check(r <= 1e-13 * nf, format!("{name} N={n}: orthogonality residual {r:e}"));
            }
        }
        let coe = &orth[8].1;
        let sym = coe.iter().map(symmetry_residual).fold(0.0, f64::max);
        worst[1] = worst[1].max(sym);
        b.check(sym <= 1e-13, format!("coe N={n}: symmetry residual {sym:e}"));

        if n <= 4 {
            let sp = cfg.draw(10, part + 11, per, |s| haar_sp_euler(s, n));
            for m in &sp {
                let u = adjoint_residual(m);
                let z = symplectic_residual(m).unwrap_or(f64::INFINITY);
                worst[0] = worst[0].max(u / nf);
                worst[2] = worst[2].max(z / nf);
                b.check(u <= 1e-12 * nf, format!("sp N={n}: unitarity residual {u:e}"));
                b.check(z <= 1e-12 * nf, format!("sp N={n}: symplectic residual {z:e}"));
            }
            let cse = cfg.draw(10, part + 12, per, |s| cse_sample(s, n));
            for m in &cse {
                let d = self_dual_residual(m).unwrap_or(f64::INFINITY);
                worst[3] = worst[3].max(d);
                b.check(d <= 1e-12, format!("cse N={n}: self-duality residual {d:e}"));
                match eigenphases(m) {
                    Ok(e) => {
                        let paired = e.clusters(1e-8).iter().all(|(_, k)| k % 2 == 0);
                        if !paired {
                            worst[4] += 1.0;
                        }
                        b.check(paired, format!("cse N={n}: unpaired eigenphase"));
                    }
                    Err(err) => b.error("cse eigenphases", err),
                }
            }
        }
    }
    // keep the failure list short if something is systematically wrong
    b.notes.truncate(8);
    b.finish(format!(
        "max unitarity/N {:.1e}, COE symmetry {:.1e}, symplectic/N {:.1e}, CSE self-duality {:.1e}, unpaired {}",
        worst[0], worst[1], worst[2], worst[3], worst[4]
    ))
}

fn entry11_left(q0: &SquareMatrix, x: &SquareMatrix) -> f64 {
    (0..x.dim()).map(|k| q0.get(0, k) * x.get(k, 0)).sum::<C64>().re
}

/// 11. Left multiplication by a fixed group element leaves the law of
/// entry (1, 1) unchanged, for every matrix sampler at N = 5.
pub fn haar_invariance(cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(11, "haar invariance");
    let n = 5;
    let count = 10_000;
    let mut qs = RandomStream::new(INVARIANCE_SEED, 0);
    let q_so = haar_so_euler(&mut qs, n);
    let q_o = haar_o_euler(&mut qs, n);
    let q_u = haar_u_euler(&mut qs, n);
    let q_sp = haar_sp_euler(&mut qs, n);
    type Draw = fn(&mut RandomStream) -> SquareMatrix;
    let samplers: [(&str, &SquareMatrix, Draw); 8] = [
        ("so-euler", &q_so, |s| haar_so_euler(s, 5)),
        ("o-euler", &q_o, |s| haar_o_euler(s, 5)),
        ("u-euler", &q_u, |s| haar_u_euler(s, 5)),
        ("sp-euler", &q_sp, |s| haar_sp_euler(s, 5)),
        ("o-qr", &q_o, |s| haar_qr(s, GroupId::O(5)).unwrap()),
        ("u-qr", &q_u, |s| haar_qr(s, GroupId::U(5)).unwrap()),
        ("o-householder", &q_o, |s| haar_householder(s, GroupId::O(5)).unwrap()),
        ("u-householder", &q_u, |s| haar_householder(s, GroupId::U(5)).unwrap()),
    ];
    for (k, (name, q0, draw)) in samplers.iter().enumerate() {
        let k = k as u32;
        let plain: Vec<f64> = cfg.draw(11, 2 * k, count, |s| draw(s).get(0, 0).re);
        let moved: Vec<f64> = cfg.draw(11, 2 * k + 1, count, |s| entry11_left(q0, &draw(s)));
        match ks_two_sample(&plain, &moved, cfg.level) {
            Ok(r) => b.report(name, r),
            Err(e) => b.error(name, e),
        }
    }
    let max = b.reports.iter().map(|r| r.statistic / r.critical).fold(0.0, f64::max);
    b.finish(format!("8 samplers, max D/critical = {max:.3}"))
}

/// 12. Group average of (Sx)₁⁴ over O(3) and its invariance in x.
pub fn reynolds(cfg: &VerifyConfig) -> CriterionResult {
    let mut b = Builder::new(12, "reynolds operator");
    let x = [0.48, 0.6, 0.64];
    let f = |m: &SquareMatrix, v: &[f64]| first_coordinate(m, v).powi(4);
    let mut s = RandomStream::new(cfg.seed, cfg.stream(12, 0));
    let q0 = haar_so_euler(&mut RandomStream::new(INVARIANCE_SEED, 1), 3);
    let y: Vec<f64> = (0..3).map(|i| (0..3).map(|k| q0.get(i, k).re * x[k]).sum()).collect();
    let a = reynolds_average(f, GroupId::O(3), &mut s, 100_000, &x);
    let mut s2 = RandomStream::new(cfg.seed, cfg.stream(12, 1));
    let c = reynolds_average(f, GroupId::O(3), &mut s2, 100_000, &y);
    match (a, c) {
        (Ok(a), Ok(c)) => {
            let za = (a.mean - 0.2).abs() / a.std_error;
            let combined = a.std_error.hypot(c.std_error);
            let zc = (a.mean - c.mean).abs() / combined;
            b.check(za <= 5.0, format!("average {} vs 1/5, z={za:.2}", a.mean));
            b.check(zc <= 5.0, format!("rotated average {} vs {}, z={zc:.2}", c.mean, a.mean));
            b.finish(format!("average {:.5} ± {:.5} (z={za:.2}); rotated z={zc:.2}", a.mean, a.std_error))
        }
        (Err(e), _) | (_, Err(e)) => {
            b.error("reynolds", e);
            b.finish(String::new())
        }
    }
}

pub type Criterion = fn(&VerifyConfig) -> CriterionResult;

pub const CRITERIA: [Criterion; 12] = [
    moment_oracle,
    joint_moment_oracle,
    volumes,
    normalizations,
    cross_sampler,
    spectral_equivalence,
    recurrence_oracle,
    limit_laws,
    permutation_uniformity,
    structural_residuals,
    haar_invariance,
    reynolds,
];

/// Runs all twelve checks in order.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| c(cfg)).collect()
}
