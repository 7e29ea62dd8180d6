//! Acceptance checks with their pinned tolerances.

use super::config::ExperimentConfig;
use super::run::{run_experiment, RunReport};
use crate::diagnostics::{cross_gram_probe, spearman, strictly_decreasing};
use crate::error::{Error, Result};
use crate::frame_kernel::{
    wedge_angle, wedge_count, CurveletIndex, Frames, Lattice, SpectralImage, WaveletIndex,
};
use crate::separation::{
    abstract_one_step, frame_matrix, harmonic_frame, one_step_threshold, random_orthogonal,
    separation_bound, to_real, ThresholdParams,
};
use crate::targets::{curve_spectrum, required_quad_nodes, CurveSpec, PointConfig, Scene};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// One acceptance check: what was measured and against which tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub measured: f64,
    pub tolerance: String,
    pub pass: bool,
}

impl Check {
    pub fn new(criterion: u8, name: &str, measured: f64, tolerance: &str, pass: bool) -> Self {
        Self {
            criterion,
            name: name.into(),
            measured,
            tolerance: tolerance.into(),
            pass,
        }
    }

    /// Check that is failed because the quantity could not be measured.
    pub fn missing(criterion: u8, name: &str, tolerance: &str) -> Self {
        Self::new(criterion, name, f64::NAN, tolerance, false)
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<44} measured {:<12} tolerance {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            format_value(self.measured),
            self.tolerance
        )
    }
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "n/a".into()
    } else if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

/// Human-readable listing and the overall verdict.
pub fn summary(checks: &[Check]) -> (String, bool) {
    let mut s = String::new();
    for c in checks {
        s.push_str(&c.line());
        s.push('\n');
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    s.push_str(&format!(
        "{} checks, {} passed, {} failed\n",
        checks.len(),
        checks.len() - failed,
        failed
    ));
    (s, failed == 0)
}

/// Random real band-limited input: a few isotropic bumps at random
/// positions, filtered to the scale-`j` subband.
pub fn random_band_limited(frames: &Frames, j: i32, seed: u64) -> Result<SpectralImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = frames.grid(j)?;
    let bumps: Vec<([f64; 2], f64, f64)> = (0..6)
        .map(|_| {
            let b = [rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4)];
            (b, rng.random_range(-1.0..1.0), rng.random_range(0.6..1.5))
        })
        .collect();
    let a = 2f64.powi(-j);
    let f = SpectralImage::from_fn(g, |x| {
        let r = x[0].hypot(x[1]) * a;
        bumps
            .iter()
            .map(|(b, amp, width)| {
                let e = frames.window.eval(r * width) + frames.window.eval(r);
                Complex64::from_polar(amp * e, -(b[0] * x[0] + b[1] * x[1]))
            })
            .sum()
    });
    frames.subband_filter(&f, j)
}

/// Criterion 1: window identities and reconstruction on random inputs.
pub fn frame_exactness(frames: &Frames, j: i32, seeds: u64) -> Result<Vec<Check>> {
    let calderon = frames.window.calderon_max_error(12);
    let mut angular: f64 = 0.0;
    for s in 1..=12 {
        for i in 0..2000 {
            let om = PI * i as f64 / 1000.0 + 1e-3;
            let x = [om.cos(), om.sin()];
            let sum: f64 = (0..wedge_count(s))
                .map(|l| frames.angular(s, wedge_angle(s, l), x).powi(2))
                .sum();
            angular = angular.max((sum - 1.0).abs());
        }
    }
    let (mut wav, mut cur): (f64, f64) = (0.0, 0.0);
    for seed in 0..seeds {
        let f = random_band_limited(frames, j, seed)?;
        let n = f.norm();
        let t = frames.wavelet_analysis(&f, j)?;
        wav = wav.max(frames.synthesize_all(&t, &f.grid)?.sub(&f).norm() / n);
        let t = frames.curvelet_analysis(&f, j)?;
        cur = cur.max(frames.synthesize_all(&t, &f.grid)?.sub(&f).norm() / n);
    }
    Ok(vec![
        Check::new(
            1,
            "Calderon sum defect",
            calderon,
            "<= 1e-10",
            calderon <= 1e-10,
        ),
        Check::new(
            1,
            "angular partition defect",
            angular,
            "<= 1e-8",
            angular <= 1e-8,
        ),
        Check::new(
            1,
            "wavelet reconstruction relative error",
            wav,
            "<= 1e-6",
            wav <= 1e-6,
        ),
        Check::new(
            1,
            "curvelet reconstruction relative error",
            cur,
            "<= 1e-3",
            cur <= 1e-3,
        ),
    ])
}

/// Relative error against a direct quadrature, floored at 1% of the
/// largest coefficient of the block so near-zero entries do not dominate.
fn rel_err(c: Complex64, oracle: Complex64, block_max: f64) -> f64 {
    (c - oracle).norm() / oracle.norm().max(1e-2 * block_max)
}

/// Criterion 2: coefficients against brute-force frequency quadrature and
/// the circle spectrum against its Bessel closed form.
pub fn oracle_equivalence(
    frames: &Frames,
    scales: &[i32],
    per_scale: usize,
    seed: u64,
) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut wav, mut cur): (f64, f64) = (0.0, 0.0);
    for &j in scales {
        let f = random_band_limited(frames, j, seed + j as u64)?;
        for _ in 0..per_scale {
            let s = rng.random_range(j - 1..=j + 1);
            let block = frames.wavelet_analysis_scale(&f, s)?;
            let max = block.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let Lattice::Wavelet(lat) = &block.lattice else {
                unreachable!()
            };
            let flat = rng.random_range(0..lat.len());
            let oracle = f.inner(&frames.wavelet_spectrum(&lat.index(flat), &f.grid)?);
            wav = wav.max(rel_err(block.values[flat], oracle, max));

            let l = rng.random_range(0..wedge_count(s));
            let block = frames.curvelet_analysis_block(&f, s, l)?;
            let max = block.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let Lattice::Curvelet(lat) = &block.lattice else {
                unreachable!()
            };
            let flat = rng.random_range(0..lat.len());
            let oracle = f.inner(&frames.curvelet_spectrum(&lat.index(flat), &f.grid)?);
            cur = cur.max(rel_err(block.values[flat], oracle, max));
        }
    }
    let g = frames.grid(6)?;
    let r = 0.5;
    let circle = CurveSpec::circle([0.0, 0.0], r)?;
    let spec = curve_spectrum(
        &circle,
        &g,
        required_quad_nodes(&circle, g.max_freq() * 2f64.sqrt()),
    )?;
    let mut bessel: f64 = 0.0;
    for _ in 0..100 {
        let i = rng.random_range(0..g.len());
        let x = g.freq(i);
        let oracle = 2.0 * PI * r * libm::j0(r * x[0].hypot(x[1]));
        bessel = bessel.max((spec.data[i] - oracle).norm() / (2.0 * PI * r));
    }
    Ok(vec![
        Check::new(
            2,
            "wavelet coefficients vs quadrature",
            wav,
            "<= 1e-6 relative",
            wav <= 1e-6,
        ),
        Check::new(
            2,
            "curvelet coefficients vs quadrature",
            cur,
            "<= 1e-5 relative",
            cur <= 1e-5,
        ),
        Check::new(
            2,
            "circle spectrum vs Bessel J0 (100 nodes)",
            bessel,
            "<= 1e-8",
            bessel <= 1e-8,
        ),
    ])
}

/// Criterion 3, last part: couplings across three or more scales vanish.
pub fn cross_scale_zero(frames: &Frames) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for sw in 4..=9 {
        for d in [-5, -4, -3, 3, 4, 5] {
            let sc = sw + d;
            if sc < 1 {
                continue;
            }
            for l in 0..wedge_count(sc).min(4) {
                let v = cross_gram_probe(
                    frames,
                    &WaveletIndex { j: sw, k: [1, -2] },
                    &CurveletIndex {
                        j: sc,
                        l,
                        k: [0, 1],
                    },
                )?;
                worst = worst.max(v.norm());
            }
        }
    }
    Ok(Check::new(
        3,
        "coupling across |dscale| >= 3",
        worst,
        "== 0 exactly",
        worst == 0.0,
    ))
}

fn fuzz_trial(seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(2..=16usize);
    let n = rng.random_range(d + 1..=64usize);
    let f1 = harmonic_frame(d, n, &mut rng)?;
    let f2 = harmonic_frame(d, n, &mut rng)?.rotated(&random_orthogonal(d, &mut rng));
    let sparse = |rng: &mut ChaCha8Rng| {
        let mut x = DVector::zeros(n);
        for _ in 0..rng.random_range(1..=4) {
            x[rng.random_range(0..n)] = rng.random_range(-1.0..1.0);
        }
        x
    };
    let s1 = &f1.phi * sparse(&mut rng);
    let s2 = &f2.phi * sparse(&mut rng);
    let s = &s1 + &s2;
    let m1 = f1.phi.tr_mul(&s).amax();
    let m2 = f2.phi.tr_mul(&s).amax();
    let t1 = rng.random_range(0.0..=1.0) * m1;
    let t2 = rng.random_range(0.0..=1.0) * m2;
    let out = abstract_one_step(&f1, &f2, &s, t1, t2)?;
    let b = separation_bound(&f1, &f2, &out, &s1, &s2)?;
    Ok((b.lhs, b.rhs))
}

/// Criterion 6, first part: the error bound over random harmonic frame pairs.
pub fn bound_fuzz(trials: u64, seed: u64) -> Result<Check> {
    let res: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| fuzz_trial(seed.wrapping_mul(1_000_003).wrapping_add(t)))
        .collect::<Result<_>>()?;
    let violations = res
        .iter()
        .filter(|(l, r)| *l > r * (1.0 + 1e-12) + 1e-12)
        .count();
    let name = format!("error bound violations in {trials} trials");
    Ok(Check::new(
        6,
        &name,
        violations as f64,
        "== 0",
        violations == 0,
    ))
}

/// Criterion 6, second part: explicit frame matrices at `j = 4` reproduce the
/// streamed pipeline. Returns the largest discrepancy; any difference in the
/// significant sets fails the check.
pub fn materialized_consistency(trials: u64, seed: u64) -> Result<Check> {
    let j = 4;
    let mut frames = Frames::new(3, 1);
    frames.nufft_tol = 1e-12;
    let m = frame_matrix(&frames, j)?;
    let col1: HashMap<WaveletIndex, usize> = m
        .wavelets
        .iter()
        .enumerate()
        .map(|(i, k)| (*k, i))
        .collect();
    let col2: HashMap<CurveletIndex, usize> = m
        .curvelets
        .iter()
        .enumerate()
        .map(|(i, k)| (*k, i))
        .collect();
    let params = ThresholdParams::default();
    let mut worst: f64 = 0.0;
    let mut sets_agree = true;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + t);
        let scene = Scene {
            points: PointConfig::new(vec![[
                rng.random_range(-0.6..0.6),
                rng.random_range(-0.6..0.6),
            ]])?,
            curve: Some(CurveSpec::circle(
                [rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)],
                rng.random_range(0.2..0.5),
            )?),
            fragment: None,
        };
        let (p, c) = scene.pieces(&frames, j)?;
        let f = p
            .add(&c)
            .add(&random_band_limited(&frames, j, seed + 1000 + t)?.scaled(0.3));
        let out = one_step_threshold(&f, j, &params, &frames)?;
        let x = to_real(&f);
        let a = abstract_one_step(&m.phi1, &m.phi2, &x, out.t1, out.t2)?;
        let mut c1: Vec<usize> = out.t1_set.iter().map(|e| col1[&e.0]).collect();
        let mut c2: Vec<usize> = out.t2_set.iter().map(|e| col2[&e.0]).collect();
        c1.sort_unstable();
        c2.sort_unstable();
        sets_agree &= c1 == a.t1 && c2 == a.t2;
        let scale = x.norm().max(1.0);
        for (u, v) in [(&out.w, &a.s1), (&out.c, &a.s2), (&out.r, &a.r)] {
            worst = worst.max((to_real(u) - v).norm() / scale);
        }
    }
    let name = format!("abstract vs streamed pipeline ({trials} trials)");
    Ok(Check::new(
        6,
        &name,
        worst,
        "sets equal, <= 1e-8",
        sets_agree && worst <= 1e-8,
    ))
}

/// Criterion 10: the same run under one and under eight worker threads
/// gives byte-identical JSON.
pub fn determinism(cfg: &ExperimentConfig) -> Result<Check> {
    let mut c = cfg.clone();
    c.outputs.dir = None;
    let run = |threads: usize| -> Result<String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        pool.install(|| run_experiment(&c))?.report.to_json()
    };
    let a = run(1)?;
    let b = run(8)?;
    let same = a == b;
    Ok(Check::new(
        10,
        "JSON identical at parallelism 1 and 8",
        if same { 0.0 } else { 1.0 },
        "identical",
        same,
    ))
}

fn series(
    report: &RunReport,
    get: impl Fn(&super::run::ScaleRecord) -> Option<f64>,
) -> Option<Vec<f64>> {
    report.records.iter().map(get).collect()
}

fn decreasing_halving(criterion: u8, name: &str, v: Option<Vec<f64>>) -> Check {
    let tol = "strictly decreasing, last/first <= 0.5";
    match v {
        Some(v) if v.len() >= 2 => {
            let q = v[v.len() - 1] / v[0];
            Check::new(criterion, name, q, tol, strictly_decreasing(&v) && q <= 0.5)
        }
        _ => Check::missing(criterion, name, tol),
    }
}

fn slope_check(report: &RunReport, key: &str, name: &str, lo: f64, hi: f64, tol: &str) -> Check {
    match report.slopes.get(key) {
        Some(s) => Check::new(3, name, *s, tol, *s >= lo && *s <= hi),
        None => Check::missing(3, name, tol),
    }
}

/// Criteria 3, 4, 5, 7, 8 and 9 evaluated on a run report.
pub fn experiment_checks(report: &RunReport) -> Vec<Check> {
    let mut out = vec![
        slope_check(
            report,
            "wavelet_point",
            "slope wavelet@point",
            0.4,
            0.6,
            "0.5 +- 0.1",
        ),
        slope_check(
            report,
            "wavelet_curve",
            "slope wavelet@curve",
            -0.1,
            0.1,
            "|slope| <= 0.1",
        ),
        slope_check(
            report,
            "curvelet_point",
            "slope curvelet@point",
            0.4,
            0.6,
            "0.5 +- 0.1",
        ),
        slope_check(
            report,
            "curvelet_curve",
            "slope curvelet@curve (aligned)",
            0.15,
            0.35,
            "0.25 +- 0.1",
        ),
        slope_check(
            report,
            "cross_gram",
            "slope aligned cross-Gram coupling",
            f64::NEG_INFINITY,
            -0.2,
            "<= -0.25 + 0.05",
        ),
    ];

    let js: Vec<f64> = report.records.iter().map(|r| r.j as f64).collect();
    let ratio: Vec<f64> = report.records.iter().map(|r| r.ratio).collect();
    let rho = if ratio.len() >= 2 {
        spearman(&js, &ratio)
    } else {
        f64::NAN
    };
    out.push(Check::new(
        4,
        "separation ratio Spearman vs j",
        rho,
        "<= -0.8",
        rho <= -0.8,
    ));
    out.push(decreasing_halving(4, "separation ratio", Some(ratio)));

    let mu: Vec<f64> = report.records.iter().map(|r| r.mu_c).collect();
    out.push(Check::new(
        5,
        "cluster coherence strictly decreasing",
        mu.last().copied().unwrap_or(f64::NAN) / mu.first().copied().unwrap_or(f64::NAN),
        "strictly decreasing (measured last/first)",
        mu.len() >= 2 && strictly_decreasing(&mu),
    ));
    match report.slopes.get("energy") {
        Some(&e) => {
            out.push(Check::new(
                5,
                "slope of |P_j| + |C_j|",
                e,
                ">= 0.45",
                e >= 0.45,
            ));
            for (key, name) in [
                ("delta", "slope gap energy - delta"),
                ("cross_l1", "slope gap energy - sum_T1 |<C,psi>|"),
            ] {
                match report.slopes.get(key) {
                    Some(s) => out.push(Check::new(5, name, e - s, ">= 0.2", e - s >= 0.2)),
                    None => out.push(Check::missing(5, name, ">= 0.2")),
                }
            }
        }
        None => out.push(Check::missing(5, "slope of |P_j| + |C_j|", ">= 0.45")),
    }

    out.push(decreasing_halving(
        7,
        "d_PS(T1, WF(P))",
        series(report, |r| r.d_ps_points),
    ));
    out.push(decreasing_halving(
        7,
        "d_PS(T2, WF(C))",
        series(report, |r| r.d_ps_curve),
    ));
    let late: Vec<&super::run::ScaleRecord> = report.records.iter().filter(|r| r.j >= 7).collect();
    for (name, get) in [
        (
            "WF(P) samples above t1 at j >= 7",
            (|r: &super::run::ScaleRecord| r.wf_point_hits) as fn(&_) -> _,
        ),
        (
            "WF(C) samples above t2 at j >= 7",
            |r: &super::run::ScaleRecord| r.wf_curve_hits,
        ),
    ] {
        let v: Option<Vec<f64>> = late.iter().map(|r| get(r)).collect();
        match v {
            Some(v) if !v.is_empty() => {
                let m = v.iter().copied().fold(1.0, f64::min);
                out.push(Check::new(
                    7,
                    name,
                    m,
                    "fraction == 1 at every scale",
                    m == 1.0,
                ));
            }
            _ => out.push(Check::missing(7, name, "fraction == 1 at every scale")),
        }
    }

    let tol90 = ">= 0.9";
    match &report.probes {
        Some(p) => {
            for (name, v) in [
                ("WF(P) probes singular on point part", p.point_singular_on_w),
                ("WF(P) probes smooth on curve part", p.point_smooth_on_c),
                ("WF(C) probes singular on curve part", p.curve_singular_on_c),
                ("WF(C) probes smooth on point part", p.curve_smooth_on_w),
            ] {
                match v {
                    Some(v) => out.push(Check::new(8, name, v, tol90, v >= 0.9)),
                    None => out.push(Check::missing(8, name, tol90)),
                }
            }
            match p.off_max_slope {
                Some(s) => out.push(Check::new(
                    8,
                    "off-singular probe max slope",
                    s,
                    "<= -1",
                    s <= -1.0,
                )),
                None => out.push(Check::missing(8, "off-singular probe max slope", "<= -1")),
            }
        }
        None => out.push(Check::missing(
            8,
            "wavefront probes (need >= 4 scales)",
            tol90,
        )),
    }

    let res = report
        .records
        .iter()
        .find(|r| r.j == 7)
        .map(|r| r.residual_error)
        .unwrap_or_else(|| {
            report
                .records
                .iter()
                .map(|r| r.residual_error)
                .fold(0.0, f64::max)
        });
    out.push(Check::new(
        9,
        "residual identity max probe error",
        res,
        "<= 1e-5",
        res <= 1e-5,
    ));
    out
}

/// Every acceptance check: frames, oracles, the experiment over the
/// configured scales, the error-bound fuzz, the materialised comparison and
/// determinism on the first three scales.
pub fn verify_suite(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let frames = cfg.frames();
    let mut checks = frame_exactness(&frames, 6, 10)?;
    checks.extend(oracle_equivalence(
        &frames,
        &cfg.scales(),
        20,
        cfg.algorithm.seed,
    )?);
    checks.push(cross_scale_zero(&frames)?);
    let run = run_experiment(cfg)?;
    checks.extend(run.report.checks.iter().cloned());
    checks.push(bound_fuzz(200, cfg.algorithm.seed)?);
    checks.push(materialized_consistency(20, cfg.algorithm.seed)?);
    let mut small = cfg.clone();
    small.grids.j_max = small.grids.j_min + 2.min(small.grids.j_max - small.grids.j_min);
    checks.push(determinism(&small)?);
    checks.sort_by_key(|c| c.criterion);
    Ok(checks)
}
