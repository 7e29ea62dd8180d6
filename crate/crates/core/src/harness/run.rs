//! Orchestration of the per-scale pipeline and its diagnostics.

use super::config::ExperimentConfig;
use super::verify::{experiment_checks, Check};
use crate::diagnostics::{
    block_l1_outside, classify, cluster_coherence, cross_gram_probe, decay_slope,
    distance_to_curve, distance_to_points, l1_on_wavelets, phase_distance,
    phase_projection_curvelet, phase_projection_wavelet, CoherenceWindow, IndexSet, PhasePoint,
    PhaseSet, Regularity,
};
use crate::error::Result;
use crate::frame_kernel::{wedge_count, CurveletIndex, Frames, SpectralImage, WaveletIndex};
use crate::separation::{
    one_step_threshold, residual_identity_check, separation_error, ThresholdParams,
};
use crate::targets::{curve_wavefront, point_wavefront, Scene};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

pub const SCHEMA_VERSION: u32 = 1;

/// Dense wavefront samples of a line fragment used for distances.
const FRAGMENT_SAMPLES: usize = 4096;
/// Clearance of off-singular probes from every singularity.
const OFF_CLEARANCE: f64 = 0.25;

/// Coefficient magnitudes along the decay laws at one scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayProbes {
    pub wavelet_point: Option<f64>,
    pub wavelet_curve: Option<f64>,
    pub curvelet_point: Option<f64>,
    pub curvelet_curve: Option<f64>,
    /// `|<gamma_{j,0,0}, psi_{j,0}>|`, a co-located aligned pair.
    pub cross_gram: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub j: i32,
    pub t1: f64,
    pub t2: f64,
    pub n_t1: usize,
    pub n_t2: usize,
    pub ratio: f64,
    pub mu_c: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// `sum_{T1} |<C_j, psi>|`.
    pub cross_l1: f64,
    pub norm_p: f64,
    pub norm_c: f64,
    pub d_ps_points: Option<f64>,
    pub d_ps_curve: Option<f64>,
    /// Fraction of point samples whose wavelet coefficient reaches `t1`.
    pub wf_point_hits: Option<f64>,
    /// Fraction of curve samples whose aligned residual curvelet coefficient reaches `t2`.
    pub wf_curve_hits: Option<f64>,
    pub residual_error: f64,
    pub decay: DecayProbes,
}

/// Slope classification of the reconstructed parts at wavefront samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub point_singular_on_w: Option<f64>,
    pub point_smooth_on_c: Option<f64>,
    pub curve_singular_on_c: Option<f64>,
    pub curve_smooth_on_w: Option<f64>,
    pub off_max_slope: Option<f64>,
    pub point_slopes_w: Vec<f64>,
    pub point_slopes_c: Vec<f64>,
    pub curve_slopes_c: Vec<f64>,
    pub curve_slopes_w: Vec<f64>,
    pub off_slopes: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub code_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: super::config::ExperimentConfig,
    pub records: Vec<ScaleRecord>,
    pub slopes: BTreeMap<String, f64>,
    pub probes: Option<ProbeSummary>,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Phase-space sets of one scale, kept for plotting.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalePhase {
    pub j: i32,
    pub t1: PhaseSet,
    pub t2: PhaseSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub report: RunReport,
    pub phase: Vec<ScalePhase>,
    pub wf_p: PhaseSet,
    pub wf_c: PhaseSet,
}

/// Probe locations shared by every scale.
struct Probes {
    points: Vec<[f64; 2]>,
    curve: Vec<PhasePoint>,
    off: Vec<PhasePoint>,
    /// Curve sample farthest from the points, for the decay battery.
    curve_anchor: Option<PhasePoint>,
}

fn wavefront_c(scene: &Scene, samples: usize) -> PhaseSet {
    let mut out = Vec::new();
    if let Some(c) = &scene.curve {
        out.extend(curve_wavefront(c, samples).points);
    }
    if let Some(f) = &scene.fragment {
        out.extend(f.ground_truth(samples).points);
    }
    PhaseSet::new(out)
}

fn clearance(scene: &Scene, b: [f64; 2]) -> f64 {
    let mut d = f64::MAX;
    for x in &scene.points.points {
        d = d.min((b[0] - x[0]).hypot(b[1] - x[1]));
    }
    if let Some(c) = &scene.curve {
        d = d.min(c.closest_point(b, crate::diagnostics::CURVE_SEEDS).1);
    }
    if let Some(f) = &scene.fragment {
        let y = b[1].clamp(-f.rho, f.rho);
        d = d.min(b[0].hypot(b[1] - y));
    }
    d
}

fn build_probes(scene: &Scene, cfg: &ExperimentConfig) -> Probes {
    let curve = wavefront_c(scene, cfg.outputs.wf_samples).points;
    let points = scene.points.points.clone();
    let curve_anchor = curve
        .iter()
        .map(|p| {
            let d = points
                .iter()
                .map(|x| (p.b[0] - x[0]).hypot(p.b[1] - x[1]))
                .fold(f64::MAX, f64::min);
            (d, *p)
        })
        .fold(None, |acc: Option<(f64, PhasePoint)>, x| match acc {
            Some(a) if a.0 >= x.0 => Some(a),
            _ => Some(x),
        })
        .map(|x| x.1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.algorithm.seed);
    let mut off = Vec::new();
    let mut tries = 0;
    while off.len() < cfg.algorithm.off_probes && tries < 10_000 {
        tries += 1;
        let b = [rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9)];
        let theta = rng.random_range(0.0..std::f64::consts::PI);
        if clearance(scene, b) >= OFF_CLEARANCE {
            off.push(PhasePoint::new(b, theta));
        }
    }
    Probes {
        points,
        curve,
        off,
        curve_anchor,
    }
}

/// Per-scale probe magnitudes on the reconstructed parts.
#[derive(Clone, Debug, Default)]
struct ProbeValues {
    point_w: Vec<f64>,
    point_c: Vec<f64>,
    curve_c: Vec<f64>,
    curve_w: Vec<f64>,
    off: Vec<f64>,
}

struct ScaleWork {
    record: ScaleRecord,
    phase: ScalePhase,
    probes: ProbeValues,
}

fn residual_probes(
    out_t2: &[CurveletIndex],
    frames: &Frames,
    j: i32,
    n: usize,
    seed: u64,
) -> Vec<CurveletIndex> {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(j as u64 + 1)));
    let mut probes = Vec::with_capacity(n);
    for i in 0..n {
        if i % 2 == 0 && !out_t2.is_empty() {
            probes.push(out_t2[rng.random_range(0..out_t2.len())]);
        } else {
            let s = rng.random_range(j - 1..=j + 1);
            let l = rng.random_range(0..wedge_count(s));
            let lat = frames.curvelet_lattice(s, l);
            probes.push(lat.index(rng.random_range(0..lat.len())));
        }
    }
    probes
}

fn run_scale(cfg: &ExperimentConfig, scene: &Scene, probes: &Probes, j: i32) -> Result<ScaleWork> {
    let frames = cfg.frames();
    let params: ThresholdParams = cfg.threshold_params();
    let (p, c) = scene.pieces(&frames, j)?;
    let f = p.add(&c);
    let out = one_step_threshold(&f, j, &params, &frames)?;
    let ratio = separation_error(&out, &p, &c)?;
    let t1 = out.t1_indices();
    let t2 = out.t2_indices();

    let mu_c = cluster_coherence(&frames, &t2, j, &CoherenceWindow::default())?;
    let t1_set: HashSet<WaveletIndex> = t1.iter().copied().collect();
    let delta1 = crate::diagnostics::relative_sparsity(
        &frames.wavelet_analysis(&p, j)?,
        &IndexSet::Wavelet(t1_set),
    )?;
    let t2_set = IndexSet::Curvelet(t2.iter().copied().collect());
    let mut delta2 = 0.0;
    frames.curvelet_blocks(&c, j - 1..=j + 1, |b| {
        delta2 += block_l1_outside(&b, &t2_set)?;
        Ok(())
    })?;
    let cross_l1 = l1_on_wavelets(&frames, &c, &t1, j)?;

    let t1_ps = phase_projection_wavelet(&t1, cfg.outputs.orient_samples)?;
    let t2_ps = phase_projection_curvelet(&t2);
    let d_ps_points = if !t1.is_empty() && !scene.points.points.is_empty() {
        Some(distance_to_points(&t1_ps, &scene.points)?)
    } else {
        None
    };
    let d_ps_curve = if t2.is_empty() {
        None
    } else {
        match (&scene.curve, &scene.fragment) {
            (None, None) => None,
            (Some(curve), None) => Some(distance_to_curve(&t2_ps, curve)?),
            _ => Some(phase_distance(
                &t2_ps,
                &wavefront_c(scene, FRAGMENT_SAMPLES),
            )?),
        }
    };

    let (tt1, tt2) = (out.t1, out.t2);
    let wf_point_hits = (!probes.points.is_empty()).then(|| {
        let n = probes
            .points
            .iter()
            .filter(|x| frames.wavelet_probe(&f, j, **x).norm() >= tt1)
            .count();
        n as f64 / probes.points.len() as f64
    });
    let wf_curve_hits = (!probes.curve.is_empty()).then(|| {
        let n = probes
            .curve
            .iter()
            .filter(|q| frames.curvelet_probe(&out.r, j, q.theta, q.b).norm() >= tt2)
            .count();
        n as f64 / probes.curve.len() as f64
    });

    let rprobes = residual_probes(
        &t2,
        &frames,
        j,
        cfg.algorithm.residual_probes.max(1),
        cfg.algorithm.seed,
    );
    let residual_error = residual_identity_check(&out, &p, &c, &rprobes, &frames)?;

    let decay = DecayProbes {
        wavelet_point: probes
            .points
            .first()
            .map(|x| frames.wavelet_probe(&p, j, *x).norm()),
        wavelet_curve: probes
            .curve_anchor
            .map(|q| frames.wavelet_probe(&c, j, q.b).norm()),
        curvelet_point: probes
            .points
            .first()
            .map(|x| frames.curvelet_probe(&p, j, 0.0, *x).norm()),
        curvelet_curve: probes
            .curve_anchor
            .map(|q| frames.curvelet_probe(&c, j, q.theta, q.b).norm()),
        cross_gram: cross_gram_probe(
            &frames,
            &WaveletIndex { j, k: [0, 0] },
            &CurveletIndex { j, l: 0, k: [0, 0] },
        )?
        .norm(),
    };

    let (w, cr) = (&out.w, &out.c);
    let pv = ProbeValues {
        point_w: probes
            .points
            .iter()
            .map(|x| frames.wavelet_probe(w, j, *x).norm())
            .collect(),
        point_c: probes
            .points
            .iter()
            .map(|x| frames.wavelet_probe(cr, j, *x).norm())
            .collect(),
        curve_c: probes
            .curve
            .iter()
            .map(|q| frames.curvelet_probe(cr, j, q.theta, q.b).norm())
            .collect(),
        curve_w: probes
            .curve
            .iter()
            .map(|q| frames.curvelet_probe(w, j, q.theta, q.b).norm())
            .collect(),
        off: probes
            .off
            .iter()
            .map(|q| {
                (frames.curvelet_probe(w, j, q.theta, q.b)
                    + frames.curvelet_probe(cr, j, q.theta, q.b))
                .norm()
            })
            .collect(),
    };

    Ok(ScaleWork {
        record: ScaleRecord {
            j,
            t1: out.t1,
            t2: out.t2,
            n_t1: t1.len(),
            n_t2: t2.len(),
            ratio,
            mu_c,
            delta1,
            delta2,
            cross_l1,
            norm_p: p.norm(),
            norm_c: c.norm(),
            d_ps_points,
            d_ps_curve,
            wf_point_hits,
            wf_curve_hits,
            residual_error,
            decay,
        },
        phase: ScalePhase {
            j,
            t1: t1_ps,
            t2: t2_ps,
        },
        probes: pv,
    })
}

/// Slope of `values` over the scales, when every value is positive.
fn series_slope(records: &[ScaleRecord], get: impl Fn(&ScaleRecord) -> Option<f64>) -> Option<f64> {
    let s: Option<Vec<(i32, f64)>> = records.iter().map(|r| get(r).map(|v| (r.j, v))).collect();
    decay_slope(&s?).ok()
}

fn fraction(slopes: &[f64], want: Regularity) -> Option<f64> {
    (!slopes.is_empty()).then(|| {
        slopes.iter().filter(|s| classify(**s) == want).count() as f64 / slopes.len() as f64
    })
}

fn probe_summary(works: &[ScaleWork]) -> Option<ProbeSummary> {
    if works.len() < 4 {
        return None;
    }
    let slopes = |get: &dyn Fn(&ProbeValues) -> &Vec<f64>| -> Vec<f64> {
        let n = get(&works[0].probes).len();
        (0..n)
            .map(|i| {
                let s: Vec<(i32, f64)> = works
                    .iter()
                    .map(|w| (w.record.j, get(&w.probes)[i]))
                    .collect();
                // a part with no energy at all is as smooth as it gets
                decay_slope(&s).unwrap_or(f64::NEG_INFINITY)
            })
            .collect()
    };
    let point_slopes_w = slopes(&|p| &p.point_w);
    let point_slopes_c = slopes(&|p| &p.point_c);
    let curve_slopes_c = slopes(&|p| &p.curve_c);
    let curve_slopes_w = slopes(&|p| &p.curve_w);
    let off_slopes = slopes(&|p| &p.off);
    let finite = |v: &Vec<f64>| v.iter().map(|s| s.max(-1e300)).collect::<Vec<f64>>();
    Some(ProbeSummary {
        point_singular_on_w: fraction(&point_slopes_w, Regularity::Singular),
        point_smooth_on_c: fraction(&point_slopes_c, Regularity::Smooth),
        curve_singular_on_c: fraction(&curve_slopes_c, Regularity::Singular),
        curve_smooth_on_w: fraction(&curve_slopes_w, Regularity::Smooth),
        off_max_slope: off_slopes.iter().copied().reduce(f64::max),
        point_slopes_w: finite(&point_slopes_w),
        point_slopes_c: finite(&point_slopes_c),
        curve_slopes_c: finite(&curve_slopes_c),
        curve_slopes_w: finite(&curve_slopes_w),
        off_slopes: finite(&off_slopes),
    })
}

/// Runs the pipeline over the configured scales and collects every
/// diagnostic. Writes the report and plot data when an output directory
/// is configured; that directory is created before any scale runs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    if let Some(dir) = &cfg.outputs.dir {
        std::fs::create_dir_all(dir)?;
        let probe = dir.join(".write-test");
        std::fs::write(&probe, b"")?;
        std::fs::remove_file(&probe)?;
    }
    let scene = cfg.build_scene()?;
    let probes = build_probes(&scene, cfg);
    let scales = cfg.scales();
    let works: Vec<ScaleWork> = if cfg.outputs.parallel {
        scales
            .par_iter()
            .map(|j| run_scale(cfg, &scene, &probes, *j))
            .collect::<Result<_>>()?
    } else {
        scales
            .iter()
            .map(|j| run_scale(cfg, &scene, &probes, *j))
            .collect::<Result<_>>()?
    };
    let records: Vec<ScaleRecord> = works.iter().map(|w| w.record.clone()).collect();

    let mut slopes = BTreeMap::new();
    let mut put = |name: &str, v: Option<f64>| {
        if let Some(v) = v {
            slopes.insert(name.to_string(), v);
        }
    };
    put(
        "wavelet_point",
        series_slope(&records, |r| r.decay.wavelet_point),
    );
    put(
        "wavelet_curve",
        series_slope(&records, |r| r.decay.wavelet_curve),
    );
    put(
        "curvelet_point",
        series_slope(&records, |r| r.decay.curvelet_point),
    );
    put(
        "curvelet_curve",
        series_slope(&records, |r| r.decay.curvelet_curve),
    );
    put(
        "cross_gram",
        series_slope(&records, |r| Some(r.decay.cross_gram)),
    );
    put(
        "energy",
        series_slope(&records, |r| Some(r.norm_p + r.norm_c)),
    );
    put(
        "delta",
        series_slope(&records, |r| Some(r.delta1 + r.delta2)),
    );
    put("cross_l1", series_slope(&records, |r| Some(r.cross_l1)));
    put("ratio", series_slope(&records, |r| Some(r.ratio)));

    let mut report = RunReport {
        schema_version: SCHEMA_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: cfg.hash()?,
        seed: cfg.algorithm.seed,
        config: cfg.clone(),
        records,
        slopes,
        probes: probe_summary(&works),
        checks: Vec::new(),
    };
    report.checks = experiment_checks(&report);
    let wf_p = point_wavefront(&scene.points, cfg.outputs.orient_samples);
    let wf_c = wavefront_c(&scene, cfg.outputs.wf_samples);
    let phase = works.into_iter().map(|w| w.phase).collect();
    let out = RunOutput {
        report,
        phase,
        wf_p,
        wf_c,
    };
    if let Some(dir) = &cfg.outputs.dir {
        super::report::write_outputs(&out, dir)?;
    }
    Ok(out)
}

/// Band-limited pieces `(P_j, C_j)` of the configured scene at each scale.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Vec<(i32, SpectralImage, SpectralImage)>> {
    cfg.validate()?;
    let scene = cfg.build_scene()?;
    let frames = cfg.frames();
    cfg.scales()
        .into_iter()
        .map(|j| scene.pieces(&frames, j).map(|(p, c)| (j, p, c)))
        .collect()
}
