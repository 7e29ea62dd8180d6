use crate::error::{Error, Result};
use crate::frame_kernel::{CurveletIndex, WaveletIndex};
use crate::targets::{CurveSpec, PointConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Position and orientation (mod pi) in phase space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub b: [f64; 2],
    pub theta: f64,
}

impl PhasePoint {
    pub fn new(b: [f64; 2], theta: f64) -> Self {
        let mut t = theta.rem_euclid(PI);
        if t >= PI {
            t = 0.0;
        }
        Self { b, theta: t }
    }
}

/// Geodesic distance on the projective line `[0, pi)`.
pub fn orientation_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Phase-space metric: Euclidean in position, geodesic in orientation.
pub fn d_ps(a: &PhasePoint, b: &PhasePoint) -> f64 {
    let dx = a.b[0] - b.b[0];
    let dy = a.b[1] - b.b[1];
    let g = orientation_gap(a.theta, b.theta);
    (dx * dx + dy * dy + g * g).sqrt()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseSet {
    pub points: Vec<PhasePoint>,
}

impl PhaseSet {
    pub fn new(points: Vec<PhasePoint>) -> Self {
        Self { points }
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` equispaced orientations of `[0, pi)`.
pub fn orientations(n: usize) -> Vec<f64> {
    (0..n).map(|i| PI * i as f64 / n as f64).collect()
}

/// `{b_lambda} x orientations(orient_samples)`; wavelets carry no direction.
pub fn phase_projection_wavelet(t1: &[WaveletIndex], orient_samples: usize) -> Result<PhaseSet> {
    if orient_samples < 4 {
        return Err(Error::InvalidInput(format!(
            "{orient_samples} orientation samples; need at least 4"
        )));
    }
    let th = orientations(orient_samples);
    Ok(PhaseSet::new(
        t1.iter()
            .flat_map(|i| th.iter().map(move |t| PhasePoint::new(i.position(), *t)))
            .collect(),
    ))
}

/// One `(b_eta, theta_eta)` pair per curvelet.
pub fn phase_projection_curvelet(t2: &[CurveletIndex]) -> PhaseSet {
    PhaseSet::new(
        t2.iter()
            .map(|i| PhasePoint::new(i.position(), i.theta()))
            .collect(),
    )
}

fn nonempty(a: &PhaseSet, name: &str) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidInput(format!("phase set {name} is empty")));
    }
    Ok(())
}

/// `max_{a in A} min_{b in B} d_ps(a, b)`.
pub fn phase_distance(a: &PhaseSet, b: &PhaseSet) -> Result<f64> {
    nonempty(a, "A")?;
    nonempty(b, "B")?;
    Ok(a.points
        .par_iter()
        .map(|p| b.points.iter().map(|q| d_ps(p, q)).fold(f64::MAX, f64::min))
        .reduce(|| 0.0, f64::max))
}

/// Distance from `A` to the wavefront set of a point configuration, which
/// holds every orientation over each point, so only positions count.
pub fn distance_to_points(a: &PhaseSet, points: &PointConfig) -> Result<f64> {
    nonempty(a, "A")?;
    if points.points.is_empty() {
        return Err(Error::InvalidInput("no points".into()));
    }
    Ok(a.points
        .iter()
        .map(|p| {
            points
                .points
                .iter()
                .map(|x| (p.b[0] - x[0]).hypot(p.b[1] - x[1]))
                .fold(f64::MAX, f64::min)
        })
        .fold(0.0, f64::max))
}

/// Seeds for curve queries.
pub const CURVE_SEEDS: usize = 1024;

/// Distance from `A` to the wavefront set of a closed curve, the set of
/// `(tau(s), normal(s))`. Dense seeding then a golden-section refinement of
/// `s` around the best seed.
pub fn distance_to_curve(a: &PhaseSet, curve: &CurveSpec) -> Result<f64> {
    nonempty(a, "A")?;
    let n = CURVE_SEEDS;
    let len = curve.length();
    let h = len / n as f64;
    let seeds: Vec<PhasePoint> = (0..n)
        .map(|q| {
            let s = h * q as f64;
            PhasePoint::new(curve.point(s), curve.normal_angle(s))
        })
        .collect();
    let at = |s: f64| PhasePoint::new(curve.point(s), curve.normal_angle(s));
    Ok(a.points
        .par_iter()
        .map(|p| {
            let (q, best) = seeds
                .iter()
                .enumerate()
                .map(|(q, x)| (q, d_ps(p, x)))
                .fold((0, f64::MAX), |acc, x| if x.1 < acc.1 { x } else { acc });
            let f = |s: f64| d_ps(p, &at(s));
            let g = (5f64.sqrt() - 1.0) / 2.0;
            let s0 = h * q as f64;
            let (mut lo, mut hi) = (s0 - h, s0 + h);
            let mut x1 = hi - g * (hi - lo);
            let mut x2 = lo + g * (hi - lo);
            let (mut f1, mut f2) = (f(x1), f(x2));
            for _ in 0..40 {
                if f1 < f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - g * (hi - lo);
                    f1 = f(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + g * (hi - lo);
                    f2 = f(x2);
                }
            }
            best.min(f1).min(f2)
        })
        .reduce(|| 0.0, f64::max))
}

/// Base set of a phase-space tube.
#[derive(Clone, Debug, PartialEq)]
pub enum TubeBase {
    /// The vertical segment `{0} x [-2 rho, 2 rho]` with horizontal normal.
    Segment {
        rho: f64,
    },
    Curve(CurveSpec),
}

/// Points within `c a^{1 - eps'}` of the base whose orientation is within
/// `sqrt(a)` of the base normal.
#[derive(Clone, Debug, PartialEq)]
pub struct TubeSpec {
    pub base: TubeBase,
    pub c: f64,
    pub eps_prime: f64,
    pub a: f64,
}

impl TubeSpec {
    pub fn new(base: TubeBase, c: f64, eps_prime: f64, a: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) || !(eps_prime > 0.0 && eps_prime < 1.0) || !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "tube with c = {c}, eps' = {eps_prime}, a = {a}"
            )));
        }
        Ok(Self {
            base,
            c,
            eps_prime,
            a,
        })
    }

    /// `D_2(a, eps') = a^{1 - eps'}`.
    pub fn width(&self) -> f64 {
        self.a.powf(1.0 - self.eps_prime)
    }

    pub fn contains(&self, p: &PhasePoint) -> bool {
        let (dist, normal) = match &self.base {
            TubeBase::Segment { rho } => {
                let y = p.b[1].clamp(-2.0 * rho, 2.0 * rho);
                (p.b[0].hypot(p.b[1] - y), 0.0)
            }
            TubeBase::Curve(c) => {
                let (s, d) = c.closest_point(p.b, CURVE_SEEDS);
                (d, c.normal_angle(s))
            }
        };
        dist <= self.c * self.width() && orientation_gap(p.theta, normal) <= self.a.sqrt()
    }
}

/// Fraction of `s` inside the tube; 0 for an empty set.
pub fn tube_membership(s: &PhaseSet, tube: &TubeSpec) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let inside = s.points.par_iter().filter(|p| tube.contains(p)).count();
    inside as f64 / s.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_around_distance() {
        let a = PhaseSet::new(vec![PhasePoint::new([0.2, 0.1], 0.05)]);
        let b = PhaseSet::new(vec![PhasePoint::new([0.2, 0.1], PI - 0.05)]);
        assert!((phase_distance(&a, &b).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(phase_distance(&a, &a).unwrap(), 0.0);
        assert!(phase_distance(&a, &PhaseSet::default()).is_err());
        assert_eq!(PhasePoint::new([0.0, 0.0], -0.5 * PI).theta, 0.5 * PI);
    }

    #[test]
    fn distance_monotonicity() {
        let pts: Vec<PhasePoint> = (0..12)
            .map(|i| PhasePoint::new([0.1 * i as f64, -0.05 * i as f64], 0.3 * i as f64))
            .collect();
        let a = PhaseSet::new(pts[..6].to_vec());
        let b = PhaseSet::new(pts[4..9].to_vec());
        let big = PhaseSet::new(pts[2..].to_vec());
        let d = phase_distance(&a, &b).unwrap();
        assert!(phase_distance(&a, &big).unwrap() <= d);
        assert!(phase_distance(&PhaseSet::new(pts[..3].to_vec()), &b).unwrap() <= d);
        assert_eq!(
            phase_distance(&PhaseSet::new(pts[5..7].to_vec()), &big).unwrap(),
            0.0
        );
    }

    #[test]
    fn projections() {
        let t1 = vec![
            WaveletIndex { j: 5, k: [3, -7] },
            WaveletIndex { j: 6, k: [0, 1] },
        ];
        let ps = phase_projection_wavelet(&t1, 8).unwrap();
        assert_eq!(ps.len(), 16);
        assert_eq!(ps.points[0].b, [3.0 / 32.0, -7.0 / 32.0]);
        assert!(phase_projection_wavelet(&[], 8).unwrap().is_empty());
        assert!(phase_projection_wavelet(&t1, 3).is_err());
        let t2 = vec![CurveletIndex {
            j: 7,
            l: 3,
            k: [2, 1],
        }];
        let ps = phase_projection_curvelet(&t2);
        let q = ps.points[0].theta / (PI / 8.0);
        assert!((q - q.round()).abs() < 1e-12);
        let th = 3.0 * PI / 8.0;
        let (u, v) = (2.0 / 128.0, 2f64.powi(3 - 7 - 1));
        assert!((ps.points[0].b[0] - (th.cos() * u - th.sin() * v)).abs() < 1e-15);
    }

    #[test]
    fn point_and_curve_distances() {
        let cfg = PointConfig::new(vec![[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let a = PhaseSet::new(vec![
            PhasePoint::new([0.1, 0.0], 1.0),
            PhasePoint::new([0.8, 0.0], 0.0),
        ]);
        assert!((distance_to_points(&a, &cfg).unwrap() - 0.2).abs() < 1e-15);
        let circ = CurveSpec::circle([0.0, 0.0], 0.5).unwrap();
        // on the circle with the normal orientation: distance zero
        let on = PhaseSet::new(vec![PhasePoint::new([0.0, 0.5], PI / 2.0)]);
        assert!(distance_to_curve(&on, &circ).unwrap() < 1e-9);
        let off = PhaseSet::new(vec![PhasePoint::new([0.6, 0.0], 0.0)]);
        assert!((distance_to_curve(&off, &circ).unwrap() - 0.1).abs() < 1e-9);
        let dense = ground_truth(&circ);
        let d = distance_to_curve(&a, &circ).unwrap();
        assert!(d <= phase_distance(&a, &dense).unwrap() + 1e-12);
    }

    fn ground_truth(c: &CurveSpec) -> PhaseSet {
        PhaseSet::new(
            (0..4096)
                .map(|q| {
                    let s = c.length() * q as f64 / 4096.0;
                    PhasePoint::new(c.point(s), c.normal_angle(s))
                })
                .collect(),
        )
    }

    #[test]
    fn tube_examples() {
        let tube =
            TubeSpec::new(TubeBase::Segment { rho: 0.25 }, 1.0, 0.05, 2f64.powi(-8)).unwrap();
        let centre = PhaseSet::new(
            (0..20)
                .map(|i| PhasePoint::new([0.0, -0.5 + 0.05 * i as f64], 0.0))
                .collect(),
        );
        assert_eq!(tube_membership(&centre, &tube), 1.0);
        let far = PhaseSet::new(vec![PhasePoint::new([10.0, 0.0], 0.0)]);
        assert_eq!(tube_membership(&far, &tube), 0.0);
        let tilted = PhaseSet::new(vec![PhasePoint::new([0.0, 0.0], 0.2)]);
        assert_eq!(tube_membership(&tilted, &tube), 0.0);
        let circ = CurveSpec::circle([0.0, 0.0], 0.5).unwrap();
        let ct = TubeSpec::new(TubeBase::Curve(circ.clone()), 1.0, 0.05, 2f64.powi(-8)).unwrap();
        assert_eq!(tube_membership(&ground_truth(&circ), &ct), 1.0);
        assert!(TubeSpec::new(TubeBase::Segment { rho: 0.1 }, 0.0, 0.05, 0.1).is_err());
    }
}
