//! Closed curves parametrised by arc length.

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveKind {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    /// Closed uniform cubic B-spline through its control polygon.
    Spline {
        control: Vec<[f64; 2]>,
    },
}

/// A closed C^2 curve with a unit-speed parametrisation on `[0, L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    kind: CurveKind,
    length: f64,
    /// Cumulative arc length at the start of each spline segment.
    seg_start: Vec<f64>,
    kappa_max: f64,
    gl: (Vec<f64>, Vec<f64>),
}

const ARC_NODES: usize = 24;
const ARC_PANELS: usize = 4;

fn bspline(c: &[[f64; 2]], seg: usize, u: f64, deriv: usize) -> [f64; 2] {
    let n = c.len();
    let p = |k: usize| c[(seg + k + n - 1) % n];
    let w = match deriv {
        0 => {
            let v = 1.0 - u;
            [
                v * v * v,
                3.0 * u * u * u - 6.0 * u * u + 4.0,
                -3.0 * u * u * u + 3.0 * u * u + 3.0 * u + 1.0,
                u * u * u,
            ]
        }
        1 => [
            -(1.0 - u) * (1.0 - u) * 3.0,
            9.0 * u * u - 12.0 * u,
            -9.0 * u * u + 6.0 * u + 3.0,
            3.0 * u * u,
        ],
        _ => [6.0 * (1.0 - u), 18.0 * u - 12.0, -18.0 * u + 6.0, 6.0 * u],
    };
    let mut out = [0.0; 2];
    for (k, wk) in w.iter().enumerate() {
        let q = p(k);
        out[0] += wk * q[0] / 6.0;
        out[1] += wk * q[1] / 6.0;
    }
    out
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

impl CurveSpec {
    pub fn circle(center: [f64; 2], radius: f64) -> Result<Self> {
        if radius <= 0.0 || !radius.is_finite() {
            return Err(Error::InvalidInput(format!(
                "circle radius {radius} must be positive"
            )));
        }
        Ok(Self {
            kind: CurveKind::Circle { center, radius },
            length: 2.0 * PI * radius,
            seg_start: vec![0.0],
            kappa_max: 1.0 / radius,
            gl: (Vec::new(), Vec::new()),
        })
    }

    pub fn spline(control: Vec<[f64; 2]>) -> Result<Self> {
        if control.len() < 4 {
            return Err(Error::InvalidInput(
                "a closed spline needs at least 4 control points".into(),
            ));
        }
        let (x, w) = gauss_legendre(ARC_NODES);
        let n = control.len();
        let mut seg_start = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        let mut min_speed = f64::MAX;
        for seg in 0..n {
            seg_start.push(acc);
            for p in 0..ARC_PANELS {
                let a = p as f64 / ARC_PANELS as f64;
                let h = 1.0 / ARC_PANELS as f64;
                for (xi, wi) in x.iter().zip(&w) {
                    let sp = norm(bspline(&control, seg, a + 0.5 * h * (xi + 1.0), 1));
                    min_speed = min_speed.min(sp);
                    acc += 0.5 * h * wi * sp;
                }
            }
        }
        seg_start.push(acc);
        if min_speed < 1e-9 {
            return Err(Error::InvalidInput(
                "spline has a stationary point; not a regular curve".into(),
            ));
        }
        let mut c = Self {
            kind: CurveKind::Spline { control },
            length: acc,
            seg_start,
            kappa_max: 0.0,
            gl: (x, w),
        };
        let m = 64 * n;
        c.kappa_max = (0..m)
            .map(|i| c.curvature(c.length * i as f64 / m as f64))
            .fold(0.0, f64::max);
        Ok(c)
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn from_kind(kind: CurveKind) -> Result<Self> {
        match kind {
            CurveKind::Circle { center, radius } => Self::circle(center, radius),
            CurveKind::Spline { control } => Self::spline(control),
        }
    }

    /// Total length `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa_max
    }

    fn seg_arc(&self, c: &[[f64; 2]], seg: usize, u: f64) -> f64 {
        let (x, w) = &self.gl;
        // length of the segment from 0 to u
        let mut acc = 0.0;
        let panels = ((u * ARC_PANELS as f64).ceil() as usize).max(1);
        let h = u / panels as f64;
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(w) {
                acc += 0.5 * h * wi * norm(bspline(c, seg, a + 0.5 * h * (xi + 1.0), 1));
            }
        }
        acc
    }

    /// Spline segment and local parameter at arc length `s`.
    fn locate(&self, c: &[[f64; 2]], s: f64) -> (usize, f64) {
        let s = s.rem_euclid(self.length);
        let seg = (self.seg_start.partition_point(|&a| a <= s) - 1).min(c.len() - 1);
        let target = s - self.seg_start[seg];
        let seg_len = self.seg_start[seg + 1] - self.seg_start[seg];
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut u = target / seg_len;
        for _ in 0..60 {
            let f = self.seg_arc(c, seg, u) - target;
            if f > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let step = f / norm(bspline(c, seg, u, 1));
            let mut next = u - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() < 1e-15 {
                u = next;
                break;
            }
            u = next;
        }
        (seg, u)
    }

    /// Position, unit tangent and curvature vector `tau''` at arc length `s`.
    pub fn frame(&self, s: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        match &self.kind {
            CurveKind::Circle { center, radius } => {
                let a = s / radius;
                let (sn, cs) = a.sin_cos();
                (
                    [center[0] + radius * cs, center[1] + radius * sn],
                    [-sn, cs],
                    [-cs / radius, -sn / radius],
                )
            }
            CurveKind::Spline { control } => {
                let (seg, u) = self.locate(control, s);
                let p = bspline(control, seg, u, 0);
                let d1 = bspline(control, seg, u, 1);
                let d2 = bspline(control, seg, u, 2);
                let sp = norm(d1);
                let t = [d1[0] / sp, d1[1] / sp];
                let along = d2[0] * t[0] + d2[1] * t[1];
                let k = [
                    (d2[0] - along * t[0]) / (sp * sp),
                    (d2[1] - along * t[1]) / (sp * sp),
                ];
                (p, t, k)
            }
        }
    }

    pub fn point(&self, s: f64) -> [f64; 2] {
        self.frame(s).0
    }

    pub fn curvature(&self, s: f64) -> f64 {
        norm(self.frame(s).2)
    }

    /// Orientation of the normal at `s`, in `[0, pi)`.
    pub fn normal_angle(&self, s: f64) -> f64 {
        let t = self.frame(s).1;
        (t[1].atan2(t[0]) + PI / 2.0).rem_euclid(PI)
    }

    /// `n` points at equispaced arc length `s_q = q L / n`.
    pub fn sample(&self, n: usize) -> Vec<[f64; 2]> {
        (0..n)
            .map(|q| self.point(self.length * q as f64 / n as f64))
            .collect()
    }

    /// Largest deviation of `|tau'|` from 1 over `n` samples.
    pub fn speed_error(&self, n: usize) -> f64 {
        let h = 1e-5 * self.length;
        (0..n)
            .map(|q| {
                let s = self.length * q as f64 / n as f64;
                let a = self.point(s - h);
                let b = self.point(s + h);
                (norm([b[0] - a[0], b[1] - a[1]]) / (2.0 * h) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Closest point on the curve to `p`: arc length and distance.
    pub fn closest_point(&self, p: [f64; 2], seeds: usize) -> (f64, f64) {
        if let CurveKind::Circle { center, radius } = &self.kind {
            let d = [p[0] - center[0], p[1] - center[1]];
            let a = d[1].atan2(d[0]).rem_euclid(2.0 * PI);
            return (a * radius, (norm(d) - radius).abs());
        }
        let d2 = |s: f64| {
            let q = self.point(s);
            (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)
        };
        let mut best = (0.0, f64::MAX);
        for i in 0..seeds {
            let s = self.length * i as f64 / seeds as f64;
            let v = d2(s);
            if v < best.1 {
                best = (s, v);
            }
        }
        let mut s = best.0;
        for _ in 0..30 {
            let (q, t, k) = self.frame(s);
            let r = [q[0] - p[0], q[1] - p[1]];
            let g = r[0] * t[0] + r[1] * t[1];
            let h = 1.0 + r[0] * k[0] + r[1] * k[1];
            if h <= 0.0 {
                break;
            }
            let step = g / h;
            s -= step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        let v = d2(s);
        if v <= best.1 {
            (s.rem_euclid(self.length), v.sqrt())
        } else {
            (best.0, best.1.sqrt())
        }
    }
}
