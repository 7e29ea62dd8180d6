//! Model distributions: point singularities, closed curves and a weighted
//! line fragment, sampled in frequency.

mod curve;

pub use curve::{CurveKind, CurveSpec};

use crate::diagnostics::{orientations, PhasePoint, PhaseSet};
use crate::error::{Error, Result};
use crate::frame_kernel::{AngularBump, Frames, FreqGrid, SpectralImage};
use crate::nufft::Nufft2;
use crate::quadrature::gauss_legendre;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Constant in the planar pair `|x|^{-3/2} <-> c |xi|^{-1/2}`,
/// `sqrt(2) pi Gamma(1/4) / Gamma(3/4)`.
pub const C_THREE_HALVES: f64 = 13.145_047_206_596_874;

/// Point singularities `sum_i |x - x_i|^{-3/2}`.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PointConfig {
    pub points: Vec<[f64; 2]>,
}

impl PointConfig {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        for (i, a) in points.iter().enumerate() {
            if !(a[0].is_finite() && a[1].is_finite()) {
                return Err(Error::InvalidInput(format!("point {i} is not finite")));
            }
            if points[..i].contains(a) {
                return Err(Error::InvalidInput(format!("point {a:?} listed twice")));
            }
        }
        Ok(Self { points })
    }
}

/// `w(x) = delta(x_1) w_2(x_2 / rho)`, a straight piece of curve along the
/// vertical axis with a smooth weight.
#[derive(Clone, Debug, PartialEq)]
pub struct LineFragment {
    pub rho: f64,
    bump: AngularBump,
}

impl LineFragment {
    pub fn new(rho: f64, order: usize) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidInput(format!(
                "fragment half-length {rho} outside (0, 1)"
            )));
        }
        Ok(Self {
            rho,
            bump: AngularBump::new(order),
        })
    }

    /// `w_2 = V^2`; its integer translates sum to one.
    pub fn w2(&self, t: f64) -> f64 {
        self.bump.eval(t).powi(2)
    }

    /// `hat w_2(omega) = 2 int_0^1 V(t)^2 cos(omega t) dt` (even and real).
    pub fn w2_hat(&self, omega: f64) -> f64 {
        let panels = (omega.abs() / 2.0).ceil() as usize + 4;
        let (x, w) = gauss_legendre(16);
        let h = 1.0 / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let c = (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                let t = c + 0.5 * h * xi;
                acc += wi * self.w2(t) * (omega * t).cos();
            }
        }
        acc * h
    }

    /// `max |hat w_2(omega)| (1 + |omega|)^power` over the probe set.
    pub fn decay_constant(&self, probe: &[f64], power: f64) -> f64 {
        probe
            .iter()
            .map(|w| self.w2_hat(*w).abs() * (1.0 + w.abs()).powf(power))
            .fold(0.0, f64::max)
    }

    /// Positions of the support of `w` with the normal orientation 0.
    pub fn ground_truth(&self, samples: usize) -> PhaseSet {
        let n = samples.max(2);
        PhaseSet::new(
            (0..n)
                .map(|i| {
                    let y = -self.rho + 2.0 * self.rho * i as f64 / (n - 1) as f64;
                    PhasePoint::new([0.0, y], 0.0)
                })
                .collect(),
        )
    }
}

/// Zeroes samples outside `|xi| <= radius`.
fn band<F: Fn([f64; 2]) -> Complex64 + Sync>(grid: FreqGrid, radius: f64, f: F) -> SpectralImage {
    SpectralImage::from_fn(grid, |x| {
        if x[0].hypot(x[1]) <= radius {
            f(x)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `hat P(xi) = c sum_i e^{-i x_i . xi} |xi|^{-1/2}` on the whole grid; 0 at `xi = 0`.
pub fn point_spectrum(cfg: &PointConfig, grid: &FreqGrid) -> SpectralImage {
    point_spectrum_band(cfg, grid, f64::INFINITY)
}

pub fn point_spectrum_band(cfg: &PointConfig, grid: &FreqGrid, radius: f64) -> SpectralImage {
    band(*grid, radius, |x| {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s: Complex64 = cfg
            .points
            .iter()
            .map(|p| Complex64::from_polar(1.0, -(p[0] * x[0] + p[1] * x[1])))
            .sum();
        s * (C_THREE_HALVES / r.sqrt())
    })
}

/// Trapezoid nodes needed for frequencies up to `max_freq`.
pub fn required_quad_nodes(curve: &CurveSpec, max_freq: f64) -> usize {
    (16.0 * max_freq * curve.length() / (2.0 * PI)).ceil() as usize
}

/// `hat C(xi) = int_0^L e^{-i tau(t) . xi} dt` on the whole grid.
pub fn curve_spectrum(
    curve: &CurveSpec,
    grid: &FreqGrid,
    quad_nodes: usize,
) -> Result<SpectralImage> {
    curve_spectrum_band(curve, grid, quad_nodes, f64::INFINITY)
}

/// Curve spectrum restricted to `|xi| <= radius`, by a type-1 NUFFT of the
/// trapezoid nodes.
pub fn curve_spectrum_band(
    curve: &CurveSpec,
    grid: &FreqGrid,
    quad_nodes: usize,
    radius: f64,
) -> Result<SpectralImage> {
    let reach = radius.min(grid.max_freq() * std::f64::consts::SQRT_2);
    let required = required_quad_nodes(curve, reach);
    if quad_nodes < required {
        return Err(Error::UnderResolved {
            given: quad_nodes,
            required,
        });
    }
    let r = grid.mode_radius(reach);
    let dxi = grid.dxi();
    let pts: Vec<[f64; 2]> = curve
        .sample(quad_nodes)
        .iter()
        .map(|p| [p[0] * dxi, p[1] * dxi])
        .collect();
    let wt = Complex64::new(curve.length() / quad_nodes as f64, 0.0);
    let st = vec![wt; pts.len()];
    let ms = (2 * r + 1) as usize;
    let modes = Nufft2::new([-r, -r], [ms, ms], 1e-13).type1(&pts, &st, -1);
    let h = grid.half() as i64;
    let side = grid.side();
    let mut out = SpectralImage::zeros(*grid);
    out.data
        .par_chunks_mut(side)
        .enumerate()
        .for_each(|(row, chunk)| {
            let m2 = row as i64 - h;
            if m2.abs() > r {
                return;
            }
            for (col, v) in chunk.iter_mut().enumerate() {
                let m1 = col as i64 - h;
                if m1.abs() > r {
                    continue;
                }
                let x = [m1 as f64 * dxi, m2 as f64 * dxi];
                if x[0].hypot(x[1]) <= radius {
                    *v = modes[((m2 + r) as usize) * ms + (m1 + r) as usize];
                }
            }
        });
    Ok(out)
}

/// `hat(wL)(xi) = rho hat w_2(rho xi_2)`, constant in `xi_1`.
pub fn line_fragment_spectrum(frag: &LineFragment, grid: &FreqGrid) -> SpectralImage {
    line_fragment_spectrum_band(frag, grid, f64::INFINITY)
}

pub fn line_fragment_spectrum_band(
    frag: &LineFragment,
    grid: &FreqGrid,
    radius: f64,
) -> SpectralImage {
    let h = grid.half() as i64;
    let row: Vec<f64> = (-h..=h)
        .into_par_iter()
        .map(|m2| frag.rho * frag.w2_hat(frag.rho * m2 as f64 * grid.dxi()))
        .collect();
    let dxi = grid.dxi();
    band(*grid, radius, |x| {
        Complex64::new(row[((x[1] / dxi).round() as i64 + h) as usize], 0.0)
    })
}

/// `F_j` applied to a target sampled on the scale-`j` grid.
pub fn filtered_piece(frames: &Frames, target: &SpectralImage, j: i32) -> Result<SpectralImage> {
    frames.subband_filter(target, j)
}

/// L2 norm by the Plancherel quadrature.
pub fn piece_energy(f: &SpectralImage) -> f64 {
    f.norm()
}

/// Each point paired with `samples` equispaced orientations.
pub fn point_wavefront(cfg: &PointConfig, samples: usize) -> PhaseSet {
    let th = orientations(samples);
    PhaseSet::new(
        cfg.points
            .iter()
            .flat_map(|p| th.iter().map(move |t| PhasePoint::new(*p, *t)))
            .collect(),
    )
}

/// `(tau(t_m), normal orientation)` at equispaced arc length.
pub fn curve_wavefront(curve: &CurveSpec, samples: usize) -> PhaseSet {
    PhaseSet::new(
        (0..samples)
            .map(|m| {
                let s = curve.length() * m as f64 / samples as f64;
                PhasePoint::new(curve.point(s), curve.normal_angle(s))
            })
            .collect(),
    )
}

/// A target distribution whose wavefront set can be sampled.
pub enum Target<'a> {
    Points(&'a PointConfig),
    Curve(&'a CurveSpec),
    Fragment(&'a LineFragment),
}

pub fn ground_truth_wavefront(target: Target<'_>, samples: usize) -> Result<PhaseSet> {
    if samples < 4 {
        return Err(Error::InvalidInput(format!(
            "{samples} wavefront samples; need at least 4"
        )));
    }
    Ok(match target {
        Target::Points(p) => point_wavefront(p, samples),
        Target::Curve(c) => curve_wavefront(c, samples),
        Target::Fragment(f) => f.ground_truth(samples),
    })
}

/// Point part plus curvelike part (closed curve and/or line fragment).
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub points: PointConfig,
    pub curve: Option<CurveSpec>,
    pub fragment: Option<LineFragment>,
}

impl Scene {
    /// One point at (-0.4, 0.3) and a circle of radius 0.5 about (0.15, -0.1).
    pub fn default_scene() -> Self {
        Self {
            points: PointConfig::new(vec![[-0.4, 0.3]]).unwrap(),
            curve: Some(CurveSpec::circle([0.15, -0.1], 0.5).unwrap()),
            fragment: None,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.points.points.is_empty() && self.curve.is_none() && self.fragment.is_none() {
            return Err(Error::DegenerateScene(
                "no points, no curve and no line fragment".into(),
            ));
        }
        Ok(())
    }

    /// Point part band-limited to `|xi| <= radius`.
    pub fn point_part(&self, grid: &FreqGrid, radius: f64) -> SpectralImage {
        if self.points.points.is_empty() {
            return SpectralImage::zeros(*grid);
        }
        point_spectrum_band(&self.points, grid, radius)
    }

    /// Curvelike part band-limited to `|xi| <= radius`.
    pub fn curve_part(&self, grid: &FreqGrid, radius: f64) -> Result<SpectralImage> {
        let mut out = SpectralImage::zeros(*grid);
        if let Some(c) = &self.curve {
            let reach = radius.min(grid.max_freq() * std::f64::consts::SQRT_2);
            out = curve_spectrum_band(c, grid, required_quad_nodes(c, reach), radius)?;
        }
        if let Some(f) = &self.fragment {
            out = out.add(&line_fragment_spectrum_band(f, grid, radius));
        }
        Ok(out)
    }

    /// `P_j` and `C_j` for the piece at scale `j`.
    pub fn pieces(&self, frames: &Frames, j: i32) -> Result<(SpectralImage, SpectralImage)> {
        self.check()?;
        let grid = frames.grid(j)?;
        let radius = 2f64.powi(j + 1);
        let p = filtered_piece(frames, &self.point_part(&grid, radius), j)?;
        let c = filtered_piece(frames, &self.curve_part(&grid, radius)?, j)?;
        Ok((p, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::decay_slope;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `int_0^inf u^{2a} e^{-u^4/2} du` by composite Gauss-Legendre on [0, 4].
    fn quartic_moment(a: i32) -> f64 {
        crate::quadrature::integrate(
            |u| u.powi(2 * a) * (-u.powi(4) / 2.0).exp(),
            0.0,
            4.0,
            64,
            16,
        )
    }

    #[test]
    fn constant_matches_gaussian_pairing_oracle() {
        // <|x|^{-3/2}, g> = (2 pi)^{-2} <c |xi|^{-1/2}, hat g> for g = e^{-|x|^2/2};
        // both radial integrals reduce to quartic moments after r = u^2.
        let lhs = 2.0 * PI * 2.0 * quartic_moment(0);
        let rhs_over_c = 2.0 * quartic_moment(1);
        let c = lhs / rhs_over_c;
        assert!((c / C_THREE_HALVES - 1.0).abs() < 1e-12, "{c}");
    }

    #[test]
    fn circle_matches_bessel_oracle() {
        let g = FreqGrid::new(6, 1).unwrap();
        let r = 0.5;
        let c = CurveSpec::circle([0.0, 0.0], r).unwrap();
        let q = required_quad_nodes(&c, g.max_freq() * 2f64.sqrt());
        let f = curve_spectrum(&c, &g, q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let i = rng.random_range(0..g.len());
            let x = g.freq(i);
            let oracle = 2.0 * PI * r * libm::j0(r * x[0].hypot(x[1]));
            assert!(
                (f.data[i] - oracle).norm() / (2.0 * PI * r) < 1e-8,
                "{} vs {oracle}",
                f.data[i]
            );
        }
    }

    #[test]
    fn translation_multiplies_by_phase() {
        let g = FreqGrid::new(4, 1).unwrap();
        let v = [0.2, -0.3];
        let a = CurveSpec::circle([0.0, 0.0], 0.4).unwrap();
        let b = CurveSpec::circle(v, 0.4).unwrap();
        let q = 4096;
        let fa = curve_spectrum(&a, &g, q).unwrap();
        let fb = curve_spectrum(&b, &g, q).unwrap();
        for i in (0..g.len()).step_by(97) {
            let x = g.freq(i);
            let expect = fa.data[i] * Complex64::from_polar(1.0, -(v[0] * x[0] + v[1] * x[1]));
            assert!((fb.data[i] - expect).norm() < 1e-9);
        }
    }

    #[test]
    fn under_resolved_quadrature_is_rejected() {
        let g = FreqGrid::new(5, 1).unwrap();
        let c = CurveSpec::circle([0.0, 0.0], 0.5).unwrap();
        match curve_spectrum(&c, &g, 10) {
            Err(Error::UnderResolved {
                given: 10,
                required,
            }) => assert!(required > 10),
            other => panic!("{other:?}"),
        }
    }

    fn annulus_energy(f: &SpectralImage, r: f64) -> f64 {
        let g = f.grid;
        (0..g.len())
            .filter(|&i| {
                let x = g.freq(i);
                let q = x[0].hypot(x[1]);
                q >= r && q < 2.0 * r
            })
            .map(|i| f.data[i].norm_sqr())
            .sum::<f64>()
            * g.weight()
    }

    #[test]
    fn annulus_energy_grows_linearly() {
        let s = Scene::default_scene();
        let g = FreqGrid::new(8, 1).unwrap();
        let p = s.point_part(&g, f64::INFINITY);
        let c = s.curve_part(&g, 2f64.powi(10)).unwrap();
        let mut sp = Vec::new();
        let mut sc = Vec::new();
        for j in 4..=9 {
            let r = 2f64.powi(j);
            sp.push((j, annulus_energy(&p, r)));
            sc.push((j, annulus_energy(&c, r)));
        }
        let a = decay_slope(&sp).unwrap();
        let b = decay_slope(&sc).unwrap();
        assert!((a - 1.0).abs() < 0.05, "point slope {a}");
        assert!((b - 1.0).abs() < 0.05, "curve slope {b}");
        let ratios: Vec<f64> = sp.iter().zip(&sc).map(|(x, y)| x.1 / y.1).collect();
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(hi / lo <= 4.0, "{ratios:?}");
    }

    #[test]
    fn spectra_are_conjugate_symmetric() {
        let s = Scene::default_scene();
        let g = FreqGrid::new(5, 1).unwrap();
        assert!(s.point_part(&g, f64::INFINITY).conjugate_symmetry_defect() < 1e-12);
        assert!(s.curve_part(&g, 64.0).unwrap().conjugate_symmetry_defect() < 1e-10);
        let f = LineFragment::new(0.3, 3).unwrap();
        assert_eq!(
            line_fragment_spectrum(&f, &g).conjugate_symmetry_defect(),
            0.0
        );
    }

    #[test]
    fn line_fragment_examples() {
        let f = LineFragment::new(0.4, 3).unwrap();
        let g = FreqGrid::new(4, 1).unwrap();
        let s = line_fragment_spectrum(&f, &g);
        // integral of V^2 is 1 by the partition identity
        let centre = g.index(0, 0).unwrap();
        assert!((s.data[centre].re - 0.4).abs() < 1e-13);
        for m2 in [-5, 0, 7] {
            let row: Vec<Complex64> = (-5..=5)
                .map(|m1| s.data[g.index(m1, m2).unwrap()])
                .collect();
            assert!(row.iter().all(|v| *v == row[0]));
        }
        // a compactly supported w_2 cannot decay exponentially; check rapid polynomial decay
        let probe: Vec<f64> = (0..=200).map(|i| i as f64 * 0.5).collect();
        assert!(f.decay_constant(&probe, 0.0) <= 1.0 + 1e-12);
        assert!(f.decay_constant(&probe[100..], 0.0) < 1e-6);
    }

    #[test]
    fn filtering_is_linear_and_band_limited() {
        let fr = Frames::new(3, 1);
        let s = Scene::default_scene();
        let g = fr.grid(6).unwrap();
        let p = s.point_part(&g, 128.0);
        let c = s.curve_part(&g, 128.0).unwrap();
        let sum = filtered_piece(&fr, &p.add(&c), 6).unwrap();
        let parts = filtered_piece(&fr, &p, 6)
            .unwrap()
            .add(&filtered_piece(&fr, &c, 6).unwrap());
        for (a, b) in sum.data.iter().zip(&parts.data) {
            assert!((a - b).norm() <= 1e-15 * a.norm().max(1e-300) * 4.0);
        }
        for (i, v) in sum.data.iter().enumerate() {
            let x = g.freq(i);
            let r = x[0].hypot(x[1]);
            if r <= 32.0 || r >= 128.0 {
                assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn ground_truth_examples() {
        let p = PointConfig::new(vec![[0.1, 0.2]]).unwrap();
        let w = ground_truth_wavefront(Target::Points(&p), 4).unwrap();
        assert_eq!(w.len(), 4);
        let th: Vec<f64> = w.points.iter().map(|q| q.theta).collect();
        assert_eq!(th, vec![0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]);
        let c = CurveSpec::circle([0.0, 0.0], 0.5).unwrap();
        for q in ground_truth_wavefront(Target::Curve(&c), 16)
            .unwrap()
            .points
        {
            let radial = q.b[1].atan2(q.b[0]).rem_euclid(PI);
            assert!(crate::diagnostics::orientation_gap(radial, q.theta) < 1e-12);
        }
        let f = LineFragment::new(0.3, 3).unwrap();
        assert!(ground_truth_wavefront(Target::Fragment(&f), 8)
            .unwrap()
            .points
            .iter()
            .all(|q| q.theta == 0.0));
        assert!(PointConfig::new(vec![[0.0, 0.0], [0.0, 0.0]]).is_err());
        let empty = Scene {
            points: PointConfig::new(vec![]).unwrap(),
            curve: None,
            fragment: None,
        };
        assert!(matches!(empty.check(), Err(Error::DegenerateScene(_))));
    }
}
