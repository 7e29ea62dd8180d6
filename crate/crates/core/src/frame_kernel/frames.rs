use super::grid::{FreqGrid, SpectralImage};
use super::lattice::{
    curvelet_steps, wedge_angle, wedge_count, CurveletIndex, CurveletLattice, WaveletIndex,
    WaveletLattice,
};
use super::window::{AngularBump, RadialWindow};
use crate::error::{Error, Result};
use crate::fft::{fft2, Sign};
use crate::nufft::Nufft2;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Lattice point and coefficient within one wedge.
type Entry = ([i64; 2], Complex64);

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FrameKind {
    Wavelet,
    Curvelet,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Lattice {
    Wavelet(WaveletLattice),
    Curvelet(CurveletLattice),
}

impl Lattice {
    pub fn len(&self) -> usize {
        match self {
            Lattice::Wavelet(l) => l.len(),
            Lattice::Curvelet(l) => l.len(),
        }
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn scale(&self) -> i32 {
        match self {
            Lattice::Wavelet(l) => l.j,
            Lattice::Curvelet(l) => l.j,
        }
    }
}

/// Coefficients of one frame on one lattice (one scale, one wedge).
#[derive(Clone, Debug, PartialEq)]
pub struct CoefBlock {
    pub lattice: Lattice,
    pub values: Vec<Complex64>,
}

impl CoefBlock {
    pub fn l1(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Analysis output of one frame for a piece at nominal scale `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    pub kind: FrameKind,
    pub j: i32,
    pub blocks: Vec<CoefBlock>,
}

impl CoefficientTable {
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.values.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn wavelet(&self, idx: &WaveletIndex) -> Option<Complex64> {
        self.blocks.iter().find_map(|b| match &b.lattice {
            Lattice::Wavelet(l) if l.j == idx.j => l.flat(idx.k).map(|f| b.values[f]),
            _ => None,
        })
    }

    pub fn curvelet(&self, idx: &CurveletIndex) -> Option<Complex64> {
        self.blocks.iter().find_map(|b| match &b.lattice {
            Lattice::Curvelet(l) if l.j == idx.j && l.l == idx.l => {
                l.flat(idx.k).map(|f| b.values[f])
            }
            _ => None,
        })
    }

    pub fn energy(&self) -> f64 {
        self.blocks.iter().map(|b| b.energy()).sum()
    }

    /// All wavelet entries with their values, in storage order.
    pub fn wavelet_entries(&self) -> Vec<(WaveletIndex, Complex64)> {
        let mut out = Vec::new();
        for b in &self.blocks {
            if let Lattice::Wavelet(l) = &b.lattice {
                out.extend(b.values.iter().enumerate().map(|(f, v)| (l.index(f), *v)));
            }
        }
        out
    }

    pub fn curvelet_entries(&self) -> Vec<(CurveletIndex, Complex64)> {
        let mut out = Vec::new();
        for b in &self.blocks {
            if let Lattice::Curvelet(l) = &b.lattice {
                out.extend(l.indices().zip(b.values.iter().copied()));
            }
        }
        out
    }
}

/// Handle to both frames: windows, spatial period and NUFFT accuracy.
#[derive(Clone, Debug, PartialEq)]
pub struct Frames {
    pub window: RadialWindow,
    pub bump: AngularBump,
    pub oversample: usize,
    pub nufft_tol: f64,
}

fn mod_index(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

/// Largest `|cos|` and `|sin|` over the angle interval `[a, b]`.
fn arc_extent(a: f64, b: f64) -> (f64, f64) {
    let contains = |base: f64| {
        let k = ((a - base) / PI).ceil();
        base + k * PI <= b
    };
    let mc = if contains(0.0) {
        1.0
    } else {
        a.cos().abs().max(b.cos().abs())
    };
    let ms = if contains(PI / 2.0) {
        1.0
    } else {
        a.sin().abs().max(b.sin().abs())
    };
    (mc, ms)
}

impl Frames {
    pub fn new(order: usize, oversample: usize) -> Self {
        Self {
            window: RadialWindow::new(order),
            bump: AngularBump::new(order),
            oversample,
            nufft_tol: 1e-9,
        }
    }

    pub fn period(&self) -> f64 {
        2.0 * self.oversample as f64
    }

    pub fn grid(&self, j: i32) -> Result<FreqGrid> {
        FreqGrid::new(j, self.oversample)
    }

    fn check_grid(&self, grid: &FreqGrid, s: i32) -> Result<()> {
        if grid.oversample() != self.oversample {
            return Err(Error::InvalidInput(
                "grid oversample differs from the frames".into(),
            ));
        }
        if s < 1 || !grid.covers(s) {
            return Err(Error::Coverage {
                grid: grid.j(),
                scale: s,
            });
        }
        Ok(())
    }

    /// `2^{-s} W(|xi| / 2^s)`.
    pub fn wavelet_envelope(&self, s: i32, xi: [f64; 2]) -> f64 {
        let a = 2f64.powi(-s);
        a * self.window.eval(xi[0].hypot(xi[1]) * a)
    }

    /// Angular window of a wedge centred at orientation `theta` (any real angle).
    pub fn angular(&self, s: i32, theta: f64, xi: [f64; 2]) -> f64 {
        let l = wedge_count(s) as f64;
        if l <= 1.0 {
            return 1.0;
        }
        let omega = xi[1].atan2(xi[0]);
        let mut d = (omega - theta) * l / PI;
        d -= l * (d / l).round();
        self.bump.eval(d)
    }

    /// Amplitude factor of curvelets at scale `s`, chosen so the frame is Parseval.
    pub fn curvelet_amplitude(s: i32) -> f64 {
        let h = curvelet_steps(s);
        (h[0] * h[1]).sqrt()
    }

    /// `int W(r) dr`.
    pub fn window_integral(&self) -> f64 {
        crate::quadrature::integrate(|r| self.window.eval(r), 0.5, 2.0, 48, 16)
    }

    /// Coefficient of a unit-density straight line in a wavelet centred on it.
    pub fn wavelet_line_response(&self) -> f64 {
        self.window_integral() / PI
    }

    /// Coefficient of a unit-density straight line in an aligned curvelet
    /// centred on it, divided by `2^{s/4}`.
    pub fn curvelet_line_response(&self, s: i32) -> f64 {
        self.window_integral() * Self::curvelet_amplitude(s) * 2f64.powf(0.75 * s as f64) / PI
    }

    pub fn curvelet_envelope(&self, s: i32, theta: f64, xi: [f64; 2]) -> f64 {
        let r = xi[0].hypot(xi[1]);
        let w = self.window.eval(r * 2f64.powi(-s));
        if w == 0.0 {
            return 0.0;
        }
        Self::curvelet_amplitude(s) * w * self.angular(s, theta, xi)
    }

    pub fn wavelet_spectrum(&self, idx: &WaveletIndex, grid: &FreqGrid) -> Result<SpectralImage> {
        if (idx.j - grid.j()).abs() > 1 {
            return Err(Error::ScaleMismatch {
                atom: idx.j,
                grid: grid.j(),
            });
        }
        self.check_grid(grid, idx.j)?;
        let b = idx.position();
        Ok(SpectralImage::from_fn(*grid, |x| {
            let e = self.wavelet_envelope(idx.j, x);
            if e == 0.0 {
                ZERO
            } else {
                Complex64::from_polar(e, -(b[0] * x[0] + b[1] * x[1]))
            }
        }))
    }

    pub fn curvelet_spectrum(&self, idx: &CurveletIndex, grid: &FreqGrid) -> Result<SpectralImage> {
        if (idx.j - grid.j()).abs() > 1 {
            return Err(Error::ScaleMismatch {
                atom: idx.j,
                grid: grid.j(),
            });
        }
        if idx.l >= wedge_count(idx.j) {
            return Err(Error::UnknownIndex(format!("{idx:?}")));
        }
        self.check_grid(grid, idx.j)?;
        let b = idx.position();
        let theta = idx.theta();
        Ok(SpectralImage::from_fn(*grid, |x| {
            let e = self.curvelet_envelope(idx.j, theta, x);
            if e == 0.0 {
                ZERO
            } else {
                Complex64::from_polar(e, -(b[0] * x[0] + b[1] * x[1]))
            }
        }))
    }

    /// Pointwise product with the subband transfer `W(|xi| / 2^j)`.
    pub fn subband_filter(&self, f: &SpectralImage, j: i32) -> Result<SpectralImage> {
        if !f.grid.covers(j) {
            return Err(Error::Coverage {
                grid: f.grid.j(),
                scale: j,
            });
        }
        let a = 2f64.powi(-j);
        let data = f
            .data
            .par_iter()
            .enumerate()
            .map(|(i, v)| {
                let x = f.grid.freq(i);
                v * self.window.eval(x[0].hypot(x[1]) * a)
            })
            .collect();
        Ok(SpectralImage { grid: f.grid, data })
    }

    pub fn wavelet_lattice(&self, s: i32) -> WaveletLattice {
        WaveletLattice::new(s, self.period())
    }

    pub fn curvelet_lattice(&self, s: i32, l: usize) -> CurveletLattice {
        CurveletLattice::new(s, l, self.period())
    }

    /// Wavelet coefficients at one scale through one inverse FFT of size `(T 2^s)^2`.
    pub fn wavelet_analysis_scale(&self, f: &SpectralImage, s: i32) -> Result<CoefBlock> {
        self.check_grid(&f.grid, s)?;
        let lat = self.wavelet_lattice(s);
        let m = lat.m;
        let g = f.grid;
        let r = g.mode_radius(2f64.powi(s + 1));
        let mut buf = vec![ZERO; m * m];
        let w = g.weight();
        for m2 in -r..=r {
            for m1 in -r..=r {
                let i = g.index(m1, m2).unwrap();
                let v = f.data[i];
                if v == ZERO {
                    continue;
                }
                let e = self.wavelet_envelope(s, g.freq(i));
                if e != 0.0 {
                    buf[mod_index(m2, m) * m + mod_index(m1, m)] += v * (e * w);
                }
            }
        }
        fft2(&mut buf, m, m, Sign::Backward);
        let h = (m / 2) as i64;
        let values = (0..m * m)
            .map(|flat| {
                let k1 = (flat % m) as i64 - h;
                let k2 = (flat / m) as i64 - h;
                buf[mod_index(k2, m) * m + mod_index(k1, m)]
            })
            .collect();
        Ok(CoefBlock {
            lattice: Lattice::Wavelet(lat),
            values,
        })
    }

    /// Wavelet coefficients at scales `j-1, j, j+1`.
    pub fn wavelet_analysis(&self, f: &SpectralImage, j: i32) -> Result<CoefficientTable> {
        let blocks = (j - 1..=j + 1)
            .map(|s| self.wavelet_analysis_scale(f, s))
            .collect::<Result<_>>()?;
        Ok(CoefficientTable {
            kind: FrameKind::Wavelet,
            j,
            blocks,
        })
    }

    /// Adds `sum c_k psi_{s,k}` for one scale to `out`.
    pub fn wavelet_synthesis_scale(
        &self,
        s: i32,
        entries: &[([i64; 2], Complex64)],
        out: &mut SpectralImage,
    ) -> Result<()> {
        self.check_grid(&out.grid, s)?;
        if entries.is_empty() {
            return Ok(());
        }
        let m = self.wavelet_lattice(s).m;
        let mut buf = vec![ZERO; m * m];
        for (k, c) in entries {
            buf[mod_index(k[1], m) * m + mod_index(k[0], m)] += c;
        }
        fft2(&mut buf, m, m, Sign::Forward);
        let g = out.grid;
        let r = g.mode_radius(2f64.powi(s + 1));
        for m2 in -r..=r {
            for m1 in -r..=r {
                let i = g.index(m1, m2).unwrap();
                let e = self.wavelet_envelope(s, g.freq(i));
                if e != 0.0 {
                    out.data[i] += buf[mod_index(m2, m) * m + mod_index(m1, m)] * e;
                }
            }
        }
        Ok(())
    }

    /// `sum c_lambda psi_lambda` over explicit entries.
    pub fn wavelet_synthesis_entries(
        &self,
        entries: &[(WaveletIndex, Complex64)],
        grid: &FreqGrid,
    ) -> Result<SpectralImage> {
        let mut out = SpectralImage::zeros(*grid);
        let mut by_scale: BTreeMap<i32, Vec<([i64; 2], Complex64)>> = BTreeMap::new();
        for (idx, c) in entries {
            by_scale.entry(idx.j).or_default().push((idx.k, *c));
        }
        for (s, e) in by_scale {
            self.wavelet_synthesis_scale(s, &e, &mut out)?;
        }
        Ok(out)
    }

    /// Synthesis over `support`, reading coefficients from `coeffs`.
    pub fn wavelet_synthesis(
        &self,
        coeffs: &CoefficientTable,
        support: &[WaveletIndex],
        grid: &FreqGrid,
    ) -> Result<SpectralImage> {
        let entries = support
            .iter()
            .map(|i| {
                coeffs
                    .wavelet(i)
                    .map(|c| (*i, c))
                    .ok_or_else(|| Error::UnknownIndex(format!("{i:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.wavelet_synthesis_entries(&entries, grid)
    }

    /// Mode box `[-r0, r0] x [-r1, r1]` holding the wedge support within `radius`.
    pub(crate) fn wedge_box(&self, grid: &FreqGrid, s: i32, l: usize, radius: f64) -> [i64; 2] {
        let lw = wedge_count(s);
        let (mc, ms) = if lw <= 1 {
            (1.0, 1.0)
        } else {
            let th = wedge_angle(s, l);
            let half = PI / lw as f64;
            arc_extent(th - half, th + half)
        };
        [grid.mode_radius(radius * mc), grid.mode_radius(radius * ms)]
    }

    /// Curvelet coefficients of one wedge via a type-2 NUFFT on the rotated lattice.
    pub fn curvelet_analysis_block(
        &self,
        f: &SpectralImage,
        s: i32,
        l: usize,
    ) -> Result<CoefBlock> {
        let radius = 2f64.powi(s + 1).min(f.support_radius() + f.grid.dxi());
        self.curvelet_analysis_block_within(f, s, l, radius)
    }

    fn curvelet_analysis_block_within(
        &self,
        f: &SpectralImage,
        s: i32,
        l: usize,
        radius: f64,
    ) -> Result<CoefBlock> {
        self.check_grid(&f.grid, s)?;
        let lat = self.curvelet_lattice(s, l);
        let g = f.grid;
        let theta = wedge_angle(s, l);
        let [r0, r1] = self.wedge_box(&g, s, l, radius);
        let ms = [(2 * r0 + 1) as usize, (2 * r1 + 1) as usize];
        let w = g.weight();
        let mut modes = vec![ZERO; ms[0] * ms[1]];
        let mut any = false;
        for m2 in -r1..=r1 {
            for m1 in -r0..=r0 {
                let i = g.index(m1, m2).unwrap();
                let v = f.data[i];
                if v == ZERO {
                    continue;
                }
                let e = self.curvelet_envelope(s, theta, g.freq(i));
                if e != 0.0 {
                    modes[((m2 + r1) as usize) * ms[0] + (m1 + r0) as usize] = v * (e * w);
                    any = true;
                }
            }
        }
        let values = if any {
            let dxi = g.dxi();
            let pts: Vec<[f64; 2]> = lat
                .positions()
                .iter()
                .map(|b| [b[0] * dxi, b[1] * dxi])
                .collect();
            Nufft2::new([-r0, -r1], ms, self.nufft_tol).type2(&modes, &pts, 1)
        } else {
            vec![ZERO; lat.len()]
        };
        Ok(CoefBlock {
            lattice: Lattice::Curvelet(lat),
            values,
        })
    }

    /// Streams curvelet blocks of the given scales in (scale, wedge) order.
    pub fn curvelet_blocks<F: FnMut(CoefBlock) -> Result<()>>(
        &self,
        f: &SpectralImage,
        scales: std::ops::RangeInclusive<i32>,
        mut visit: F,
    ) -> Result<()> {
        let rf = f.support_radius() + f.grid.dxi();
        for s in scales {
            let radius = 2f64.powi(s + 1).min(rf);
            for l in 0..wedge_count(s) {
                visit(self.curvelet_analysis_block_within(f, s, l, radius)?)?;
            }
        }
        Ok(())
    }

    /// Curvelet coefficients at scales `j-1, j, j+1`, all wedges.
    pub fn curvelet_analysis(&self, f: &SpectralImage, j: i32) -> Result<CoefficientTable> {
        let mut blocks = Vec::new();
        self.curvelet_blocks(f, j - 1..=j + 1, |b| {
            blocks.push(b);
            Ok(())
        })?;
        Ok(CoefficientTable {
            kind: FrameKind::Curvelet,
            j,
            blocks,
        })
    }

    /// Adds `sum d_k gamma_{s,l,k}` for one wedge to `out` via a type-1 NUFFT.
    pub fn curvelet_synthesis_wedge(
        &self,
        s: i32,
        l: usize,
        entries: &[([i64; 2], Complex64)],
        out: &mut SpectralImage,
    ) -> Result<()> {
        self.check_grid(&out.grid, s)?;
        if entries.is_empty() {
            return Ok(());
        }
        let g = out.grid;
        let theta = wedge_angle(s, l);
        let dxi = g.dxi();
        let [r0, r1] = self.wedge_box(&g, s, l, 2f64.powi(s + 1));
        let ms = [(2 * r0 + 1) as usize, (2 * r1 + 1) as usize];
        let pts: Vec<[f64; 2]> = entries
            .iter()
            .map(|(k, _)| {
                let b = super::lattice::curvelet_position(s, theta, *k);
                [b[0] * dxi, b[1] * dxi]
            })
            .collect();
        let st: Vec<Complex64> = entries.iter().map(|e| e.1).collect();
        let modes = Nufft2::new([-r0, -r1], ms, self.nufft_tol).type1(&pts, &st, -1);
        for m2 in -r1..=r1 {
            for m1 in -r0..=r0 {
                let i = g.index(m1, m2).unwrap();
                let e = self.curvelet_envelope(s, theta, g.freq(i));
                if e != 0.0 {
                    out.data[i] += modes[((m2 + r1) as usize) * ms[0] + (m1 + r0) as usize] * e;
                }
            }
        }
        Ok(())
    }

    pub fn curvelet_synthesis_entries(
        &self,
        entries: &[(CurveletIndex, Complex64)],
        grid: &FreqGrid,
    ) -> Result<SpectralImage> {
        let mut out = SpectralImage::zeros(*grid);
        let mut groups: BTreeMap<(i32, usize), Vec<Entry>> = BTreeMap::new();
        for (idx, c) in entries {
            if idx.l >= wedge_count(idx.j) {
                return Err(Error::UnknownIndex(format!("{idx:?}")));
            }
            groups.entry((idx.j, idx.l)).or_default().push((idx.k, *c));
        }
        for ((s, l), e) in groups {
            self.curvelet_synthesis_wedge(s, l, &e, &mut out)?;
        }
        Ok(out)
    }

    pub fn curvelet_synthesis(
        &self,
        coeffs: &CoefficientTable,
        support: &[CurveletIndex],
        grid: &FreqGrid,
    ) -> Result<SpectralImage> {
        let entries = support
            .iter()
            .map(|i| {
                coeffs
                    .curvelet(i)
                    .map(|c| (*i, c))
                    .ok_or_else(|| Error::UnknownIndex(format!("{i:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.curvelet_synthesis_entries(&entries, grid)
    }

    /// Full synthesis of every stored coefficient.
    pub fn synthesize_all(
        &self,
        coeffs: &CoefficientTable,
        grid: &FreqGrid,
    ) -> Result<SpectralImage> {
        let mut out = SpectralImage::zeros(*grid);
        for b in &coeffs.blocks {
            match &b.lattice {
                Lattice::Wavelet(l) => {
                    let e: Vec<_> = b
                        .values
                        .iter()
                        .enumerate()
                        .map(|(f, v)| (l.index(f).k, *v))
                        .collect();
                    self.wavelet_synthesis_scale(l.j, &e, &mut out)?;
                }
                Lattice::Curvelet(l) => {
                    let e: Vec<_> = l
                        .indices()
                        .map(|i| i.k)
                        .zip(b.values.iter().copied())
                        .collect();
                    self.curvelet_synthesis_wedge(l.j, l.l, &e, &mut out)?;
                }
            }
        }
        Ok(out)
    }

    /// `<f, psi>` for a wavelet of scale `s` at an arbitrary position `b`.
    pub fn wavelet_probe(&self, f: &SpectralImage, s: i32, b: [f64; 2]) -> Complex64 {
        let g = f.grid;
        let r = g.mode_radius(2f64.powi(s + 1));
        let rows: Vec<Complex64> = (-r..=r)
            .into_par_iter()
            .map(|m2| {
                let mut acc = ZERO;
                for m1 in -r..=r {
                    let i = g.index(m1, m2).unwrap();
                    let v = f.data[i];
                    if v == ZERO {
                        continue;
                    }
                    let x = g.freq(i);
                    let e = self.wavelet_envelope(s, x);
                    if e != 0.0 {
                        acc += v * Complex64::from_polar(e, b[0] * x[0] + b[1] * x[1]);
                    }
                }
                acc
            })
            .collect();
        rows.into_iter().sum::<Complex64>() * g.weight()
    }

    /// `<f, gamma>` for a curvelet of scale `s`, orientation `theta`, position `b`.
    pub fn curvelet_probe(&self, f: &SpectralImage, s: i32, theta: f64, b: [f64; 2]) -> Complex64 {
        let g = f.grid;
        let lw = wedge_count(s);
        let half = PI / lw as f64;
        let radius = 2f64.powi(s + 1);
        let (mc, ms) = if lw <= 1 {
            (1.0, 1.0)
        } else {
            arc_extent(theta - half, theta + half)
        };
        let r0 = g.mode_radius(radius * mc);
        let r1 = g.mode_radius(radius * ms);
        let rows: Vec<Complex64> = (-r1..=r1)
            .into_par_iter()
            .map(|m2| {
                let mut acc = ZERO;
                for m1 in -r0..=r0 {
                    let i = g.index(m1, m2).unwrap();
                    let v = f.data[i];
                    if v == ZERO {
                        continue;
                    }
                    let x = g.freq(i);
                    let e = self.curvelet_envelope(s, theta, x);
                    if e != 0.0 {
                        acc += v * Complex64::from_polar(e, b[0] * x[0] + b[1] * x[1]);
                    }
                }
                acc
            })
            .collect();
        rows.into_iter().sum::<Complex64>() * g.weight()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random real band-limited input: a few atoms near the centre.
    fn random_input(fr: &Frames, j: i32, seed: u64) -> SpectralImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = fr.grid(j).unwrap();
        let mut f = SpectralImage::zeros(g);
        for _ in 0..6 {
            let b = [rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4)];
            let a = rng.random_range(-1.0..1.0);
            let width: f64 = rng.random_range(0.6..1.5);
            for (i, v) in f.data.iter_mut().enumerate() {
                let x = g.freq(i);
                let r = x[0].hypot(x[1]) / 2f64.powi(j);
                let bump = fr.window.eval(r * width) + fr.window.eval(r);
                *v += Complex64::from_polar(a * bump, -(b[0] * x[0] + b[1] * x[1]));
            }
        }
        fr.subband_filter(&f, j).unwrap()
    }

    fn direct_inner(f: &SpectralImage, g: &SpectralImage) -> Complex64 {
        let mut acc = ZERO;
        for i in (0..f.data.len()).rev() {
            acc += f.data[i] * g.data[i].conj();
        }
        acc * f.grid.weight()
    }

    #[test]
    fn arc_extent_cases() {
        let (c, s) = arc_extent(-0.1, 0.1);
        assert_eq!(c, 1.0);
        assert!((s - 0.1f64.sin()).abs() < 1e-15);
        let (c, s) = arc_extent(1.4, 1.8);
        assert_eq!(s, 1.0);
        assert!(c < 0.25);
        let (c, _) = arc_extent(3.0, 3.3);
        assert_eq!(c, 1.0);
    }

    #[test]
    fn angular_partition_all_scales() {
        let fr = Frames::new(3, 1);
        for s in 1..=12 {
            let lw = wedge_count(s);
            for i in 0..500 {
                let om = i as f64 * 0.01271 - 1.0;
                let x = [om.cos(), om.sin()];
                let sum: f64 = (0..lw)
                    .map(|l| fr.angular(s, wedge_angle(s, l), x).powi(2))
                    .sum();
                assert!((sum - 1.0).abs() < 1e-12, "s={s}");
            }
        }
    }

    #[test]
    fn wavelet_parseval_and_reconstruction() {
        let fr = Frames::new(3, 1);
        let f = random_input(&fr, 5, 1);
        let t = fr.wavelet_analysis(&f, 5).unwrap();
        let e = f.norm().powi(2);
        assert!((t.energy() / e - 1.0).abs() < 1e-10);
        let back = fr.synthesize_all(&t, &f.grid).unwrap();
        assert!(back.sub(&f).norm() / f.norm() < 1e-10);
    }

    #[test]
    fn wavelet_coefficients_match_quadrature() {
        let fr = Frames::new(3, 1);
        let f = random_input(&fr, 4, 2);
        let t = fr.wavelet_analysis(&f, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let s = rng.random_range(3..=5);
            let h = (fr.wavelet_lattice(s).m / 2) as i64;
            let idx = WaveletIndex {
                j: s,
                k: [rng.random_range(-h..h), rng.random_range(-h..h)],
            };
            let psi = fr.wavelet_spectrum(&idx, &f.grid).unwrap();
            let d = direct_inner(&f, &psi);
            let c = t.wavelet(&idx).unwrap();
            assert!((c - d).norm() <= 1e-9 * d.norm().max(1e-3));
        }
    }

    #[test]
    fn curvelet_coefficients_match_quadrature() {
        let fr = Frames::new(3, 1);
        let f = random_input(&fr, 4, 3);
        let t = fr.curvelet_analysis(&f, 4).unwrap();
        let entries = t.curvelet_entries();
        // the transform error is relative to the block, not to each entry
        let cmax = entries.iter().map(|e| e.1.norm()).fold(0.0, f64::max);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..15 {
            let (idx, c) = entries[rng.random_range(0..entries.len())];
            let gam = fr.curvelet_spectrum(&idx, &f.grid).unwrap();
            let d = direct_inner(&f, &gam);
            assert!(
                (c - d).norm() <= 1e-8 * d.norm().max(1e-2 * cmax),
                "{idx:?} {c} {d}"
            );
        }
    }

    #[test]
    fn curvelet_reconstruction() {
        let fr = Frames::new(3, 1);
        let f = random_input(&fr, 5, 5);
        let t = fr.curvelet_analysis(&f, 5).unwrap();
        let back = fr.synthesize_all(&t, &f.grid).unwrap();
        let rel = back.sub(&f).norm() / f.norm();
        assert!(rel < 1e-3, "relative error {rel}");
    }

    #[test]
    fn singleton_synthesis_is_the_atom() {
        let fr = Frames::new(3, 1);
        let g = fr.grid(4).unwrap();
        let idx = CurveletIndex {
            j: 4,
            l: 1,
            k: [3, -2],
        };
        let atom = fr.curvelet_spectrum(&idx, &g).unwrap();
        let syn = fr
            .curvelet_synthesis_entries(&[(idx, Complex64::new(1.0, 0.0))], &g)
            .unwrap();
        assert!(syn.sub(&atom).norm() < 1e-9 * atom.norm());
        let w = WaveletIndex { j: 5, k: [7, 1] };
        let atom = fr.wavelet_spectrum(&w, &g).unwrap();
        let syn = fr
            .wavelet_synthesis_entries(&[(w, Complex64::new(1.0, 0.0))], &g)
            .unwrap();
        assert!(syn.sub(&atom).norm() < 1e-12 * atom.norm());
    }

    #[test]
    fn equal_norms_across_scales() {
        let fr = Frames::new(3, 1);
        let mut wn = Vec::new();
        let mut cn = Vec::new();
        for s in [6, 7, 8] {
            let g = fr.grid(s).unwrap();
            wn.push(
                fr.wavelet_spectrum(&WaveletIndex { j: s, k: [1, 2] }, &g)
                    .unwrap()
                    .norm(),
            );
            for l in [0, 1] {
                cn.push(
                    fr.curvelet_spectrum(
                        &CurveletIndex {
                            j: s,
                            l,
                            k: [2, -1],
                        },
                        &g,
                    )
                    .unwrap()
                    .norm(),
                );
            }
        }
        let ratio = |v: &[f64]| {
            v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::MAX, f64::min)
        };
        assert!(ratio(&wn) - 1.0 < 1e-6, "{wn:?}");
        assert!(ratio(&cn) - 1.0 < 1e-6, "{cn:?}");
    }

    #[test]
    fn line_responses_match_quadrature() {
        // the line x_1 = 0 has spectrum 2 pi delta(xi_2): one grid row of height 2 pi / dxi
        let fr = Frames::new(3, 1);
        let g = fr.grid(7).unwrap();
        let mut line = SpectralImage::zeros(g);
        for m1 in -(g.half() as i64)..=g.half() as i64 {
            line.data[g.index(m1, 0).unwrap()] = Complex64::new(2.0 * PI / g.dxi(), 0.0);
        }
        let w = fr.wavelet_probe(&line, 7, [0.0, 0.0]);
        assert!(
            (w.re / fr.wavelet_line_response() - 1.0).abs() < 1e-3,
            "{w}"
        );
        for s in [6, 7] {
            let c = fr.curvelet_probe(&line, s, 0.0, [0.0, 0.0]);
            let unit = fr.curvelet_line_response(s) * 2f64.powf(s as f64 / 4.0);
            assert!((c.re / unit - 1.0).abs() < 1e-3, "{c} {unit}");
        }
    }

    #[test]
    fn scale_mismatch_rejected() {
        let fr = Frames::new(3, 1);
        let g = fr.grid(5).unwrap();
        assert!(fr
            .wavelet_spectrum(&WaveletIndex { j: 7, k: [0, 0] }, &g)
            .is_err());
    }
}
