use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Cartesian frequency grid for a piece at nominal scale `j`.
///
/// Nodes are `m * dxi` for integer `m` in `[-half, half]^2`, with
/// `dxi = pi / oversample`, so every piece is periodic in space with period
/// `2 * oversample`. The grid reaches radius `2^{j+2}`, the outer edge of
/// the scale `j+1` atoms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreqGrid {
    j: i32,
    oversample: usize,
    half: usize,
    dxi: f64,
}

impl FreqGrid {
    pub fn new(j: i32, oversample: usize) -> Result<Self> {
        if !(1..=14).contains(&j) {
            return Err(Error::InvalidInput(format!(
                "grid scale {j} outside 1..=14"
            )));
        }
        if !(1..=4).contains(&oversample) || !oversample.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "oversample {oversample} must be 1, 2 or 4"
            )));
        }
        let dxi = PI / oversample as f64;
        let half = (2f64.powi(j + 2) / dxi).ceil() as usize;
        Ok(Self {
            j,
            oversample,
            half,
            dxi,
        })
    }

    pub fn j(&self) -> i32 {
        self.j
    }
    pub fn oversample(&self) -> usize {
        self.oversample
    }
    pub fn half(&self) -> usize {
        self.half
    }
    pub fn side(&self) -> usize {
        2 * self.half + 1
    }
    pub fn len(&self) -> usize {
        self.side() * self.side()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn dxi(&self) -> f64 {
        self.dxi
    }
    /// Spatial period of the sampled pieces.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.dxi
    }
    /// Cell measure of the Plancherel quadrature, `(2 pi)^{-2} dxi^2`.
    pub fn weight(&self) -> f64 {
        (self.dxi / (2.0 * PI)).powi(2)
    }
    pub fn max_freq(&self) -> f64 {
        self.half as f64 * self.dxi
    }

    /// True when the scale-`s` annulus `|xi| < 2^{s+1}` is on the grid.
    pub fn covers(&self, s: i32) -> bool {
        self.max_freq() + 1e-9 >= 2f64.powi(s + 1)
    }

    pub fn index(&self, m1: i64, m2: i64) -> Option<usize> {
        let h = self.half as i64;
        if m1.abs() > h || m2.abs() > h {
            return None;
        }
        Some(((m2 + h) as usize) * self.side() + (m1 + h) as usize)
    }

    pub fn mode(&self, idx: usize) -> (i64, i64) {
        let s = self.side();
        let h = self.half as i64;
        ((idx % s) as i64 - h, (idx / s) as i64 - h)
    }

    pub fn freq(&self, idx: usize) -> [f64; 2] {
        let (m1, m2) = self.mode(idx);
        [m1 as f64 * self.dxi, m2 as f64 * self.dxi]
    }

    /// Index range `-r..=r` of modes within radius `radius`, clipped to the grid.
    pub fn mode_radius(&self, radius: f64) -> i64 {
        ((radius / self.dxi).ceil() as i64).min(self.half as i64)
    }
}

/// Frequency samples of a band-limited piece.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralImage {
    pub grid: FreqGrid,
    pub data: Vec<Complex64>,
}

const CHUNK: usize = 1 << 14;

impl SpectralImage {
    pub fn zeros(grid: FreqGrid) -> Self {
        Self {
            grid,
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn<F: Fn([f64; 2]) -> Complex64 + Sync>(grid: FreqGrid, f: F) -> Self {
        let data = (0..grid.len())
            .into_par_iter()
            .map(|i| f(grid.freq(i)))
            .collect();
        Self { grid, data }
    }

    /// `<self, other>` by the Plancherel quadrature; chunked sums in fixed order.
    pub fn inner(&self, other: &SpectralImage) -> Complex64 {
        assert_eq!(self.grid, other.grid);
        let parts: Vec<Complex64> = self
            .data
            .par_chunks(CHUNK)
            .zip(other.data.par_chunks(CHUNK))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y.conj()).sum())
            .collect();
        parts.into_iter().sum::<Complex64>() * self.grid.weight()
    }

    /// L2 norm of the piece.
    pub fn norm(&self) -> f64 {
        let parts: Vec<f64> = self
            .data
            .par_chunks(CHUNK)
            .map(|a| a.iter().map(|x| x.norm_sqr()).sum())
            .collect();
        (parts.into_iter().sum::<f64>() * self.grid.weight()).sqrt()
    }

    pub fn sub(&self, other: &SpectralImage) -> SpectralImage {
        assert_eq!(self.grid, other.grid);
        let data = self
            .data
            .par_iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        SpectralImage {
            grid: self.grid,
            data,
        }
    }

    pub fn add(&self, other: &SpectralImage) -> SpectralImage {
        assert_eq!(self.grid, other.grid);
        let data = self
            .data
            .par_iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        SpectralImage {
            grid: self.grid,
            data,
        }
    }

    pub fn scaled(&self, s: f64) -> SpectralImage {
        SpectralImage {
            grid: self.grid,
            data: self.data.par_iter().map(|a| a * s).collect(),
        }
    }

    /// Largest `|xi|` carrying a nonzero sample.
    pub fn support_radius(&self) -> f64 {
        let parts: Vec<f64> = self
            .data
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, a)| {
                let mut r: f64 = 0.0;
                for (i, v) in a.iter().enumerate() {
                    if *v != Complex64::new(0.0, 0.0) {
                        let x = self.grid.freq(c * CHUNK + i);
                        r = r.max(x[0].hypot(x[1]));
                    }
                }
                r
            })
            .collect();
        parts.into_iter().fold(0.0, f64::max)
    }

    /// Largest defect of the conjugate symmetry `f(-xi) = conj f(xi)`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.data.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let a = self.data[i];
            let b = self.data[n - 1 - i];
            worst = worst.max((a - b.conj()).norm());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = FreqGrid::new(5, 1).unwrap();
        assert!(g.covers(6));
        assert!(!g.covers(7));
        assert!((g.period() - 2.0).abs() < 1e-15);
        let i = g.index(3, -4).unwrap();
        assert_eq!(g.mode(i), (3, -4));
        assert!(g.index(g.half() as i64 + 1, 0).is_none());
        assert!(FreqGrid::new(5, 3).is_err());
    }

    #[test]
    fn norm_matches_reordered_sum() {
        let g = FreqGrid::new(3, 1).unwrap();
        let f = SpectralImage::from_fn(g, |x| Complex64::new((x[0] * 0.3).sin(), x[1].cos() * 0.1));
        let direct: f64 = (0..g.len())
            .rev()
            .map(|i| f.data[i].norm_sqr())
            .sum::<f64>()
            * g.weight();
        assert!((f.norm() - direct.sqrt()).abs() < 1e-12 * direct.sqrt());
        assert_eq!(SpectralImage::zeros(g).norm(), 0.0);
    }
}
