use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveletIndex {
    pub j: i32,
    pub k: [i64; 2],
}

impl WaveletIndex {
    pub fn position(&self) -> [f64; 2] {
        let a = 2f64.powi(-self.j);
        [self.k[0] as f64 * a, self.k[1] as f64 * a]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveletIndex {
    pub j: i32,
    pub l: usize,
    pub k: [i64; 2],
}

/// Number of wedges at scale `j`.
pub fn wedge_count(j: i32) -> usize {
    1usize << (j.max(0) / 2)
}

/// Orientation of wedge `l` at scale `j`.
pub fn wedge_angle(j: i32, l: usize) -> f64 {
    PI * l as f64 / wedge_count(j) as f64
}

/// Lattice steps along the wedge normal and tangent: `2^{-j}` and `2^{floor(j/2)-j-1}`.
pub fn curvelet_steps(j: i32) -> [f64; 2] {
    [2f64.powi(-j), 2f64.powi((j.max(0) / 2) - j - 1)]
}

impl CurveletIndex {
    pub fn theta(&self) -> f64 {
        wedge_angle(self.j, self.l)
    }

    pub fn position(&self) -> [f64; 2] {
        curvelet_position(self.j, self.theta(), self.k)
    }
}

pub fn curvelet_position(j: i32, theta: f64, k: [i64; 2]) -> [f64; 2] {
    let h = curvelet_steps(j);
    let (s, c) = theta.sin_cos();
    let u = k[0] as f64 * h[0];
    let v = k[1] as f64 * h[1];
    [c * u - s * v, s * u + c * v]
}

/// Square lattice `k / 2^j` covering the periodic cell `[-T/2, T/2)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletLattice {
    pub j: i32,
    /// Points per side, `T * 2^j`.
    pub m: usize,
}

impl WaveletLattice {
    pub fn new(j: i32, period: f64) -> Self {
        let m = (period * 2f64.powi(j)).round() as usize;
        Self { j, m }
    }
    pub fn len(&self) -> usize {
        self.m * self.m
    }
    pub fn is_empty(&self) -> bool {
        self.m == 0
    }
    pub fn index(&self, flat: usize) -> WaveletIndex {
        let h = (self.m / 2) as i64;
        WaveletIndex {
            j: self.j,
            k: [(flat % self.m) as i64 - h, (flat / self.m) as i64 - h],
        }
    }
    pub fn flat(&self, k: [i64; 2]) -> Option<usize> {
        let h = (self.m / 2) as i64;
        let (a, b) = (k[0] + h, k[1] + h);
        if a < 0 || b < 0 || a >= self.m as i64 || b >= self.m as i64 {
            return None;
        }
        Some(b as usize * self.m + a as usize)
    }
}

/// Rotated anisotropic lattice of one wedge, truncated to the periodic cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveletLattice {
    pub j: i32,
    pub l: usize,
    /// Rows `(k1, first k2, count)` in increasing `k1`.
    rows: Vec<(i64, i64, usize)>,
    offsets: Vec<usize>,
}

fn in_cell(b: [f64; 2], half: f64) -> bool {
    b[0] >= -half && b[0] < half && b[1] >= -half && b[1] < half
}

impl CurveletLattice {
    pub fn new(j: i32, l: usize, period: f64) -> Self {
        let half = period / 2.0;
        let theta = wedge_angle(j, l);
        let h = curvelet_steps(j);
        let (s, c) = theta.sin_cos();
        let reach = half * std::f64::consts::SQRT_2;
        let k1max = (reach / h[0]).ceil() as i64 + 1;
        let k2max = (reach / h[1]).ceil() as i64 + 1;
        let mut rows = Vec::new();
        let mut offsets = vec![0];
        for k1 in -k1max..=k1max {
            let u = k1 as f64 * h[0];
            // interval of v from both cell constraints, then clipped and checked exactly
            let (mut lo, mut hi) = (-reach, reach);
            if s > 1e-12 {
                lo = lo.max((u * c - half) / s);
                hi = hi.min((u * c + half) / s);
            } else if !(u * c >= -half && u * c < half) {
                continue;
            }
            if c.abs() > 1e-12 {
                let (a, b) = ((-half - u * s) / c, (half - u * s) / c);
                lo = lo.max(a.min(b));
                hi = hi.min(a.max(b));
            } else if !(u * s >= -half && u * s < half) {
                continue;
            }
            if lo > hi + h[1] {
                continue;
            }
            let a = ((lo / h[1]).floor() as i64 - 1).max(-k2max);
            let b = ((hi / h[1]).ceil() as i64 + 1).min(k2max);
            let mut first = None;
            let mut count = 0;
            for k2 in a..=b {
                if in_cell(curvelet_position(j, theta, [k1, k2]), half) {
                    if first.is_none() {
                        first = Some(k2);
                    }
                    count += 1;
                }
            }
            if let Some(f) = first {
                rows.push((k1, f, count));
                offsets.push(offsets.last().unwrap() + count);
            }
        }
        Self {
            j,
            l,
            rows,
            offsets,
        }
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self) -> f64 {
        wedge_angle(self.j, self.l)
    }

    pub fn index(&self, flat: usize) -> CurveletIndex {
        let r = self.offsets.partition_point(|&o| o <= flat) - 1;
        let (k1, k2, _) = self.rows[r];
        CurveletIndex {
            j: self.j,
            l: self.l,
            k: [k1, k2 + (flat - self.offsets[r]) as i64],
        }
    }

    pub fn flat(&self, k: [i64; 2]) -> Option<usize> {
        let r = self.rows.binary_search_by_key(&k[0], |row| row.0).ok()?;
        let (_, k2, n) = self.rows[r];
        let d = k[1] - k2;
        if d < 0 || d >= n as i64 {
            return None;
        }
        Some(self.offsets[r] + d as usize)
    }

    /// All indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = CurveletIndex> + '_ {
        self.rows.iter().flat_map(move |&(k1, k2, n)| {
            (0..n as i64).map(move |d| CurveletIndex {
                j: self.j,
                l: self.l,
                k: [k1, k2 + d],
            })
        })
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        let theta = self.theta();
        self.indices()
            .map(|i| curvelet_position(self.j, theta, i.k))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_counts() {
        assert_eq!(wedge_count(5), 4);
        assert_eq!(wedge_count(6), 8);
        assert_eq!(wedge_count(7), 8);
        assert!((wedge_angle(6, 3) - 3.0 * PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn curvelet_lattice_fills_cell_exactly_once() {
        for (j, l) in [(4, 0), (4, 1), (5, 3), (6, 5)] {
            let lat = CurveletLattice::new(j, l, 2.0);
            let h = curvelet_steps(j);
            // density of the rotated lattice times the cell area
            let expected = 4.0 / (h[0] * h[1]);
            let n = lat.len() as f64;
            assert!(
                (n / expected - 1.0).abs() < 0.05,
                "j={j} l={l}: {n} vs {expected}"
            );
            for (f, idx) in lat.indices().enumerate() {
                assert_eq!(lat.flat(idx.k), Some(f));
                assert_eq!(lat.index(f), idx);
                assert!(in_cell(idx.position(), 1.0));
            }
        }
    }

    #[test]
    fn wavelet_lattice_roundtrip() {
        let lat = WaveletLattice::new(4, 2.0);
        assert_eq!(lat.m, 32);
        for f in [0, 5, 100, 1023] {
            assert_eq!(lat.flat(lat.index(f).k), Some(f));
        }
        assert_eq!(lat.index(0).position(), [-1.0, -1.0]);
    }
}
