//! Two-dimensional non-uniform FFT (types 1 and 2) with the
//! exponential-of-semicircle kernel on a twofold oversampled grid.
//!
//! Modes live on an integer box `lo[d] .. lo[d] + ms[d]`, points are angles
//! in radians (any real value, taken modulo `2 pi`). Dimension 0 runs along
//! rows of the mode array, dimension 1 down its columns.

use crate::fft::{fft2, next_smooth, Sign};
use crate::quadrature::gauss_legendre;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct Nufft2 {
    lo: [i64; 2],
    center: [i64; 2],
    ms: [usize; 2],
    n: [usize; 2],
    w: usize,
    beta: f64,
    corr: [Vec<f64>; 2],
}

fn kernel_width(tol: f64) -> usize {
    let digits = (-tol.max(1e-15).log10()).ceil() as usize;
    (digits + 1).clamp(4, 16)
}

impl Nufft2 {
    pub fn new(lo: [i64; 2], ms: [usize; 2], tol: f64) -> Self {
        let w = kernel_width(tol);
        let beta = 2.30 * w as f64;
        let n = [
            next_smooth((2 * ms[0]).max(2 * w)),
            next_smooth((2 * ms[1]).max(2 * w)),
        ];
        // modes are handled relative to the box centre so the fine grid resolves them
        let center = [lo[0] + (ms[0] / 2) as i64, lo[1] + (ms[1] / 2) as i64];
        let (gx, gw) = gauss_legendre(4 * w + 40);
        let hw = w as f64 / 2.0;
        let phi: Vec<f64> = gx
            .iter()
            .map(|z| (beta * ((1.0 - z * z).sqrt() - 1.0)).exp())
            .collect();
        let corr = [0, 1].map(|d| {
            (0..ms[d])
                .map(|i| {
                    let m = lo[d] + i as i64 - center[d];
                    let f = 2.0 * PI * m as f64 * hw / n[d] as f64;
                    let s: f64 = gx
                        .iter()
                        .zip(&gw)
                        .zip(&phi)
                        .map(|((z, wq), p)| wq * p * (f * z).cos())
                        .sum();
                    1.0 / (hw * s)
                })
                .collect()
        });
        Self {
            lo,
            center,
            ms,
            n,
            w,
            beta,
            corr,
        }
    }

    pub fn modes(&self) -> [usize; 2] {
        self.ms
    }

    fn shift(&self, p: &[f64; 2], sign: i32) -> Complex64 {
        let ph = sign as f64 * (self.center[0] as f64 * p[0] + self.center[1] as f64 * p[1]);
        Complex64::from_polar(1.0, ph)
    }

    fn taps(&self, x: f64, d: usize, out: &mut [f64]) -> i64 {
        let n = self.n[d] as f64;
        let t = x.rem_euclid(2.0 * PI) * n / (2.0 * PI);
        let hw = self.w as f64 / 2.0;
        let l0 = (t - hw).ceil();
        for (i, o) in out.iter_mut().enumerate() {
            let z = (l0 + i as f64 - t) / hw;
            let q = 1.0 - z * z;
            *o = if q > 0.0 {
                (self.beta * (q.sqrt() - 1.0)).exp()
            } else {
                0.0
            };
        }
        l0 as i64
    }

    /// `out[p] = sum_m modes[m] e^{sign i m . x_p}`.
    pub fn type2(&self, modes: &[Complex64], points: &[[f64; 2]], sign: i32) -> Vec<Complex64> {
        assert_eq!(modes.len(), self.ms[0] * self.ms[1]);
        let [n0, n1] = self.n;
        let mut fine = vec![Complex64::new(0.0, 0.0); n0 * n1];
        for i1 in 0..self.ms[1] {
            let m1 = (self.lo[1] + i1 as i64 - self.center[1]).rem_euclid(n1 as i64) as usize;
            let c1 = self.corr[1][i1];
            for i0 in 0..self.ms[0] {
                let m0 = (self.lo[0] + i0 as i64 - self.center[0]).rem_euclid(n0 as i64) as usize;
                fine[m1 * n0 + m0] = modes[i1 * self.ms[0] + i0] * (c1 * self.corr[0][i0]);
            }
        }
        fft2(&mut fine, n1, n0, Sign::from_exponent(sign));
        let w = self.w;
        points
            .par_chunks(4096)
            .flat_map_iter(|chunk| {
                let mut k0 = vec![0.0; w];
                let mut k1 = vec![0.0; w];
                let mut idx0 = vec![0usize; w];
                let fine = &fine;
                chunk
                    .iter()
                    .map(|p| {
                        let a0 = self.taps(p[0], 0, &mut k0);
                        let a1 = self.taps(p[1], 1, &mut k1);
                        for (i, v) in idx0.iter_mut().enumerate() {
                            *v = (a0 + i as i64).rem_euclid(n0 as i64) as usize;
                        }
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (j, kv1) in k1.iter().enumerate() {
                            let row = (a1 + j as i64).rem_euclid(n1 as i64) as usize * n0;
                            let mut r = Complex64::new(0.0, 0.0);
                            for (kv0, &c) in k0.iter().zip(&idx0) {
                                r += fine[row + c] * kv0;
                            }
                            acc += r * kv1;
                        }
                        acc * self.shift(p, sign)
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// `modes[m] = sum_p strengths[p] e^{sign i m . x_p}`.
    pub fn type1(&self, points: &[[f64; 2]], strengths: &[Complex64], sign: i32) -> Vec<Complex64> {
        assert_eq!(points.len(), strengths.len());
        let [n0, n1] = self.n;
        let mut fine = vec![Complex64::new(0.0, 0.0); n0 * n1];
        let w = self.w;
        let mut k0 = vec![0.0; w];
        let mut k1 = vec![0.0; w];
        for (p, s) in points.iter().zip(strengths) {
            let a0 = self.taps(p[0], 0, &mut k0);
            let a1 = self.taps(p[1], 1, &mut k1);
            let sh = self.shift(p, sign);
            for (j, kv1) in k1.iter().enumerate() {
                let row = (a1 + j as i64).rem_euclid(n1 as i64) as usize * n0;
                let sv = s * sh * kv1;
                for (i, kv0) in k0.iter().enumerate() {
                    let c = (a0 + i as i64).rem_euclid(n0 as i64) as usize;
                    fine[row + c] += sv * kv0;
                }
            }
        }
        fft2(&mut fine, n1, n0, Sign::from_exponent(sign));
        let mut out = vec![Complex64::new(0.0, 0.0); self.ms[0] * self.ms[1]];
        for i1 in 0..self.ms[1] {
            let m1 = (self.lo[1] + i1 as i64 - self.center[1]).rem_euclid(n1 as i64) as usize;
            let c1 = self.corr[1][i1];
            for i0 in 0..self.ms[0] {
                let m0 = (self.lo[0] + i0 as i64 - self.center[0]).rem_euclid(n0 as i64) as usize;
                out[i1 * self.ms[0] + i0] = fine[m1 * n0 + m0] * (c1 * self.corr[0][i0]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn direct(
        lo: [i64; 2],
        ms: [usize; 2],
        modes: &[Complex64],
        x: [f64; 2],
        sign: f64,
    ) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i1 in 0..ms[1] {
            for i0 in 0..ms[0] {
                let m0 = (lo[0] + i0 as i64) as f64;
                let m1 = (lo[1] + i1 as i64) as f64;
                acc += modes[i1 * ms[0] + i0]
                    * Complex64::from_polar(1.0, sign * (m0 * x[0] + m1 * x[1]));
            }
        }
        acc
    }

    #[test]
    fn type2_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lo = [-13, 4];
        let ms = [27, 11];
        let modes: Vec<Complex64> = (0..ms[0] * ms[1])
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let pts: Vec<[f64; 2]> = (0..50)
            .map(|_| [rng.random_range(-7.0..7.0), rng.random_range(-4.0..4.0)])
            .collect();
        let plan = Nufft2::new(lo, ms, 1e-11);
        let l1: f64 = modes.iter().map(|m| m.norm()).sum();
        for sign in [-1, 1] {
            let out = plan.type2(&modes, &pts, sign);
            for (p, o) in pts.iter().zip(&out) {
                let d = direct(lo, ms, &modes, *p, sign as f64);
                assert!((d - o).norm() < 1e-10 * l1, "{} vs {}", d, o);
            }
        }
    }

    #[test]
    fn type1_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lo = [-8, -9];
        let ms = [16, 19];
        let pts: Vec<[f64; 2]> = (0..40)
            .map(|_| [rng.random_range(-3.2..3.2), rng.random_range(-3.2..3.2)])
            .collect();
        let st: Vec<Complex64> = (0..40)
            .map(|_| Complex64::new(rng.random::<f64>(), rng.random::<f64>() - 0.5))
            .collect();
        let plan = Nufft2::new(lo, ms, 1e-11);
        let l1: f64 = st.iter().map(|s| s.norm()).sum();
        for sign in [-1, 1] {
            let out = plan.type1(&pts, &st, sign);
            for i1 in 0..ms[1] {
                for i0 in 0..ms[0] {
                    let m = [(lo[0] + i0 as i64) as f64, (lo[1] + i1 as i64) as f64];
                    let d: Complex64 = pts
                        .iter()
                        .zip(&st)
                        .map(|(p, s)| {
                            s * Complex64::from_polar(
                                1.0,
                                sign as f64 * (m[0] * p[0] + m[1] * p[1]),
                            )
                        })
                        .sum();
                    assert!((d - out[i1 * ms[0] + i0]).norm() < 1e-10 * l1);
                }
            }
        }
    }
}
