//! Two-dimensional FFT on row-major buffers.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Exponent sign of the transform: `Forward` is `e^{-i..}`, `Backward` is `e^{+i..}`.
/// Neither direction normalizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Forward,
    Backward,
}

impl Sign {
    pub fn from_exponent(s: i32) -> Self {
        if s < 0 {
            Sign::Forward
        } else {
            Sign::Backward
        }
    }
}

fn plan(n: usize, sign: Sign) -> Arc<dyn Fft<f64>> {
    let mut p = FftPlanner::new();
    match sign {
        Sign::Forward => p.plan_fft_forward(n),
        Sign::Backward => p.plan_fft_inverse(n),
    }
}

fn rows(data: &mut [Complex64], ncols: usize, fft: &Arc<dyn Fft<f64>>) {
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(ncols * 64).for_each(|chunk| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], nrows: usize, ncols: usize) {
    const B: usize = 32;
    dst.par_chunks_mut(nrows * B)
        .enumerate()
        .for_each(|(cb, out)| {
            let c0 = cb * B;
            let c1 = (c0 + B).min(ncols);
            for r0 in (0..nrows).step_by(B) {
                let r1 = (r0 + B).min(nrows);
                for c in c0..c1 {
                    let o = &mut out[(c - c0) * nrows..(c - c0 + 1) * nrows];
                    for r in r0..r1 {
                        o[r] = src[r * ncols + c];
                    }
                }
            }
        });
}

/// In-place 2-D transform of an `nrows x ncols` row-major array.
pub fn fft2(data: &mut [Complex64], nrows: usize, ncols: usize, sign: Sign) {
    assert_eq!(data.len(), nrows * ncols);
    rows(data, ncols, &plan(ncols, sign));
    let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
    transpose(data, &mut t, nrows, ncols);
    rows(&mut t, nrows, &plan(nrows, sign));
    transpose(&t, data, ncols, nrows);
}

/// Smallest integer `>= n` whose only prime factors are 2, 3 and 5.
pub fn next_smooth(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_dft() {
        let (nr, nc) = (6, 10);
        let data: Vec<Complex64> = (0..nr * nc)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        for sign in [Sign::Forward, Sign::Backward] {
            let s = if sign == Sign::Forward { -1.0 } else { 1.0 };
            let mut a = data.clone();
            fft2(&mut a, nr, nc, sign);
            for kr in 0..nr {
                for kc in 0..nc {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for r in 0..nr {
                        for c in 0..nc {
                            let ph = s
                                * 2.0
                                * std::f64::consts::PI
                                * ((kr * r) as f64 / nr as f64 + (kc * c) as f64 / nc as f64);
                            acc += data[r * nc + c] * Complex64::from_polar(1.0, ph);
                        }
                    }
                    assert!((acc - a[kr * nc + kc]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(next_smooth(7), 8);
        assert_eq!(next_smooth(31), 32);
        assert_eq!(next_smooth(121), 125);
        assert_eq!(next_smooth(1), 1);
    }
}
