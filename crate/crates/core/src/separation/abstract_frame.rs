//! Finite two-frame version of one-step thresholding and its error bound.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use std::f64::consts::PI;

/// Real `d x n` frame stored by columns.
#[derive(Clone, Debug, PartialEq)]
pub struct AbstractFrame {
    pub phi: DMatrix<f64>,
    /// Common column norm (the largest one if they differ).
    pub c: f64,
}

impl AbstractFrame {
    /// Accepts `phi` only if it is Parseval and equal-norm to 1e-10.
    pub fn new(phi: DMatrix<f64>) -> Result<Self> {
        let f = Self::unchecked(phi);
        let p = f.parseval_defect();
        if p > 1e-10 {
            return Err(Error::NotParseval(p));
        }
        let target = (f.dim() as f64 / f.count() as f64).sqrt();
        let spread = f
            .phi
            .column_iter()
            .map(|c| (c.norm() - target).abs())
            .fold(0.0, f64::max);
        if spread > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "column norms differ from sqrt(d/n) by {spread:.3e}"
            )));
        }
        Ok(f)
    }

    /// Wraps any matrix; `c` is the largest column norm.
    pub fn unchecked(phi: DMatrix<f64>) -> Self {
        let c = phi.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        Self { phi, c }
    }

    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    pub fn count(&self) -> usize {
        self.phi.ncols()
    }

    /// `max |(Phi Phi^T - I)_{ab}|`.
    pub fn parseval_defect(&self) -> f64 {
        let g = &self.phi * self.phi.transpose();
        let d = self.dim();
        (g - DMatrix::<f64>::identity(d, d)).amax()
    }

    /// `Q Phi` for an orthogonal `Q`; still Parseval with the same norms.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Self {
        Self {
            phi: q * &self.phi,
            c: self.c,
        }
    }
}

/// Harmonic frame: rows `sqrt(2/n) cos(2 pi k t / n)` and `sqrt(2/n) sin(...)`
/// for `floor(d/2)` distinct frequencies, plus the row `1/sqrt(n)` when `d` is odd.
pub fn harmonic_frame<R: Rng>(d: usize, n: usize, rng: &mut R) -> Result<AbstractFrame> {
    let pairs = d / 2;
    let avail: usize = (n - 1) / 2;
    if d == 0 || n < d || pairs > avail {
        return Err(Error::Dimension(format!(
            "no harmonic frame with d = {d}, n = {n}"
        )));
    }
    let mut freqs: Vec<usize> = (1..=avail).collect();
    freqs.shuffle(rng);
    freqs.truncate(pairs);
    freqs.sort_unstable();
    let a = (2.0 / n as f64).sqrt();
    let phi = DMatrix::from_fn(d, n, |row, t| {
        if row >= 2 * pairs {
            return 1.0 / (n as f64).sqrt();
        }
        let ang = 2.0 * PI * (freqs[row / 2] * t) as f64 / n as f64;
        if row % 2 == 0 {
            a * ang.cos()
        } else {
            a * ang.sin()
        }
    });
    AbstractFrame::new(phi)
}

/// Orthogonal factor of the QR decomposition of a random matrix.
pub fn random_orthogonal<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    m.qr().q()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbstractOutput {
    pub t1: Vec<usize>,
    pub t2: Vec<usize>,
    pub s1: DVector<f64>,
    pub s2: DVector<f64>,
    pub r: DVector<f64>,
}

fn restricted_synthesis(phi: &DMatrix<f64>, coeffs: &DVector<f64>, keep: &[usize]) -> DVector<f64> {
    let mut out = DVector::zeros(phi.nrows());
    for &i in keep {
        out.axpy(coeffs[i], &phi.column(i), 1.0);
    }
    out
}

pub fn abstract_one_step(
    phi1: &AbstractFrame,
    phi2: &AbstractFrame,
    s: &DVector<f64>,
    t1: f64,
    t2: f64,
) -> Result<AbstractOutput> {
    if phi1.dim() != s.len() || phi2.dim() != s.len() {
        return Err(Error::Dimension(format!(
            "frames of dimension {} and {} for a signal of length {}",
            phi1.dim(),
            phi2.dim(),
            s.len()
        )));
    }
    if !(t1 >= 0.0 && t2 >= 0.0) {
        return Err(Error::InvalidInput("thresholds must be nonnegative".into()));
    }
    let c1 = phi1.phi.tr_mul(s);
    let t1_set: Vec<usize> = (0..c1.len()).filter(|&i| c1[i].abs() >= t1).collect();
    let s1 = restricted_synthesis(&phi1.phi, &c1, &t1_set);
    let r = s - &s1;
    let c2 = phi2.phi.tr_mul(&r);
    let t2_set: Vec<usize> = (0..c2.len()).filter(|&i| c2[i].abs() >= t2).collect();
    let s2 = restricted_synthesis(&phi2.phi, &c2, &t2_set);
    Ok(AbstractOutput {
        t1: t1_set,
        t2: t2_set,
        s1,
        s2,
        r,
    })
}

/// Both sides of the error estimate together with its ingredients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub mu_c: f64,
    pub delta: f64,
}

fn l1_outside(v: &DVector<f64>, set: &[usize]) -> f64 {
    let mut inside = vec![false; v.len()];
    for &i in set {
        inside[i] = true;
    }
    v.iter()
        .zip(&inside)
        .filter(|(_, k)| !**k)
        .map(|(x, _)| x.abs())
        .sum()
}

/// `lhs = ||S1* - S1|| + ||S2* - S2||` against
/// `c [(1 + mu_c) ||1_{T1} Phi1^T S2||_1 + (2 + mu_c) delta]`.
pub fn separation_bound(
    phi1: &AbstractFrame,
    phi2: &AbstractFrame,
    out: &AbstractOutput,
    s1_0: &DVector<f64>,
    s2_0: &DVector<f64>,
) -> Result<BoundCheck> {
    for f in [phi1, phi2] {
        let p = f.parseval_defect();
        if p > 1e-8 {
            return Err(Error::NotParseval(p));
        }
    }
    let lhs = (&out.s1 - s1_0).norm() + (&out.s2 - s2_0).norm();
    let a1 = phi1.phi.tr_mul(s1_0);
    let a2 = phi2.phi.tr_mul(s2_0);
    let delta = l1_outside(&a1, &out.t1) + l1_outside(&a2, &out.t2);
    // mu_c = max_i sum_{j in T2} |<phi_{2,j}, phi_{1,i}>|
    let mut mu_c: f64 = 0.0;
    if !out.t2.is_empty() {
        let g = phi1.phi.tr_mul(&phi2.phi);
        for i in 0..g.nrows() {
            mu_c = mu_c.max(out.t2.iter().map(|&j| g[(i, j)].abs()).sum());
        }
    }
    let b2 = phi1.phi.tr_mul(s2_0);
    let cross: f64 = out.t1.iter().map(|&i| b2[i].abs()).sum();
    let c = phi1.c.max(phi2.c);
    let rhs = c * ((1.0 + mu_c) * cross + (2.0 + mu_c) * delta);
    Ok(BoundCheck {
        lhs,
        rhs,
        mu_c,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn harmonic_frames_are_equal_norm_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (d, n) in [(2, 5), (3, 7), (8, 20), (16, 64), (15, 33)] {
            let f = harmonic_frame(d, n, &mut rng).unwrap();
            assert!(f.parseval_defect() < 1e-12);
            assert!((f.c - (d as f64 / n as f64).sqrt()).abs() < 1e-12);
            let q = random_orthogonal(d, &mut rng);
            let g = AbstractFrame::new(f.rotated(&q).phi).unwrap();
            assert!(g.parseval_defect() < 1e-12);
        }
        assert!(harmonic_frame(8, 8, &mut rng).is_err());
    }

    #[test]
    fn hand_computed_example() {
        let e = AbstractFrame::new(DMatrix::identity(2, 2)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rot = AbstractFrame::new(DMatrix::from_row_slice(2, 2, &[h, -h, h, h])).unwrap();
        let s = DVector::from_vec(vec![1.0, 0.0]);
        let out = abstract_one_step(&e, &rot, &s, 0.5, 0.5).unwrap();
        assert_eq!(out.t1, vec![0]);
        assert_eq!(out.s1, s);
        assert_eq!(out.r, DVector::zeros(2));
        assert!(out.t2.is_empty());
        assert_eq!(out.s2, DVector::zeros(2));
    }

    #[test]
    fn zero_and_huge_thresholds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f1 = harmonic_frame(6, 15, &mut rng).unwrap();
        let f2 = f1.rotated(&random_orthogonal(6, &mut rng));
        let s = &f1.phi * DVector::from_fn(15, |i, _| if i == 3 { 1.0 } else { 0.0 });
        let out = abstract_one_step(&f1, &f2, &s, 0.0, 0.0).unwrap();
        assert_eq!(out.t1.len(), 15);
        assert!((&out.s1 - &s).norm() < 1e-12);
        assert!(out.r.norm() < 1e-12);
        assert!(out.s2.norm() < 1e-12);
        let out = abstract_one_step(&f1, &f2, &s, 1e9, 1e9).unwrap();
        assert!(out.t1.is_empty() && out.t2.is_empty());
        assert_eq!(out.r, s);
        assert!(abstract_one_step(&f1, &f2, &DVector::zeros(5), 0.0, 0.0).is_err());
    }

    #[test]
    fn exact_recovery_gives_zero_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f1 = harmonic_frame(4, 9, &mut rng).unwrap();
        let f2 = f1.rotated(&random_orthogonal(4, &mut rng));
        let s1 = DVector::from_vec(vec![0.3, -1.0, 0.2, 0.5]);
        let s2 = DVector::zeros(4);
        let out = abstract_one_step(&f1, &f2, &s1, 0.0, 1e9).unwrap();
        let b = separation_bound(&f1, &f2, &out, &s1, &s2).unwrap();
        assert!(b.lhs < 1e-12 && b.rhs < 1e-12);
        assert_eq!(b.mu_c, 0.0);
    }
}
