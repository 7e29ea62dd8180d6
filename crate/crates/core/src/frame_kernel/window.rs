//! Meyer-type radial window W and angular bump V.
//!
//! Both are built from the polynomial smoothstep
//! `nu(x) = x^{p+1} sum_{k=0}^{p} C(p+k, k) (1-x)^k`, which satisfies
//! `nu(x) + nu(1-x) = 1`. Squared-partition identities then hold exactly
//! because `cos^2 + sin^2 = 1`.

use std::f64::consts::FRAC_PI_2;

/// Transition profile of polynomial order `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    order: usize,
    coeffs: Vec<f64>,
}

impl Profile {
    pub fn new(order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = 1.0;
        for k in 0..=order {
            if k > 0 {
                c = c * (order + k) as f64 / k as f64;
            }
            coeffs.push(c);
        }
        Self { order, coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Smoothstep: 0 below 0, 1 above 1.
    pub fn nu(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let y = 1.0 - x;
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * y + c;
        }
        acc * x.powi(self.order as i32 + 1)
    }
}

/// Radial window supported on `[1/2, 2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialWindow {
    profile: Profile,
    /// Samples per unit used when checking the Calderon identity.
    pub cache_resolution: usize,
}

impl RadialWindow {
    pub fn new(order: usize) -> Self {
        assert!(order >= 3, "transition order must be at least 3");
        Self {
            profile: Profile::new(order),
            cache_resolution: 4096,
        }
    }

    pub fn order(&self) -> usize {
        self.profile.order()
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= 0.5 || r >= 2.0 {
            0.0
        } else if r <= 1.0 {
            (FRAC_PI_2 * self.profile.nu(2.0 * r - 1.0)).sin()
        } else {
            (FRAC_PI_2 * self.profile.nu(r - 1.0)).cos()
        }
    }

    /// `sum_{j=j_lo}^{j_hi} W(r/2^j)^2` and whether the range truncates mass at `r`.
    pub fn calderon_sum(&self, r: f64, j_lo: i32, j_hi: i32) -> (f64, bool) {
        let mut s = 0.0;
        for j in j_lo..=j_hi {
            let w = self.eval(r / 2f64.powi(j));
            s += w * w;
        }
        let lo = 2f64.powi(j_lo - 1);
        let hi = 2f64.powi(j_hi + 1);
        (s, !(r >= lo && r <= hi))
    }

    /// Largest Calderon defect over `octaves` octaves starting at 1, sampled at cache resolution.
    pub fn calderon_max_error(&self, octaves: u32) -> f64 {
        let n = self.cache_resolution * octaves as usize;
        let mut worst: f64 = 0.0;
        for i in 0..=n {
            let r = 2f64.powf(i as f64 / self.cache_resolution as f64);
            let (s, _) = self.calderon_sum(r, -2, octaves as i32 + 2);
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    /// Low-pass father window: squared mass of all scales below `j0`.
    pub fn lowpass(&self, r: f64, j0: i32) -> f64 {
        let r = r.abs();
        if r <= 2f64.powi(j0 - 1) {
            return 1.0;
        }
        let w = self.eval(r / 2f64.powi(j0 - 1));
        if r < 2f64.powi(j0) {
            w
        } else {
            0.0
        }
    }
}

/// Angular bump supported on `[-1, 1]` with `sum_l V(t-l)^2 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularBump {
    profile: Profile,
}

impl AngularBump {
    pub fn new(order: usize) -> Self {
        Self {
            profile: Profile::new(order),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        if a >= 1.0 {
            0.0
        } else {
            (FRAC_PI_2 * self.profile.nu(a)).cos()
        }
    }

    pub fn partition_sum(&self, t: f64) -> f64 {
        let base = t.floor() as i64;
        (base - 2..=base + 2)
            .map(|l| {
                let v = self.eval(t - l as f64);
                v * v
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_symmetry() {
        for p in 3..8 {
            let pr = Profile::new(p);
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                assert!((pr.nu(x) + pr.nu(1.0 - x) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn window_examples() {
        let w = RadialWindow::new(3);
        assert_eq!(w.eval(0.25), 0.0);
        assert_eq!(w.eval(3.0), 0.0);
        assert!((w.eval(1.0) - 1.0).abs() < 1e-15);
        let a = w.eval(1.3);
        let b = w.eval(0.65);
        assert!((a * a + b * b - 1.0).abs() < 1e-14);
        assert!(a > 0.0 && a < 1.0);
    }

    #[test]
    fn calderon_examples() {
        let w = RadialWindow::new(3);
        let (s, trunc) = w.calderon_sum(1.37, -2, 4);
        assert!((s - 1.0).abs() < 1e-10 && !trunc);
        for j in -1..4 {
            let (s, _) = w.calderon_sum(2f64.powi(j - 1) * 3.0, -2, 5);
            assert!((s - 1.0).abs() < 1e-10);
        }
        let (s, trunc) = w.calderon_sum(0.1, 0, 4);
        assert!(trunc && (0.0..1.0).contains(&s));
        assert!(w.calderon_max_error(3) < 1e-12);
    }

    #[test]
    fn bump_examples() {
        let v = AngularBump::new(3);
        assert_eq!(v.eval(1.5), 0.0);
        assert!((v.eval(0.0) - 1.0).abs() < 1e-15);
        let a = v.eval(0.5);
        let b = v.eval(-0.5);
        assert!((a * a + b * b - 1.0).abs() < 1e-14);
        for i in 0..200 {
            let t = -3.0 + i as f64 * 0.0371;
            assert!((v.partition_sum(t) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn lowpass_completes_partition() {
        let w = RadialWindow::new(4);
        for i in 1..400 {
            let r = i as f64 * 0.11;
            let lp = w.lowpass(r, 3);
            let (s, _) = w.calderon_sum(r, 3, 12);
            assert!((lp * lp + s - 1.0).abs() < 1e-12, "r={r}");
        }
    }
}
