//! Cross-Gram entries, cluster coherence and relative sparsity.

use crate::error::{Error, Result};
use crate::frame_kernel::{
    CoefBlock, CoefficientTable, CurveletIndex, Frames, Lattice, SpectralImage, WaveletIndex,
};
use crate::nufft::Nufft2;
use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap, HashSet};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `<gamma_eta, psi_lambda>` by frequency quadrature; exactly zero when the
/// scales differ by 3 or more since the annuli are then disjoint.
pub fn cross_gram_probe(
    frames: &Frames,
    lambda: &WaveletIndex,
    eta: &CurveletIndex,
) -> Result<Complex64> {
    let (sl, se) = (lambda.j, eta.j);
    if (sl - se).abs() >= 3 {
        return Ok(ZERO);
    }
    // a grid within one scale of both atoms
    let grid = frames.grid((sl + se + 1).div_euclid(2))?;
    let r = grid.mode_radius(2f64.powi(sl.min(se) + 1));
    let bl = lambda.position();
    let be = eta.position();
    let d = [bl[0] - be[0], bl[1] - be[1]];
    let theta = eta.theta();
    let mut acc = ZERO;
    for m2 in -r..=r {
        for m1 in -r..=r {
            let x = grid.freq(grid.index(m1, m2).unwrap());
            let e = frames.wavelet_envelope(sl, x);
            if e == 0.0 {
                continue;
            }
            let g = frames.curvelet_envelope(se, theta, x);
            if g != 0.0 {
                acc += Complex64::from_polar(e * g, d[0] * x[0] + d[1] * x[1]);
            }
        }
    }
    Ok(acc * grid.weight())
}

/// Spatial window of wavelet positions kept around each curvelet when
/// accumulating cluster coherence, in wavelet lattice steps of the coarser
/// of the two scales: `across` steps along the wedge normal and
/// `2 L + along` steps along the ridge, `L` the wedge count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherenceWindow {
    pub across: i64,
    pub along: i64,
}

impl Default for CoherenceWindow {
    fn default() -> Self {
        Self {
            across: 8,
            along: 8,
        }
    }
}

/// Wavelet lattice points of scale `sp` near `b` inside the rotated window,
/// as `(wrapped index, unwrapped offset from b)`.
fn window_points(
    frames: &Frames,
    sp: i32,
    eta: &CurveletIndex,
    win: &CoherenceWindow,
) -> Vec<(WaveletIndex, [f64; 2])> {
    let lat = frames.wavelet_lattice(sp);
    let m = lat.m as i64;
    let h = m / 2;
    let step = 2f64.powi(-sp);
    let coarse = 2f64.powi(-sp.min(eta.j));
    let l = crate::frame_kernel::wedge_count(eta.j) as f64;
    let half_n = win.across as f64 * coarse;
    let half_t = (2.0 * l + win.along as f64) * coarse;
    let b = eta.position();
    let (sn, cs) = eta.theta().sin_cos();
    let reach = half_n.hypot(half_t);
    let k0 = [(b[0] / step).round() as i64, (b[1] / step).round() as i64];
    let kr = (reach / step).ceil() as i64;
    let mut out = Vec::new();
    for d2 in -kr..=kr {
        for d1 in -kr..=kr {
            let k = [k0[0] + d1, k0[1] + d2];
            let off = [k[0] as f64 * step - b[0], k[1] as f64 * step - b[1]];
            let u = off[0] * cs + off[1] * sn;
            let v = -off[0] * sn + off[1] * cs;
            if u.abs() > half_n || v.abs() > half_t {
                continue;
            }
            let wrap = [(k[0] + h).rem_euclid(m) - h, (k[1] + h).rem_euclid(m) - h];
            out.push((WaveletIndex { j: sp, k: wrap }, off));
        }
    }
    out
}

/// `mu_c = max_lambda sum_{eta in T2} |<gamma_eta, psi_lambda>|` over the
/// wavelets at scales `j-1..=j+1`, each curvelet contributing only inside
/// its window. Curvelets of one wedge share a single type-2 NUFFT per
/// wavelet scale.
pub fn cluster_coherence(
    frames: &Frames,
    t2: &[CurveletIndex],
    j: i32,
    window: &CoherenceWindow,
) -> Result<f64> {
    if t2.is_empty() {
        return Ok(0.0);
    }
    let grid = frames.grid(j)?;
    let mut groups: BTreeMap<(i32, usize), Vec<&CurveletIndex>> = BTreeMap::new();
    for eta in t2 {
        if (eta.j - j).abs() > 1 {
            return Err(Error::ScaleMismatch {
                atom: eta.j,
                grid: j,
            });
        }
        groups.entry((eta.j, eta.l)).or_default().push(eta);
    }
    let w = grid.weight();
    let dxi = grid.dxi();
    let mut acc: HashMap<WaveletIndex, f64> = HashMap::new();
    for ((s, l), etas) in groups {
        let theta = crate::frame_kernel::wedge_angle(s, l);
        for sp in j - 1..=j + 1 {
            let radius = 2f64.powi(s.min(sp) + 1);
            let [r0, r1] = frames.wedge_box(&grid, s, l, radius);
            let ms = [(2 * r0 + 1) as usize, (2 * r1 + 1) as usize];
            let mut modes = vec![ZERO; ms[0] * ms[1]];
            let mut any = false;
            for m2 in -r1..=r1 {
                for m1 in -r0..=r0 {
                    let x = grid.freq(grid.index(m1, m2).unwrap());
                    let e = frames.wavelet_envelope(sp, x) * frames.curvelet_envelope(s, theta, x);
                    if e != 0.0 {
                        modes[((m2 + r1) as usize) * ms[0] + (m1 + r0) as usize] =
                            Complex64::new(e * w, 0.0);
                        any = true;
                    }
                }
            }
            if !any {
                continue;
            }
            let mut keys = Vec::new();
            let mut pts = Vec::new();
            for eta in &etas {
                for (k, off) in window_points(frames, sp, eta, window) {
                    keys.push(k);
                    pts.push([off[0] * dxi, off[1] * dxi]);
                }
            }
            let vals = Nufft2::new([-r0, -r1], ms, 1e-10).type2(&modes, &pts, 1);
            for (k, v) in keys.into_iter().zip(vals) {
                *acc.entry(k).or_insert(0.0) += v.norm();
            }
        }
    }
    Ok(acc.values().copied().fold(0.0, f64::max))
}

/// Cluster coherence over the whole periodic lattice, one wavelet analysis
/// per curvelet. Exact but only affordable at small scales.
pub fn cluster_coherence_full(frames: &Frames, t2: &[CurveletIndex], j: i32) -> Result<f64> {
    if t2.is_empty() {
        return Ok(0.0);
    }
    let grid = frames.grid(j)?;
    let mut acc: Option<Vec<Vec<f64>>> = None;
    for eta in t2 {
        let g = frames.curvelet_spectrum(eta, &grid)?;
        let table = frames.wavelet_analysis(&g, j)?;
        let sums = acc.get_or_insert_with(|| {
            table
                .blocks
                .iter()
                .map(|b| vec![0.0; b.values.len()])
                .collect()
        });
        for (s, b) in sums.iter_mut().zip(&table.blocks) {
            for (a, v) in s.iter_mut().zip(&b.values) {
                *a += v.norm();
            }
        }
    }
    Ok(acc.unwrap().iter().flatten().copied().fold(0.0, f64::max))
}

/// Index set of either frame.
#[derive(Clone, Debug, PartialEq)]
pub enum IndexSet {
    Wavelet(HashSet<WaveletIndex>),
    Curvelet(HashSet<CurveletIndex>),
}

/// l1 mass of one block outside `set`.
pub fn block_l1_outside(block: &CoefBlock, set: &IndexSet) -> Result<f64> {
    match (&block.lattice, set) {
        (Lattice::Wavelet(l), IndexSet::Wavelet(s)) => Ok(block
            .values
            .iter()
            .enumerate()
            .filter(|(f, _)| !s.contains(&l.index(*f)))
            .map(|(_, v)| v.norm())
            .sum()),
        (Lattice::Curvelet(l), IndexSet::Curvelet(s)) => Ok(l
            .indices()
            .zip(&block.values)
            .filter(|(i, _)| !s.contains(i))
            .map(|(_, v)| v.norm())
            .sum()),
        _ => Err(Error::InvalidInput(
            "index set and coefficients belong to different frames".into(),
        )),
    }
}

/// `sum_{T^c} |coefficient|`.
pub fn relative_sparsity(coeffs: &CoefficientTable, set: &IndexSet) -> Result<f64> {
    coeffs.blocks.iter().map(|b| block_l1_outside(b, set)).sum()
}

/// `sum_{lambda in T1} |<f, psi_lambda>|`.
pub fn l1_on_wavelets(
    frames: &Frames,
    f: &SpectralImage,
    t1: &[WaveletIndex],
    j: i32,
) -> Result<f64> {
    let table = frames.wavelet_analysis(f, j)?;
    t1.iter()
        .map(|i| {
            table
                .wavelet(i)
                .map(|v| v.norm())
                .ok_or_else(|| Error::UnknownIndex(format!("{i:?}")))
        })
        .sum()
}

/// `max_k |<psi_{j,0}, psi_{j,k}>| (1 + |k|)^n`, the constant in the
/// wavelet Gram decay bound at scale `j`. Offsets are limited to a quarter
/// of the period so the periodic images of the atoms stay negligible.
pub fn wavelet_gram_constant(frames: &Frames, j: i32, n: i32) -> Result<f64> {
    let grid = frames.grid(j)?;
    let psi = frames.wavelet_spectrum(&WaveletIndex { j, k: [0, 0] }, &grid)?;
    let block = frames.wavelet_analysis_scale(&psi, j)?;
    let Lattice::Wavelet(lat) = &block.lattice else {
        unreachable!()
    };
    let reach = (lat.m / 4) as i64;
    Ok(block
        .values
        .iter()
        .enumerate()
        .filter_map(|(f, v)| {
            let k = lat.index(f).k;
            (k[0].abs().max(k[1].abs()) <= reach)
                .then(|| v.norm() * (1.0 + (k[0] as f64).hypot(k[1] as f64)).powi(n))
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::decay_slope;

    fn frames() -> Frames {
        Frames::new(3, 1)
    }

    #[test]
    fn cross_gram_matches_full_grid_sum() {
        let fr = frames();
        let cases = [
            (
                WaveletIndex { j: 6, k: [3, -2] },
                CurveletIndex {
                    j: 6,
                    l: 2,
                    k: [1, 0],
                },
            ),
            (
                WaveletIndex { j: 5, k: [0, 1] },
                CurveletIndex {
                    j: 6,
                    l: 5,
                    k: [2, -1],
                },
            ),
            (
                WaveletIndex { j: 7, k: [4, 4] },
                CurveletIndex {
                    j: 5,
                    l: 1,
                    k: [0, 1],
                },
            ),
        ];
        for (l, e) in cases {
            let v = cross_gram_probe(&fr, &l, &e).unwrap();
            let g = fr.grid((l.j + e.j + 1).div_euclid(2)).unwrap();
            let oracle = fr
                .curvelet_spectrum(&e, &g)
                .unwrap()
                .inner(&fr.wavelet_spectrum(&l, &g).unwrap());
            assert!(
                (v - oracle).norm() <= 1e-8 * oracle.norm().max(1e-6),
                "{v} {oracle}"
            );
        }
        let far = cross_gram_probe(
            &fr,
            &WaveletIndex { j: 4, k: [0, 0] },
            &CurveletIndex {
                j: 7,
                l: 0,
                k: [0, 0],
            },
        );
        assert_eq!(far.unwrap(), ZERO);
    }

    #[test]
    fn aligned_coupling_decays() {
        let fr = frames();
        let series: Vec<(i32, f64)> = (5..=10)
            .map(|j| {
                let v = cross_gram_probe(
                    &fr,
                    &WaveletIndex { j, k: [0, 0] },
                    &CurveletIndex { j, l: 0, k: [0, 0] },
                );
                (j, v.unwrap().norm())
            })
            .collect();
        assert!(decay_slope(&series).unwrap() <= -0.2);
    }

    #[test]
    fn windowed_coherence_matches_full_lattice() {
        let fr = frames();
        let j = 5;
        let t2 = vec![
            CurveletIndex {
                j: 5,
                l: 1,
                k: [3, 0],
            },
            CurveletIndex {
                j: 5,
                l: 1,
                k: [4, 0],
            },
            CurveletIndex {
                j: 4,
                l: 2,
                k: [-2, 1],
            },
            CurveletIndex {
                j: 6,
                l: 0,
                k: [0, 0],
            },
        ];
        let full = cluster_coherence_full(&fr, &t2, j).unwrap();
        let win = cluster_coherence(&fr, &t2, j, &CoherenceWindow::default()).unwrap();
        assert!((full - win).abs() <= 2e-3 * full, "{full} {win}");
        assert_eq!(
            cluster_coherence(&fr, &[], j, &CoherenceWindow::default()).unwrap(),
            0.0
        );
        let sub = cluster_coherence(&fr, &t2[..2], j, &CoherenceWindow::default()).unwrap();
        let rest = cluster_coherence(&fr, &t2[2..], j, &CoherenceWindow::default()).unwrap();
        assert!(sub <= win + 1e-15 && win <= sub + rest + 1e-12);
    }

    #[test]
    fn relative_sparsity_extremes() {
        let fr = frames();
        let g = fr.grid(5).unwrap();
        let f = fr
            .wavelet_spectrum(&WaveletIndex { j: 5, k: [1, 2] }, &g)
            .unwrap();
        let table = fr.wavelet_analysis(&f, 5).unwrap();
        let all: HashSet<_> = table.wavelet_entries().into_iter().map(|e| e.0).collect();
        assert_eq!(
            relative_sparsity(&table, &IndexSet::Wavelet(all)).unwrap(),
            0.0
        );
        let none = relative_sparsity(&table, &IndexSet::Wavelet(HashSet::new())).unwrap();
        let l1: f64 = table.blocks.iter().map(|b| b.l1()).sum();
        assert_eq!(none, l1);
        assert!(relative_sparsity(&table, &IndexSet::Curvelet(HashSet::new())).is_err());
    }

    #[test]
    fn wavelet_gram_constant_is_scale_free() {
        let fr = frames();
        let c: Vec<f64> = (5..=8)
            .map(|j| wavelet_gram_constant(&fr, j, 4).unwrap())
            .collect();
        let (lo, hi) = c
            .iter()
            .fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi / lo < 1.5, "{c:?}");
    }
}
