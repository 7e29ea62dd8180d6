use crate::error::{Error, Result};
use crate::frame_kernel::{CurveletIndex, Frames, Lattice, SpectralImage, WaveletIndex};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Unit in which the threshold gains are expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdUnits {
    /// `t1 = g1 2^{eps j}`, `t2 = g2 2^{j(1/4 - eps)}`.
    Literal,
    /// As above, times the coefficient a unit-density straight line produces
    /// in a wavelet (for `t1`) or in an aligned curvelet at scale `j` (for `t2`).
    LineResponse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParams {
    pub epsilon: f64,
    pub override_epsilon: bool,
    pub units: ThresholdUnits,
    pub gain1: f64,
    pub gain2: f64,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            override_epsilon: false,
            units: ThresholdUnits::LineResponse,
            gain1: 2.0,
            gain2: 0.5,
        }
    }
}

impl ThresholdParams {
    pub fn literal(epsilon: f64) -> Self {
        Self {
            epsilon,
            override_epsilon: false,
            units: ThresholdUnits::Literal,
            gain1: 1.0,
            gain2: 1.0,
        }
    }

    pub fn check(&self) -> Result<()> {
        let inside = self.epsilon > 0.0 && self.epsilon < 1.0 / 64.0;
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 || (!inside && !self.override_epsilon) {
            return Err(Error::EpsilonRange(self.epsilon));
        }
        if !(self.gain1 > 0.0 && self.gain2 > 0.0) {
            return Err(Error::InvalidInput(
                "threshold gains must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `(t1, t2)` at scale `j`.
    pub fn thresholds(&self, frames: &Frames, j: i32) -> Result<(f64, f64)> {
        self.check()?;
        let jf = j as f64;
        let (u1, u2) = match self.units {
            ThresholdUnits::Literal => (1.0, 1.0),
            ThresholdUnits::LineResponse => (
                frames.wavelet_line_response(),
                frames.curvelet_line_response(j),
            ),
        };
        Ok((
            self.gain1 * u1 * 2f64.powf(self.epsilon * jf),
            self.gain2 * u2 * 2f64.powf(jf * (0.25 - self.epsilon)),
        ))
    }
}

/// Result of one pass of alternating thresholding at scale `j`.
#[derive(Clone, Debug)]
pub struct ThresholdOutput {
    pub j: i32,
    pub epsilon: f64,
    pub t1: f64,
    pub t2: f64,
    /// Significant wavelet coefficients `c_lambda`, `|c| >= t1`.
    pub t1_set: Vec<(WaveletIndex, Complex64)>,
    /// Significant curvelet coefficients of the residual, `|d| >= t2`.
    pub t2_set: Vec<(CurveletIndex, Complex64)>,
    pub w: SpectralImage,
    pub c: SpectralImage,
    pub r: SpectralImage,
}

impl ThresholdOutput {
    pub fn t1_indices(&self) -> Vec<WaveletIndex> {
        self.t1_set.iter().map(|e| e.0).collect()
    }
    pub fn t2_indices(&self) -> Vec<CurveletIndex> {
        self.t2_set.iter().map(|e| e.0).collect()
    }
}

/// Wavelet threshold, synthesis, residual, curvelet threshold of the
/// residual, synthesis. Coefficients at scales `j-1..=j+1` take part; the
/// tables are streamed block by block and only significant entries are kept.
pub fn one_step_threshold(
    f: &SpectralImage,
    j: i32,
    params: &ThresholdParams,
    frames: &Frames,
) -> Result<ThresholdOutput> {
    let (t1, t2) = params.thresholds(frames, j)?;
    let grid = f.grid;
    let mut t1_set = Vec::new();
    for s in j - 1..=j + 1 {
        let block = frames.wavelet_analysis_scale(f, s)?;
        if let Lattice::Wavelet(lat) = &block.lattice {
            for (flat, v) in block.values.iter().enumerate() {
                if v.norm() >= t1 {
                    t1_set.push((lat.index(flat), *v));
                }
            }
        }
    }
    let w = frames.wavelet_synthesis_entries(&t1_set, &grid)?;
    let r = f.sub(&w);
    let mut t2_set = Vec::new();
    frames.curvelet_blocks(&r, j - 1..=j + 1, |block| {
        if let Lattice::Curvelet(lat) = &block.lattice {
            for (idx, v) in lat.indices().zip(&block.values) {
                if v.norm() >= t2 {
                    t2_set.push((idx, *v));
                }
            }
        }
        Ok(())
    })?;
    let c = frames.curvelet_synthesis_entries(&t2_set, &grid)?;
    Ok(ThresholdOutput {
        j,
        epsilon: params.epsilon,
        t1,
        t2,
        t1_set,
        t2_set,
        w,
        c,
        r,
    })
}

/// `(||W - P|| + ||C_rec - C||) / (||P|| + ||C||)`.
pub fn separation_error(
    out: &ThresholdOutput,
    p: &SpectralImage,
    c: &SpectralImage,
) -> Result<f64> {
    if p.grid != out.w.grid || c.grid != out.w.grid {
        return Err(Error::InvalidInput("pieces live on different grids".into()));
    }
    let den = p.norm() + c.norm();
    if den == 0.0 {
        return Err(Error::DegenerateScene(
            "both true components vanish at this scale".into(),
        ));
    }
    Ok((out.w.sub(p).norm() + out.c.sub(c).norm()) / den)
}

/// Largest gap, over the probes, between `<R_j, gamma>` and its expansion
/// `<C_j, gamma> - sum_{T1} <C_j, psi><psi, gamma> + sum_{T1^c} <P_j, psi><psi, gamma>`.
///
/// Each sum is assembled explicitly from cross-Gram entries over the whole
/// periodic lattice at scales `j-1..=j+1`.
pub fn residual_identity_check(
    out: &ThresholdOutput,
    p: &SpectralImage,
    c: &SpectralImage,
    probe: &[CurveletIndex],
    frames: &Frames,
) -> Result<f64> {
    if probe.is_empty() {
        return Err(Error::InvalidInput("empty probe set".into()));
    }
    let grid = out.r.grid;
    let j = out.j;
    let pa = frames.wavelet_analysis(p, j)?;
    let ca = frames.wavelet_analysis(c, j)?;
    let in_t1: std::collections::HashSet<WaveletIndex> = out.t1_set.iter().map(|e| e.0).collect();
    let mut worst: f64 = 0.0;
    for eta in probe {
        let gamma = frames.curvelet_spectrum(eta, &grid)?;
        let lhs = out.r.inner(&gamma);
        // <gamma, psi_lambda> for every lambda; <psi, gamma> is its conjugate
        let cross = frames.wavelet_analysis(&gamma, j)?;
        let mut rhs = c.inner(&gamma);
        for ((pb, cb), gb) in pa.blocks.iter().zip(&ca.blocks).zip(&cross.blocks) {
            let Lattice::Wavelet(lat) = &gb.lattice else {
                unreachable!()
            };
            for flat in 0..gb.values.len() {
                let g = gb.values[flat].conj();
                if in_t1.contains(&lat.index(flat)) {
                    rhs -= cb.values[flat] * g;
                } else {
                    rhs += pb.values[flat] * g;
                }
            }
        }
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}
