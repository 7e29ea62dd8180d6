//! Slope probes of per-scale pieces at a phase-space point.

use super::fit::decay_slope;
use super::phase::PhasePoint;
use crate::error::{Error, Result};
use crate::frame_kernel::{Frames, SpectralImage};
use serde::{Deserialize, Serialize};

/// Half-width of the band around slope 0 reported as inconclusive.
pub const DEAD_ZONE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeKind {
    /// Omnidirectional wavelet at the position; the orientation is ignored.
    Wavelet,
    /// Curvelet at the position and orientation.
    Curvelet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regularity {
    Singular,
    Smooth,
    Inconclusive,
}

pub fn classify(slope: f64) -> Regularity {
    if slope > DEAD_ZONE {
        Regularity::Singular
    } else if slope < -DEAD_ZONE {
        Regularity::Smooth
    } else {
        Regularity::Inconclusive
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub values: Vec<(i32, f64)>,
    pub slope: f64,
    pub class: Regularity,
}

/// Coefficient magnitude of each piece `(j, f_j)` against the scale-`j` probe
/// atom at `p`, and the fitted log2 slope over `j`.
pub fn wavefront_probe(
    frames: &Frames,
    pieces: &[(i32, &SpectralImage)],
    p: &PhasePoint,
    kind: ProbeKind,
) -> Result<ProbeResult> {
    if pieces.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "{} scales; a probe needs at least 4",
            pieces.len()
        )));
    }
    let values: Vec<(i32, f64)> = pieces
        .iter()
        .map(|(j, f)| {
            let v = match kind {
                ProbeKind::Wavelet => frames.wavelet_probe(f, *j, p.b),
                ProbeKind::Curvelet => frames.curvelet_probe(f, *j, p.theta, p.b),
            };
            (*j, v.norm())
        })
        .collect();
    let slope = decay_slope(&values)?;
    Ok(ProbeResult {
        values,
        slope,
        class: classify(slope),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::{PointConfig, Scene};

    #[test]
    fn point_probes() {
        let fr = Frames::new(3, 1);
        let scene = Scene {
            points: PointConfig::new(vec![[0.1, -0.2]]).unwrap(),
            curve: None,
            fragment: None,
        };
        let pieces: Vec<(i32, SpectralImage)> = (5..=8)
            .map(|j| (j, scene.pieces(&fr, j).unwrap().0))
            .collect();
        let refs: Vec<(i32, &SpectralImage)> = pieces.iter().map(|(j, f)| (*j, f)).collect();
        let at = wavefront_probe(
            &fr,
            &refs,
            &PhasePoint::new([0.1, -0.2], 0.4),
            ProbeKind::Wavelet,
        )
        .unwrap();
        assert!(at.slope >= 0.4, "{}", at.slope);
        assert_eq!(at.class, Regularity::Singular);
        let away = wavefront_probe(
            &fr,
            &refs,
            &PhasePoint::new([0.6, 0.5], 0.4),
            ProbeKind::Curvelet,
        )
        .unwrap();
        assert!(away.slope <= -1.0, "{}", away.slope);
        assert_eq!(away.class, Regularity::Smooth);
        assert!(wavefront_probe(
            &fr,
            &refs[..3],
            &PhasePoint::new([0.0, 0.0], 0.0),
            ProbeKind::Wavelet
        )
        .is_err());
        assert_eq!(classify(0.05), Regularity::Inconclusive);
    }
}
