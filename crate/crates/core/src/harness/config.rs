//! Experiment configuration: a TOML file with `scene`, `algorithm`, `grids`
//! and `outputs` sections.

use crate::error::{Error, Result};
use crate::frame_kernel::{Frames, FreqGrid};
use crate::separation::{ThresholdParams, ThresholdUnits};
use crate::targets::{CurveKind, CurveSpec, LineFragment, PointConfig, Scene};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Smallest scale an experiment may start at.
pub const J0: i32 = 4;
/// Largest grid side accepted.
pub const MAX_SIDE: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(default)]
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fragment_rho: Option<f64>,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            points: vec![[-0.4, 0.3]],
            curve: Some(CurveKind::Circle {
                center: [0.15, -0.1],
                radius: 0.5,
            }),
            fragment_rho: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub epsilon: f64,
    pub override_epsilon: bool,
    pub units: Units,
    pub gain1: f64,
    pub gain2: f64,
    pub seed: u64,
    /// Curvelet probes for the residual identity check.
    pub residual_probes: usize,
    /// Probes placed away from every singularity.
    pub off_probes: usize,
}

/// Threshold units as spelled in the config file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    Literal,
    LineResponse,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        let t = ThresholdParams::default();
        Self {
            epsilon: t.epsilon,
            override_epsilon: t.override_epsilon,
            units: Units::LineResponse,
            gain1: t.gain1,
            gain2: t.gain2,
            seed: 7,
            residual_probes: 10,
            off_probes: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub j_min: i32,
    pub j_max: i32,
    pub oversample: usize,
    pub window_order: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            j_min: 5,
            j_max: 10,
            oversample: 1,
            window_order: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub orient_samples: usize,
    pub wf_samples: usize,
    /// Run the scales concurrently.
    pub parallel: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            orient_samples: 16,
            wf_samples: 64,
            parallel: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub scene: SceneConfig,
    #[serde(default)]
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub grids: GridConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Config {
                line,
                msg: e.message().to_string(),
            }
        })
    }

    pub fn to_text(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config {
            line: 0,
            msg: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// SHA-256 of the serialised config, hex encoded.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_text()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn threshold_params(&self) -> ThresholdParams {
        let a = &self.algorithm;
        ThresholdParams {
            epsilon: a.epsilon,
            override_epsilon: a.override_epsilon,
            units: match a.units {
                Units::Literal => ThresholdUnits::Literal,
                Units::LineResponse => ThresholdUnits::LineResponse,
            },
            gain1: a.gain1,
            gain2: a.gain2,
        }
    }

    pub fn frames(&self) -> Frames {
        Frames::new(self.grids.window_order, self.grids.oversample)
    }

    pub fn scales(&self) -> Vec<i32> {
        (self.grids.j_min..=self.grids.j_max).collect()
    }

    pub fn build_scene(&self) -> Result<Scene> {
        let s = &self.scene;
        let scene = Scene {
            points: PointConfig::new(s.points.clone())?,
            curve: s.curve.clone().map(CurveSpec::from_kind).transpose()?,
            fragment: s
                .fragment_rho
                .map(|r| LineFragment::new(r, self.grids.window_order))
                .transpose()?,
        };
        scene.check()?;
        Ok(scene)
    }

    /// Checks everything that can be checked before any scale runs.
    pub fn validate(&self) -> Result<()> {
        self.build_scene()?;
        self.threshold_params().check()?;
        let g = &self.grids;
        if g.j_min < J0 || g.j_max < g.j_min {
            return Err(Error::InvalidInput(format!(
                "scale range {}..{} must start at {J0} or above",
                g.j_min, g.j_max
            )));
        }
        if !(1..=8).contains(&g.window_order) {
            return Err(Error::InvalidInput(format!(
                "window order {} outside 1..=8",
                g.window_order
            )));
        }
        let side = FreqGrid::new(g.j_max, g.oversample)?.side();
        if side > MAX_SIDE {
            return Err(Error::InvalidInput(format!(
                "grid side {side} at j = {} exceeds {MAX_SIDE}",
                g.j_max
            )));
        }
        let o = &self.outputs;
        if o.orient_samples < 4 || o.wf_samples < 4 {
            return Err(Error::InvalidInput(
                "orientation and wavefront samples must be at least 4".into(),
            ));
        }
        Ok(())
    }
}

/// `J_MIN..J_MAX` as given on the command line.
pub fn parse_scales(text: &str) -> Result<(i32, i32)> {
    let bad = || Error::InvalidInput(format!("scale range `{text}`; expected J_MIN..J_MAX"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| bad())?;
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.scene.points.push([0.123456789012345, -1.0 / 3.0]);
        cfg.scene.fragment_rho = Some(0.2);
        cfg.outputs.dir = Some("out/run".into());
        cfg.algorithm.units = Units::Literal;
        let text = cfg.to_text().unwrap();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
        let spline = ExperimentConfig {
            scene: SceneConfig {
                points: vec![],
                curve: Some(CurveKind::Spline {
                    control: vec![[0.0, 0.0], [0.5, 0.1], [0.4, 0.6], [-0.1, 0.3]],
                }),
                fragment_rho: None,
            },
            ..Default::default()
        };
        assert_eq!(
            ExperimentConfig::parse(&spline.to_text().unwrap()).unwrap(),
            spline
        );
        assert_eq!(
            cfg.hash().unwrap(),
            ExperimentConfig::parse(&text).unwrap().hash().unwrap()
        );
    }

    #[test]
    fn sections_are_optional() {
        let cfg = ExperimentConfig::parse("[grids]\nj_min = 6\nj_max = 7\n").unwrap();
        assert_eq!(cfg.scene, SceneConfig::default());
        assert_eq!(cfg.grids.j_min, 6);
        assert!(cfg.validate().is_ok());
        let text = "[scene]\npoints = [[0.1, 0.2]]\n\n[scene.curve]\nkind = \"circle\"\ncenter = [0.0, 0.0]\nradius = 0.3\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(
            cfg.scene.curve,
            Some(CurveKind::Circle {
                center: [0.0, 0.0],
                radius: 0.3
            })
        );
    }

    #[test]
    fn rejects_bad_configs() {
        let err = ExperimentConfig::parse("[grids]\nj_min = 5\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }), "{err}");
        let empty = ExperimentConfig::parse("[scene]\npoints = []\n").unwrap();
        assert!(matches!(empty.validate(), Err(Error::DegenerateScene(_))));
        let mut cfg = ExperimentConfig::default();
        cfg.algorithm.epsilon = 0.1;
        assert!(matches!(cfg.validate(), Err(Error::EpsilonRange(_))));
        cfg.algorithm.override_epsilon = true;
        assert!(cfg.validate().is_ok());
        cfg.grids.j_max = 11;
        assert!(cfg.validate().is_err());
        cfg.grids.j_max = 10;
        cfg.grids.j_min = 3;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn scale_ranges() {
        assert_eq!(parse_scales("5..10").unwrap(), (5, 10));
        assert_eq!(parse_scales("5..=9").unwrap(), (5, 9));
        assert!(parse_scales("5-10").is_err());
    }
}
