//! TOML run configuration. Command-line flags override file values, which
//! override the built-in defaults.

use std::path::Path;

use anyhow::{Context, Result};
use kitti_safety::geometry::TtcConfig;
use kitti_safety::kitti_io::EgoConfig;
use kitti_safety::pipeline::AnalysisConfig;
use kitti_safety::report::Format;
use kitti_safety::safety::SeverityThresholds;
use kitti_safety::trajectory::{PostProcessConfig, Variant};
use serde::Deserialize;

/// Every field is optional; missing ones keep their default.
///
/// ```toml
/// method = "CenterTrack"
/// variants = ["none", "ss"]
/// include_ego = false
/// format = "json"
///
/// [post]
/// thr_split = 10
/// thr_cons = 3
/// thr_sta = 2.0
/// fps = 10.0
/// velocity_window = 1
///
/// [ttc]
/// horizon = 10.0
/// dt = 0.1
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub method: Option<String>,
    pub post: Option<PostProcessConfig>,
    pub ttc: Option<TtcSection>,
    pub variants: Option<Vec<String>>,
    pub enable_idsplit: Option<bool>,
    pub enable_ss: Option<bool>,
    pub include_ego: Option<bool>,
    pub ego: Option<EgoConfig>,
    pub thresholds: Option<SeverityThresholds>,
    pub reference: Option<String>,
    pub band: Option<f64>,
    pub format: Option<Format>,
    pub emit_series: Option<bool>,
    pub drop_undefined: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TtcSection {
    pub horizon: Option<f64>,
    pub dt: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Values given on the command line.
#[derive(Debug, Default)]
pub struct Overrides {
    pub method: Option<String>,
    pub variants: Option<Vec<String>>,
    pub enable_idsplit: bool,
    pub enable_ss: bool,
    pub include_ego: bool,
    pub thr_split: Option<u32>,
    pub thr_cons: Option<u32>,
    pub thr_sta: Option<f64>,
    pub fps: Option<f64>,
    pub velocity_window: Option<u32>,
    pub ttc_horizon: Option<f64>,
    pub ttc_dt: Option<f64>,
    pub reference: Option<String>,
    pub band: Option<f64>,
}

pub fn analysis_config(file: &FileConfig, cli: &Overrides) -> Result<AnalysisConfig> {
    let mut cfg = AnalysisConfig::default();
    if let Some(m) = cli.method.as_ref().or(file.method.as_ref()) {
        cfg.method = m.clone();
    }

    let mut post = file.post.unwrap_or_default();
    post.thr_split = cli.thr_split.unwrap_or(post.thr_split);
    post.thr_cons = cli.thr_cons.unwrap_or(post.thr_cons);
    post.thr_sta = cli.thr_sta.unwrap_or(post.thr_sta);
    post.fps = cli.fps.unwrap_or(post.fps);
    post.velocity_window = cli.velocity_window.unwrap_or(post.velocity_window);
    cfg.post = post;

    let file_ttc = file.ttc.as_ref();
    let defaults = TtcConfig::default();
    cfg.ttc = TtcConfig {
        horizon: cli.ttc_horizon.or(file_ttc.and_then(|t| t.horizon)).unwrap_or(defaults.horizon),
        dt: cli.ttc_dt.or(file_ttc.and_then(|t| t.dt)).unwrap_or(defaults.dt),
    };

    cfg.variants = match cli.variants.as_ref().or(file.variants.as_ref()) {
        Some(list) => list
            .iter()
            .map(|v| v.parse::<Variant>())
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![Variant {
            idsplit: cli.enable_idsplit || file.enable_idsplit.unwrap_or(false),
            ss: cli.enable_ss || file.enable_ss.unwrap_or(false),
        }],
    };

    cfg.include_ego = cli.include_ego || file.include_ego.unwrap_or(false);
    if let Some(ego) = file.ego {
        cfg.ego = ego;
    }
    if let Some(t) = file.thresholds {
        cfg.thresholds = t;
    }
    cfg.reference = cli.reference.clone().or_else(|| file.reference.clone());
    cfg.band = cli.band.or(file.band).unwrap_or(cfg.band);
    cfg.validate()?;
    Ok(cfg)
}
