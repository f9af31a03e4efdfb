//! JSON configuration for simulated calibration runs.
//!
//! ```json
//! {
//!   "truth": { "k": 1e9, "d0_nm": 500, "v0_mV": 25, "sphere_radius_um": 100,
//!              "force_curve": { "kind": "lifshitz", "model": "ideal_metal" } },
//!   "plan":  { "dpz_nm": [100, 137, 174, 211, 248], "vbias_V": [-0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7],
//!              "noise_sigma": 0.0, "rng_seed": 1 },
//!   "fit":   { "weighted": true, "mode": "simultaneous" }
//! }
//! ```
//!
//! `force_curve` is either `{"kind":"lifshitz","model":<preset name, model
//! file path, or inline model>}` (with an optional `plate_model`) or
//! `{"kind":"table","path":<csv>}`. Relative paths resolve against the
//! config file's directory.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    CalibrationMode, ForceLaw, GroundTruth, LifshitzCurve, PipelineOptions, ScanPlan, TabulatedCurve, Weighting,
};
use crate::dielectric::preset::{self, ModelFile};
use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};
use crate::lifshitz::QuadratureSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub truth: TruthConfig,
    pub plan: PlanConfig,
    #[serde(default)]
    pub fit: FitConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthConfig {
    pub k: f64,
    pub d0_nm: f64,
    #[serde(rename = "v0_mV")]
    pub v0_mv: f64,
    pub sphere_radius_um: f64,
    pub force_curve: ForceCurveConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForceCurveConfig {
    Lifshitz {
        model: ModelSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        plate_model: Option<ModelSpec>,
    },
    Table {
        path: PathBuf,
    },
}

/// A preset name, a model file path, or an inline model object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Named(String),
    Inline(ModelFile),
}

impl ModelSpec {
    /// Fully expanded model description, for digests and manifests.
    pub fn resolve(&self) -> Result<(ModelFile, DielectricModel)> {
        match self {
            ModelSpec::Named(name) => preset::resolve(name),
            ModelSpec::Inline(file) => Ok((file.clone(), file.build()?)),
        }
    }

    fn rebase(&mut self, dir: &Path) {
        match self {
            ModelSpec::Named(name) => {
                if preset::builtin(name).is_none() && Path::new(name).is_relative() {
                    *name = dir.join(&*name).to_string_lossy().into_owned();
                }
            }
            ModelSpec::Inline(file) => file.rebase_paths(dir),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub dpz_nm: Vec<f64>,
    #[serde(rename = "vbias_V")]
    pub vbias_v: Vec<f64>,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub rng_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    Simultaneous,
    SeparateElectrostatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default = "default_true")]
    pub weighted: bool,
    #[serde(default = "default_mode")]
    pub mode: ModeConfig,
}

fn default_true() -> bool {
    true
}

fn default_mode() -> ModeConfig {
    ModeConfig::Simultaneous
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            weighted: true,
            mode: ModeConfig::Simultaneous,
        }
    }
}

impl SimulationConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                Error::Config(format!("config: {inner}"))
            } else {
                Error::Config(format!("config field `{path}`: {inner}"))
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            cfg.rebase_paths(dir);
        }
        Ok(cfg)
    }

    pub fn rebase_paths(&mut self, dir: &Path) {
        match &mut self.truth.force_curve {
            ForceCurveConfig::Lifshitz { model, plate_model } => {
                model.rebase(dir);
                if let Some(p) = plate_model {
                    p.rebase(dir);
                }
            }
            ForceCurveConfig::Table { path } => {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
        }
    }

    /// SI ground truth, plan, and fit options. `settings` governs any Lifshitz evaluation.
    pub fn build(&self, settings: QuadratureSettings) -> Result<(GroundTruth, ScanPlan, PipelineOptions)> {
        let t = &self.truth;
        let radius = t.sphere_radius_um / 1e6;
        let curve: Arc<dyn ForceLaw> = match &t.force_curve {
            ForceCurveConfig::Lifshitz { model, plate_model } => {
                let (_, sphere) = model.resolve()?;
                let plate = match plate_model {
                    Some(p) => p.resolve()?.1,
                    None => sphere.clone(),
                };
                settings.validate()?;
                Arc::new(LifshitzCurve {
                    sphere,
                    plate,
                    sphere_radius: radius,
                    settings,
                })
            }
            ForceCurveConfig::Table { path } => Arc::new(TabulatedCurve::load(path)?),
        };
        let truth = GroundTruth::new(t.k, t.d0_nm / 1e9, t.v0_mv / 1e3, radius, curve)?;
        let plan = ScanPlan {
            dpz_values: self.plan.dpz_nm.iter().map(|d| d / 1e9).collect(),
            vbias_values: self.plan.vbias_v.clone(),
            noise_sigma: self.plan.noise_sigma,
            rng_seed: self.plan.rng_seed,
        };
        plan.validate(&truth)?;
        let options = PipelineOptions {
            weighting: if self.fit.weighted {
                Weighting::InverseVariance
            } else {
                Weighting::Uniform
            },
            mode: match self.fit.mode {
                ModeConfig::Simultaneous => CalibrationMode::Simultaneous,
                ModeConfig::SeparateElectrostatic => CalibrationMode::SeparateElectrostatic,
            },
        };
        Ok((truth, plan, options))
    }
}
