//! Built-in model presets and the JSON model file format.
//!
//! ```json
//! { "variant": "windowed", "window_lambda_min_um": 0.2, "window_lambda_max_um": 2.5,
//!   "base": { "variant": "drude", "plasma_frequency_rad_per_s": 1.37e16,
//!             "relaxation_rate_rad_per_s": 5.3e13 } }
//! ```
//!
//! `table_path` is resolved relative to the file that names it. Unknown keys
//! are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{apply_window, AbsorptionTable, DielectricModel, DrudeParameters, HighTail, LowTail, TransparencyWindow};
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 3] = ["gold_drude", "ideal_metal", "vacuum"];

/// Looks up a built-in preset by name.
pub fn builtin(name: &str) -> Option<DielectricModel> {
    match name {
        "gold_drude" => Some(DielectricModel::gold_drude()),
        "ideal_metal" => Some(DielectricModel::IdealMetal),
        "vacuum" => Some(DielectricModel::Vacuum),
        _ => None,
    }
}

/// The JSON model description that [`builtin`] presets expand to.
pub fn builtin_file(name: &str) -> Option<ModelFile> {
    let mut f = ModelFile::of(match name {
        "gold_drude" => Variant::Drude,
        "ideal_metal" => Variant::IdealMetal,
        "vacuum" => Variant::Vacuum,
        _ => return None,
    });
    if name == "gold_drude" {
        f.plasma_frequency_rad_per_s = Some(DrudeParameters::GOLD_PLASMA_FREQUENCY);
        f.relaxation_rate_rad_per_s = Some(DrudeParameters::GOLD_RELAXATION_RATE);
    }
    Some(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Drude,
    Tabulated,
    Vacuum,
    IdealMetal,
    Windowed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plasma_frequency_rad_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation_rate_rad_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_lambda_min_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_lambda_max_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<ModelFile>>,
    /// Overrides the inferred low tail of a table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low_tail: Option<LowTail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high_tail_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high_tail_cutoff_factor: Option<f64>,
}

impl ModelFile {
    pub fn of(variant: Variant) -> Self {
        Self {
            variant,
            plasma_frequency_rad_per_s: None,
            relaxation_rate_rad_per_s: None,
            table_path: None,
            window_lambda_min_um: None,
            window_lambda_max_um: None,
            base: None,
            low_tail: None,
            high_tail_exponent: None,
            high_tail_cutoff_factor: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Config(format!("model file: {e}")))
    }

    /// Reads a model file; relative table paths become relative to its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read model file {}: {e}", path.display())))?;
        let mut file = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            file.rebase_paths(dir);
        }
        Ok(file)
    }

    pub fn rebase_paths(&mut self, dir: &Path) {
        if let Some(p) = &self.table_path {
            if p.is_relative() {
                self.table_path = Some(dir.join(p));
            }
        }
        if let Some(b) = &mut self.base {
            b.rebase_paths(dir);
        }
    }

    /// Builds the model, loading any table from disk.
    pub fn build(&self) -> Result<DielectricModel> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::Config(format!("model variant {:?} requires `{key}`", self.variant)))
        };
        match self.variant {
            Variant::Vacuum => Ok(DielectricModel::Vacuum),
            Variant::IdealMetal => Ok(DielectricModel::IdealMetal),
            Variant::Drude => Ok(DielectricModel::Drude(DrudeParameters::from_rad_per_s(
                need(self.plasma_frequency_rad_per_s, "plasma_frequency_rad_per_s")?,
                need(self.relaxation_rate_rad_per_s, "relaxation_rate_rad_per_s")?,
            )?)),
            Variant::Tabulated => {
                let path = self
                    .table_path
                    .as_ref()
                    .ok_or_else(|| Error::Config("model variant tabulated requires `table_path`".into()))?;
                let high = HighTail::new(
                    self.high_tail_exponent.unwrap_or(HighTail::DEFAULT_EXPONENT),
                    self.high_tail_cutoff_factor.unwrap_or(HighTail::DEFAULT_CUTOFF_FACTOR),
                )?;
                Ok(DielectricModel::tabulated(AbsorptionTable::load(
                    path,
                    self.low_tail,
                    high,
                )?))
            }
            Variant::Windowed => {
                let base = self
                    .base
                    .as_ref()
                    .ok_or_else(|| Error::Config("model variant windowed requires `base`".into()))?;
                let window = TransparencyWindow::from_micrometers(
                    need(self.window_lambda_min_um, "window_lambda_min_um")?,
                    need(self.window_lambda_max_um, "window_lambda_max_um")?,
                )?;
                apply_window(base.build()?, window)
            }
        }
    }
}

/// Resolves a CLI-style model argument: a preset name, or a path to a model file.
pub fn resolve(name_or_path: &str) -> Result<(ModelFile, DielectricModel)> {
    if let Some(file) = builtin_file(name_or_path) {
        let model = file.build()?;
        return Ok((file, model));
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(Error::Config(format!(
            "`{name_or_path}` is neither a preset ({}) nor an existing model file",
            PRESET_NAMES.join(", ")
        )));
    }
    let file = ModelFile::load(path)?;
    let model = file.build()?;
    Ok((file, model))
}
