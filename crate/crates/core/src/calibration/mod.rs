//! Simultaneous electrostatic calibration and Casimir extraction.
//!
//! A ground-truth apparatus produces lock-in amplitudes
//!
//! A = k ε₀πR (V_bias + V₀)² / (d₀ − d_pz) + k |F_C(d₀ − d_pz)|
//!
//! on a grid of piezo extensions d_pz and bias voltages. The pipeline fits a
//! parabola α(V + x₀)² + β at each d_pz, fits α(d_pz) = k ε₀πR/(d₀ − d_pz)
//! for k and d₀, pools x₀ into V₀, and reports F_C = β/k at d = d₀ − d_pz.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lifshitz::electrostatic_sphere_plate;

pub mod config;
mod extract;
mod fit;
mod parabola;
mod pipeline;
pub mod report;
mod truth;

pub use extract::{extract_casimir, CalibrationResult, CasimirPoint, Measured};
pub use fit::{fit_calibration, CalibrationFit, Weighting};
pub use parabola::{fit_parabola, ParabolaFit};
pub use pipeline::{run_pipeline, CalibrationMode, PipelineFailure, PipelineOptions, PipelineOutput};
pub use truth::{ForceLaw, IdealMetalPfa, LifshitzCurve, TabulatedCurve};

/// The simulated apparatus.
#[derive(Clone)]
pub struct GroundTruth {
    /// Lock-in output units per newton.
    pub k: f64,
    pub d0: f64,
    pub v0: f64,
    pub sphere_radius: f64,
    pub force_curve: Arc<dyn ForceLaw>,
}

impl fmt::Debug for GroundTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroundTruth")
            .field("k", &self.k)
            .field("d0", &self.d0)
            .field("v0", &self.v0)
            .field("sphere_radius", &self.sphere_radius)
            .field("force_curve", &self.force_curve.describe())
            .finish()
    }
}

impl GroundTruth {
    pub fn new(k: f64, d0: f64, v0: f64, sphere_radius: f64, force_curve: Arc<dyn ForceLaw>) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Config(format!("k must be positive, got {k}")));
        }
        if !(d0 > 0.0 && d0.is_finite()) {
            return Err(Error::Config(format!("d0 must be positive, got {d0}")));
        }
        if !(sphere_radius > 0.0 && sphere_radius.is_finite()) {
            return Err(Error::Config(format!(
                "sphere_radius must be positive, got {sphere_radius}"
            )));
        }
        if !v0.is_finite() {
            return Err(Error::Config("v0 must be finite".into()));
        }
        Ok(Self {
            k,
            d0,
            v0,
            sphere_radius,
            force_curve,
        })
    }

    /// Noiseless lock-in amplitude.
    pub fn amplitude(&self, d_pz: f64, v_bias: f64, casimir: f64) -> Result<f64> {
        let es = electrostatic_sphere_plate(self.sphere_radius, self.d0 - d_pz, v_bias, self.v0)?;
        Ok(self.k * (es + casimir.abs()))
    }
}

/// What to measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPlan {
    pub dpz_values: Vec<f64>,
    pub vbias_values: Vec<f64>,
    /// Standard deviation of the additive amplitude noise.
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

impl ScanPlan {
    pub const MIN_DPZ: usize = 5;
    pub const MIN_VBIAS: usize = 7;

    pub fn validate(&self, truth: &GroundTruth) -> Result<()> {
        if let Some(d) = self.dpz_values.iter().find(|d| **d >= truth.d0) {
            return Err(Error::Domain(format!(
                "sphere–plate contact: d_pz = {d:e} m is not below d0 = {:e} m",
                truth.d0
            )));
        }
        if self.dpz_values.len() < Self::MIN_DPZ {
            return Err(Error::Config(format!(
                "scan plan needs at least {} d_pz values, got {}",
                Self::MIN_DPZ,
                self.dpz_values.len()
            )));
        }
        if !self.dpz_values.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Config("d_pz values must be strictly increasing".into()));
        }
        if self.vbias_values.len() < Self::MIN_VBIAS {
            return Err(Error::Config(format!(
                "scan plan needs at least {} bias values, got {}",
                Self::MIN_VBIAS,
                self.vbias_values.len()
            )));
        }
        let below = self.vbias_values.iter().any(|v| v + truth.v0 < 0.0);
        let above = self.vbias_values.iter().any(|v| v + truth.v0 > 0.0);
        if !(below && above) {
            return Err(Error::Config(
                "bias values must straddle -V0 (both signs of V_bias + V0)".into(),
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Config(format!(
                "noise_sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockInRecord {
    pub d_pz: f64,
    pub v_bias: f64,
    pub amplitude: f64,
}

/// Standard normal draw for record `index`, from its own ChaCha stream.
pub fn record_noise(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    StandardNormal.sample(&mut rng)
}

/// Synthetic lock-in data, ordered by d_pz then by bias as listed in the plan.
pub fn generate_scan(truth: &GroundTruth, plan: &ScanPlan) -> Result<Vec<LockInRecord>> {
    plan.validate(truth)?;
    let mut records = Vec::with_capacity(plan.dpz_values.len() * plan.vbias_values.len());
    for &d_pz in &plan.dpz_values {
        let casimir = truth.force_curve.casimir_force(truth.d0 - d_pz)?;
        for &v_bias in &plan.vbias_values {
            let index = records.len() as u64;
            let noise = if plan.noise_sigma > 0.0 {
                plan.noise_sigma * record_noise(plan.rng_seed, index)
            } else {
                0.0
            };
            records.push(LockInRecord {
                d_pz,
                v_bias,
                amplitude: truth.amplitude(d_pz, v_bias, casimir)? + noise,
            });
        }
    }
    Ok(records)
}

/// Splits records into runs of equal d_pz, preserving order.
pub fn group_by_dpz(records: &[LockInRecord]) -> Vec<&[LockInRecord]> {
    records.chunk_by(|a, b| a.d_pz == b.d_pz).collect()
}
