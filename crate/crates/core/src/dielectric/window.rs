//! Transparency windows: ε″ forced to zero over a wavelength band before the
//! Kramers–Kronig transform.

use std::f64::consts::FRAC_2_PI;

use super::kk::absorption_integral;
use super::{AngularFrequency, DielectricModel};
use crate::error::{Error, Result};

/// Wavelength band `[lambda_min, lambda_max]` in meters. Edges are sharp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransparencyWindow {
    lambda_min: f64,
    lambda_max: f64,
}

impl TransparencyWindow {
    pub fn new(lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !(lambda_min > 0.0 && lambda_min < lambda_max && lambda_max.is_finite()) {
            return Err(Error::Config(format!(
                "transparency window needs 0 < lambda_min < lambda_max, got [{lambda_min}, {lambda_max}] m"
            )));
        }
        Ok(Self { lambda_min, lambda_max })
    }

    pub fn from_micrometers(lambda_min_um: f64, lambda_max_um: f64) -> Result<Self> {
        Self::new(lambda_min_um / 1e6, lambda_max_um / 1e6)
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// `(ω_lo, ω_hi)` = `(2πc/λ_max, 2πc/λ_min)`.
    pub fn omega_band(&self) -> (f64, f64) {
        let lo = AngularFrequency::from_wavelength(self.lambda_max).expect("validated");
        let hi = AngularFrequency::from_wavelength(self.lambda_min).expect("validated");
        (lo.value(), hi.value())
    }

    pub fn contains_omega(&self, omega: f64) -> bool {
        let (lo, hi) = self.omega_band();
        omega >= lo && omega <= hi
    }
}

/// A Drude or tabulated model made transparent over a band.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedModel {
    base: Box<DielectricModel>,
    window: TransparencyWindow,
}

impl WindowedModel {
    pub fn base(&self) -> &DielectricModel {
        &self.base
    }

    pub fn window(&self) -> TransparencyWindow {
        self.window
    }

    pub fn absorption(&self, omega: f64) -> f64 {
        if self.window.contains_omega(omega) {
            0.0
        } else {
            self.base.absorption(omega).unwrap_or(0.0)
        }
    }

    /// The removed band's share of the KK integral, subtracted from the base:
    /// ε_w(iξ) = ε_base(iξ) − (2/π) ∫_band ω ε″(ω)/(ω² + ξ²) dω.
    pub fn evaluate(&self, xi: AngularFrequency) -> Result<f64> {
        let base = self
            .base
            .evaluate(xi)?
            .finite()
            .expect("windowed base is always finite");
        let (lo, hi) = self.window.omega_band();
        let kinks: Vec<f64> = match self.base.as_ref() {
            DielectricModel::Tabulated(t) => {
                let mut k: Vec<f64> = t.omegas().iter().copied().filter(|w| *w > lo && *w < hi).collect();
                k.push(t.cutoff());
                k
            }
            DielectricModel::Drude(p) => vec![p.relaxation_rate().value()],
            _ => vec![],
        };
        let base_model = self.base.as_ref();
        let removed = absorption_integral(|w| base_model.absorption(w).unwrap_or(0.0), lo, hi, xi.value(), &kinks)?;
        Ok((base - FRAC_2_PI * removed).clamp(1.0, base))
    }
}

/// Wraps a Drude or tabulated model in a transparency window.
pub fn apply_window(base: DielectricModel, window: TransparencyWindow) -> Result<DielectricModel> {
    match base {
        DielectricModel::Drude(_) | DielectricModel::Tabulated(_) => Ok(DielectricModel::Windowed(WindowedModel {
            base: Box::new(base),
            window,
        })),
        other => Err(Error::Config(format!(
            "a transparency window can only wrap a drude or tabulated model, not {}",
            other.kind()
        ))),
    }
}
