//! Dielectric functions on the imaginary frequency axis.
//!
//! Every finite model reduces to an absorption spectrum ε″(ω) ≥ 0 on the
//! real axis, and ε(iξ) follows from the Kramers–Kronig integral in [`kk`].
//! The Drude model has a closed form on the imaginary axis and is evaluated
//! directly; tabulated and windowed models go through the integral.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

pub mod kk;
pub mod preset;
pub mod table;
pub mod window;

pub use kk::eps_imag_axis_kk;
pub use table::{AbsorptionTable, HighTail, LowTail};
pub use window::{apply_window, TransparencyWindow, WindowedModel};

/// Angular frequency in rad/s, never negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AngularFrequency(f64);

impl AngularFrequency {
    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!(
                "angular frequency must be finite and non-negative, got {value}"
            )))
        }
    }

    /// ω = 2πc/λ, with λ in meters.
    pub fn from_wavelength(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("wavelength must be positive, got {lambda}")));
        }
        Self::new(2.0 * PI * SPEED_OF_LIGHT / lambda)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// λ = 2πc/ω in meters.
    pub fn wavelength(self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.0
    }

    pub(crate) fn positive(self, what: &str) -> Result<f64> {
        if self.0 > 0.0 {
            Ok(self.0)
        } else {
            Err(Error::Domain(format!(
                "{what}: diverges at zero imaginary frequency; use the integrand's ξ → 0 limit"
            )))
        }
    }
}

/// Free-electron parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeParameters {
    plasma_frequency: AngularFrequency,
    relaxation_rate: AngularFrequency,
}

impl DrudeParameters {
    /// Gold-like stand-in, not fitted to any measured spectrum.
    pub const GOLD_PLASMA_FREQUENCY: f64 = 1.37e16;
    pub const GOLD_RELAXATION_RATE: f64 = 5.3e13;

    pub fn new(plasma_frequency: AngularFrequency, relaxation_rate: AngularFrequency) -> Result<Self> {
        if plasma_frequency.value() <= 0.0 {
            return Err(Error::Config("Drude plasma frequency must be > 0".into()));
        }
        Ok(Self {
            plasma_frequency,
            relaxation_rate,
        })
    }

    pub fn from_rad_per_s(plasma_frequency: f64, relaxation_rate: f64) -> Result<Self> {
        Self::new(
            AngularFrequency::new(plasma_frequency)?,
            AngularFrequency::new(relaxation_rate)?,
        )
    }

    pub fn gold() -> Self {
        Self {
            plasma_frequency: AngularFrequency(Self::GOLD_PLASMA_FREQUENCY),
            relaxation_rate: AngularFrequency(Self::GOLD_RELAXATION_RATE),
        }
    }

    pub fn plasma_frequency(&self) -> AngularFrequency {
        self.plasma_frequency
    }

    pub fn relaxation_rate(&self) -> AngularFrequency {
        self.relaxation_rate
    }

    /// Same relaxation rate, plasma frequency multiplied by `factor`.
    pub fn scale_plasma(&self, factor: f64) -> Result<Self> {
        Self::from_rad_per_s(self.plasma_frequency.0 * factor, self.relaxation_rate.0)
    }

    /// ε″(ω) = ωp²γ / (ω(ω² + γ²)).
    pub fn absorption(&self, omega: f64) -> f64 {
        let (wp, g) = (self.plasma_frequency.0, self.relaxation_rate.0);
        wp * wp * g / (omega * (omega * omega + g * g))
    }
}

/// ε(iξ) = 1 + ωp² / (ξ(ξ + γ)).
pub fn eps_imag_axis_drude(params: &DrudeParameters, xi: AngularFrequency) -> Result<f64> {
    let xi = xi.positive("eps_imag_axis_drude")?;
    let wp = params.plasma_frequency.0;
    Ok(1.0 + wp * wp / (xi * (xi + params.relaxation_rate.0)))
}

/// Value of ε(iξ). Ideal metals are carried symbolically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Permittivity {
    Finite(f64),
    Infinite,
}

impl Permittivity {
    pub fn is_infinite(self) -> bool {
        matches!(self, Permittivity::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Permittivity::Finite(v) => Some(v),
            Permittivity::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    Vacuum,
    /// ε → ∞ at every frequency.
    IdealMetal,
    Drude(DrudeParameters),
    Tabulated(Arc<AbsorptionTable>),
    /// Built with [`apply_window`].
    Windowed(WindowedModel),
}

impl DielectricModel {
    pub fn gold_drude() -> Self {
        DielectricModel::Drude(DrudeParameters::gold())
    }

    pub fn tabulated(table: AbsorptionTable) -> Self {
        DielectricModel::Tabulated(Arc::new(table))
    }

    /// ε(iξ) for ξ > 0.
    pub fn evaluate(&self, xi: AngularFrequency) -> Result<Permittivity> {
        match self {
            DielectricModel::Vacuum => {
                xi.positive("evaluate")?;
                Ok(Permittivity::Finite(1.0))
            }
            DielectricModel::IdealMetal => {
                xi.positive("evaluate")?;
                Ok(Permittivity::Infinite)
            }
            DielectricModel::Drude(p) => eps_imag_axis_drude(p, xi).map(Permittivity::Finite),
            DielectricModel::Tabulated(t) => eps_imag_axis_kk(t, xi).map(Permittivity::Finite),
            DielectricModel::Windowed(w) => w.evaluate(xi).map(Permittivity::Finite),
        }
    }

    /// Real-axis absorption ε″(ω), for models that have one.
    pub fn absorption(&self, omega: f64) -> Option<f64> {
        match self {
            DielectricModel::Vacuum => Some(0.0),
            DielectricModel::IdealMetal => None,
            DielectricModel::Drude(p) => Some(p.absorption(omega)),
            DielectricModel::Tabulated(t) => Some(t.absorption(omega)),
            DielectricModel::Windowed(w) => Some(w.absorption(omega)),
        }
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self, DielectricModel::Vacuum)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DielectricModel::Vacuum => "vacuum",
            DielectricModel::IdealMetal => "ideal_metal",
            DielectricModel::Drude(_) => "drude",
            DielectricModel::Tabulated(_) => "tabulated",
            DielectricModel::Windowed(_) => "windowed",
        }
    }
}

/// Memoises ε(iξ) for one model. Safe to share between threads.
#[derive(Debug)]
pub struct CachedModel<'a> {
    model: &'a DielectricModel,
    cache: Mutex<HashMap<u64, Permittivity>>,
}

impl<'a> CachedModel<'a> {
    pub fn new(model: &'a DielectricModel) -> Self {
        Self {
            model,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &DielectricModel {
        self.model
    }

    pub fn evaluate(&self, xi: AngularFrequency) -> Result<Permittivity> {
        let key = xi.value().to_bits();
        if let Some(v) = self.cache.lock().expect("cache poisoned").get(&key) {
            return Ok(*v);
        }
        // Evaluate outside the lock; a concurrent duplicate just recomputes.
        let v = self.model.evaluate(xi)?;
        self.cache.lock().expect("cache poisoned").insert(key, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.cache.lock().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Evaluates through a cache, the entry point the force engine uses.
pub fn evaluate(model: &CachedModel<'_>, xi: AngularFrequency) -> Result<Permittivity> {
    model.evaluate(xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(x: f64) -> AngularFrequency {
        AngularFrequency::new(x).unwrap()
    }

    #[test]
    fn drude_closed_form() {
        let eps = eps_imag_axis_drude(&DrudeParameters::gold(), w(1e15)).unwrap();
        assert!((eps - 179.24).abs() < 0.01, "{eps}");
        let plasma = DrudeParameters::from_rad_per_s(1e16, 0.0).unwrap();
        assert_eq!(eps_imag_axis_drude(&plasma, w(1e16)).unwrap(), 2.0);
        let far = eps_imag_axis_drude(&DrudeParameters::gold(), w(1e30)).unwrap();
        assert!((far - 1.0).abs() < 1e-20);
    }

    #[test]
    fn drude_rejects_zero_frequency() {
        let err = eps_imag_axis_drude(&DrudeParameters::gold(), w(0.0)).unwrap_err();
        assert!(err.to_string().contains("diverges at zero imaginary frequency"));
    }

    #[test]
    fn drude_parameter_validation() {
        assert!(DrudeParameters::from_rad_per_s(0.0, 1.0).is_err());
        assert!(DrudeParameters::from_rad_per_s(1.0, -1.0).is_err());
        assert!(DrudeParameters::from_rad_per_s(1.0, 0.0).is_ok());
    }

    #[test]
    fn wavelength_round_trip() {
        for lambda in [0.2e-6, 2.5e-6, 200e-6, 1e-9] {
            let back = AngularFrequency::from_wavelength(lambda).unwrap().wavelength();
            assert!(((back - lambda) / lambda).abs() < 1e-14);
        }
        assert!(AngularFrequency::new(-1.0).is_err());
        assert!(AngularFrequency::new(f64::NAN).is_err());
    }

    #[test]
    fn dispatch() {
        assert_eq!(
            DielectricModel::Vacuum.evaluate(w(3.0)).unwrap(),
            Permittivity::Finite(1.0)
        );
        assert!(DielectricModel::IdealMetal.evaluate(w(3.0)).unwrap().is_infinite());
        let eps = DielectricModel::gold_drude()
            .evaluate(w(1e15))
            .unwrap()
            .finite()
            .unwrap();
        assert!((eps - 179.24).abs() < 0.01);
        assert!(DielectricModel::Vacuum.evaluate(w(0.0)).is_err());
    }

    #[test]
    fn cache_agrees_with_direct_evaluation() {
        let m = DielectricModel::gold_drude();
        let cached = CachedModel::new(&m);
        for x in [1e13, 1e14, 1e15, 1e14] {
            let a = evaluate(&cached, w(x)).unwrap().finite().unwrap();
            let b = m.evaluate(w(x)).unwrap().finite().unwrap();
            assert!(((a - b) / b).abs() <= 1e-12);
        }
        assert_eq!(cached.len(), 3);
    }
}
