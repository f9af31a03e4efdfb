//! Sphere–plate Casimir and electrostatic forces.
//!
//! Forces are reported as attraction magnitudes in newtons.
//!
//! The Lifshitz force at zero temperature in the proximity-force limit is
//!
//! F = ħR/(2πc²) ∫₀^∞ dξ ∫₁^∞ dp p ξ² Σ_{TE,TM} ln(1 − r₁r₂ e^{−2pdξ/c}).
//!
//! [`lifshitz_sphere_plate`] integrates it in the variables t = 2dξ/c and
//! u = pt, where the exponential becomes e^{−u} and the region is
//! 0 < t ≤ u ≤ `p_cutoff_decay`:
//!
//! F = ħRc/(16πd³) ∫ dt ∫_t du u Σ ln(1 − r₁r₂ e^{−u}).

use std::f64::consts::PI;

use crate::constants::{EPSILON_0, HBAR, SPEED_OF_LIGHT};
use crate::dielectric::{apply_window, AngularFrequency, CachedModel, DielectricModel, TransparencyWindow};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

pub mod reflection;

use reflection::{integrand, Reflection};

/// Separation-to-radius ratio above which the proximity-force result is suspect.
pub const DERJAGUIN_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    sphere_radius: f64,
    separation: f64,
}

impl Geometry {
    pub fn new(sphere_radius: f64, separation: f64) -> Result<Self> {
        for (name, v) in [("sphere radius", sphere_radius), ("separation", separation)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            sphere_radius,
            separation,
        })
    }

    pub fn sphere_radius(&self) -> f64 {
        self.sphere_radius
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn with_separation(&self, separation: f64) -> Result<Self> {
        Self::new(self.sphere_radius, separation)
    }

    /// Set when d/R exceeds [`DERJAGUIN_LIMIT`].
    pub fn derjaguin_warning(&self) -> bool {
        self.separation / self.sphere_radius > DERJAGUIN_LIMIT
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    /// Newtons.
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// e-foldings of e^{−2pdξ/c} kept before the p integral is truncated.
    pub p_cutoff_decay: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-18,
            max_subdivisions: 200,
            p_cutoff_decay: 40.0,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::Config(format!(
                "rel_tol must lie in (0, 1e-2], got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::Config(format!("abs_tol must be >= 0, got {}", self.abs_tol)));
        }
        if self.max_subdivisions < 16 {
            return Err(Error::Config(format!(
                "max_subdivisions must be >= 16, got {}",
                self.max_subdivisions
            )));
        }
        if !(self.p_cutoff_decay >= 20.0) || !self.p_cutoff_decay.is_finite() {
            return Err(Error::Config(format!(
                "p_cutoff_decay must be >= 20, got {}",
                self.p_cutoff_decay
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceQuery {
    pub geometry: Geometry,
    pub material_sphere: DielectricModel,
    pub material_plate: DielectricModel,
    pub settings: QuadratureSettings,
}

impl ForceQuery {
    pub fn new(
        geometry: Geometry,
        material_sphere: DielectricModel,
        material_plate: DielectricModel,
        settings: QuadratureSettings,
    ) -> Self {
        Self {
            geometry,
            material_sphere,
            material_plate,
            settings,
        }
    }

    /// Same materials and settings at another separation.
    pub fn at_separation(&self, separation: f64) -> Result<Self> {
        Ok(Self {
            geometry: self.geometry.with_separation(separation)?,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    /// Attraction magnitude, newtons.
    pub force: f64,
    pub est_error: f64,
    /// Integrand evaluations.
    pub node_count: usize,
}

/// Ideal-metal parallel-plate pressure π²ħc/(240d⁴), in N/m².
pub fn ideal_plate_pressure(separation: f64) -> Result<f64> {
    positive("separation", separation)?;
    Ok(PI * PI * HBAR * SPEED_OF_LIGHT / (240.0 * separation.powi(4)))
}

/// Ideal-metal interaction energy per area π²ħc/(720d³), in J/m² (magnitude).
pub fn ideal_plate_energy(separation: f64) -> f64 {
    PI * PI * HBAR * SPEED_OF_LIGHT / (720.0 * separation.powi(3))
}

/// R₁R₂/(R₁ + R₂), the radius entering the proximity-force formula for two spheres.
pub fn effective_radius(r1: f64, r2: f64) -> f64 {
    r1 * r2 / (r1 + r2)
}

/// Proximity-force conversion F = 2πR |u(d)|.
pub fn derjaguin_sphere_plate<U: Fn(f64) -> f64>(
    sphere_radius: f64,
    plate_energy_per_area: U,
    separation: f64,
) -> Result<f64> {
    positive("sphere radius", sphere_radius)?;
    positive("separation", separation)?;
    Ok(2.0 * PI * sphere_radius * plate_energy_per_area(separation).abs())
}

/// π³ħcR/(360d³): ideal metals in the proximity-force limit.
pub fn ideal_sphere_plate_force(sphere_radius: f64, separation: f64) -> f64 {
    PI.powi(3) * HBAR * SPEED_OF_LIGHT * sphere_radius / (360.0 * separation.powi(3))
}

/// ε₀πR(V_bias + V₀)²/gap.
pub fn electrostatic_sphere_plate(sphere_radius: f64, gap: f64, v_bias: f64, v_residual: f64) -> Result<f64> {
    positive("gap", gap)?;
    let v = v_bias + v_residual;
    Ok(EPSILON_0 * PI * sphere_radius * v * v / gap)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

/// ħRc/(16πd³): converts the dimensionless (t, u) integral to newtons.
pub fn force_prefactor(geometry: &Geometry) -> f64 {
    HBAR * geometry.sphere_radius * SPEED_OF_LIGHT / (16.0 * PI * geometry.separation.powi(3))
}

struct InnerStats {
    evaluations: usize,
    /// Largest err/target over all inner integrals.
    worst_ratio: f64,
    failed: bool,
    first_error: Option<Error>,
}

/// Adaptive evaluation of the Lifshitz sphere–plate force.
///
/// The outer integral runs over t = 2dξ/c on geometric panels; each outer
/// node evaluates both permittivities once and integrates u on panels that
/// are geometric from u = t (where p = 1) upward. Gauss–Kronrod nodes are
/// interior, so ξ = 0 is never evaluated.
pub fn lifshitz_sphere_plate(query: &ForceQuery) -> Result<ForceResult> {
    let settings = query.settings;
    settings.validate()?;
    if query.material_sphere.is_vacuum() || query.material_plate.is_vacuum() {
        return Ok(ForceResult {
            force: 0.0,
            est_error: 0.0,
            node_count: 0,
        });
    }

    let prefactor = force_prefactor(&query.geometry);
    let cutoff = settings.p_cutoff_decay;
    let sphere = CachedModel::new(&query.material_sphere);
    let plate_cache;
    let plate = if query.material_plate == query.material_sphere {
        &sphere
    } else {
        plate_cache = CachedModel::new(&query.material_plate);
        &plate_cache
    };
    let xi_scale = SPEED_OF_LIGHT / (2.0 * query.geometry.separation);

    let inner_tol = Tolerance::new(
        0.05 * settings.abs_tol / (prefactor * cutoff),
        0.05 * settings.rel_tol,
        settings.max_subdivisions,
    );
    let outer_tol = Tolerance::new(
        0.9 * settings.abs_tol / prefactor,
        0.9 * settings.rel_tol,
        settings.max_subdivisions,
    );

    let mut stats = InnerStats {
        evaluations: 0,
        worst_ratio: 0.0,
        failed: false,
        first_error: None,
    };

    let outer_breaks = outer_breakpoints(cutoff);
    let outer = integrate(
        |t| {
            if stats.first_error.is_some() {
                return 0.0;
            }
            let eps =
                AngularFrequency::new(xi_scale * t).and_then(|xi| Ok((sphere.evaluate(xi)?, plate.evaluate(xi)?)));
            let (e1, e2) = match eps {
                Ok(v) => v,
                Err(e) => {
                    stats.first_error = Some(e);
                    return 0.0;
                }
            };
            let est = integrate(
                |u| {
                    let p = u / t;
                    integrand(Reflection::new(e1, p), Reflection::new(e2, p), u)
                },
                &inner_breakpoints(t, cutoff),
                inner_tol,
            );
            stats.evaluations += est.evaluations;
            stats.failed |= !est.converged;
            let target = inner_tol.abs + inner_tol.rel * est.value.abs();
            if target > 0.0 {
                stats.worst_ratio = stats.worst_ratio.max(est.error / target);
            }
            est.value
        },
        &outer_breaks,
        outer_tol,
    );

    if let Some(e) = stats.first_error {
        return Err(e);
    }

    let force = prefactor * outer.value.abs();
    let inner_err = stats.worst_ratio * (inner_tol.abs * cutoff + inner_tol.rel * outer.value.abs());
    let est_error = prefactor * (outer.error + inner_err);
    let node_count = stats.evaluations;
    let within = est_error <= settings.rel_tol * force + settings.abs_tol;
    if !outer.converged || stats.failed || !within {
        return Err(Error::Convergence {
            estimate: force,
            est_error,
            node_count,
        });
    }
    Ok(ForceResult {
        force,
        est_error,
        node_count,
    })
}

fn outer_breakpoints(cutoff: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    b.extend((-10..=6).map(|k| 2f64.powi(k)).filter(|t| *t < cutoff));
    b.push(cutoff);
    b
}

fn inner_breakpoints(t: f64, cutoff: f64) -> Vec<f64> {
    let mut b: Vec<f64> = (0..64).map(|k| t * 2f64.powi(k)).take_while(|u| *u < cutoff).collect();
    b.extend((-2..=6).map(|k| t + 2f64.powi(k)).filter(|u| *u < cutoff));
    b.push(cutoff);
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    b
}

/// F(windowed)/F(base) with the same model on both surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowedRatio {
    pub ratio: f64,
    /// First-order propagation of both forces' `est_error`.
    pub ratio_err: f64,
    pub base: ForceResult,
    pub windowed: ForceResult,
}

pub fn force_ratio_windowed(
    base: &DielectricModel,
    window: TransparencyWindow,
    geometry: Geometry,
    settings: QuadratureSettings,
) -> Result<WindowedRatio> {
    let windowed_model = apply_window(base.clone(), window)?;
    let base_f = lifshitz_sphere_plate(&ForceQuery::new(geometry, base.clone(), base.clone(), settings))?;
    let win_f = lifshitz_sphere_plate(&ForceQuery::new(
        geometry,
        windowed_model.clone(),
        windowed_model,
        settings,
    ))?;
    let ratio = win_f.force / base_f.force;
    let ratio_err =
        ratio * ((win_f.est_error / win_f.force).powi(2) + (base_f.est_error / base_f.force).powi(2)).sqrt();
    Ok(WindowedRatio {
        ratio,
        ratio_err,
        base: base_f,
        windowed: win_f,
    })
}
