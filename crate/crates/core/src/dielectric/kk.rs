//! Imaginary-axis permittivity from absorption:
//! ε(iξ) = 1 + (2/π) ∫₀^∞ ω ε″(ω) / (ω² + ξ²) dω.
//!
//! Integrals run in s = ln ω. The kernel ω²/(ω² + ξ²) (after the Jacobian)
//! turns over at ω = ξ, so ln ξ and its neighbours are always breakpoints.

use std::f64::consts::FRAC_2_PI;

use super::table::{AbsorptionTable, LowTail};
use super::AngularFrequency;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

pub const KK_ABS_TOL: f64 = 1e-8;
pub const KK_REL_TOL: f64 = 1e-8;
const KK_MAX_SUBDIVISIONS: usize = 20_000;

fn kk_tolerance() -> Tolerance {
    // Scaled so the tolerance applies to ε itself rather than to the raw integral.
    Tolerance::new(KK_ABS_TOL / FRAC_2_PI, KK_REL_TOL, KK_MAX_SUBDIVISIONS)
}

/// ε(iξ) for a tabulated absorption spectrum with its declared tails.
pub fn eps_imag_axis_kk(table: &AbsorptionTable, xi: AngularFrequency) -> Result<f64> {
    let xi = xi.positive("eps_imag_axis_kk")?;
    let integral = low_tail_integral(table, xi) + body_integral(table, xi)? + high_tail_integral(table, xi)?;
    Ok(1.0 + FRAC_2_PI * integral)
}

/// ∫₀^{ω₁} ω ε″(ω)/(ω²+ξ²) dω for the closed-form low tails.
fn low_tail_integral(table: &AbsorptionTable, xi: f64) -> f64 {
    let (w0, e0) = table.first();
    let x = w0 / xi;
    match table.low_tail() {
        LowTail::DrudeLike => e0 * w0 * x.atan() / xi,
        LowTail::LinearToZero => {
            // (e0/w0) · (w0 - ξ atan(w0/ξ)), expanded for w0 ≪ ξ to avoid cancellation.
            let diff = if x < 1e-3 {
                let x2 = x * x;
                xi * x * x2 * (1.0 / 3.0 - x2 / 5.0 + x2 * x2 / 7.0)
            } else {
                w0 - xi * x.atan()
            };
            e0 / w0 * diff
        }
        LowTail::Zero => 0.0,
    }
}

fn body_integral(table: &AbsorptionTable, xi: f64) -> Result<f64> {
    let ln_xi = xi.ln();
    let breaks = with_cluster(table.ln_omegas().to_vec(), ln_xi);
    let est = integrate(
        |s| {
            let w = s.exp();
            let r = xi / w;
            table.interpolate_ln(s) / (1.0 + r * r)
        },
        &breaks,
        kk_tolerance(),
    );
    finish(est)
}

fn high_tail_integral(table: &AbsorptionTable, xi: f64) -> Result<f64> {
    let (wn, en) = table.last();
    if en == 0.0 {
        return Ok(0.0);
    }
    let n = table.high_tail().exponent();
    let (lo, hi) = (wn.ln(), table.cutoff().ln());
    let mut breaks: Vec<f64> = (0..).map(|k| lo + k as f64).take_while(|s| *s < hi).collect();
    breaks.push(hi);
    let breaks = with_cluster(breaks, xi.ln());
    let est = integrate(
        |s| {
            let w = s.exp();
            let r = xi / w;
            en * (wn / w).powf(n) / (1.0 + r * r)
        },
        &breaks,
        kk_tolerance(),
    );
    finish(est)
}

/// ∫_{lo}^{hi} ω ε″(ω)/(ω²+ξ²) dω for an arbitrary absorption function,
/// with extra breakpoints (in ω) where ε″ has kinks.
pub(crate) fn absorption_integral<F: Fn(f64) -> f64>(
    absorption: F,
    lo: f64,
    hi: f64,
    xi: f64,
    kinks: &[f64],
) -> Result<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let n_panels = ((b - a) / 0.5).ceil().max(1.0) as usize;
    let mut breaks: Vec<f64> = (0..=n_panels)
        .map(|k| a + (b - a) * k as f64 / n_panels as f64)
        .collect();
    breaks.extend(kinks.iter().map(|w| w.ln()).filter(|s| *s > a && *s < b));
    breaks.sort_by(f64::total_cmp);
    let breaks = with_cluster(breaks, xi.ln());
    let est = integrate(
        |s| {
            let w = s.exp();
            let r = xi / w;
            absorption(w) / (1.0 + r * r)
        },
        &breaks,
        kk_tolerance(),
    );
    finish(est)
}

/// Adds ln ξ and ln ξ ± 1 to an ascending breakpoint list, keeping its ends.
fn with_cluster(mut breaks: Vec<f64>, ln_xi: f64) -> Vec<f64> {
    let (a, b) = (breaks[0], breaks[breaks.len() - 1]);
    for s in [ln_xi - 1.0, ln_xi, ln_xi + 1.0] {
        if s > a && s < b {
            breaks.push(s);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

fn finish(est: crate::quadrature::Estimate) -> Result<f64> {
    if est.converged {
        Ok(est.value)
    } else {
        Err(Error::Convergence {
            estimate: est.value,
            est_error: est.error,
            node_count: est.evaluations,
        })
    }
}
