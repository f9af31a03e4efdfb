//! Fit of α(d_pz) = k ε₀πR / (d₀ − d_pz) for the calibration constant and d₀.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};

use super::ParabolaFit;
use crate::constants::EPSILON_0;
use crate::error::{Error, Result};

/// How the per-parabola α values are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// 1/σ_α², falling back to uniform when any σ_α is zero.
    #[default]
    InverseVariance,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationFit {
    pub k: f64,
    pub d0: f64,
    /// Covariance of (k, d₀).
    pub covariance: Matrix2<f64>,
    pub iterations: usize,
    /// Weighted sum of squared residuals at the optimum.
    pub chi2: f64,
    /// Whether inverse-variance weights were actually used.
    pub weighted: bool,
}

impl CalibrationFit {
    pub fn sigma_k(&self) -> f64 {
        self.covariance[(0, 0)].sqrt()
    }

    pub fn sigma_d0(&self) -> f64 {
        self.covariance[(1, 1)].sqrt()
    }
}

const MAX_ITERATIONS: usize = 200;

/// Levenberg–Marquardt fit of k and d₀, started from the exact linear
/// relation 1/α = (d₀ − d_pz)/(k ε₀πR).
pub fn fit_calibration(parabolas: &[ParabolaFit], sphere_radius: f64, weighting: Weighting) -> Result<CalibrationFit> {
    if parabolas.len() < 3 {
        return Err(Error::Fit(format!(
            "calibration fit needs at least 3 parabolas, got {}",
            parabolas.len()
        )));
    }
    let mut zs: Vec<f64> = parabolas.iter().map(|p| p.d_pz).collect();
    zs.sort_by(f64::total_cmp);
    if zs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Fit("calibration fit needs parabolas at distinct d_pz".into()));
    }
    if let Some(p) = parabolas.iter().find(|p| !(p.alpha > 0.0)) {
        return Err(Error::Fit(format!("alpha must be positive (d_pz = {:e} m)", p.d_pz)));
    }
    let z_max = zs[zs.len() - 1];
    let geom = EPSILON_0 * PI * sphere_radius;

    let sigmas: Vec<f64> = parabolas.iter().map(|p| p.sigma_alpha()).collect();
    let weighted = weighting == Weighting::InverseVariance && sigmas.iter().all(|s| *s > 0.0 && s.is_finite());
    let sigma = |i: usize| if weighted { sigmas[i] } else { 1.0 };

    // 1/α = a + b·z with b = −1/(k ε₀πR), a = d₀/(k ε₀πR).
    let (a, b) = linear_fit(parabolas.iter().map(|p| (p.d_pz, 1.0 / p.alpha)));
    if !(b < 0.0) {
        return Err(Error::Fit(
            "1/alpha does not decrease with d_pz; cannot initialise".into(),
        ));
    }
    let k_init = -1.0 / (b * geom);
    let d0_init = (-a / b).max(z_max * (1.0 + 1e-6) + 1e-12);

    // Parameters scaled to O(1): k = k_init·q₀, d₀ = d0_init·q₁.
    let model = |q: Vector2<f64>, z: f64| k_init * q[0] * geom / (d0_init * q[1] - z);
    let eval = |q: Vector2<f64>| -> (f64, Matrix2<f64>, Vector2<f64>) {
        let mut chi2 = 0.0;
        let mut jtj = Matrix2::zeros();
        let mut jtr = Vector2::zeros();
        for (i, p) in parabolas.iter().enumerate() {
            let gap = d0_init * q[1] - p.d_pz;
            let m = model(q, p.d_pz);
            let s = sigma(i);
            let r = (p.alpha - m) / s;
            let j = Vector2::new(m / q[0], -m * d0_init / gap) / s;
            chi2 += r * r;
            jtj += j * j.transpose();
            jtr += j * r;
        }
        (chi2, jtj, jtr)
    };

    let mut q = Vector2::new(1.0, 1.0);
    let (mut chi2, mut jtj, mut jtr) = eval(q);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let damped = jtj + lambda * Matrix2::from_diagonal(&jtj.diagonal());
        let Some(step) = damped.lu().solve(&jtr) else {
            lambda *= 10.0;
            continue;
        };
        let trial = q + step;
        let feasible = trial[0] > 0.0 && d0_init * trial[1] > z_max;
        let (c2, jj, jr) = if feasible {
            eval(trial)
        } else {
            (f64::INFINITY, jtj, jtr)
        };
        if c2 <= chi2 {
            let small = step.amax() < 1e-13;
            q = trial;
            (chi2, jtj, jtr) = (c2, jj, jr);
            lambda = (lambda * 0.1).max(1e-12);
            if small || chi2 == 0.0 {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                // No downhill step left at float resolution.
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::Fit(format!(
            "calibration fit did not converge in {MAX_ITERATIONS} iterations (k = {:e}, d0 = {:e} m, chi2 = {chi2:e})",
            k_init * q[0],
            d0_init * q[1]
        )));
    }

    let k = k_init * q[0];
    let d0 = d0_init * q[1];
    if !(d0 > z_max) {
        return Err(Error::NonPhysical(format!(
            "fitted d0 = {d0:e} m does not exceed the largest d_pz = {z_max:e} m"
        )));
    }

    let scaled_cov = jtj
        .try_inverse()
        .ok_or_else(|| Error::Fit("singular calibration normal matrix".into()))?;
    let n = parabolas.len();
    let scale = if weighted { 1.0 } else { chi2 / (n - 2).max(1) as f64 };
    let units = Matrix2::from_diagonal(&Vector2::new(k_init, d0_init));
    let covariance = units * scaled_cov * units * scale;

    Ok(CalibrationFit {
        k,
        d0,
        covariance: 0.5 * (covariance + covariance.transpose()),
        iterations,
        chi2,
        weighted,
    })
}

/// Ordinary least squares y = a + b x.
fn linear_fit(points: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let n = points.clone().count() as f64;
    let mx = points.clone().map(|p| p.0).sum::<f64>() / n;
    let my = points.clone().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.clone().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.map(|(x, _)| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    const R: f64 = 100e-6;

    fn synthetic(k: f64, d0: f64, zs: &[f64], sigma_rel: f64) -> Vec<ParabolaFit> {
        zs.iter()
            .map(|&z| {
                let alpha = k * EPSILON_0 * PI * R / (d0 - z);
                let mut covariance = Matrix3::zeros();
                covariance[(0, 0)] = (sigma_rel * alpha).powi(2);
                ParabolaFit {
                    d_pz: z,
                    alpha,
                    x0: 0.0,
                    beta: 0.0,
                    covariance,
                    dof: 8,
                }
            })
            .collect()
    }

    fn zs() -> Vec<f64> {
        (0..10).map(|i| (100.0 + 33.0 * i as f64) / 1e9).collect()
    }

    #[test]
    fn noiseless_round_trip() {
        for weighting in [Weighting::InverseVariance, Weighting::Uniform] {
            let fit = fit_calibration(&synthetic(1e12, 500e-9, &zs(), 1e-3), R, weighting).unwrap();
            assert!(((fit.k - 1e12) / 1e12).abs() < 1e-8);
            assert!(((fit.d0 - 500e-9) / 500e-9).abs() < 1e-8);
        }
    }

    #[test]
    fn scaling_alpha_scales_k_only() {
        let base = synthetic(1e12, 500e-9, &zs(), 1e-3);
        let doubled: Vec<_> = base
            .iter()
            .map(|p| ParabolaFit {
                alpha: 2.0 * p.alpha,
                ..*p
            })
            .collect();
        let a = fit_calibration(&base, R, Weighting::InverseVariance).unwrap();
        let b = fit_calibration(&doubled, R, Weighting::InverseVariance).unwrap();
        assert!((b.k / a.k - 2.0).abs() < 1e-10);
        assert!(((b.d0 - a.d0) / a.d0).abs() < 1e-10);
    }

    #[test]
    fn too_few_parabolas() {
        let two = synthetic(1e12, 500e-9, &zs()[..2], 1e-3);
        assert!(matches!(
            fit_calibration(&two, R, Weighting::Uniform),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn zero_sigmas_fall_back_to_uniform() {
        let fit = fit_calibration(&synthetic(1e12, 500e-9, &zs(), 0.0), R, Weighting::InverseVariance).unwrap();
        assert!(!fit.weighted);
    }

    #[test]
    fn recovers_from_perturbed_data() {
        let mut ps = synthetic(3e9, 700e-9, &zs(), 1e-2);
        let wobble = [1.0, -1.0, 0.5, -0.5, 0.2, -0.2, 1.2, -0.8, 0.1, 0.0];
        for (p, w) in ps.iter_mut().zip(wobble) {
            p.alpha *= 1.0 + 1e-2 * w;
        }
        let fit = fit_calibration(&ps, R, Weighting::InverseVariance).unwrap();
        assert!(((fit.k - 3e9) / 3e9).abs() < 5.0 * fit.sigma_k() / 3e9);
        assert!((fit.d0 - 700e-9).abs() < 5.0 * fit.sigma_d0());
        assert!(fit.covariance[(0, 1)] == fit.covariance[(1, 0)]);
    }
}
