use nalgebra::DMatrix;

use super::ParabolaFit;
use crate::error::{Error, Result};

/// A value with a one-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub sigma: f64,
}

impl Measured {
    pub fn new(value: f64, sigma: f64) -> Self {
        Self { value, sigma }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirPoint {
    pub d_pz: f64,
    /// d₀ − d_pz.
    pub separation: f64,
    pub sigma_separation: f64,
    /// β/k. Negative values are kept and flagged by [`CasimirPoint::is_negative`].
    pub force: f64,
    pub sigma_force: f64,
}

impl CasimirPoint {
    pub fn is_negative(&self) -> bool {
        self.force < 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub k: Measured,
    pub d0: Measured,
    /// Inverse-variance mean of the parabola vertices.
    pub v0: Measured,
    pub casimir_points: Vec<CasimirPoint>,
    /// Full covariance of the forces, including the correlation through k.
    pub force_covariance: DMatrix<f64>,
}

/// F_C = β/k for every parabola, at separation d₀ − d_pz.
///
/// The per-point σ_F treats σ_β and σ_k as independent:
/// σ_F² = (σ_β/k)² + (β σ_k/k²)². Because k is shared, points are correlated;
/// that part lives only in `force_covariance`.
pub fn extract_casimir(parabolas: &[ParabolaFit], k: Measured, d0: Measured) -> Result<CalibrationResult> {
    if !(k.value > 0.0) {
        return Err(Error::Domain(format!(
            "calibration constant must be positive, got {}",
            k.value
        )));
    }
    let kk = k.value;
    let casimir_points: Vec<CasimirPoint> = parabolas
        .iter()
        .map(|p| {
            let force = p.beta / kk;
            let sigma_force = ((p.sigma_beta() / kk).powi(2) + (p.beta * k.sigma / (kk * kk)).powi(2)).sqrt();
            CasimirPoint {
                d_pz: p.d_pz,
                separation: d0.value - p.d_pz,
                sigma_separation: d0.sigma,
                force,
                sigma_force,
            }
        })
        .collect();

    let n = parabolas.len();
    let force_covariance = DMatrix::from_fn(n, n, |i, j| {
        let common = parabolas[i].beta * parabolas[j].beta * k.sigma * k.sigma / kk.powi(4);
        if i == j {
            common + parabolas[i].covariance[(2, 2)] / (kk * kk)
        } else {
            common
        }
    });

    Ok(CalibrationResult {
        k,
        d0,
        v0: pool_v0(parabolas),
        casimir_points,
        force_covariance,
    })
}

fn pool_v0(parabolas: &[ParabolaFit]) -> Measured {
    let vars: Vec<f64> = parabolas.iter().map(|p| p.covariance[(1, 1)]).collect();
    if !parabolas.is_empty() && vars.iter().all(|v| *v > 0.0 && v.is_finite()) {
        let wsum: f64 = vars.iter().map(|v| 1.0 / v).sum();
        let mean = parabolas.iter().zip(&vars).map(|(p, v)| p.x0 / v).sum::<f64>() / wsum;
        Measured::new(mean, wsum.recip().sqrt())
    } else {
        let n = parabolas.len().max(1) as f64;
        Measured::new(parabolas.iter().map(|p| p.x0).sum::<f64>() / n, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    fn parabola(d_pz: f64, x0: f64, beta: f64, var_x0: f64, var_beta: f64) -> ParabolaFit {
        let mut covariance = Matrix3::zeros();
        covariance[(0, 0)] = 1e-6;
        covariance[(1, 1)] = var_x0;
        covariance[(2, 2)] = var_beta;
        ParabolaFit {
            d_pz,
            alpha: 1.0,
            x0,
            beta,
            covariance,
            dof: 8,
        }
    }

    #[test]
    fn zero_beta_propagates_only_beta_error() {
        let r = extract_casimir(
            &[parabola(1e-7, 0.0, 0.0, 1.0, 0.04)],
            Measured::new(2.0, 0.5),
            Measured::new(5e-7, 1e-9),
        )
        .unwrap();
        let p = r.casimir_points[0];
        assert_eq!(p.force, 0.0);
        assert!((p.sigma_force - 0.2 / 2.0).abs() < 1e-15);
        assert_eq!(p.separation, 4e-7);
        assert_eq!(p.sigma_separation, 1e-9);
    }

    #[test]
    fn sigma_k_enters_quadratically() {
        let ps = [parabola(1e-7, 0.0, 4.0, 1.0, 0.0)];
        let one = extract_casimir(&ps, Measured::new(2.0, 0.1), Measured::new(5e-7, 0.0)).unwrap();
        let two = extract_casimir(&ps, Measured::new(2.0, 0.2), Measured::new(5e-7, 0.0)).unwrap();
        // σ_β = 0, so σ_F = β σ_k / k² exactly.
        assert!((one.casimir_points[0].sigma_force - 0.1).abs() < 1e-15);
        assert!((two.casimir_points[0].sigma_force - 0.2).abs() < 1e-15);
    }

    #[test]
    fn negative_force_is_flagged_not_rejected() {
        let r = extract_casimir(
            &[parabola(1e-7, 0.0, -1.0, 1.0, 0.01)],
            Measured::new(1.0, 0.0),
            Measured::new(5e-7, 0.0),
        )
        .unwrap();
        assert!(r.casimir_points[0].is_negative());
    }

    #[test]
    fn k_must_be_positive() {
        assert!(extract_casimir(&[], Measured::new(0.0, 0.0), Measured::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn v0_is_inverse_variance_pooled() {
        let ps = [parabola(1e-7, 0.1, 0.0, 1.0, 1.0), parabola(2e-7, 0.4, 0.0, 4.0, 1.0)];
        let r = extract_casimir(&ps, Measured::new(1.0, 0.0), Measured::new(5e-7, 0.0)).unwrap();
        assert!((r.v0.value - (0.1 + 0.4 / 4.0) / 1.25).abs() < 1e-15);
        assert!((r.v0.sigma - (1.0f64 / 1.25).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn covariance_diagonal_matches_point_sigmas() {
        let ps = [parabola(1e-7, 0.0, 3.0, 1.0, 0.09), parabola(2e-7, 0.0, 1.0, 1.0, 0.01)];
        let r = extract_casimir(&ps, Measured::new(2.0, 0.3), Measured::new(5e-7, 0.0)).unwrap();
        for (i, p) in r.casimir_points.iter().enumerate() {
            assert!((r.force_covariance[(i, i)].sqrt() - p.sigma_force).abs() < 1e-14);
        }
        assert!(r.force_covariance[(0, 1)] > 0.0);
    }
}
