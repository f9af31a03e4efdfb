use nalgebra::{DMatrix, DVector, Matrix3};

use super::LockInRecord;
use crate::error::{Error, Result};

/// y = α(x + x₀)² + β at one piezo position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolaFit {
    pub d_pz: f64,
    pub alpha: f64,
    pub x0: f64,
    pub beta: f64,
    /// Covariance of (α, x₀, β).
    pub covariance: Matrix3<f64>,
    /// Residual degrees of freedom.
    pub dof: usize,
}

impl ParabolaFit {
    pub fn sigma_alpha(&self) -> f64 {
        self.covariance[(0, 0)].sqrt()
    }

    pub fn sigma_x0(&self) -> f64 {
        self.covariance[(1, 1)].sqrt()
    }

    pub fn sigma_beta(&self) -> f64 {
        self.covariance[(2, 2)].sqrt()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.alpha * (x + self.x0).powi(2) + self.beta
    }
}

/// Least-squares parabola through records sharing one d_pz.
///
/// Solved linearly in the monomial basis a x² + b x + c and converted to
/// (α, x₀, β) = (a, b/2a, c − b²/4a). The noise level is estimated from the
/// residuals, and the covariance is carried through the Jacobian of that map.
pub fn fit_parabola(records: &[LockInRecord]) -> Result<ParabolaFit> {
    if records.len() < 4 {
        return Err(Error::Fit(format!(
            "parabola fit needs at least 4 records, got {}",
            records.len()
        )));
    }
    let d_pz = records[0].d_pz;
    if records.iter().any(|r| r.d_pz != d_pz) {
        return Err(Error::Fit("parabola fit records must share one d_pz".into()));
    }
    let mut xs: Vec<f64> = records.iter().map(|r| r.v_bias).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::Fit(format!(
            "degenerate design: {} distinct bias values, need 3",
            xs.len()
        )));
    }

    let n = records.len();
    let design = DMatrix::from_fn(n, 3, |i, j| records[i].v_bias.powi(2 - j as i32));
    let y = DVector::from_iterator(n, records.iter().map(|r| r.amplitude));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax) {
        return Err(Error::Fit("degenerate design matrix".into()));
    }
    let coef = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::Fit(format!("parabola solve failed: {e}")))?;
    let (a, b, c) = (coef[0], coef[1], coef[2]);
    if !(a > 0.0) {
        return Err(Error::NonPhysical(format!(
            "parabola at d_pz = {d_pz:e} m opens downward (alpha = {a:e})"
        )));
    }

    let dof = n - 3;
    let residual = &y - &design * &coef;
    let s2 = if dof > 0 {
        residual.norm_squared() / dof as f64
    } else {
        0.0
    };
    // (XᵀX)⁻¹ = V Σ⁻² Vᵀ
    let v_t = svd.v_t.as_ref().expect("requested V");
    let inv_sigma2 = svd.singular_values.map(|s| 1.0 / (s * s));
    let xtx_inv = v_t.transpose() * DMatrix::from_diagonal(&inv_sigma2) * v_t;
    let cov_abc = Matrix3::from_fn(|i, j| s2 * xtx_inv[(i, j)]);

    let jac = Matrix3::new(
        1.0,
        0.0,
        0.0,
        -b / (2.0 * a * a),
        1.0 / (2.0 * a),
        0.0,
        b * b / (4.0 * a * a),
        -b / (2.0 * a),
        1.0,
    );
    let mut covariance = jac * cov_abc * jac.transpose();
    covariance = 0.5 * (covariance + covariance.transpose());

    Ok(ParabolaFit {
        d_pz,
        alpha: a,
        x0: b / (2.0 * a),
        beta: c - b * b / (4.0 * a),
        covariance,
        dof,
    })
}
