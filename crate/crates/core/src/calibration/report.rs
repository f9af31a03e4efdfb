//! Output formats: the calibration report JSON and the scan and parabola CSVs.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{CalibrationResult, LockInRecord, ParabolaFit};
use crate::error::Result;
use crate::format::sig;

pub const SCAN_HEADER: &str = "d_pz_nm,v_bias_V,amplitude";
pub const PARABOLA_HEADER: &str = "d_pz_nm,alpha,sigma_alpha,x0_mV,sigma_x0_mV,beta,sigma_beta";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportPoint {
    pub separation_nm: f64,
    pub sigma_separation_nm: f64,
    #[serde(rename = "force_pN")]
    pub force_pn: f64,
    #[serde(rename = "sigma_force_pN")]
    pub sigma_force_pn: f64,
}

/// Calibration report in CLI units (nm, mV, pN).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationReport {
    pub k: f64,
    pub sigma_k: f64,
    pub d0_nm: f64,
    pub sigma_d0_nm: f64,
    #[serde(rename = "v0_mV")]
    pub v0_mv: f64,
    #[serde(rename = "sigma_v0_mV")]
    pub sigma_v0_mv: f64,
    pub casimir_points: Vec<ReportPoint>,
}

impl From<&CalibrationResult> for CalibrationReport {
    fn from(r: &CalibrationResult) -> Self {
        Self {
            k: r.k.value,
            sigma_k: r.k.sigma,
            d0_nm: r.d0.value * 1e9,
            sigma_d0_nm: r.d0.sigma * 1e9,
            v0_mv: r.v0.value * 1e3,
            sigma_v0_mv: r.v0.sigma * 1e3,
            casimir_points: r
                .casimir_points
                .iter()
                .map(|p| ReportPoint {
                    separation_nm: p.separation * 1e9,
                    sigma_separation_nm: p.sigma_separation * 1e9,
                    force_pn: p.force * 1e12,
                    sigma_force_pn: p.sigma_force * 1e12,
                })
                .collect(),
        }
    }
}

impl CalibrationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

pub fn write_scan_csv<W: Write>(mut w: W, records: &[LockInRecord]) -> Result<()> {
    writeln!(w, "{SCAN_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{}",
            sig(r.d_pz * 1e9, 12),
            sig(r.v_bias, 12),
            sig(r.amplitude, 12)
        )?;
    }
    Ok(())
}

pub fn write_parabola_csv<W: Write>(mut w: W, parabolas: &[ParabolaFit]) -> Result<()> {
    writeln!(w, "{PARABOLA_HEADER}")?;
    for p in parabolas {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            sig(p.d_pz * 1e9, 12),
            sig(p.alpha, 12),
            sig(p.sigma_alpha(), 12),
            sig(p.x0 * 1e3, 12),
            sig(p.sigma_x0() * 1e3, 12),
            sig(p.beta, 12),
            sig(p.sigma_beta(), 12),
        )?;
    }
    Ok(())
}

/// Full force covariance in pN², one row per point.
pub fn write_force_covariance_csv<W: Write>(mut w: W, result: &CalibrationResult) -> Result<()> {
    let n = result.casimir_points.len();
    let header: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| sig(result.force_covariance[(i, j)] * 1e24, 12))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
