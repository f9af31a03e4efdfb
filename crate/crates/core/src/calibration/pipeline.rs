use super::{
    extract_casimir, fit_calibration, fit_parabola, generate_scan, group_by_dpz, CalibrationFit, CalibrationResult,
    GroundTruth, LockInRecord, Measured, ParabolaFit, ScanPlan, Weighting,
};
use crate::error::Error;

/// How k and d₀ are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CalibrationMode {
    /// k and d₀ from the parabola curvatures, measured alongside F_C.
    #[default]
    Simultaneous,
    /// Negative control: k and d₀ from the amplitude at the largest |V_bias|
    /// alone, assuming V₀ = 0 and no Casimir contribution. Biased whenever
    /// either assumption fails; not a supported workflow.
    SeparateElectrostatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PipelineOptions {
    pub weighting: Weighting,
    pub mode: CalibrationMode,
}

/// Intermediate and final data products of one run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub records: Vec<LockInRecord>,
    /// α, x₀, β per d_pz (the α-vs-d_pz calibration curve).
    pub parabolas: Vec<ParabolaFit>,
    pub calibration: CalibrationFit,
    /// F_C against d₀ − d_pz.
    pub result: CalibrationResult,
}

/// A failed run, with whatever was computed before the failing stage.
#[derive(Debug)]
pub struct PipelineFailure {
    pub error: Error,
    pub records: Vec<LockInRecord>,
    pub parabolas: Vec<ParabolaFit>,
}

impl std::fmt::Display for PipelineFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} ({} records, {} parabolas fitted before failure)",
            self.error,
            self.records.len(),
            self.parabolas.len()
        )
    }
}

impl std::error::Error for PipelineFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// generate_scan → fit_parabola per d_pz → fit_calibration → extract_casimir.
pub fn run_pipeline(
    truth: &GroundTruth,
    plan: &ScanPlan,
    options: PipelineOptions,
) -> std::result::Result<PipelineOutput, PipelineFailure> {
    let mut records = Vec::new();
    let mut parabolas = Vec::new();
    macro_rules! attempt {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(error) => {
                    return Err(PipelineFailure {
                        error,
                        records,
                        parabolas,
                    })
                }
            }
        };
    }

    records = attempt!(generate_scan(truth, plan));
    let groups: Vec<Vec<LockInRecord>> = group_by_dpz(&records).into_iter().map(<[_]>::to_vec).collect();
    for group in &groups {
        let fit = attempt!(fit_parabola(group));
        parabolas.push(fit);
    }

    let calibration = match options.mode {
        CalibrationMode::Simultaneous => attempt!(fit_calibration(&parabolas, truth.sphere_radius, options.weighting)),
        CalibrationMode::SeparateElectrostatic => {
            let naive = attempt!(naive_curvatures(&records));
            attempt!(fit_calibration(&naive, truth.sphere_radius, Weighting::Uniform))
        }
    };

    let result = attempt!(extract_casimir(
        &parabolas,
        Measured::new(calibration.k, calibration.sigma_k()),
        Measured::new(calibration.d0, calibration.sigma_d0()),
    ));
    Ok(PipelineOutput {
        records,
        parabolas,
        calibration,
        result,
    })
}

/// α ≈ A/V² at the largest |V_bias| of each d_pz, as if V₀ and F_C were zero.
fn naive_curvatures(records: &[LockInRecord]) -> crate::error::Result<Vec<ParabolaFit>> {
    group_by_dpz(records)
        .into_iter()
        .map(|group| {
            let r = group
                .iter()
                .max_by(|a, b| a.v_bias.abs().total_cmp(&b.v_bias.abs()))
                .expect("non-empty group");
            if r.v_bias == 0.0 {
                return Err(Error::Fit("separate calibration needs a non-zero bias".into()));
            }
            Ok(ParabolaFit {
                d_pz: r.d_pz,
                alpha: r.amplitude / (r.v_bias * r.v_bias),
                x0: 0.0,
                beta: 0.0,
                covariance: nalgebra::Matrix3::zeros(),
                dof: 0,
            })
        })
        .collect()
}
