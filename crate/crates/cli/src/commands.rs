use std::io::Write;
use std::path::{Path, PathBuf};

use casimir::calibration::config::{ForceCurveConfig, SimulationConfig};
use casimir::calibration::report::{write_force_covariance_csv, write_parabola_csv, write_scan_csv, CalibrationReport};
use casimir::calibration::{run_pipeline, LockInRecord, ParabolaFit};
use casimir::dielectric::preset::{self, ModelFile, PRESET_NAMES};
use casimir::dielectric::{
    eps_imag_axis_kk, AbsorptionTable, AngularFrequency, DielectricModel, HighTail, LowTail, TransparencyWindow,
};
use casimir::format::sig;
use casimir::grid::{lin_space, log_space};
use casimir::lifshitz::{
    force_ratio_windowed, lifshitz_sphere_plate, ForceQuery, ForceResult, Geometry, QuadratureSettings,
};
use casimir::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::manifest::{file_digest, RunManifest};
use crate::output::{check_writable, open, sibling};
use crate::{Cli, Command, GlobalOptions, LowTailArg, Materials, Range, Spacing};

pub const SWEEP_HEADER: &str = "separation_nm,force_pN,est_error_pN,node_count";
pub const RATIO_HEADER: &str = "separation_nm,ratio_windowed,ratio_err";
pub const KK_HEADER: &str = "xi_rad_per_s,eps";
const DIGITS: usize = 9;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Io(_) => 2,
        Error::Convergence { .. } => 3,
        Error::Fit(_) | Error::NonPhysical(_) => 4,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::config(format!("write failed: {e}"))
    }
}

type Outcome = Result<(), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    if let Some(out) = &g.output {
        check_writable(out).map_err(Failure::config)?;
    }
    match &cli.command {
        Command::Force {
            materials,
            separation_nm,
        } => force(g, materials, *separation_nm),
        Command::Sweep { materials, range } => sweep(g, materials, range),
        Command::Ratio {
            base,
            window_min_um,
            window_max_um,
            radius_um,
            range,
        } => ratio(g, base, *window_min_um, *window_max_um, *radius_um, range),
        Command::Kk {
            table,
            xi_min,
            xi_max,
            points,
            low_tail,
            high_tail_exponent,
            high_tail_cutoff_factor,
        } => kk(
            g,
            table,
            *xi_min,
            *xi_max,
            *points,
            *low_tail,
            *high_tail_exponent,
            *high_tail_cutoff_factor,
        ),
        Command::CalibrateSim { config } => calibrate_sim(g, config),
        Command::Presets { name } => presets(g, name.as_deref()),
    }
}

fn settings(g: &GlobalOptions) -> Result<QuadratureSettings, Failure> {
    let s = QuadratureSettings {
        rel_tol: g.rel_tol,
        abs_tol: g.abs_tol_pn / 1e12,
        max_subdivisions: g.max_subdiv,
        ..QuadratureSettings::default()
    };
    s.validate()?;
    Ok(s)
}

fn settings_json(s: &QuadratureSettings) -> Value {
    json!({
        "rel_tol": s.rel_tol,
        "abs_tol_N": s.abs_tol,
        "max_subdivisions": s.max_subdivisions,
        "p_cutoff_decay": s.p_cutoff_decay,
    })
}

/// Model description for the manifest, with digests of any table files.
fn model_json(arg: &str, file: &ModelFile) -> Result<Value, Failure> {
    let mut tables = Vec::new();
    let mut cur = Some(file);
    while let Some(f) = cur {
        if let Some(p) = &f.table_path {
            let d = file_digest(p).map_err(|e| Failure::config(format!("cannot read table {}: {e}", p.display())))?;
            tables.push(json!({ "path": p, "sha256": d }));
        }
        cur = f.base.as_deref();
    }
    Ok(json!({ "arg": arg, "model": file, "tables": tables }))
}

fn resolve_model(arg: &str) -> Result<(Value, DielectricModel), Failure> {
    let (file, model) = preset::resolve(arg)?;
    Ok((model_json(arg, &file)?, model))
}

fn separations_nm(range: &Range) -> Result<Vec<f64>, Failure> {
    if !(range.d_min_nm > 0.0 && range.d_min_nm < range.d_max_nm && range.d_max_nm.is_finite()) {
        return Err(Failure::config(format!(
            "need 0 < d-min-nm < d-max-nm, got {} and {}",
            range.d_min_nm, range.d_max_nm
        )));
    }
    if range.points < 2 {
        return Err(Failure::config(format!("need at least 2 points, got {}", range.points)));
    }
    Ok(match range.spacing {
        Spacing::Linear => lin_space(range.d_min_nm, range.d_max_nm, range.points),
        Spacing::Log => log_space(range.d_min_nm, range.d_max_nm, range.points),
    })
}

fn range_json(range: &Range) -> Value {
    json!({
        "d_min_nm": range.d_min_nm,
        "d_max_nm": range.d_max_nm,
        "points": range.points,
        "spacing": range.spacing,
    })
}

fn warn_derjaguin(radius: f64, d_max: f64) {
    if let Ok(g) = Geometry::new(radius, d_max) {
        if g.derjaguin_warning() {
            eprintln!(
                "warning: d/R = {:.3} exceeds {}; the proximity approximation loses accuracy",
                d_max / radius,
                casimir::lifshitz::DERJAGUIN_LIMIT
            );
        }
    }
}

fn force_json(r: &ForceResult) -> Value {
    json!({
        "force_pN": r.force * 1e12,
        "est_error_pN": r.est_error * 1e12,
        "node_count": r.node_count,
    })
}

fn force(g: &GlobalOptions, m: &Materials, separation_nm: f64) -> Outcome {
    let settings = settings(g)?;
    let geometry = Geometry::new(m.radius_um / 1e6, separation_nm / 1e9)?;
    let (sphere_json, sphere) = resolve_model(&m.sphere)?;
    let (plate_json, plate) = resolve_model(&m.plate)?;
    RunManifest::new(json!({
        "command": "force",
        "sphere": sphere_json,
        "plate": plate_json,
        "radius_um": m.radius_um,
        "separation_nm": separation_nm,
        "quadrature": settings_json(&settings),
    }))
    .emit();
    warn_derjaguin(geometry.sphere_radius(), geometry.separation());

    let mut out = open(g.output.as_deref())?;
    match lifshitz_sphere_plate(&ForceQuery::new(geometry, sphere, plate, settings)) {
        Ok(r) => {
            writeln!(out, "{}", force_json(&r))?;
            out.flush()?;
            Ok(())
        }
        Err(
            e @ Error::Convergence {
                estimate,
                est_error,
                node_count,
            },
        ) => {
            let best = ForceResult {
                force: estimate,
                est_error,
                node_count,
            };
            writeln!(out, "{}", force_json(&best))?;
            out.flush()?;
            Err(e.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn sweep(g: &GlobalOptions, m: &Materials, range: &Range) -> Outcome {
    let settings = settings(g)?;
    let grid = separations_nm(range)?;
    let radius = m.radius_um / 1e6;
    let geometry = Geometry::new(radius, grid[0] / 1e9)?;
    let (sphere_json, sphere) = resolve_model(&m.sphere)?;
    let (plate_json, plate) = resolve_model(&m.plate)?;
    RunManifest::new(json!({
        "command": "sweep",
        "sphere": sphere_json,
        "plate": plate_json,
        "radius_um": m.radius_um,
        "range": range_json(range),
        "quadrature": settings_json(&settings),
    }))
    .emit();
    warn_derjaguin(radius, grid[grid.len() - 1] / 1e9);

    let query = ForceQuery::new(geometry, sphere, plate, settings);
    let rows: Vec<_> = grid
        .par_iter()
        .map(|d| query.at_separation(d / 1e9).and_then(|q| lifshitz_sphere_plate(&q)))
        .collect();

    let mut out = open(g.output.as_deref())?;
    writeln!(out, "{SWEEP_HEADER}")?;
    let mut unconverged = 0;
    for (d, row) in grid.iter().zip(rows) {
        match row {
            Ok(r) => writeln!(
                out,
                "{},{},{},{}",
                sig(*d, DIGITS),
                sig(r.force * 1e12, DIGITS),
                sig(r.est_error * 1e12, DIGITS),
                r.node_count
            )?,
            Err(Error::Convergence {
                estimate, node_count, ..
            }) => {
                unconverged += 1;
                writeln!(
                    out,
                    "{},{},nan,{}",
                    sig(*d, DIGITS),
                    sig(estimate * 1e12, DIGITS),
                    node_count
                )?;
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.flush()?;
    if unconverged > 0 {
        return Err(Failure {
            code: 3,
            message: format!("{unconverged} of {} rows did not converge", grid.len()),
        });
    }
    Ok(())
}

fn ratio(g: &GlobalOptions, base: &str, min_um: f64, max_um: f64, radius_um: f64, range: &Range) -> Outcome {
    let settings = settings(g)?;
    let grid = separations_nm(range)?;
    let window = TransparencyWindow::from_micrometers(min_um, max_um)?;
    let radius = radius_um / 1e6;
    let geometry = Geometry::new(radius, grid[0] / 1e9)?;
    let (base_json, model) = resolve_model(base)?;
    // Fail on unwindowable models before any integration.
    casimir::dielectric::apply_window(model.clone(), window)?;
    RunManifest::new(json!({
        "command": "ratio",
        "base": base_json,
        "window_lambda_min_um": min_um,
        "window_lambda_max_um": max_um,
        "radius_um": radius_um,
        "range": range_json(range),
        "quadrature": settings_json(&settings),
    }))
    .emit();
    warn_derjaguin(radius, grid[grid.len() - 1] / 1e9);

    let rows: Vec<_> = grid
        .par_iter()
        .map(|d| {
            geometry
                .with_separation(d / 1e9)
                .and_then(|geo| force_ratio_windowed(&model, window, geo, settings))
        })
        .collect();

    let mut out = open(g.output.as_deref())?;
    writeln!(out, "{RATIO_HEADER}")?;
    let mut unconverged = 0;
    for (d, row) in grid.iter().zip(rows) {
        match row {
            Ok(r) => writeln!(
                out,
                "{},{},{}",
                sig(*d, DIGITS),
                sig(r.ratio, DIGITS),
                sig(r.ratio_err, DIGITS)
            )?,
            Err(Error::Convergence { .. }) => {
                unconverged += 1;
                writeln!(out, "{},nan,nan", sig(*d, DIGITS))?;
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.flush()?;
    if unconverged > 0 {
        return Err(Failure {
            code: 3,
            message: format!("{unconverged} of {} rows did not converge", grid.len()),
        });
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn kk(
    g: &GlobalOptions,
    table: &Path,
    xi_min: f64,
    xi_max: f64,
    points: usize,
    low_tail: Option<LowTailArg>,
    high_tail_exponent: f64,
    high_tail_cutoff_factor: f64,
) -> Outcome {
    if !(xi_min > 0.0 && xi_min < xi_max && xi_max.is_finite()) {
        return Err(Failure::config(format!(
            "need 0 < xi-min < xi-max, got {xi_min} and {xi_max}"
        )));
    }
    if points < 2 {
        return Err(Failure::config(format!("need at least 2 points, got {points}")));
    }
    let low_tail = low_tail.map(|t| match t {
        LowTailArg::DrudeLike => LowTail::DrudeLike,
        LowTailArg::LinearToZero => LowTail::LinearToZero,
        LowTailArg::Zero => LowTail::Zero,
    });
    let high = HighTail::new(high_tail_exponent, high_tail_cutoff_factor)?;
    let sha = file_digest(table).map_err(|e| Failure::config(format!("cannot read table {}: {e}", table.display())))?;
    let abs = AbsorptionTable::load(table, low_tail, high)?;
    RunManifest::new(json!({
        "command": "kk",
        "table": { "path": table, "sha256": sha },
        "low_tail": abs.low_tail(),
        "high_tail_exponent": high.exponent(),
        "high_tail_cutoff_factor": high.cutoff_factor(),
        "xi_min": xi_min,
        "xi_max": xi_max,
        "points": points,
    }))
    .emit();

    let grid = log_space(xi_min, xi_max, points);
    let values: Vec<_> = grid
        .par_iter()
        .map(|xi| AngularFrequency::new(*xi).and_then(|w| eps_imag_axis_kk(&abs, w)))
        .collect::<casimir::Result<_>>()?;
    let mut out = open(g.output.as_deref())?;
    writeln!(out, "{KK_HEADER}")?;
    for (xi, eps) in grid.iter().zip(values) {
        writeln!(out, "{},{}", sig(*xi, DIGITS), sig(eps, DIGITS))?;
    }
    out.flush()?;
    Ok(())
}

fn calibrate_sim(g: &GlobalOptions, config_path: &Path) -> Outcome {
    let settings = settings(g)?;
    let mut config = SimulationConfig::load(config_path)?;
    if let Some(seed) = g.seed {
        config.plan.rng_seed = seed;
    }
    let emitted = if g.emit_scans {
        let paths = ["scans.csv", "parabolas.csv", "force_covariance.csv"].map(|s| sibling(g.output.as_deref(), s));
        for p in &paths {
            check_writable(p).map_err(Failure::config)?;
        }
        Some(paths)
    } else {
        None
    };

    let mut resolved = Vec::new();
    match &config.truth.force_curve {
        ForceCurveConfig::Lifshitz { model, plate_model } => {
            for spec in std::iter::once(model).chain(plate_model) {
                let (file, _) = spec.resolve()?;
                resolved.push(model_json(&serde_json::to_string(spec).unwrap_or_default(), &file)?);
            }
        }
        ForceCurveConfig::Table { path } => {
            let d =
                file_digest(path).map_err(|e| Failure::config(format!("cannot read table {}: {e}", path.display())))?;
            resolved.push(json!({ "path": path, "sha256": d }));
        }
    }
    let (truth, plan, options) = config.build(settings)?;
    RunManifest::new(json!({
        "command": "calibrate-sim",
        "config": config,
        "resolved": resolved,
        "quadrature": settings_json(&settings),
    }))
    .emit();

    match run_pipeline(&truth, &plan, options) {
        Ok(run) => {
            let mut out = open(g.output.as_deref())?;
            writeln!(out, "{}", CalibrationReport::from(&run.result).to_json())?;
            out.flush()?;
            if let Some([scans, parabolas, covariance]) = &emitted {
                write_intermediates(scans, parabolas, &run.records, &run.parabolas)?;
                write_force_covariance_csv(create(covariance)?, &run.result)?;
            }
            Ok(())
        }
        Err(failure) => {
            eprintln!("calibration failed: {failure}");
            let mut table = Vec::new();
            write_parabola_csv(&mut table, &failure.parabolas)?;
            eprint!("{}", String::from_utf8_lossy(&table));
            if let Some([scans, parabolas, _]) = &emitted {
                write_intermediates(scans, parabolas, &failure.records, &failure.parabolas)?;
                eprintln!("partial scan and parabola tables written");
            }
            Err(failure.error.into())
        }
    }
}

fn create(path: &PathBuf) -> Result<std::io::BufWriter<std::fs::File>, Failure> {
    let f =
        std::fs::File::create(path).map_err(|e| Failure::config(format!("cannot create {}: {e}", path.display())))?;
    Ok(std::io::BufWriter::new(f))
}

fn write_intermediates(
    scans: &PathBuf,
    parabolas: &PathBuf,
    records: &[LockInRecord],
    fits: &[ParabolaFit],
) -> Result<(), Failure> {
    let mut w = create(scans)?;
    write_scan_csv(&mut w, records)?;
    w.flush()?;
    let mut w = create(parabolas)?;
    write_parabola_csv(&mut w, fits)?;
    w.flush()?;
    Ok(())
}

fn presets(g: &GlobalOptions, name: Option<&str>) -> Outcome {
    RunManifest::new(json!({ "command": "presets", "name": name })).emit();
    let mut out = open(g.output.as_deref())?;
    match name {
        None => {
            for n in PRESET_NAMES {
                writeln!(out, "{n}")?;
            }
        }
        Some(n) => {
            let file = preset::builtin_file(n).ok_or_else(|| {
                Failure::config(format!("unknown preset `{n}` (available: {})", PRESET_NAMES.join(", ")))
            })?;
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&file).expect("model file serialises")
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config(String::new())), 2);
        assert_eq!(exit_code(&Error::Domain(String::new())), 2);
        assert_eq!(
            exit_code(&Error::Convergence {
                estimate: 0.0,
                est_error: 0.0,
                node_count: 0
            }),
            3
        );
        assert_eq!(exit_code(&Error::Fit(String::new())), 4);
        assert_eq!(exit_code(&Error::NonPhysical(String::new())), 4);
    }
}
