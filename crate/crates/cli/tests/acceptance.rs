//! Release acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

#[path = "../../core/tests/support/grid_oracle.rs"]
mod grid_oracle;
#[path = "../../core/tests/support/scenario.rs"]
mod scenario;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use casimir::calibration::{run_pipeline, PipelineOptions};
use casimir::dielectric::{
    eps_imag_axis_drude, eps_imag_axis_kk, AbsorptionTable, AngularFrequency, DielectricModel, DrudeParameters,
    HighTail, LowTail, TransparencyWindow,
};
use casimir::grid::log_space;
use casimir::lifshitz::{
    force_ratio_windowed, ideal_plate_pressure, ideal_sphere_plate_force, lifshitz_sphere_plate, ForceQuery, Geometry,
    QuadratureSettings,
};

const R: f64 = 100e-6;

/// Gold-Drude force ratios at 20 log-spaced separations from 70 to 400 nm,
/// windows 0.2–2.5 µm and 1–200 µm. Cross-checked at both ends against an
/// independent nested-quadrature evaluation with the closed-form windowed
/// Drude permittivity.
const GOLDEN_RATIOS: [(f64, f64, f64); 20] = [
    (70.0, 0.992717725, 0.50380283),
    (76.7252201, 0.993179855, 0.512222176),
    (84.0965628, 0.993639961, 0.521130982),
    (92.176104, 0.994095379, 0.530559286),
    (101.031884, 0.994543383, 0.540531099),
    (110.738479, 0.994981268, 0.551062968),
    (121.377631, 0.995406432, 0.562162737),
    (133.038935, 0.995816451, 0.573828543),
    (145.820594, 0.996209144, 0.586048123),
    (159.830245, 0.996582628, 0.598798457),
    (175.185867, 0.996935357, 0.612045766),
    (192.016774, 0.997266148, 0.6257459),
    (210.464704, 0.997574188, 0.639845079),
    (230.68501, 0.997859036, 0.654280984),
    (252.847974, 0.998120598, 0.668984139),
    (277.140235, 0.998359112, 0.683879539),
    (303.766364, 0.998575105, 0.698888433),
    (332.950588, 0.998769361, 0.713930205),
    (364.938673, 0.998942872, 0.728924252),
    (400.0, 0.999096804, 0.743791788),
];

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn ideal_metal_lifshitz() -> Outcome {
    let m = DielectricModel::IdealMetal;
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for d in [70e-9, 100e-9, 200e-9, 400e-9] {
        let q = ForceQuery::new(
            Geometry::new(R, d).unwrap(),
            m.clone(),
            m.clone(),
            QuadratureSettings::default(),
        );
        let (r, t) = timed(|| lifshitz_sphere_plate(&q).unwrap());
        worst = worst.max(rel(r.force, ideal_sphere_plate_force(R, d)));
        slowest = slowest.max(t);
    }
    outcome(
        worst <= 5e-3 && slowest < Duration::from_secs(10),
        format!("worst rel dev {worst:.2e}, slowest point {slowest:.2?}"),
    )
}

fn plate_pressure() -> Outcome {
    let p = ideal_plate_pressure(100e-9).unwrap();
    outcome((p - 13.0).abs() <= 0.1, format!("P(100 nm) = {p:.4} N/m²"))
}

fn kk_drude() -> Outcome {
    let params = DrudeParameters::gold();
    let table = AbsorptionTable::sample_fn(
        |w| params.absorption(w),
        1e11,
        1e19,
        2000,
        Some(LowTail::DrudeLike),
        HighTail::default(),
    )
    .unwrap();
    let grid = log_space(1e13, 1e17, 100);
    let (worst, t) = timed(|| {
        grid.iter()
            .map(|&xi| {
                let w = AngularFrequency::new(xi).unwrap();
                rel(
                    eps_imag_axis_kk(&table, w).unwrap(),
                    eps_imag_axis_drude(&params, w).unwrap(),
                )
            })
            .fold(0.0, f64::max)
    });
    outcome(
        worst <= 1e-3 && t < Duration::from_secs(5),
        format!("worst rel dev {worst:.2e} over 100 ξ in {t:.2?}"),
    )
}

fn window_ordering() -> Outcome {
    let gold = DielectricModel::gold_drude();
    let narrow = TransparencyWindow::from_micrometers(0.2, 2.5).unwrap();
    let wide = TransparencyWindow::from_micrometers(1.0, 200.0).unwrap();
    let settings = QuadratureSettings::default();
    let mut ok = true;
    let mut worst_golden: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for (d_nm, gold_n, gold_w) in GOLDEN_RATIOS {
        let geo = Geometry::new(R, d_nm / 1e9).unwrap();
        let n = force_ratio_windowed(&gold, narrow, geo, settings).unwrap().ratio;
        let w = force_ratio_windowed(&gold, wide, geo, settings).unwrap().ratio;
        ok &= n > w && n > 0.8 && n < 1.0 && w > 0.0 && w < 1.0;
        min_gap = min_gap.min(n - w);
        worst_golden = worst_golden.max((n - gold_n).abs()).max((w - gold_w).abs());
    }
    outcome(
        ok && worst_golden <= 1e-6,
        format!("narrow > wide at 20 separations (min gap {min_gap:.3}), golden dev {worst_golden:.1e}"),
    )
}

fn calibration_round_trip() -> Outcome {
    let truth = scenario::ideal_truth();
    let plan = scenario::plan(10, 11, 0.0, 0);
    let (out, t) = timed(|| run_pipeline(&truth, &plan, PipelineOptions::default()).unwrap());
    let r = &out.result;
    let mut worst = rel(r.k.value, scenario::K)
        .max(rel(r.d0.value, scenario::D0))
        .max(rel(r.v0.value, scenario::V0));
    for p in &r.casimir_points {
        worst = worst.max(rel(p.force, truth.force_curve.casimir_force(p.separation).unwrap()));
    }
    outcome(
        worst <= 1e-6 && t < Duration::from_secs(5),
        format!("worst rel dev {worst:.2e} on a 10×11 grid in {t:.2?}"),
    )
}

fn coverage() -> Outcome {
    let truth = scenario::ideal_truth();
    let ((inside, total), t) = timed(|| {
        let (mut inside, mut total) = (0usize, 0usize);
        for seed in 0..200 {
            let out = run_pipeline(&truth, &scenario::plan(10, 15, 2e-3, seed), PipelineOptions::default()).unwrap();
            for p in &out.result.casimir_points {
                let exact = truth.force_curve.casimir_force(scenario::D0 - p.d_pz).unwrap();
                inside += usize::from((p.force - exact).abs() <= p.sigma_force);
                total += 1;
            }
        }
        (inside, total)
    });
    let c = inside as f64 / total as f64;
    outcome(
        (c - 0.68).abs() <= 0.07 && t < Duration::from_secs(120),
        format!("{inside}/{total} = {:.1}% inside ±1σ_F in {t:.2?}", 100.0 * c),
    )
}

fn adaptive_vs_grid() -> Outcome {
    let gold = DielectricModel::gold_drude();
    let q = ForceQuery::new(
        Geometry::new(R, 100e-9).unwrap(),
        gold.clone(),
        gold.clone(),
        QuadratureSettings::default(),
    );
    let adaptive = lifshitz_sphere_plate(&q).unwrap().force;
    let brute = grid_oracle::tensor_grid_force(&gold, &gold, R, 100e-9, 400, 40.0);
    let dev = rel(adaptive, brute);
    outcome(
        dev <= 1e-2,
        format!("adaptive {adaptive:.6e} N vs 400×400 grid {brute:.6e} N, rel dev {dev:.2e}"),
    )
}

fn cli_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("casimir-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let table = dir.join("drude.csv");
    let p = DrudeParameters::gold();
    AbsorptionTable::sample_fn(|w| p.absorption(w), 1e11, 1e19, 500, None, HighTail::default())
        .unwrap()
        .write_csv(std::fs::File::create(&table).unwrap())
        .unwrap();
    let config = format!("{}/configs/ideal_metal_noiseless.json", env!("CARGO_MANIFEST_DIR"));
    let table = table.to_string_lossy().into_owned();
    let runs: [&[&str]; 4] = [
        &[
            "sweep",
            "--sphere",
            "gold_drude",
            "--plate",
            "ideal_metal",
            "--radius-um",
            "100",
            "--d-min-nm",
            "70",
            "--d-max-nm",
            "400",
            "--points",
            "12",
        ],
        &[
            "ratio",
            "--base",
            "gold_drude",
            "--window-min-um",
            "0.2",
            "--window-max-um",
            "2.5",
            "--radius-um",
            "100",
            "--d-min-nm",
            "70",
            "--d-max-nm",
            "400",
            "--points",
            "6",
        ],
        &[
            "kk", "--table", &table, "--xi-min", "1e12", "--xi-max", "1e17", "--points", "30",
        ],
        &["calibrate-sim", "--config", &config, "--seed", "7"],
    ];
    let mut identical = 0;
    for args in runs {
        let once = || Command::new(env!("CARGO_BIN_EXE_casimir")).args(args).output().unwrap();
        let (a, b) = (once(), once());
        if a.status.success() && b.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout {
            identical += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        identical == runs.len(),
        format!("{identical}/{} subcommands byte-identical across reruns", runs.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        (
            "ideal-metal Lifshitz force matches closed form within 0.5%",
            ideal_metal_lifshitz,
        ),
        ("ideal plate pressure at 100 nm is 13.0 N/m²", plate_pressure),
        (
            "Kramers–Kronig of a Drude table matches the analytic ε(iξ) within 0.1%",
            kk_drude,
        ),
        ("0.2–2.5 µm window ratio exceeds 1–200 µm window ratio", window_ordering),
        ("noiseless calibration round trip to 1e-6", calibration_round_trip),
        ("±1σ_F coverage is 68% ± 7% over 200 seeds", coverage),
        (
            "adaptive quadrature agrees with a 400×400 grid within 1%",
            adaptive_vs_grid,
        ),
        ("CLI data output is deterministic", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "criterion {}: {} - {name} ({})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
