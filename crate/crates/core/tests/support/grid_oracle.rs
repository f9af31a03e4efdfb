//! Brute-force tensor-grid evaluation of the sphere–plate Lifshitz force,
//! written straight from the raw (ξ, p) integrand with squared reflection
//! factors. Shares no code with the adaptive engine beyond ε(iξ).

use casimir::constants::{HBAR, SPEED_OF_LIGHT};
use casimir::dielectric::{AngularFrequency, DielectricModel, Permittivity};
use std::f64::consts::PI;

/// (r_TE, r_TM) from the textbook formulas; ideal metals are the ε → ∞ limit.
fn factors(eps: Permittivity, p: f64) -> (f64, f64) {
    match eps {
        Permittivity::Infinite => (1.0, -1.0),
        Permittivity::Finite(e) => {
            let s = (e - 1.0 + p * p).sqrt();
            let te = (s - p) / (s + p);
            let tm = (s - p * e) / (s + p * e);
            (te, tm)
        }
    }
}

/// Trapezoid rule on `n × n` nodes, ξ = (c/2d)·T·a², p = 1 + (P(ξ) − 1)·b²,
/// with T = P·(2dξ/c) = `cutoff`.
pub fn tensor_grid_force(
    sphere: &DielectricModel,
    plate: &DielectricModel,
    radius: f64,
    d: f64,
    n: usize,
    cutoff: f64,
) -> f64 {
    let xi_scale = SPEED_OF_LIGHT / (2.0 * d);
    let h = 1.0 / (n - 1) as f64;
    let w = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { h };
    let mut total = 0.0;
    for i in 1..n {
        let a = i as f64 * h;
        let t = cutoff * a * a;
        let dt_da = 2.0 * cutoff * a;
        let xi = xi_scale * t;
        let xi_w = AngularFrequency::new(xi).unwrap();
        let e1 = sphere.evaluate(xi_w).unwrap();
        let e2 = plate.evaluate(xi_w).unwrap();
        let p_max = (cutoff / t).max(1.0 + 1e-9);
        let mut inner = 0.0;
        for j in 0..n {
            let b = j as f64 * h;
            let p = 1.0 + (p_max - 1.0) * b * b;
            let dp_db = 2.0 * (p_max - 1.0) * b;
            if dp_db == 0.0 {
                continue;
            }
            let (te1, tm1) = factors(e1, p);
            let (te2, tm2) = factors(e2, p);
            let ex = (-2.0 * p * d * xi / SPEED_OF_LIGHT).exp();
            let f = p * xi * xi * ((1.0 - te1 * te2 * ex).ln() + (1.0 - tm1 * tm2 * ex).ln());
            inner += w(j) * f * dp_db;
        }
        total += w(i) * inner * dt_da * xi_scale;
    }
    -HBAR * radius / (2.0 * PI * SPEED_OF_LIGHT * SPEED_OF_LIGHT) * total
}
