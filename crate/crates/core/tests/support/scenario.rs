#![allow(dead_code)]

use std::sync::Arc;

use casimir::calibration::{ForceLaw, GroundTruth, IdealMetalPfa, ScanPlan};
use casimir::grid::lin_space;

pub const K: f64 = 1e9;
pub const D0: f64 = 500e-9;
pub const V0: f64 = 0.02;
pub const RADIUS: f64 = 100e-6;

pub fn truth_with(curve: Arc<dyn ForceLaw>) -> GroundTruth {
    GroundTruth::new(K, D0, V0, RADIUS, curve).unwrap()
}

pub fn ideal_truth() -> GroundTruth {
    truth_with(Arc::new(IdealMetalPfa::new(RADIUS)))
}

/// Separations from 400 nm down to 70 nm.
pub fn plan(n_dpz: usize, n_v: usize, noise_sigma: f64, rng_seed: u64) -> ScanPlan {
    ScanPlan {
        dpz_values: lin_space(D0 - 400e-9, D0 - 70e-9, n_dpz),
        vbias_values: lin_space(-0.3, 0.3, n_v),
        noise_sigma,
        rng_seed,
    }
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}
