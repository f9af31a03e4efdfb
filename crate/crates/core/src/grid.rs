//! Sample grids.

/// `n` points from `a` to `b` inclusive, evenly spaced.
pub fn lin_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `n` points from `a` to `b` inclusive, evenly spaced in log. Both ends > 0.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = lin_space(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect();
    // Pin the endpoints exactly.
    if let Some(first) = v.first_mut() {
        *first = a;
    }
    if n > 1 {
        v[n - 1] = b;
    }
    v
}
