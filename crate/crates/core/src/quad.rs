//! Small quadrature helpers shared by several modules.

/// Composite Simpson over uniformly spaced samples (`values.len()` odd).
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "composite Simpson needs an odd number (>= 3) of samples");
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Simpson rule on `[a, b]` given endpoint and midpoint values.
#[inline]
pub fn simpson_panel(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) * (fa + 4.0 * fm + fb) / 6.0
}

/// Three-point rule exact for quadratics on a non-uniform panel `x0 < x1 < x2`.
pub fn simpson_nonuniform(x: [f64; 3], f: [f64; 3]) -> f64 {
    let h0 = x[1] - x[0];
    let h1 = x[2] - x[1];
    let hs = h0 + h1;
    hs / 6.0
        * (f[0] * (2.0 - h1 / h0) + f[1] * hs * hs / (h0 * h1) + f[2] * (2.0 - h0 / h1))
}

/// Two-point Gauss-Legendre abscissae on `[0, 1]`.
pub const GAUSS2: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];
