//! Composite quadrature on sampled data.

/// Composite Simpson rule on a uniform grid.
///
/// Falls back to Simpson on all but the last interval plus a trapezoid on
/// the last one when the number of intervals is odd.
pub fn simpson_uniform(h: f64, f: &[f64]) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * h * (f[0] + f[1]);
    }
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    let mut acc = f[0] + f[even];
    for (i, v) in f.iter().enumerate().take(even).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = acc * h / 3.0;
    if even < intervals {
        total += 0.5 * h * (f[even] + f[even + 1]);
    }
    total
}

/// Trapezoid rule on an arbitrary increasing grid.
pub fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1]))
        .sum()
}

/// Integrates sampled values over a grid, using Simpson when the grid is
/// uniform and the trapezoid rule otherwise.
pub fn integrate_samples(x: &[f64], f: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let h = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    let uniform = x
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    if uniform {
        simpson_uniform(h, f)
    } else {
        trapezoid(x, f)
    }
}
