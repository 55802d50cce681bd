//! Small numerical kernels shared by the solvers: root bracketing, scalar
//! minimization, quadrature and an embedded Runge-Kutta integrator.

pub mod ode;
pub mod quad;
pub mod roots;

/// `|t|^{r-2} t`, with the value at `t = 0` taken as 0 for every `r > 1`.
#[inline]
pub fn odd_pow(t: f64, r: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.abs().powf(r - 1.0).copysign(t)
    }
}

/// Inverse of [`odd_pow`]: the unique `t` with `|t|^{r-2} t = w`.
#[inline]
pub fn odd_pow_inv(w: f64, r: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        w.abs().powf(1.0 / (r - 1.0)).copysign(w)
    }
}

/// Surface measure of the unit sphere in R^N (2 for N = 1, the two endpoints).
pub fn sphere_measure(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        n => 2.0 * PI / (n as f64 - 2.0) * sphere_measure(n - 2),
    }
}
