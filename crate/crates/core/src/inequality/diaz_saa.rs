use super::ExponentPair;
use crate::error::{Error, Result};
use crate::numeric::odd_pow;
use crate::spectrum::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiazSaaOptions {
    /// Interior values at or below this floor are treated as unbounded ratios.
    pub ratio_floor: f64,
}

impl Default for DiazSaaOptions {
    fn default() -> Self {
        Self { ratio_floor: 0.0 }
    }
}

/// Weak-form value
///
/// `∫ A(∇w1)·∇[(w1^h - w2^h)/w1^{h-1}] - ∫ A(∇w2)·∇[(w1^h - w2^h)/w2^{h-1}]`
///
/// with `A(ξ) = |ξ|^{p-2}ξ + μ|ξ|^{q-2}ξ`, for radial profiles on a shared grid.
///
/// Both test-function gradients are expanded through `ρ = w2/w1`. On the
/// boundary node, where both profiles vanish, `ρ` is taken as the ratio of
/// the radial derivatives.
pub fn diaz_saa_functional(
    w1: &RadialProfile,
    w2: &RadialProfile,
    pq: ExponentPair,
    mu: f64,
    homogeneity: f64,
) -> Result<f64> {
    diaz_saa_functional_with(w1, w2, pq, mu, homogeneity, &DiazSaaOptions::default())
}

pub fn diaz_saa_functional_with(
    w1: &RadialProfile,
    w2: &RadialProfile,
    pq: ExponentPair,
    mu: f64,
    homogeneity: f64,
    opts: &DiazSaaOptions,
) -> Result<f64> {
    let ExponentPair { p, q } = ExponentPair::new(pq.p, pq.q)?;
    super::check_exponent(homogeneity)?;
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::BadRange(format!("mu must be nonnegative, got {mu}")));
    }
    if !w1.same_grid(w2) {
        return Err(Error::GridMismatch);
    }
    let n = w1.grid.len();
    for w in [w1, w2] {
        let interior_min = w.values[..n - 1].iter().copied().fold(f64::INFINITY, f64::min);
        if !(interior_min > opts.ratio_floor) {
            return Err(Error::UnboundedRatio(interior_min));
        }
    }

    let h = homogeneity;
    let flux = |t: f64| odd_pow(t, p) + mu * odd_pow(t, q);
    let mut i = 0;
    let value = w1.integrate(|_, a, da| {
        let (b, db) = (w2.values[i], w2.derivs[i]);
        i += 1;
        let rho = if a > 0.0 && b > 0.0 {
            b / a
        } else if da != 0.0 {
            db / da
        } else {
            1.0
        };
        let phi1 = da - h * rho.powf(h - 1.0) * db - (1.0 - h) * rho.powf(h) * da;
        let phi2 = h * rho.powf(1.0 - h) * da + (1.0 - h) * rho.powf(-h) * db - db;
        flux(da) * phi1 - flux(db) * phi2
    });
    Ok(value)
}
