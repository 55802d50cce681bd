use serde::{Deserialize, Serialize};

use super::{g_global_min, in_i};
use crate::error::{Error, Result};
use crate::inequality::{general_slack_with_membership, ExponentPair, PiconePoint};

/// A point at which the general two-exponent inequality fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub p: f64,
    pub q: f64,
    /// Ratio `s = (|∇u|/u)(v/|∇v|)` at which `g(s;p) < 0`; 0 for the
    /// constant-`u` construction.
    pub s0: f64,
    /// Slope in `u = 1 - alpha x_1`.
    pub alpha: f64,
    pub point: PiconePoint,
    pub slack: f64,
}

/// Builds `u = 1 - alpha x_1`, `v = 1 + x_1` and evaluates the general
/// inequality at `x = 0`.
///
/// For `p > q+1`, `u` is constant (`alpha = 0`) and the violation comes from
/// the negative constant term `q-p+1`. Otherwise `p ∉ I(q)` is required and
/// `alpha` is the minimizer of `g(·;p)`, so the gradients are anti-aligned
/// with ratio exactly `s0`.
pub fn counterexample(p: f64, q: f64, dim: usize) -> Result<Counterexample> {
    let pq = ExponentPair::new(p, q)?;
    if dim == 0 {
        return Err(Error::DimensionMismatch(0, 0));
    }
    let member = in_i(p, q);
    let (s0, alpha) = if p > q + 1.0 {
        (0.0, 0.0)
    } else if !member {
        let (s, _) = g_global_min(p, q);
        (s, s)
    } else {
        return Err(Error::NotOutsideRegion { p, q });
    };
    let mut grad_u = vec![0.0; dim];
    let mut grad_v = vec![0.0; dim];
    grad_u[0] = -alpha;
    grad_v[0] = 1.0;
    let point = PiconePoint::new(1.0, 1.0, grad_u, grad_v)?;
    let report = general_slack_with_membership(&point, pq, member)?;
    Ok(Counterexample {
        p,
        q,
        s0,
        alpha,
        point,
        slack: report.slack,
    })
}
