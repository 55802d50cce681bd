//! Pointwise Picone-type inequalities.
//!
//! Every evaluator takes the pointwise data `(u, v, ∇u, ∇v)` and returns the
//! two sides of one inequality together with `slack = rhs - lhs`. Gradients of
//! the composite test functions `v^a / u^b` are expanded in closed form, so
//! nothing here differentiates numerically.

mod diaz_saa;
pub mod fuzz;
mod slack;

pub use diaz_saa::{diaz_saa_functional, DiazSaaOptions};
pub use slack::{
    bf_slack, bm_constant, bm_slacks, classic_slack, general_scalar_residual, general_slack,
    general_slack_with_membership, ilyas_slack, power_nonlinearity, radial_pair_slack, tirani_q_slack,
    tirani_slack, IlyasForm, TiraniVariant,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The exponents `(p, q)` of the two-operator inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: f64,
    pub q: f64,
}

impl ExponentPair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_exponent(p)?;
        check_exponent(q)?;
        Ok(Self { p, q })
    }

    /// `q < p`, the standing assumption for the (p,q)-Laplace problems.
    pub fn ordered(&self) -> bool {
        self.q < self.p
    }

    /// `p <= q + 1`.
    pub fn within_unit_gap(&self) -> bool {
        self.p <= self.q + 1.0
    }
}

pub(crate) fn check_exponent(r: f64) -> Result<()> {
    if r.is_finite() && r > 1.0 {
        Ok(())
    } else {
        Err(Error::BadExponent(r))
    }
}

/// Pointwise data at which an inequality is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiconePoint {
    pub u: f64,
    pub v: f64,
    pub grad_u: Vec<f64>,
    pub grad_v: Vec<f64>,
}

impl PiconePoint {
    /// Builds a point, checking that both gradients share a nonzero dimension.
    /// Sign requirements on `u` and `v` are inequality-specific and checked
    /// by the evaluators.
    pub fn new(u: f64, v: f64, grad_u: Vec<f64>, grad_v: Vec<f64>) -> Result<Self> {
        if grad_u.len() != grad_v.len() || grad_u.is_empty() {
            return Err(Error::DimensionMismatch(grad_u.len(), grad_v.len()));
        }
        Ok(Self { u, v, grad_u, grad_v })
    }

    pub fn dim(&self) -> usize {
        self.grad_u.len()
    }

    /// `∇u · ∇v`
    pub fn inner(&self) -> f64 {
        dot(&self.grad_u, &self.grad_v)
    }

    pub fn grad_u_norm(&self) -> f64 {
        norm(&self.grad_u)
    }

    pub fn grad_v_norm(&self) -> f64 {
        norm(&self.grad_v)
    }

    /// The point with `(u, v, ∇u, ∇v)` replaced by `(a u, b v, a ∇u, b ∇v)`.
    pub fn scaled(&self, a: f64, b: f64) -> Self {
        Self {
            u: a * self.u,
            v: b * self.v,
            grad_u: self.grad_u.iter().map(|x| a * x).collect(),
            grad_v: self.grad_v.iter().map(|x| b * x).collect(),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Both sides of one inequality at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlackReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; nonnegative whenever the inequality holds.
    pub slack: f64,
    /// Whether the hypotheses of the underlying theorem hold at this point.
    /// Slacks are evaluated regardless.
    pub hypothesis_met: bool,
    /// Scalar-form residual scaled back to the units of `slack`, where the
    /// inequality admits such a reduction.
    pub reduction_value: Option<f64>,
}

impl SlackReport {
    pub fn new(lhs: f64, rhs: f64, hypothesis_met: bool) -> Self {
        Self {
            lhs,
            rhs,
            slack: rhs - lhs,
            hypothesis_met,
            reduction_value: None,
        }
    }

    pub fn with_reduction(mut self, value: Option<f64>) -> Self {
        self.reduction_value = value;
        self
    }

    /// `true` when the slack is negative beyond rounding noise.
    pub fn violates(&self, tol: &Tolerance) -> bool {
        self.slack < -tol.threshold(self.lhs, self.rhs)
    }

    /// `slack / (|lhs| + |rhs|)`, or 0 when both sides vanish.
    pub fn relative_slack(&self) -> f64 {
        let scale = self.lhs.abs() + self.rhs.abs();
        if scale == 0.0 {
            0.0
        } else {
            self.slack / scale
        }
    }
}

/// Violation threshold `atol + rtol (|lhs| + |rhs|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            atol: 1e-12,
            rtol: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn threshold(&self, lhs: f64, rhs: f64) -> f64 {
        self.atol + self.rtol * (lhs.abs() + rhs.abs())
    }
}
