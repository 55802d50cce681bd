use super::{check_exponent, dot, ExponentPair, PiconePoint, SlackReport};
use crate::error::{Error, Result};
use crate::region;

/// `|a|^{r-2} a · b`, taken as 0 when `a = 0`.
fn flux_dot(a: &[f64], b: &[f64], r: f64) -> f64 {
    let na = super::norm(a);
    if na == 0.0 {
        0.0
    } else {
        na.powf(r - 2.0) * dot(a, b)
    }
}

fn require_u(pt: &PiconePoint) -> Result<()> {
    if pt.u > 0.0 && pt.u.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveU(pt.u))
    }
}

fn require_v_nonneg(pt: &PiconePoint) -> Result<()> {
    if pt.v >= 0.0 && pt.v.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeV(pt.v))
    }
}

fn require_v_pos(pt: &PiconePoint) -> Result<()> {
    if pt.v > 0.0 && pt.v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveV(pt.v))
    }
}

/// `|∇u|^{op-2} ∇u · ∇(v^pow / u^{pow-1})`
fn two_exp_lhs(pt: &PiconePoint, op: f64, pow: f64) -> f64 {
    let t = pt.v / pt.u;
    let na = pt.grad_u_norm();
    pow * t.powf(pow - 1.0) * flux_dot(&pt.grad_u, &pt.grad_v, op) - (pow - 1.0) * t.powf(pow) * na.powf(op)
}

/// `|∇v|^{op-2} ∇v · ∇(v^{pow-op+1} / u^{pow-op})`
fn two_exp_rhs(pt: &PiconePoint, op: f64, pow: f64) -> f64 {
    let t = pt.v / pt.u;
    let nb = pt.grad_v_norm();
    (pow - op + 1.0) * t.powf(pow - op) * nb.powf(op)
        + (op - pow) * t.powf(pow - op + 1.0) * flux_dot(&pt.grad_v, &pt.grad_u, op)
}

/// Classic Picone inequality `|∇u|^{p-2}∇u·∇(v^p/u^{p-1}) <= |∇v|^p`.
///
/// For `p = 2` the report carries `|∇v - (v/u)∇u|^2` as its reduction
/// value, which equals the slack identically.
pub fn classic_slack(pt: &PiconePoint, p: f64) -> Result<SlackReport> {
    require_u(pt)?;
    require_v_nonneg(pt)?;
    check_exponent(p)?;
    let lhs = two_exp_lhs(pt, p, p);
    let rhs = pt.grad_v_norm().powf(p);
    let reduction = (p == 2.0).then(|| {
        let t = pt.v / pt.u;
        pt.grad_v
            .iter()
            .zip(&pt.grad_u)
            .map(|(b, a)| {
                let d = b - t * a;
                d * d
            })
            .sum::<f64>()
    });
    Ok(SlackReport::new(lhs, rhs, true).with_reduction(reduction))
}

/// Two-exponent inequality with a convex-combination right-hand side,
/// valid for `q <= p`:
/// `|∇u|^{p-2}∇u·∇(v^q/u^{q-1}) <= (q/p)|∇v|^p + ((p-q)/p)|∇u|^p`.
pub fn bf_slack(pt: &PiconePoint, pq: ExponentPair) -> Result<SlackReport> {
    let ExponentPair { p, q } = pq;
    if q > p {
        return Err(Error::ExponentOrder(format!("requires q <= p, got p={p}, q={q}")));
    }
    require_u(pt)?;
    require_v_nonneg(pt)?;
    let lhs = two_exp_lhs(pt, p, q);
    let rhs = q / p * pt.grad_v_norm().powf(p) + (p - q) / p * pt.grad_u_norm().powf(p);
    Ok(SlackReport::new(lhs, rhs, true))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlyasForm {
    /// `p <= q`, operator exponent `p`, power `q`.
    Original,
    /// `q <= p`, the same inequality with the roles of `p` and `q` swapped.
    Rewritten,
}

/// `|∇u|^{p-2}∇u·∇(v^q/u^{q-1}) <= |∇v|^{p-2}∇v·∇(v^{q-p+1}/u^{q-p})` for
/// `p <= q` (original form), or its role-swapped version for `q <= p`.
pub fn ilyas_slack(pt: &PiconePoint, pq: ExponentPair, form: IlyasForm) -> Result<SlackReport> {
    let ExponentPair { p, q } = pq;
    let (op, pow) = match form {
        IlyasForm::Original if p <= q => (p, q),
        IlyasForm::Rewritten if q <= p => (q, p),
        IlyasForm::Original => {
            return Err(Error::ExponentOrder(format!("original form requires p <= q, got p={p}, q={q}")))
        }
        IlyasForm::Rewritten => {
            return Err(Error::ExponentOrder(format!("rewritten form requires q <= p, got p={p}, q={q}")))
        }
    };
    require_u(pt)?;
    if pow < op {
        require_v_pos(pt)?;
    } else {
        require_v_nonneg(pt)?;
    }
    Ok(SlackReport::new(two_exp_lhs(pt, op, pow), two_exp_rhs(pt, op, pow), true))
}

/// Residual of the scalar form of the general two-exponent inequality,
/// obtained by dividing both sides by `v^q u^{p-q}`:
///
/// `(q-1)(|∇u|/u)^p + (q-p+1)(|∇v|/v)^p - (∇u·∇v/(uv)) (q(|∇u|/u)^{p-2} - (p-q)(|∇v|/v)^{p-2})`.
///
/// Requires both gradients to be nonzero.
pub fn general_scalar_residual(pt: &PiconePoint, pq: ExponentPair) -> Option<f64> {
    let ExponentPair { p, q } = pq;
    let na = pt.grad_u_norm();
    let nb = pt.grad_v_norm();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let x = na / pt.u;
    let y = nb / pt.v;
    let cross = pt.inner() / (pt.u * pt.v);
    Some((q - 1.0) * x.powf(p) + (q - p + 1.0) * y.powf(p) - cross * (q * x.powf(p - 2.0) - (p - q) * y.powf(p - 2.0)))
}

/// The generalized two-exponent inequality
/// `|∇u|^{p-2}∇u·∇(v^q/u^{q-1}) <= |∇v|^{p-2}∇v·∇(v^{q-p+1}/u^{q-p})`.
///
/// `hypothesis_met` is `p ∈ I(q)` or (`p <= q+1` and `∇u·∇v >= 0`). The
/// reduction value is the scalar-form residual multiplied by `v^q u^{p-q}`.
pub fn general_slack(pt: &PiconePoint, pq: ExponentPair) -> Result<SlackReport> {
    let member = region::in_i(pq.p, pq.q);
    general_slack_with_membership(pt, pq, member)
}

/// [`general_slack`] with the `p ∈ I(q)` verdict supplied by the caller, for
/// loops over many points at fixed exponents.
pub fn general_slack_with_membership(pt: &PiconePoint, pq: ExponentPair, member: bool) -> Result<SlackReport> {
    require_u(pt)?;
    require_v_pos(pt)?;
    let ExponentPair { p, q } = pq;
    let lhs = two_exp_lhs(pt, p, q);
    let rhs = two_exp_rhs(pt, p, q);
    let hyp = member || (p <= q + 1.0 && pt.inner() >= 0.0);
    let reduction = general_scalar_residual(pt, pq).map(|r| r * pt.v.powf(q) * pt.u.powf(p - q));
    Ok(SlackReport::new(lhs, rhs, hyp).with_reduction(reduction))
}

/// Single-exponent pair inequality for `∇u·∇v >= 0`, comparing
/// `L = |∇u|^{p-2}∇u·∇v` with `R = |∇v|^{p-2}∇v·∇(u^{p-1}v^{2-p})`.
///
/// `L <= R` for `p <= 2` and `L >= R` for `p >= 2`; the report orients the
/// sides so that `slack >= 0` in both regimes.
pub fn radial_pair_slack(pt: &PiconePoint, p: f64) -> Result<SlackReport> {
    require_u(pt)?;
    require_v_pos(pt)?;
    check_exponent(p)?;
    let inner = pt.inner();
    if inner < 0.0 {
        return Err(Error::NegativeInnerProduct(inner));
    }
    let l = flux_dot(&pt.grad_u, &pt.grad_v, p);
    let r = (p - 1.0) * (pt.v / pt.u).powf(2.0 - p) * flux_dot(&pt.grad_v, &pt.grad_u, p)
        + (2.0 - p) * (pt.u / pt.v).powf(p - 1.0) * pt.grad_v_norm().powf(p);
    Ok(if p <= 2.0 {
        SlackReport::new(l, r, true)
    } else {
        SlackReport::new(r, l, true)
    })
}

/// `(f(u), f'(u))` for the power instance `f(s) = s^{p-1}`.
pub fn power_nonlinearity(u: f64, p: f64) -> (f64, f64) {
    (u.powf(p - 1.0), (p - 1.0) * u.powf(p - 2.0))
}

/// `|∇u|^{op-2}∇u·∇(v^pow/f(u))` with the gradient expanded through `f'`.
fn f_quotient_lhs(pt: &PiconePoint, op: f64, pow: f64, f: f64, fd: f64) -> f64 {
    let na = pt.grad_u_norm();
    pow * pt.v.powf(pow - 1.0) / f * flux_dot(&pt.grad_u, &pt.grad_v, op) - pt.v.powf(pow) * fd / (f * f) * na.powf(op)
}

fn require_f(f: f64, fd: f64) -> Result<()> {
    if f > 0.0 && fd > 0.0 && f.is_finite() && fd.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveF(f, fd))
    }
}

/// `|∇u|^{p-2}∇u·∇(v^p/f(u)) <= (p-1)^{p-1} f(u)^{p-2}/f'(u)^{p-1} |∇v|^p`
/// for increasing positive `f`; the caller supplies `f(u)` and `f'(u)`.
pub fn tirani_slack(pt: &PiconePoint, p: f64, f_val: f64, f_deriv: f64) -> Result<SlackReport> {
    require_u(pt)?;
    require_v_nonneg(pt)?;
    check_exponent(p)?;
    require_f(f_val, f_deriv)?;
    let lhs = f_quotient_lhs(pt, p, p, f_val, f_deriv);
    let rhs = (p - 1.0).powf(p - 1.0) * f_val.powf(p - 2.0) / f_deriv.powf(p - 1.0) * pt.grad_v_norm().powf(p);
    Ok(SlackReport::new(lhs, rhs, true))
}

/// Variants of the q-operator inequality with test function `v^p / f(u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TiraniVariant {
    /// General increasing `f`, values supplied at `u`; right-hand side
    /// `(q-1)^{q-1} f^{q-2}/f'^{q-1} |∇(v^{p/q})|^q`.
    General { f_val: f64, f_deriv: f64 },
    /// `f(s) = s^{p-1}`; right-hand side
    /// `((q-1)/(p-1))^{q-1} (p/q)^q (v/u)^{p-q} |∇v|^q`.
    Power,
    /// Young's inequality applied to [`TiraniVariant::Power`] (needs `q < p`):
    /// `((q-1)/(p-1))^{q-1} (p/q)^q ((p-q)/p (v/u)^p + q/p |∇v|^p)`.
    Young,
}

pub fn tirani_q_slack(pt: &PiconePoint, pq: ExponentPair, variant: TiraniVariant) -> Result<SlackReport> {
    let ExponentPair { p, q } = pq;
    require_u(pt)?;
    if matches!(variant, TiraniVariant::Young) && q >= p {
        return Err(Error::ExponentOrder(format!("Young form requires q < p, got p={p}, q={q}")));
    }
    if q <= p {
        require_v_nonneg(pt)?;
    } else {
        require_v_pos(pt)?;
    }
    let nb = pt.grad_v_norm();
    let t = pt.v / pt.u;
    let power_coeff = ((q - 1.0) / (p - 1.0)).powf(q - 1.0) * (p / q).powf(q);
    let (lhs, rhs) = match variant {
        TiraniVariant::General { f_val, f_deriv } => {
            require_f(f_val, f_deriv)?;
            let lhs = f_quotient_lhs(pt, q, p, f_val, f_deriv);
            // |∇(v^{p/q})|^q = (p/q)^q v^{p-q} |∇v|^q
            let grad_pow = (p / q).powf(q) * pt.v.powf(p - q) * nb.powf(q);
            let rhs = (q - 1.0).powf(q - 1.0) * f_val.powf(q - 2.0) / f_deriv.powf(q - 1.0) * grad_pow;
            (lhs, rhs)
        }
        TiraniVariant::Power => (two_exp_lhs(pt, q, p), power_coeff * t.powf(p - q) * nb.powf(q)),
        TiraniVariant::Young => (
            two_exp_lhs(pt, q, p),
            power_coeff * ((p - q) / p * t.powf(p) + q / p * nb.powf(p)),
        ),
    };
    Ok(SlackReport::new(lhs, rhs, true))
}

/// The constant `C` of the two-coefficient inequality: 1 for `p <= q+1`,
/// `(q-1)^{p-2}(p-q)/(p-2)^{p-2}` otherwise.
pub fn bm_constant(pq: ExponentPair) -> f64 {
    let ExponentPair { p, q } = pq;
    if p <= q + 1.0 {
        1.0
    } else {
        (q - 1.0).powf(p - 2.0) * (p - q) / (p - 2.0).powf(p - 2.0)
    }
}

/// Both inequalities with the test function `v^p / (α u^{p-1} + β u^{q-1})`:
/// the p-operator one against `|∇v|^p / (α C)` and the q-operator one
/// against `|∇(v^{p/q})|^q / β`.
pub fn bm_slacks(pt: &PiconePoint, pq: ExponentPair, alpha: f64, beta: f64) -> Result<(SlackReport, SlackReport)> {
    let ExponentPair { p, q } = pq;
    if q >= p {
        return Err(Error::ExponentOrder(format!("requires q < p, got p={p}, q={q}")));
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::NonPositiveCoefficient(alpha, beta));
    }
    require_u(pt)?;
    require_v_nonneg(pt)?;
    let u = pt.u;
    let denom = alpha * u.powf(p - 1.0) + beta * u.powf(q - 1.0);
    let denom_d = alpha * (p - 1.0) * u.powf(p - 2.0) + beta * (q - 1.0) * u.powf(q - 2.0);
    let nb = pt.grad_v_norm();
    let c = bm_constant(pq);
    let first = SlackReport::new(
        f_quotient_lhs(pt, p, p, denom, denom_d),
        nb.powf(p) / (alpha * c),
        true,
    );
    let second = SlackReport::new(
        f_quotient_lhs(pt, q, p, denom, denom_d),
        (p / q).powf(q) * pt.v.powf(p - q) * nb.powf(q) / beta,
        true,
    );
    Ok((first, second))
}
