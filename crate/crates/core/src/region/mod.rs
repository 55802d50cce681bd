//! The exponent set
//!
//! `I(q) = { p > 1 : g(s;p) >= 0 for all s >= 0 }`,
//! `g(s;p) = (q-1) s^p + q s^{p-1} - (p-q) s + (q-p+1)`,
//!
//! on which the general two-exponent Picone inequality holds without any
//! sign condition on `∇u·∇v`, together with its thresholds `p̃(q) = sup I(q)`
//! and `q̃` (below which `I(q)` has a gap inside `(q, 2)`).

mod counterexample;

pub use counterexample::{counterexample, Counterexample};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::roots::{bisect, bisect_predicate, golden_min};

/// Membership tolerance on the global minimum of `g`.
pub const MEMBERSHIP_ATOL: f64 = 1e-12;

/// Number of `p` samples used when scanning `(q, 2)` for non-members.
pub const GAP_SCAN_POINTS: usize = 2000;

fn check_s(s: f64) -> Result<()> {
    if s >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeS(s))
    }
}

/// `s^e` with the convention `0^e = 0` for `e > 0` and `0^0 = 1`.
fn spow(s: f64, e: f64) -> f64 {
    if s == 0.0 {
        if e == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        s.powf(e)
    }
}

fn g_raw(s: f64, p: f64, q: f64) -> f64 {
    (q - 1.0) * spow(s, p) + q * spow(s, p - 1.0) - (p - q) * s + (q - p + 1.0)
}

/// `g'(s;p)` for `s > 0`.
fn g_prime(s: f64, p: f64, q: f64) -> f64 {
    p * (q - 1.0) * s.powf(p - 1.0) + q * (p - 1.0) * s.powf(p - 2.0) - (p - q)
}

/// `g(s;p) = (q-1) s^p + q s^{p-1} - (p-q) s + (q-p+1)`.
pub fn g_eval(s: f64, p: f64, q: f64) -> Result<f64> {
    check_s(s)?;
    Ok(g_raw(s, p, q))
}

/// `f(s) = (q-1) s^p - q s^{p-1} + (p-q) s + (q-p+1)`, the aligned-gradient
/// counterpart of `g`; `f(1) = f'(1) = 0`.
pub fn f_eval(s: f64, p: f64, q: f64) -> Result<f64> {
    check_s(s)?;
    Ok((q - 1.0) * spow(s, p) - q * spow(s, p - 1.0) + (p - q) * s + (q - p + 1.0))
}

/// `f'(s)` for `s > 0`.
pub fn f_prime(s: f64, p: f64, q: f64) -> f64 {
    p * (q - 1.0) * s.powf(p - 1.0) - q * (p - 1.0) * s.powf(p - 2.0) + (p - q)
}

/// Smallest power of two (times `start`) at which `g' > 0`.
fn growth_horizon(start: f64, p: f64, q: f64) -> f64 {
    let mut s = start.max(1.0);
    while g_prime(s, p, q) <= 0.0 {
        s *= 2.0;
    }
    s
}

/// Root of `g'` on `[lo, hi]` where `g'(lo) < 0 < g'(hi)`.
fn critical_point(lo: f64, hi: f64, p: f64, q: f64) -> f64 {
    bisect(lo, hi, 1e-15 * hi, |s| if s == 0.0 { -(p - q) } else { g_prime(s, p, q) }).unwrap_or(lo)
}

/// Global minimum of `g(·;p)` over `s >= 0`, as `(s_argmin, g_min)`.
///
/// Uses the sign structure of `g''(s) = s^{p-3}[p(p-1)(q-1)s + q(p-1)(p-2)]`:
/// for `p >= 2`, `g` is convex on `s > 0`; for `p < 2`, `g` is concave up to
/// `s = q(2-p)/(p(q-1))` and convex beyond, with `g'(0+) = +∞`. Either way
/// the minimum is the boundary value `g(0)` or the unique critical point on
/// the convex branch.
pub fn g_global_min(p: f64, q: f64) -> (f64, f64) {
    let g0 = q - p + 1.0;
    if p >= 2.0 {
        // g'(0+) = -(p-q) for p > 2 and 2q - 2 > 0 for p = 2
        let slope0 = if p == 2.0 { 2.0 * q - 2.0 } else { -(p - q) };
        if slope0 >= 0.0 {
            return (0.0, g0);
        }
        let hi = growth_horizon(1.0, p, q);
        let s = critical_point(0.0, hi, p, q);
        let gs = g_raw(s, p, q);
        if gs < g0 {
            (s, gs)
        } else {
            (0.0, g0)
        }
    } else {
        let inflection = q * (2.0 - p) / (p * (q - 1.0));
        if g_prime(inflection, p, q) >= 0.0 {
            return (0.0, g0);
        }
        let hi = growth_horizon(2.0 * inflection, p, q);
        let s = critical_point(inflection, hi, p, q);
        let gs = g_raw(s, p, q);
        if gs < g0 {
            (s, gs)
        } else {
            (0.0, g0)
        }
    }
}

/// `p ∈ I(q)`, up to [`MEMBERSHIP_ATOL`] on the minimum of `g`.
pub fn in_i(p: f64, q: f64) -> bool {
    g_global_min(p, q).1 >= -MEMBERSHIP_ATOL
}

/// `p̃(q) = sup I(q)`, by bisection of the membership indicator on
/// `[2, q+1]` (`[2, p̃] ⊂ I(q)` and nothing above `p̃` belongs).
pub fn p_tilde(q: f64) -> f64 {
    bisect_predicate(2.0, q + 1.0, 1e-10, |p| in_i(p, q))
}

/// Smallest `g_min(p, q)` over `p ∈ (q, 2)`: a scan on
/// [`GAP_SCAN_POINTS`] points refined by golden-section search around the
/// best sample. Returns `(p, g_min)`.
fn lowest_in_band(q: f64) -> Option<(f64, f64)> {
    if q >= 2.0 {
        return None;
    }
    let step = (2.0 - q) / (GAP_SCAN_POINTS + 1) as f64;
    let samples: Vec<(f64, f64)> = (1..=GAP_SCAN_POINTS)
        .map(|i| {
            let p = q + step * i as f64;
            (p, g_global_min(p, q).1)
        })
        .collect();
    let (k, &(p_best, g_best)) = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
    let lo = if k == 0 { q + 0.5 * step } else { samples[k - 1].0 };
    let hi = if k + 1 == samples.len() { 2.0 - 0.5 * step } else { samples[k + 1].0 };
    let (p_ref, g_ref) = golden_min(lo, hi, 1e-12, |p| g_global_min(p, q).1);
    Some(if g_ref < g_best { (p_ref, g_ref) } else { (p_best, g_best) })
}

/// `true` iff some `p ∈ (q, 2)` lies outside `I(q)`.
pub fn has_gap(q: f64) -> bool {
    lowest_in_band(q).is_some_and(|(_, g)| g < -MEMBERSHIP_ATOL)
}

/// The threshold `q̃`: bisection of [`has_gap`] on `q ∈ [1.0001, 2]`, to
/// absolute tolerance `1e-7`.
pub fn q_tilde() -> f64 {
    // has_gap holds at the left end and fails at q = 2
    bisect_predicate(1.0001, 2.0, 1e-7, has_gap)
}

/// `I(q)` thresholds: `p̃(q)` and the non-membership interval inside `(q, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub q: f64,
    pub p_tilde: f64,
    pub gap: Option<(f64, f64)>,
}

/// The maximal interval of non-membership inside `(q, 2)` containing the
/// deepest violation, with endpoints bisected to `1e-9`. `None` when
/// `(q, 2) ⊂ I(q)`.
pub fn gap(q: f64) -> Option<(f64, f64)> {
    let (p_neg, g_neg) = lowest_in_band(q)?;
    if g_neg >= -MEMBERSHIP_ATOL {
        return None;
    }
    let step = (2.0 - q) / (GAP_SCAN_POINTS + 1) as f64;
    let mut left = p_neg;
    while left > q && !in_i(left, q) {
        left -= step;
    }
    let left = left.max(q);
    let mut right = p_neg;
    while right < 2.0 && !in_i(right, q) {
        right += step;
    }
    let right = right.min(2.0);
    let p_low = bisect_predicate(left, p_neg, 1e-10, |p| in_i(p, q));
    let p_high = bisect_predicate(right, p_neg, 1e-10, |p| in_i(p, q));
    Some((p_low, p_high))
}

/// Number of disjoint runs of non-members among the scan points of
/// `(q, 2)`; the complement of `I(q)` there is expected to be one interval.
pub fn gap_components(q: f64) -> usize {
    if q >= 2.0 {
        return 0;
    }
    let step = (2.0 - q) / (GAP_SCAN_POINTS + 1) as f64;
    let mut runs = 0;
    let mut inside = false;
    for i in 1..=GAP_SCAN_POINTS {
        let out = !in_i(q + step * i as f64, q);
        if out && !inside {
            runs += 1;
        }
        inside = out;
    }
    runs
}

pub fn gap_report(q: f64) -> GapReport {
    GapReport {
        q,
        p_tilde: p_tilde(q),
        gap: gap(q),
    }
}

/// Explicit sufficient condition for `p ∈ I(q)` when `1 < q < p <= 2`:
/// `p <= q + q^{p-1}(q-1)^{2-p}`. Returns `false` outside that range.
pub fn sufficient_i(p: f64, q: f64) -> bool {
    1.0 < q && q < p && p <= 2.0 && p <= q + q.powf(p - 1.0) * (q - 1.0).powf(2.0 - p)
}

/// Explicit sufficient condition for `p ∈ I(q)` when `2 <= p < q+1`:
/// `(q+1-p)^{p-2} q >= (p-q)^{p-1}`. Returns `false` outside that range.
pub fn sufficient_ii(p: f64, q: f64) -> bool {
    2.0 <= p && p < q + 1.0 && (q + 1.0 - p).powf(p - 2.0) * q >= (p - q).powf(p - 1.0)
}

/// One `(p, q)` cell of the region map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub p: f64,
    pub q: f64,
    pub g_min: f64,
    pub s_argmin: f64,
    #[serde(rename = "in_I")]
    pub in_i: bool,
    #[serde(rename = "suff_I")]
    pub suff_i: bool,
    #[serde(rename = "suff_II")]
    pub suff_ii: bool,
}

impl RegionSample {
    pub fn evaluate(p: f64, q: f64) -> Self {
        let (s_argmin, g_min) = g_global_min(p, q);
        Self {
            p,
            q,
            g_min,
            s_argmin,
            in_i: g_min >= -MEMBERSHIP_ATOL,
            suff_i: sufficient_i(p, q),
            suff_ii: sufficient_ii(p, q),
        }
    }
}

/// Half-open axis `(lo, hi]` sampled at `resolution` cell endpoints
/// `lo + (hi - lo)(i+1)/resolution`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
}

impl AxisRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn check(&self, name: &str) -> Result<()> {
        if !(self.lo >= 1.0 && self.hi <= 6.0 && self.lo < self.hi) {
            return Err(Error::BadRange(format!(
                "{name} range ({}, {}] must lie within (1, 6]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn points(&self, resolution: usize) -> Vec<f64> {
        (1..=resolution)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / resolution as f64)
            .collect()
    }
}

/// Evaluates [`RegionSample`] on a `resolution × resolution` grid, rows
/// ordered by `q` then `p`.
pub fn region_grid(p_range: AxisRange, q_range: AxisRange, resolution: usize) -> Result<Vec<RegionSample>> {
    p_range.check("p")?;
    q_range.check("q")?;
    if resolution < 2 {
        return Err(Error::BadRange(format!("resolution must be at least 2, got {resolution}")));
    }
    let ps = p_range.points(resolution);
    let qs = q_range.points(resolution);
    Ok(qs
        .par_iter()
        .flat_map_iter(|&q| ps.iter().map(move |&p| RegionSample::evaluate(p, q)))
        .collect())
}
