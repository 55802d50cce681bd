//! Seeded random search for violations of the pointwise inequalities.
//!
//! Samples are drawn in blocks; block `k` uses the ChaCha stream `k` of the
//! run seed, so the outcome does not depend on how blocks are scheduled
//! across threads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    bf_slack, bm_slacks, classic_slack, general_slack_with_membership, ilyas_slack, power_nonlinearity,
    radial_pair_slack, tirani_q_slack, tirani_slack, ExponentPair, IlyasForm, PiconePoint, SlackReport, Tolerance,
    TiraniVariant,
};
use crate::error::{Error, Result};
use crate::region::in_i;

const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    Classic,
    Bf,
    Ilyas,
    General,
    RadialPair,
    Tirani,
    /// q-operator form with `f(s) = s^{p-1} + s`.
    TiraniQ,
    TiraniQPower,
    TiraniQYoung,
    Bm,
}

impl InequalityKind {
    pub const ALL: [InequalityKind; 10] = [
        Self::Classic,
        Self::Bf,
        Self::Ilyas,
        Self::General,
        Self::RadialPair,
        Self::Tirani,
        Self::TiraniQ,
        Self::TiraniQPower,
        Self::TiraniQYoung,
        Self::Bm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Classic => "classic",
            Self::Bf => "bf",
            Self::Ilyas => "ilyas",
            Self::General => "general",
            Self::RadialPair => "radial-pair",
            Self::Tirani => "tirani",
            Self::TiraniQ => "tirani-q",
            Self::TiraniQPower => "tirani-q-power",
            Self::TiraniQYoung => "tirani-q-young",
            Self::Bm => "bm",
        }
    }

    /// Whether the inequality involves the second exponent `q`.
    pub fn uses_q(self) -> bool {
        !matches!(self, Self::Classic | Self::RadialPair | Self::Tirani)
    }
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::BadRange(format!("unknown inequality {s:?}")))
    }
}

/// Relative orientation of the sampled gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Aligned,
    Anti,
    Random,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Aligned => "aligned",
            Self::Anti => "anti",
            Self::Random => "random",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aligned" => Ok(Self::Aligned),
            "anti" | "anti-aligned" => Ok(Self::Anti),
            "random" => Ok(Self::Random),
            _ => Err(Error::BadRange(format!("unknown regime {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub inequality: InequalityKind,
    pub pq: ExponentPair,
    pub samples: usize,
    pub dim: usize,
    pub regime: Regime,
    /// Log-uniform range of `u` and `v`.
    pub value_range: (f64, f64),
    /// Log-uniform range of `|∇u|` and `|∇v|`.
    pub grad_range: (f64, f64),
    pub tol: Tolerance,
}

impl SamplerConfig {
    pub fn new(inequality: InequalityKind, pq: ExponentPair, samples: usize) -> Self {
        Self {
            inequality,
            pq,
            samples,
            dim: 2,
            regime: Regime::Random,
            value_range: (1e-3, 1e3),
            grad_range: (1e-3, 1e3),
            tol: Tolerance::default(),
        }
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = regime;
        self
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    /// Rejects configurations for which the selected inequality is undefined.
    pub fn validate(&self) -> Result<()> {
        let ExponentPair { p, q } = ExponentPair::new(self.pq.p, self.pq.q)?;
        if self.dim == 0 {
            return Err(Error::DimensionMismatch(0, 0));
        }
        for (name, (lo, hi)) in [("value", self.value_range), ("gradient", self.grad_range)] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::BadRange(format!("{name} range [{lo}, {hi}] must be positive and ordered")));
            }
        }
        let needs_order = match self.inequality {
            InequalityKind::Bf => q > p,
            InequalityKind::TiraniQYoung | InequalityKind::Bm => q >= p,
            _ => false,
        };
        if needs_order {
            return Err(Error::ExponentOrder(format!(
                "{} needs q {} p, got p={p}, q={q}",
                self.inequality,
                if self.inequality == InequalityKind::Bf { "<=" } else { "<" }
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub inequality: InequalityKind,
    pub p: f64,
    pub q: f64,
    pub samples: usize,
    /// Slack at the sample with the smallest relative slack.
    pub min_slack: f64,
    pub min_relative_slack: f64,
    pub argmin: PiconePoint,
    pub argmin_report: SlackReport,
    pub violations: usize,
    pub violations_under_hypotheses: usize,
    pub hypothesis_met: usize,
    pub regime: Regime,
    pub dim: usize,
    pub seed: u64,
}

fn log_uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}

fn unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = super::norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// One random point under the configured regime.
pub fn sample_point<R: Rng>(rng: &mut R, cfg: &SamplerConfig) -> PiconePoint {
    let u = log_uniform(rng, cfg.value_range);
    let v = log_uniform(rng, cfg.value_range);
    let a = log_uniform(rng, cfg.grad_range);
    let b = log_uniform(rng, cfg.grad_range);
    let dir_v = unit_vector(rng, cfg.dim);
    let dir_u = match cfg.regime {
        Regime::Aligned => dir_v.clone(),
        Regime::Anti => dir_v.iter().map(|x| -x).collect(),
        Regime::Random => unit_vector(rng, cfg.dim),
    };
    PiconePoint {
        u,
        v,
        grad_u: dir_u.into_iter().map(|x| a * x).collect(),
        grad_v: dir_v.into_iter().map(|x| b * x).collect(),
    }
}

/// Evaluates the configured inequality; for the two-report case the report
/// with the smaller relative slack is returned. `member` is `p ∈ I(q)`.
fn evaluate(pt: &mut PiconePoint, cfg: &SamplerConfig, member: bool) -> Result<SlackReport> {
    let pq = cfg.pq;
    let ExponentPair { p, q } = pq;
    match cfg.inequality {
        InequalityKind::Classic => classic_slack(pt, p),
        InequalityKind::Bf => bf_slack(pt, pq),
        InequalityKind::Ilyas => {
            let form = if p <= q { IlyasForm::Original } else { IlyasForm::Rewritten };
            ilyas_slack(pt, pq, form)
        }
        InequalityKind::General => general_slack_with_membership(pt, pq, member),
        InequalityKind::RadialPair => {
            if pt.inner() < 0.0 {
                pt.grad_v.iter_mut().for_each(|x| *x = -*x);
            }
            radial_pair_slack(pt, p)
        }
        InequalityKind::Tirani => {
            let (f, fd) = power_nonlinearity(pt.u, p);
            tirani_slack(pt, p, f, fd)
        }
        InequalityKind::TiraniQ => {
            let (f, fd) = power_nonlinearity(pt.u, p);
            tirani_q_slack(pt, pq, TiraniVariant::General { f_val: f + pt.u, f_deriv: fd + 1.0 })
        }
        InequalityKind::TiraniQPower => tirani_q_slack(pt, pq, TiraniVariant::Power),
        InequalityKind::TiraniQYoung => tirani_q_slack(pt, pq, TiraniVariant::Young),
        InequalityKind::Bm => {
            let (first, second) = bm_slacks(pt, pq, 1.0, 1.0)?;
            Ok(if first.relative_slack() <= second.relative_slack() {
                first
            } else {
                second
            })
        }
    }
}

#[derive(Debug, Clone)]
struct BlockResult {
    violations: usize,
    violations_under_hypotheses: usize,
    hypothesis_met: usize,
    best: Option<(f64, usize, PiconePoint, SlackReport)>,
}

impl BlockResult {
    fn merge(mut self, other: Self) -> Self {
        self.violations += other.violations;
        self.violations_under_hypotheses += other.violations_under_hypotheses;
        self.hypothesis_met += other.hypothesis_met;
        self.best = match (self.best, other.best) {
            (Some(a), Some(b)) => Some(if (b.0, b.1) < (a.0, a.1) { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }
}

fn run_block(cfg: &SamplerConfig, seed: u64, block: usize, member: bool) -> Result<BlockResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    let start = block * BLOCK;
    let end = (start + BLOCK).min(cfg.samples);
    let mut out = BlockResult {
        violations: 0,
        violations_under_hypotheses: 0,
        hypothesis_met: 0,
        best: None,
    };
    for index in start..end {
        let mut pt = sample_point(&mut rng, cfg);
        let report = evaluate(&mut pt, cfg, member)?;
        let violated = report.violates(&cfg.tol);
        out.violations += violated as usize;
        out.hypothesis_met += report.hypothesis_met as usize;
        out.violations_under_hypotheses += (violated && report.hypothesis_met) as usize;
        let rel = report.relative_slack();
        if out.best.as_ref().is_none_or(|b| rel < b.0) {
            out.best = Some((rel, index, pt, report));
        }
    }
    Ok(out)
}

/// Draws `cfg.samples` points and collects the worst relative slack and
/// violation counts. Deterministic in `seed` regardless of thread count.
pub fn fuzz(cfg: &SamplerConfig, seed: u64) -> Result<FuzzSummary> {
    cfg.validate()?;
    if cfg.samples == 0 {
        return Err(Error::BadRange("sample count must be positive".into()));
    }
    let member = in_i(cfg.pq.p, cfg.pq.q);
    let blocks = cfg.samples.div_ceil(BLOCK);
    let merged = (0..blocks)
        .into_par_iter()
        .map(|b| run_block(cfg, seed, b, member))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .reduce(BlockResult::merge)
        .expect("at least one block");
    let (rel, _, argmin, report) = merged.best.expect("at least one sample");
    Ok(FuzzSummary {
        inequality: cfg.inequality,
        p: cfg.pq.p,
        q: cfg.pq.q,
        samples: cfg.samples,
        min_slack: report.slack,
        min_relative_slack: rel,
        argmin,
        argmin_report: report,
        violations: merged.violations,
        violations_under_hypotheses: merged.violations_under_hypotheses,
        hypothesis_met: merged.hypothesis_met,
        regime: cfg.regime,
        dim: cfg.dim,
        seed,
    })
}
