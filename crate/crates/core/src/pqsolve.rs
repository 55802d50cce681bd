//! Radial shooting for
//!
//! `-Δ_p u - Δ_q u = λ₁(p) u^{p-1} + μ u^{q-1}` in a ball, `u = 0` on the boundary,
//!
//! and μ-sweeps of the band where positive solutions exist.
//!
//! The radial equation is integrated in the flux variable
//! `w = ρ^{N-1} Ψ(u')`, `Ψ(t) = c|t|^{p-2}t + |t|^{q-2}t`, with `c = 1` for the
//! problem itself. The amplitude `a = u(0)` is the shooting parameter; the
//! boundary residual is `u(R)` if `u` stays positive and `-(R - z)|u'(z)|`
//! if it first vanishes at `z < R`, which is continuous in `a`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::inequality::ExponentPair;
use crate::numeric::ode::{Dopri5, Endpoint, Flow, OdeSystem, Step};
use crate::numeric::{odd_pow, sphere_measure};
use crate::spectrum::{beta_star_of, first_eigenpair, Geometry, RadialProfile};

/// The `t` with `|t|^{p-2}t + |t|^{q-2}t = w`.
pub fn flux_invert(w: f64, pq: ExponentPair) -> f64 {
    flux_invert_weighted(w, 1.0, pq.p, pq.q)
}

/// The `t` with `c|t|^{p-2}t + |t|^{q-2}t = w`, for `c >= 0`.
///
/// Newton on `x = ln|t|` for `ln(c e^{(p-1)x} + e^{(q-1)x}) = ln|w|`. The left
/// side is convex and increasing in `x`, and the start lies to the right of
/// the root, so the iteration decreases monotonically onto it.
pub fn flux_invert_weighted(w: f64, c: f64, p: f64, q: f64) -> f64 {
    if w == 0.0 || !w.is_finite() {
        return w;
    }
    let target = w.abs().ln();
    if c == 0.0 {
        return w.signum() * (target / (q - 1.0)).exp();
    }
    let lc = c.ln();
    let mut x = ((target - lc) / (p - 1.0)).min(target / (q - 1.0));
    for _ in 0..200 {
        let a = lc + (p - 1.0) * x;
        let b = (q - 1.0) * x;
        let m = a.max(b);
        let (ea, eb) = ((a - m).exp(), (b - m).exp());
        let f = m + (ea + eb).ln() - target;
        let df = ((p - 1.0) * ea + (q - 1.0) * eb) / (ea + eb);
        let dx = f / df;
        x -= dx;
        if dx.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    w.signum() * x.exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    pub rtol: f64,
    /// Intervals of the output grid on `[0, R]`.
    pub nodes: usize,
    /// Log-scan bracket for the amplitude.
    pub a_range: (f64, f64),
    pub scan_points: usize,
    /// A shot is a solution when `|residual| <= boundary_tol · a`.
    pub boundary_tol: f64,
    /// Start radius as a fraction of `R`.
    pub start: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            nodes: 4096,
            a_range: (1e-8, 1e8),
            scan_points: 200,
            boundary_tol: 1e-8,
            start: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub bisection_iters: usize,
    pub boundary_residual: f64,
    /// Relative defect of `∫|∇u|^p + ∫|∇u|^q = λ₁(p)∫u^p + μ∫u^q` by grid quadrature.
    pub energy_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuSweepRecord {
    pub mu: f64,
    pub found: bool,
    /// Center value `u(0)`; for an unsuccessful search the last amplitude tried.
    pub a: f64,
    #[serde(skip)]
    pub profile: Option<RadialProfile>,
    pub gradient_p_norm: Option<f64>,
    pub diagnostics: Diagnostics,
}

/// State `[u, w, ∫|u'|^p, ∫|u'|^q, ∫|u|^p, ∫|u|^q]`, integrals against `ρ^{N-1}dρ`.
struct RadialPq {
    p: f64,
    q: f64,
    c: f64,
    lambda: f64,
    mu: f64,
    dim: usize,
}

impl RadialPq {
    fn weight(&self, t: f64) -> f64 {
        if self.dim == 1 {
            1.0
        } else {
            t.powi(self.dim as i32 - 1)
        }
    }

    fn slope(&self, t: f64, w: f64) -> f64 {
        flux_invert_weighted(w / self.weight(t), self.c, self.p, self.q)
    }

    /// State at the small radius `t` for center value `a`.
    fn start(&self, a: f64, t: f64) -> [f64; 6] {
        let n = self.dim as f64;
        let source = self.lambda * a.powf(self.p - 1.0) + self.mu * a.powf(self.q - 1.0);
        let w = -source * t.powf(n) / n;
        let du = self.slope(t, w);
        // u' grows like a power of ρ; the trapezoid-type factor is exact
        // for the q-dominated power law
        let u = a + t * du * (self.q - 1.0) / self.q;
        let vol = t.powf(n) / n;
        [
            u,
            w,
            du.abs().powf(self.p) * vol,
            du.abs().powf(self.q) * vol,
            a.powf(self.p) * vol,
            a.powf(self.q) * vol,
        ]
    }
}

impl OdeSystem<6> for RadialPq {
    fn rhs(&self, t: f64, y: &[f64; 6]) -> [f64; 6] {
        let m = self.weight(t);
        let du = flux_invert_weighted(y[1] / m, self.c, self.p, self.q);
        let (ad, au) = (du.abs(), y[0].abs());
        [
            du,
            -m * (self.lambda * odd_pow(y[0], self.p) + self.mu * odd_pow(y[0], self.q)),
            m * ad.powf(self.p),
            m * ad.powf(self.q),
            m * au.powf(self.p),
            m * au.powf(self.q),
        ]
    }
}

/// Outcome of one shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    pub a: f64,
    pub residual: f64,
    /// First zero of `u` inside the domain, if any.
    pub zero: Option<f64>,
}

/// The problem on a fixed geometry with `λ₁(p)` already computed.
#[derive(Debug, Clone)]
pub struct PqProblem {
    pub pq: ExponentPair,
    pub geom: Geometry,
    pub lambda1_p: f64,
    /// Coefficient of `-Δ_p`; 1 for the actual problem.
    pub p_weight: f64,
    pub options: ShootingOptions,
}

impl PqProblem {
    /// Validates `q < p` and computes `λ₁(p)` on `geom`.
    pub fn new(pq: ExponentPair, geom: Geometry) -> Result<Self> {
        let pq = ExponentPair::new(pq.p, pq.q)?;
        if !pq.ordered() {
            return Err(Error::ExponentOrder(format!("requires q < p, got p={}, q={}", pq.p, pq.q)));
        }
        let lambda1_p = first_eigenpair(pq.p, geom)?.eigenvalue.expect("eigenvalue present");
        Ok(Self::with_lambda(pq, geom, lambda1_p))
    }

    /// Skips validation and eigenvalue computation; used by oracle setups.
    pub fn with_lambda(pq: ExponentPair, geom: Geometry, lambda1_p: f64) -> Self {
        Self {
            pq,
            geom,
            lambda1_p,
            p_weight: 1.0,
            options: ShootingOptions::default(),
        }
    }

    fn system(&self, mu: f64) -> RadialPq {
        RadialPq {
            p: self.pq.p,
            q: self.pq.q,
            c: self.p_weight,
            lambda: self.lambda1_p,
            mu,
            dim: self.geom.dim,
        }
    }

    fn solver(&self, a: f64) -> Dopri5<6> {
        let atol = self.options.rtol * 1e-2 * a;
        Dopri5::new(self.options.rtol, [atol, atol, f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY])
    }

    /// Integrates from the center with `u(0) = a` to the boundary or the
    /// first zero of `u`.
    pub fn shoot(&self, mu: f64, a: f64) -> Result<Shot> {
        let sys = self.system(mu);
        let solver = self.solver(a);
        let r = self.geom.radius;
        let t0 = self.options.start * r;
        let y0 = sys.start(a, t0);
        let mut zero = None;
        let end = solver
            .integrate(&sys, t0, y0, r, t0, &[], |step: &Step<6>| {
                if step.y1[0] <= 0.0 {
                    zero = Some(solver.locate_zero(&sys, step, 0));
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            })
            .map_err(|(t, msg)| Error::StepFailure(t, msg))?;
        Ok(match zero {
            Some((z, y)) if z < r => Shot {
                a,
                residual: -(r - z) * sys.slope(z, y[1]).abs(),
                zero: Some(z),
            },
            _ => Shot {
                a,
                residual: end.y[0],
                zero: None,
            },
        })
    }

    /// Samples the shot with center value `a` on `geom.grid(nodes)`,
    /// integrating through `[0, R]` regardless of sign changes.
    pub fn sample_profile(&self, mu: f64, a: f64) -> Result<(RadialProfile, Endpoint<6>)> {
        let sys = self.system(mu);
        let solver = self.solver(a);
        let r = self.geom.radius;
        let t0 = self.options.start * r;
        let y0 = sys.start(a, t0);
        let grid = self.geom.grid(self.options.nodes.max(2));
        let stops: Vec<f64> = grid.iter().copied().filter(|&t| t > t0).collect();
        let mut values = Vec::with_capacity(grid.len());
        let mut derivs = Vec::with_capacity(grid.len());
        for &t in grid.iter().take_while(|&&t| t <= t0) {
            if t == 0.0 {
                values.push(a);
                derivs.push(0.0);
            } else {
                let y = sys.start(a, t);
                values.push(y[0]);
                derivs.push(sys.slope(t, y[1]));
            }
        }
        let end = solver
            .integrate(&sys, t0, y0, r, t0, &stops, |step: &Step<6>| {
                if step.stop.is_some() {
                    values.push(step.y1[0]);
                    derivs.push(sys.slope(step.t1, step.y1[1]));
                }
                Flow::Continue
            })
            .map_err(|(t, msg)| Error::StepFailure(t, msg))?;
        let profile = RadialProfile::from_samples(self.geom, grid, values, derivs, self.pq.p)?;
        Ok((profile, end))
    }

    /// `‖∇u‖_p` from the integrated augmentation of a full-domain shot.
    fn gradient_p_norm(&self, end: &Endpoint<6>) -> f64 {
        (sphere_measure(self.geom.dim) * end.y[2]).powf(1.0 / self.pq.p)
    }

    /// Relative defect of the energy identity by grid quadrature.
    pub fn energy_residual(&self, profile: &RadialProfile, mu: f64) -> f64 {
        let ExponentPair { p, q } = self.pq;
        let c = self.p_weight;
        let lhs = profile.integrate(|_, _, du| c * du.abs().powf(p) + du.abs().powf(q));
        let rhs = profile.integrate(|_, u, _| {
            let u = u.max(0.0);
            self.lambda1_p * u.powf(p) + mu * u.powf(q)
        });
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
    }

    /// Searches for a positive solution: log-scan of `a` for the first sign
    /// change of the residual, then geometric bisection.
    pub fn find_positive_solution(&self, mu: f64) -> Result<MuSweepRecord> {
        let opts = &self.options;
        let (lo, hi) = opts.a_range;
        let n = opts.scan_points.max(2);
        let amplitude = |i: usize| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp();

        let mut prev = self.shoot(mu, amplitude(0))?;
        let mut bracket = None;
        for i in 1..n {
            let shot = self.shoot(mu, amplitude(i))?;
            if (prev.residual > 0.0) != (shot.residual > 0.0) {
                bracket = Some((prev, shot));
                break;
            }
            prev = shot;
        }
        let Some((mut left, mut right)) = bracket else {
            return Ok(MuSweepRecord {
                mu,
                found: false,
                a: prev.a,
                profile: None,
                gradient_p_norm: None,
                diagnostics: Diagnostics {
                    bisection_iters: 0,
                    boundary_residual: prev.residual,
                    energy_residual: None,
                },
            });
        };

        let mut iters = 0;
        let mut best = if left.residual.abs() / left.a < right.residual.abs() / right.a { left } else { right };
        while best.residual.abs() > opts.boundary_tol * best.a && iters < 200 {
            let mid_a = (left.a * right.a).sqrt();
            if mid_a <= left.a || mid_a >= right.a {
                break;
            }
            let mid = self.shoot(mu, mid_a)?;
            iters += 1;
            if (mid.residual > 0.0) == (left.residual > 0.0) {
                left = mid;
            } else {
                right = mid;
            }
            if mid.residual.abs() / mid.a < best.residual.abs() / best.a {
                best = mid;
            }
        }
        let found = best.residual.abs() <= opts.boundary_tol * best.a;
        let (profile, end) = self.sample_profile(mu, best.a)?;
        let positive = profile.values[..profile.values.len() - 1].iter().all(|&u| u > 0.0);
        let found = found && positive;
        Ok(MuSweepRecord {
            mu,
            found,
            a: best.a,
            gradient_p_norm: found.then(|| self.gradient_p_norm(&end)),
            diagnostics: Diagnostics {
                bisection_iters: iters,
                boundary_residual: best.residual,
                energy_residual: found.then(|| self.energy_residual(&profile, mu)),
            },
            profile: found.then_some(profile),
        })
    }
}

/// Outcome of a μ-sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceMap {
    pub p: f64,
    pub q: f64,
    pub geometry: Geometry,
    pub records: Vec<MuSweepRecord>,
    pub lambda1_p: f64,
    pub lambda1_q: f64,
    pub beta_star: f64,
    /// Largest swept μ with a positive solution; resolution-limited to one grid step.
    pub mu_tilde_estimate: Option<f64>,
    pub grid_step: f64,
}

impl ExistenceMap {
    /// `mu_tilde_estimate - beta_star`, reported without interpretation.
    pub fn mu_tilde_gap(&self) -> Option<f64> {
        self.mu_tilde_estimate.map(|m| m - self.beta_star)
    }

    pub fn found(&self) -> impl Iterator<Item = &MuSweepRecord> {
        self.records.iter().filter(|r| r.found)
    }

    /// Writes `mu,found,a,grad_p_norm,residual`; the norm is empty when no
    /// solution was found.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mu", "found", "a", "grad_p_norm", "residual"])?;
        for r in &self.records {
            w.write_record([
                fmt_f64(r.mu),
                r.found.to_string(),
                fmt_f64(r.a),
                r.gradient_p_norm.map(fmt_f64).unwrap_or_default(),
                fmt_f64(r.diagnostics.boundary_residual),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `steps` equispaced values over `[0.8 λ₁(q), 1.3 β₊]`.
pub fn default_mu_grid(lambda1_q: f64, beta_star: f64, steps: usize) -> Vec<f64> {
    let (lo, hi) = (0.8 * lambda1_q, 1.3 * beta_star);
    let steps = steps.max(2);
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

/// Thresholds `(λ₁(p), λ₁(q), β₊)` and the eigenfunction `φ_p` on `geom`.
pub fn thresholds(pq: ExponentPair, geom: Geometry) -> Result<(f64, f64, f64, RadialProfile)> {
    let phi_p = first_eigenpair(pq.p, geom)?;
    let phi_q = first_eigenpair(pq.q, geom)?;
    let beta = beta_star_of(&phi_p, pq.q)?;
    Ok((phi_p.eigenvalue.expect("eigenvalue"), phi_q.eigenvalue.expect("eigenvalue"), beta, phi_p))
}

/// Runs [`PqProblem::find_positive_solution`] for each μ, in parallel.
pub fn mu_sweep(pq: ExponentPair, geom: Geometry, mu_grid: &[f64]) -> Result<ExistenceMap> {
    let problem = PqProblem::new(pq, geom)?;
    mu_sweep_with(&problem, mu_grid)
}

pub fn mu_sweep_with(problem: &PqProblem, mu_grid: &[f64]) -> Result<ExistenceMap> {
    let (_, lambda1_q, beta, _) = thresholds(problem.pq, problem.geom)?;
    let mut records = mu_grid
        .par_iter()
        .map(|&mu| problem.find_positive_solution(mu))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    let grid_step = records.windows(2).map(|w| w[1].mu - w[0].mu).fold(0.0, f64::max);
    let mu_tilde_estimate = records.iter().filter(|r| r.found).map(|r| r.mu).reduce(f64::max);
    Ok(ExistenceMap {
        p: problem.pq.p,
        q: problem.pq.q,
        geometry: problem.geom,
        records,
        lambda1_p: problem.lambda1_p,
        lambda1_q,
        beta_star: beta,
        mu_tilde_estimate,
        grid_step,
    })
}

/// Convenience form returning only the profile.
pub fn find_positive_solution(pq: ExponentPair, mu: f64, geom: Geometry) -> Result<Option<RadialProfile>> {
    Ok(PqProblem::new(pq, geom)?.find_positive_solution(mu)?.profile)
}

/// Convenience form of [`PqProblem::shoot`] with a given `λ₁(p)`.
pub fn shoot(pq: ExponentPair, mu: f64, a: f64, lambda1_p: f64, geom: Geometry) -> Result<Shot> {
    let pq = ExponentPair::new(pq.p, pq.q)?;
    if !pq.ordered() {
        return Err(Error::ExponentOrder(format!("requires q < p, got p={}, q={}", pq.p, pq.q)));
    }
    PqProblem::with_lambda(pq, geom, lambda1_p).shoot(mu, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(p: f64, q: f64) -> ExponentPair {
        ExponentPair::new(p, q).unwrap()
    }

    #[test]
    fn flux_inverse_examples() {
        assert_eq!(flux_invert(0.0, pair(3.0, 2.0)), 0.0);
        assert!((flux_invert(2.0, pair(3.0, 2.0)) - 1.0).abs() < 1e-14);
        assert!((flux_invert(-2.0, pair(3.0, 2.0)) + 1.0).abs() < 1e-14);
        let p = 2.7;
        let w = -5.5;
        let closed = -(5.5f64 / 2.0).powf(1.0 / (p - 1.0));
        assert!((flux_invert(w, pair(p, p)) - closed).abs() < 1e-13 * closed.abs());
    }

    #[test]
    fn flux_inverse_roundtrip() {
        let pq = pair(4.5, 1.2);
        for &t in &[1e-9, 1e-4, 0.3, 1.0, 7.0, 1e5, -2.5, -1e-6] {
            let w = odd_pow(t, pq.p) + odd_pow(t, pq.q);
            let back = flux_invert(w, pq);
            assert!((back - t).abs() <= 1e-10 * t.abs(), "{t} -> {back}");
        }
    }

    #[test]
    fn rejects_equal_exponents() {
        let geom = Geometry::ball(2, 1.0).unwrap();
        assert!(matches!(shoot(pair(2.0, 2.0), 1.0, 1.0, 5.0, geom), Err(Error::ExponentOrder(_))));
    }

    #[test]
    fn small_amplitude_below_lambda_q_stays_positive() {
        let geom = Geometry::ball(2, 1.0).unwrap();
        let pq = pair(2.2, 1.6);
        let (l1p, l1q, _, _) = thresholds(pq, geom).unwrap();
        let shot = shoot(pq, 0.9 * l1q, 1e-6, l1p, geom).unwrap();
        assert!(shot.zero.is_none());
        assert!(shot.residual > 0.0);
    }

    #[test]
    fn degenerate_limit_reproduces_q_eigenfunction() {
        let geom = Geometry::ball(2, 1.0).unwrap();
        let q = 1.6;
        let phi_q = first_eigenpair(q, geom).unwrap();
        let mut problem = PqProblem::with_lambda(pair(2.2, q), geom, 0.0);
        problem.p_weight = 0.0;
        let mu = phi_q.eigenvalue.unwrap();
        let shot = problem.shoot(mu, 1.0).unwrap();
        assert!(shot.residual.abs() < 1e-7, "{shot:?}");
        let (profile, _) = problem.sample_profile(mu, 1.0).unwrap();
        let normalized = profile.scaled(1.0 / profile.gradient_lr_norm(q));
        let d = normalized.sup_distance(&phi_q).unwrap();
        assert!(d < 1e-6, "{d}");
    }
}
