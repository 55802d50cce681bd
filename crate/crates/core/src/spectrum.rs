//! Radial first eigenpairs of the Dirichlet r-Laplacian and the threshold
//!
//! `beta_star = ∫ |∇φ_p|^q / ∫ φ_p^q`
//!
//! on intervals and N-balls.
//!
//! The radial equation `-(ρ^{N-1}|u'|^{r-2}u')' = λ ρ^{N-1}|u|^{r-2}u` is
//! integrated in the flux variable `w = ρ^{N-1}|u'|^{r-2}u'`, so the singular
//! coefficient `|u'|^{r-2}` never appears. The problem is homogeneous in the
//! amplitude and in the radius, so a single shot with `λ = 1, u(0) = 1`
//! fixes the eigenvalue: if the first zero sits at `z`, then on a ball of
//! radius `R` the eigenvalue is `(z/R)^r` and the eigenfunction is the
//! rescaled shot.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::check_exponent;
use crate::numeric::ode::{Dopri5, Flow, OdeSystem};
use crate::numeric::quad::integrate_samples;
use crate::numeric::{odd_pow, odd_pow_inv, sphere_measure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Interval,
    Ball,
}

/// A radially symmetric domain: the symmetric interval `(-R, R)` or the
/// N-ball of radius `R` centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub kind: GeometryKind,
    pub dim: usize,
    pub radius: f64,
}

impl Geometry {
    /// The interval of the given total length, viewed as `(-L/2, L/2)`.
    pub fn interval(length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGeometry(format!("interval length must be positive, got {length}")));
        }
        Ok(Self {
            kind: GeometryKind::Interval,
            dim: 1,
            radius: 0.5 * length,
        })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidGeometry(format!("ball needs dimension >= 2, got {dim}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!("radius must be positive, got {radius}")));
        }
        Ok(Self {
            kind: GeometryKind::Ball,
            dim,
            radius,
        })
    }

    /// Measure of the unit sphere `S^{N-1}`; integrals over the domain are
    /// this factor times `∫_0^R f(ρ) ρ^{N-1} dρ`.
    pub fn sphere_measure(&self) -> f64 {
        sphere_measure(self.dim)
    }

    /// `nodes + 1` equispaced radii on `[0, R]`.
    pub fn grid(&self, nodes: usize) -> Vec<f64> {
        (0..=nodes).map(|i| self.radius * i as f64 / nodes as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub lr_norm: f64,
    pub gradient_lr_norm: f64,
}

/// A radial function sampled on `[0, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub geometry: Geometry,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    pub r_exp: f64,
    pub eigenvalue: Option<f64>,
    pub norms: Norms,
}

impl RadialProfile {
    /// Builds a profile and fills its norms by quadrature on the grid.
    pub fn from_samples(geometry: Geometry, grid: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>, r_exp: f64) -> Result<Self> {
        if grid.len() != values.len() || grid.len() != derivs.len() || grid.len() < 2 {
            return Err(Error::GridMismatch);
        }
        let mut profile = Self {
            geometry,
            grid,
            values,
            derivs,
            r_exp,
            eigenvalue: None,
            norms: Norms {
                lr_norm: 0.0,
                gradient_lr_norm: 0.0,
            },
        };
        profile.norms = Norms {
            lr_norm: profile.lr_norm(r_exp),
            gradient_lr_norm: profile.gradient_lr_norm(r_exp),
        };
        Ok(profile)
    }

    /// `∫_Ω F(ρ_i, u_i, u'_i) dx` by composite Simpson on the grid.
    pub fn integrate<F>(&self, mut integrand: F) -> f64
    where
        F: FnMut(f64, f64, f64) -> f64,
    {
        let n = self.geometry.dim as i32 - 1;
        let samples: Vec<f64> = self
            .grid
            .iter()
            .zip(self.values.iter().zip(&self.derivs))
            .map(|(&r, (&u, &du))| integrand(r, u, du) * r.powi(n))
            .collect();
        self.geometry.sphere_measure() * integrate_samples(&self.grid, &samples)
    }

    /// `‖u‖_s`
    pub fn lr_norm(&self, s: f64) -> f64 {
        self.integrate(|_, u, _| u.abs().powf(s)).powf(1.0 / s)
    }

    /// `‖∇u‖_s`
    pub fn gradient_lr_norm(&self, s: f64) -> f64 {
        self.integrate(|_, _, du| du.abs().powf(s)).powf(1.0 / s)
    }

    /// The profile multiplied by `c`, with norms rescaled accordingly.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|x| *x *= c);
        out.derivs.iter_mut().for_each(|x| *x *= c);
        out.norms.lr_norm *= c.abs();
        out.norms.gradient_lr_norm *= c.abs();
        out
    }

    /// `max_i |u_i - w_i|` over a shared grid.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid.len() == other.grid.len()
            && self.geometry.dim == other.geometry.dim
            && self
                .grid
                .iter()
                .zip(&other.grid)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()))
    }

    /// Writes `r,u,du` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "u", "du"])?;
        for ((r, u), du) in self.grid.iter().zip(&self.values).zip(&self.derivs) {
            w.write_record([crate::export::fmt_f64(*r), crate::export::fmt_f64(*u), crate::export::fmt_f64(*du)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Eigendata summary, the JSON form of a computed eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub r_exp: f64,
    #[serde(rename = "N")]
    pub dim: usize,
    pub radius: f64,
    pub lambda1: f64,
    pub lr_norm: f64,
    pub grad_lr_norm: f64,
}

impl EigenSummary {
    pub fn from_profile(profile: &RadialProfile) -> Option<Self> {
        Some(Self {
            r_exp: profile.r_exp,
            dim: profile.geometry.dim,
            radius: profile.geometry.radius,
            lambda1: profile.eigenvalue?,
            lr_norm: profile.norms.lr_norm,
            grad_lr_norm: profile.norms.gradient_lr_norm,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Relative tolerance of the adaptive integrator.
    pub rtol: f64,
    /// Number of intervals of the output grid on `[0, R]`.
    pub nodes: usize,
    /// Starting radius of the shot, as a fraction of the first zero scale.
    pub start: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            nodes: 4096,
            start: 1e-6,
        }
    }
}

/// `λ = 1, u(0) = 1` shot; state `[u, w, ∫|u'|^r ρ^{N-1}, ∫|u|^r ρ^{N-1}]`.
struct UnitShot {
    r: f64,
    dim: usize,
}

impl UnitShot {
    fn weight(&self, t: f64) -> f64 {
        if self.dim == 1 {
            1.0
        } else {
            t.powi(self.dim as i32 - 1)
        }
    }

    /// Series start `u ≈ 1 - (r-1)/r N^{-1/(r-1)} t^{r/(r-1)}` at small `t`.
    fn start(&self, t: f64) -> [f64; 4] {
        let r = self.r;
        let n = self.dim as f64;
        let e = r / (r - 1.0);
        let u = 1.0 - (r - 1.0) / r * n.powf(-1.0 / (r - 1.0)) * t.powf(e);
        let w = -t.powf(n) / n;
        let g = n.powf(-e) * t.powf(n + e) / (n + e);
        let l = t.powf(n) / n;
        [u, w, g, l]
    }

    fn slope(&self, t: f64, w: f64) -> f64 {
        odd_pow_inv(w / self.weight(t), self.r)
    }
}

impl OdeSystem<4> for UnitShot {
    fn rhs(&self, t: f64, y: &[f64; 4]) -> [f64; 4] {
        let m = self.weight(t);
        let du = odd_pow_inv(y[1] / m, self.r);
        [
            du,
            -m * odd_pow(y[0], self.r),
            m * du.abs().powf(self.r),
            m * y[0].abs().powf(self.r),
        ]
    }
}

/// First eigenpair with default options.
pub fn first_eigenpair(r_exp: f64, geom: Geometry) -> Result<RadialProfile> {
    first_eigenpair_with(r_exp, geom, &EigenOptions::default())
}

/// First Dirichlet eigenpair of the r-Laplacian on a radial domain,
/// normalized so that `‖∇φ‖_r = 1` (hence `λ ‖φ‖_r^r = 1`).
pub fn first_eigenpair_with(r_exp: f64, geom: Geometry, opts: &EigenOptions) -> Result<RadialProfile> {
    check_exponent(r_exp)?;
    let sys = UnitShot { r: r_exp, dim: geom.dim };
    let solver = Dopri5::new(opts.rtol, [opts.rtol * 1e-2; 4]);
    let t0 = opts.start;
    let y0 = sys.start(t0);

    // first pass: locate the first zero
    let mut zero = None;
    solver
        .integrate(&sys, t0, y0, 1e4, t0, &[], |step| {
            if step.y1[0] <= 0.0 {
                zero = Some(solver.locate_zero(&sys, step, 0));
                Flow::Stop
            } else {
                Flow::Continue
            }
        })
        .map_err(|(t, msg)| Error::StepFailure(t, msg))?;
    let (z, _) = zero.ok_or_else(|| Error::NoConvergence("shot has no zero before radius 1e4".into()))?;

    // second pass: sample on the grid scaled to [0, z]
    let nodes = opts.nodes.max(2);
    let stops: Vec<f64> = (1..=nodes).map(|i| z * i as f64 / nodes as f64).filter(|&t| t > t0).collect();
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(nodes + 1);
    samples.push((0.0, 1.0, 0.0));
    for i in 1..=nodes {
        let t = z * i as f64 / nodes as f64;
        if t <= t0 {
            let y = sys.start(t);
            samples.push((t, y[0], sys.slope(t, y[1])));
        }
    }
    let end = solver
        .integrate(&sys, t0, y0, z, t0, &stops, |step| {
            if step.stop.is_some() {
                samples.push((step.t1, step.y1[0], sys.slope(step.t1, step.y1[1])));
            }
            Flow::Continue
        })
        .map_err(|(t, msg)| Error::StepFailure(t, msg))?;
    if samples.len() != nodes + 1 {
        return Err(Error::NoConvergence(format!(
            "expected {} samples, integrator produced {}",
            nodes + 1,
            samples.len()
        )));
    }
    let [_, _, grad_int, val_int] = end.y;

    let r = r_exp;
    let dim = geom.dim as f64;
    let k = z / geom.radius;
    let lambda = k.powf(r);
    let measure = geom.sphere_measure();
    let c = (measure * k.powf(r - dim) * grad_int).powf(-1.0 / r);
    let lr_norm = (measure * c.powf(r) * k.powf(-dim) * val_int).powf(1.0 / r);

    let grid = geom.grid(nodes);
    let mut values: Vec<f64> = samples.iter().map(|s| c * s.1).collect();
    let derivs: Vec<f64> = samples.iter().map(|s| c * k * s.2).collect();
    // the last sample sits on the located zero up to integrator noise
    *values.last_mut().expect("non-empty grid") = 0.0;

    Ok(RadialProfile {
        geometry: geom,
        grid,
        values,
        derivs,
        r_exp,
        eigenvalue: Some(lambda),
        norms: Norms {
            lr_norm,
            gradient_lr_norm: (measure * c.powf(r) * k.powf(r - dim) * grad_int).powf(1.0 / r),
        },
    })
}

/// Sampled radial weight `m(ρ_i)` on an eigenfunction grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub values: Vec<f64>,
}

impl WeightSpec {
    pub fn constant(value: f64, len: usize) -> Self {
        Self { values: vec![value; len] }
    }

    pub fn sample(grid: &[f64], m: impl Fn(f64) -> f64) -> Self {
        Self {
            values: grid.iter().map(|&r| m(r)).collect(),
        }
    }
}

/// `∫ |∇φ|^q / ∫ m φ^q` for a computed eigenfunction.
pub fn weighted_beta(phi: &RadialProfile, q: f64, m: &WeightSpec) -> Result<f64> {
    if m.values.len() != phi.grid.len() {
        return Err(Error::GridMismatch);
    }
    let num = phi.integrate(|_, _, du| du.abs().powf(q));
    let mut i = 0;
    let den = phi.integrate(|_, u, _| {
        let v = m.values[i] * u.max(0.0).powf(q);
        i += 1;
        v
    });
    if !(den > 0.0) {
        return Err(Error::NonPositiveWeightIntegral(den));
    }
    Ok(num / den)
}

/// `beta_star = ∫ |∇φ_p|^q / ∫ φ_p^q`.
pub fn beta_star(p: f64, q: f64, geom: Geometry) -> Result<f64> {
    let phi = first_eigenpair(p, geom)?;
    beta_star_of(&phi, q)
}

/// `beta_star` for an already computed `φ_p`.
pub fn beta_star_of(phi: &RadialProfile, q: f64) -> Result<f64> {
    weighted_beta(phi, q, &WeightSpec::constant(1.0, phi.grid.len()))
}

/// `∫ |∇φ_p|^q / ∫ m φ_p^q`; `m` must be sampled on the default eigenfunction
/// grid (`geom.grid(EigenOptions::default().nodes)`).
pub fn beta_star_m(p: f64, q: f64, geom: Geometry, m: &WeightSpec) -> Result<f64> {
    let phi = first_eigenpair(p, geom)?;
    weighted_beta(&phi, q, m)
}

/// Sampling plan for the assumption-(A) audit.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    /// Use every `radius_stride`-th node of the eigenfunction grid.
    pub radius_stride: usize,
    pub s_values: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
}

impl SampleGrid {
    /// `s` log-spaced over `[s_max·1e-6, s_max]`, with `±e_1` and a diagonal
    /// scaled to several magnitudes as gradient samples.
    pub fn standard(dim: usize, s_max: f64, s_count: usize) -> Self {
        let s_values = (0..s_count)
            .map(|i| s_max * 10f64.powf(-6.0 * (1.0 - i as f64 / (s_count.max(2) - 1) as f64)))
            .collect();
        let mut directions = vec![vec![0.0; dim]];
        for &mag in &[1e-3, 1.0, 1e3] {
            let mut e1 = vec![0.0; dim];
            e1[0] = mag;
            directions.push(e1.clone());
            e1[0] = -mag;
            directions.push(e1);
            directions.push(vec![mag / (dim as f64).sqrt(); dim]);
        }
        Self {
            radius_stride: 64,
            s_values,
            directions,
        }
    }
}

/// Pointwise screening of the lower bound
/// `f_μ(x, s, ξ) > λ₁(p) s^{p-1} + β^m m(x) s^{q-1}` on sampled tuples.
///
/// A `true` verdict is a sampling result, not a proof.
#[derive(Debug, Clone)]
pub struct AssumptionAudit {
    pub lambda1_p: f64,
    pub beta_m: f64,
    pub p: f64,
    pub q: f64,
    grid: Vec<f64>,
    weight: Vec<f64>,
}

impl AssumptionAudit {
    pub fn new(p: f64, q: f64, geom: Geometry, m: &WeightSpec) -> Result<Self> {
        let phi = first_eigenpair(p, geom)?;
        let beta_m = weighted_beta(&phi, q, m)?;
        Ok(Self {
            lambda1_p: phi.eigenvalue.expect("eigenpair carries its eigenvalue"),
            beta_m,
            p,
            q,
            grid: phi.grid,
            weight: m.values.clone(),
        })
    }

    pub fn lower_bound(&self, i: usize, s: f64) -> f64 {
        self.lambda1_p * s.powf(self.p - 1.0) + self.beta_m * self.weight[i] * s.powf(self.q - 1.0)
    }

    /// `true` iff the strict bound holds at every sampled `(ρ, s, ξ, μ)`.
    pub fn check<F>(&self, fmu: F, mu_set: &[f64], samples: &SampleGrid) -> bool
    where
        F: Fn(f64, f64, &[f64], f64) -> f64,
    {
        let stride = samples.radius_stride.max(1);
        mu_set.iter().all(|&mu| {
            (0..self.grid.len()).step_by(stride).all(|i| {
                samples.s_values.iter().all(|&s| {
                    let bound = self.lower_bound(i, s);
                    samples.directions.iter().all(|xi| fmu(self.grid[i], s, xi, mu) > bound)
                })
            })
        })
    }
}

/// One-shot form of [`AssumptionAudit::check`].
pub fn assumption_a_check<F>(
    fmu: F,
    p: f64,
    q: f64,
    geom: Geometry,
    m: &WeightSpec,
    mu_set: &[f64],
    samples: &SampleGrid,
) -> Result<bool>
where
    F: Fn(f64, f64, &[f64], f64) -> f64,
{
    Ok(AssumptionAudit::new(p, q, geom, m)?.check(fmu, mu_set, samples))
}
