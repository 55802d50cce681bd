use picone::pqsolve::{thresholds, PqProblem};
use picone::spectrum::Geometry;
use picone::ExponentPair;

fn setup() -> (PqProblem, f64, f64) {
    let geom = Geometry::ball(2, 1.0).unwrap();
    let pq = ExponentPair::new(2.2, 1.6).unwrap();
    let (_, l1q, beta, _) = thresholds(pq, geom).unwrap();
    (PqProblem::new(pq, geom).unwrap(), l1q, beta)
}

#[test]
fn existence_inside_band_only() {
    let (problem, l1q, beta) = setup();
    let inside = problem.find_positive_solution(0.5 * (l1q + beta)).unwrap();
    assert!(inside.found);
    let profile = inside.profile.as_ref().unwrap();
    assert!(profile.values[..profile.values.len() - 1].iter().all(|&u| u > 0.0));
    assert!(inside.diagnostics.boundary_residual.abs() <= 1e-8 * inside.a);
    assert!(inside.diagnostics.energy_residual.unwrap() < 1e-4);

    assert!(!problem.find_positive_solution(1.2 * beta).unwrap().found);
    assert!(!problem.find_positive_solution(0.9 * l1q).unwrap().found);
}

#[test]
fn gradient_norm_grows_toward_beta() {
    let (problem, l1q, beta) = setup();
    let mus: Vec<f64> = (1..=5).map(|i| l1q + (beta - l1q) * i as f64 / 6.0).collect();
    let norms: Vec<f64> = mus
        .iter()
        .map(|&mu| {
            let r = problem.find_positive_solution(mu).unwrap();
            assert!(r.found, "mu={mu}");
            r.gradient_p_norm.unwrap()
        })
        .collect();
    assert!(norms.windows(2).all(|w| w[0] < w[1]), "{norms:?}");
}

#[test]
fn interval_geometry_shoots() {
    let geom = Geometry::interval(2.0).unwrap();
    let pq = ExponentPair::new(3.0, 2.0).unwrap();
    let (_, l1q, beta, _) = thresholds(pq, geom).unwrap();
    let problem = PqProblem::new(pq, geom).unwrap();
    let r = problem.find_positive_solution(0.5 * (l1q + beta)).unwrap();
    assert!(r.found);
    assert!(r.diagnostics.energy_residual.unwrap() < 1e-4);
}
