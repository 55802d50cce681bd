//! Dormand-Prince 5(4) embedded Runge-Kutta integrator with fixed-size state.
//!
//! The integrator is deliberately small: it steps adaptively, lands exactly
//! on caller-supplied output abscissae and hands every accepted step to a
//! callback, which may stop the march (used for zero-crossing detection).

/// Right-hand side of `y' = F(t, y)`.
pub trait OdeSystem<const D: usize> {
    fn rhs(&self, t: f64, y: &[f64; D]) -> [f64; D];
}

/// One accepted step, as seen by the step callback.
#[derive(Debug, Clone, Copy)]
pub struct Step<const D: usize> {
    pub t0: f64,
    pub y0: [f64; D],
    pub t1: f64,
    pub y1: [f64; D],
    /// Index into the `stops` slice when `t1` landed exactly on a stop.
    pub stop: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub struct Endpoint<const D: usize> {
    pub t: f64,
    pub y: [f64; D],
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct Dopri5<const D: usize> {
    pub rtol: f64,
    /// Absolute tolerance per component; `f64::INFINITY` excludes a
    /// component from error control.
    pub atol: [f64; D],
    pub h_min: f64,
    pub max_steps: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

impl<const D: usize> Dopri5<D> {
    pub fn new(rtol: f64, atol: [f64; D]) -> Self {
        Self {
            rtol,
            atol,
            h_min: 1e-14,
            max_steps: 1_000_000,
        }
    }

    /// A single explicit step of size `h`; returns the fifth-order solution
    /// and the embedded error estimate.
    pub fn step<S: OdeSystem<D>>(&self, sys: &S, t: f64, y: &[f64; D], h: f64) -> ([f64; D], [f64; D]) {
        let k1 = sys.rhs(t, y);
        let k2 = sys.rhs(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
        let k3 = sys.rhs(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = sys.rhs(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = sys.rhs(
            t + C5 * h,
            &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = sys.rhs(
            t + h,
            &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = sys.rhs(t + h, &y1);
        let mut err = [0.0; D];
        for (i, e) in err.iter_mut().enumerate() {
            *e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        (y1, err)
    }

    fn error_norm(&self, y0: &[f64; D], y1: &[f64; D], err: &[f64; D]) -> f64 {
        let mut acc = 0.0;
        let mut n = 0usize;
        for i in 0..D {
            if !y1[i].is_finite() {
                return f64::INFINITY;
            }
            if self.atol[i].is_infinite() {
                continue;
            }
            let sc = self.atol[i] + self.rtol * y0[i].abs().max(y1[i].abs());
            let r = err[i] / sc;
            acc += r * r;
            n += 1;
        }
        if n == 0 {
            0.0
        } else {
            (acc / n as f64).sqrt()
        }
    }

    /// Integrates from `t0` to `t_end`, landing exactly on every abscissa in
    /// `stops` (ascending, inside `(t0, t_end]`). The callback sees each
    /// accepted step and may stop the march early.
    pub fn integrate<S, F>(
        &self,
        sys: &S,
        t0: f64,
        y0: [f64; D],
        t_end: f64,
        h0: f64,
        stops: &[f64],
        mut on_step: F,
    ) -> Result<Endpoint<D>, (f64, String)>
    where
        S: OdeSystem<D>,
        F: FnMut(&Step<D>) -> Flow,
    {
        let mut t = t0;
        let mut y = y0;
        let mut h = h0.max(self.h_min).min(t_end - t0);
        let mut next_stop = stops.iter().position(|&s| s > t0).unwrap_or(stops.len());
        let mut steps = 0usize;
        while t < t_end {
            if steps >= self.max_steps {
                return Err((t, "step budget exhausted".into()));
            }
            let target = if next_stop < stops.len() {
                stops[next_stop].min(t_end)
            } else {
                t_end
            };
            let mut h_try = h;
            let mut hits = false;
            if t + h_try >= target * (1.0 - 1e-15) || t + h_try >= target {
                h_try = target - t;
                hits = true;
            }
            let (y1, err) = self.step(sys, t, &y, h_try);
            let en = self.error_norm(&y, &y1, &err);
            if en <= 1.0 {
                let t1 = if hits { target } else { t + h_try };
                let stop = if hits && next_stop < stops.len() && target == stops[next_stop] {
                    Some(next_stop)
                } else {
                    None
                };
                let info = Step {
                    t0: t,
                    y0: y,
                    t1,
                    y1,
                    stop,
                };
                steps += 1;
                t = t1;
                y = y1;
                if stop.is_some() {
                    next_stop += 1;
                }
                let factor = if en == 0.0 {
                    5.0
                } else {
                    (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
                };
                // a clamped landing step should not shrink the next one
                h = if hits { h.max(h_try * factor) } else { h_try * factor };
                if on_step(&info) == Flow::Stop {
                    return Ok(Endpoint { t, y, steps });
                }
            } else {
                let factor = if en.is_finite() {
                    (0.9 * en.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.25
                };
                h = h_try * factor;
                if h < self.h_min {
                    return Err((t, format!("step size underflow (h = {h:e})")));
                }
            }
        }
        Ok(Endpoint { t, y, steps })
    }

    /// Locates, inside an accepted step, the abscissa where component `idx`
    /// crosses zero, by bisection on the length of a single step from
    /// `(step.t0, step.y0)`.
    pub fn locate_zero<S: OdeSystem<D>>(&self, sys: &S, step: &Step<D>, idx: usize) -> (f64, [f64; D]) {
        let sign0 = step.y0[idx].signum();
        let mut lo = 0.0;
        let mut hi = step.t1 - step.t0;
        let mut y_hi = step.y1;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (y_mid, _) = self.step(sys, step.t0, &step.y0, mid);
            if y_mid[idx] == 0.0 {
                return (step.t0 + mid, y_mid);
            }
            if y_mid[idx].signum() == sign0 {
                lo = mid;
            } else {
                hi = mid;
                y_hi = y_mid;
            }
        }
        (step.t0 + hi, y_hi)
    }
}
