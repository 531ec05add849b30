//! Adaptive Dormand-Prince 5(4) integration for scalar ODEs.
//!
//! The right-hand side is fallible: evaluations may hit a sonic line or a
//! critical point. A failed stage evaluation is treated like a rejected step
//! (the step is halved), so the integrator backs away from singular sets
//! instead of aborting. An `admissible` predicate acts as a proximity guard:
//! steps whose stages or endpoint leave the admissible region are shrunk and
//! never accepted across it.

use crate::error::{Error, Result};

/// One accepted sample of the solution, with the derivative at the node.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub x: f64,
    pub y: f64,
    pub dy: f64,
}

/// What the step observer wants the integrator to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone)]
pub struct RkOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Relative floor for the step size (scaled by 1 + |x|).
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for RkOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_min: 1e-14,
            max_steps: 4_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `dy/dx = f(x, y)` from `x0` to `x_end` (either direction).
///
/// * `h_cap` bounds |h| as a function of the current x (used to keep the
///   sample spacing fine enough for interpolation).
/// * `admissible` rejects steps that leave the caller's region of interest.
/// * `observe` sees every accepted step and may stop the integration early.
///
/// Returns all accepted steps, including the initial point.
pub fn integrate(
    f: &mut dyn FnMut(f64, f64) -> Result<f64>,
    x0: f64,
    y0: f64,
    x_end: f64,
    opts: &RkOptions,
    h_cap: &dyn Fn(f64) -> f64,
    admissible: &dyn Fn(f64, f64) -> bool,
    observe: &mut dyn FnMut(&Step) -> Control,
) -> Result<Vec<Step>> {
    let dir = (x_end - x0).signum();
    if dir == 0.0 {
        let dy = f(x0, y0)?;
        return Ok(vec![Step { x: x0, y: y0, dy }]);
    }

    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, y)?;
    let mut out = Vec::with_capacity(256);
    let first = Step { x, y, dy: k1 };
    out.push(first);
    if observe(&first) == Control::Stop {
        return Ok(out);
    }

    let span = (x_end - x0).abs();
    let mut h = dir * (1e-4 * span).min(h_cap(x)).max(1e-12);
    let mut last_err: Option<Error> = None;

    for _ in 0..opts.max_steps {
        if (x - x_end) * dir >= 0.0 {
            return Ok(out);
        }
        // Clamp onto the end point and the cap.
        let cap = h_cap(x).max(1e-300);
        if h.abs() > cap {
            h = dir * cap;
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        let h_floor = opts.h_min * (1.0 + x.abs());
        if h.abs() < h_floor {
            return Err(last_err.unwrap_or(Error::StepSizeUnderflow { x }));
        }

        // Stage evaluations; any failure or inadmissible stage rejects the step.
        let mut k = [k1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let mut stage_fail = false;
        for s in 1..7 {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += A[s - 1][j] * kj;
            }
            let xs = x + C[s] * h;
            let ys = y + h * acc;
            if !admissible(xs, ys) {
                stage_fail = true;
                break;
            }
            match f(xs, ys) {
                Ok(v) => k[s] = v,
                Err(e) => {
                    last_err = Some(e);
                    stage_fail = true;
                    break;
                }
            }
        }
        if stage_fail {
            h *= 0.5;
            continue;
        }

        let mut y5 = 0.0;
        let mut y4 = 0.0;
        for s in 0..7 {
            y5 += B5[s] * k[s];
            y4 += B4[s] * k[s];
        }
        let y_new = y + h * y5;
        let err = h.abs() * (y5 - y4).abs();
        let tol = opts.atol + opts.rtol * y.abs().max(y_new.abs());
        let ratio = err / tol;

        if ratio <= 1.0 {
            if !admissible(x + h, y_new) {
                h *= 0.5;
                continue;
            }
            x += h;
            y = y_new;
            // FSAL: k7 is f at the new point.
            k1 = k[6];
            let step = Step { x, y, dy: k1 };
            out.push(step);
            if observe(&step) == Control::Stop {
                return Ok(out);
            }
            let grow = if ratio > 0.0 {
                (0.9 * ratio.powf(-0.2)).min(5.0)
            } else {
                5.0
            };
            h *= grow;
        } else {
            h *= (0.9 * ratio.powf(-0.2)).max(0.2);
        }
    }
    Err(Error::QuadratureFailure(format!(
        "ODE integration exceeded {} steps near x = {x}",
        opts.max_steps
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_exponential() {
        let mut f = |_x: f64, y: f64| Ok(y);
        let steps = integrate(
            &mut f,
            0.0,
            1.0,
            1.0,
            &RkOptions::default(),
            &|_| 0.05,
            &|_, _| true,
            &mut |_| Control::Continue,
        )
        .unwrap();
        let last = steps.last().unwrap();
        assert!((last.y - 1.0f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn integrates_backward() {
        let mut f = |x: f64, _y: f64| Ok(2.0 * x);
        let steps = integrate(
            &mut f,
            1.0,
            1.0,
            -2.0,
            &RkOptions::default(),
            &|_| 0.1,
            &|_, _| true,
            &mut |_| Control::Continue,
        )
        .unwrap();
        let last = steps.last().unwrap();
        assert!((last.x - (-2.0)).abs() < 1e-14);
        assert!((last.y - 4.0).abs() < 1e-9);
    }

    #[test]
    fn observer_stops_early() {
        let mut f = |_x: f64, y: f64| Ok(y);
        let steps = integrate(
            &mut f,
            0.0,
            1.0,
            10.0,
            &RkOptions::default(),
            &|_| 0.05,
            &|_, _| true,
            &mut |s: &Step| {
                if s.y > 2.0 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        )
        .unwrap();
        assert!(steps.last().unwrap().y > 2.0);
        assert!(steps.last().unwrap().x < 1.0);
    }
}
