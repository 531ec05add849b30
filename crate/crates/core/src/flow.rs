//! Physical-space evaluation of the assembled similarity solution:
//! `rho(t,r) = sgn(t) |t|^beta Omega(r/t)`, `u(t,r) = U(r/t)`, together with
//! the mass and momentum-moment integrals, the energy density, and
//! characteristic / particle path tracing.

use crate::density::DensityProfile;
use crate::error::{Error, Result};
use crate::num::quad::{self, QuadResult};
use crate::similarity::{critical_points, CriticalPointData, SimilarityParams};
use crate::velocity::{BuildOptions, VelocityProfile};
use serde::{Deserialize, Serialize};

/// A complete converging-diverging similarity solution.
#[derive(Debug, Clone)]
pub struct SimilaritySolution {
    pub params: SimilarityParams,
    pub cp: CriticalPointData,
    pub velocity: VelocityProfile,
    pub density: DensityProfile,
    pub opts: BuildOptions,
}

impl SimilaritySolution {
    pub fn build(params: &SimilarityParams, omega0: f64, opts: &BuildOptions) -> Result<Self> {
        let velocity = crate::velocity::build_velocity(params, opts)?;
        let density = crate::density::build_density(&velocity, omega0, opts)?;
        Ok(Self {
            params: *params,
            cp: critical_points(params),
            velocity,
            density,
            opts: opts.clone(),
        })
    }

    /// Point evaluation of (rho, u). At t = 0 the collapse closed forms
    /// `rho = |C_-| r^beta`, `u = U*` apply; the collapse point itself is
    /// the blowup point and is rejected.
    pub fn evaluate(&self, t: f64, r: f64) -> Result<(f64, f64)> {
        if t == 0.0 {
            if r == 0.0 {
                return Err(Error::OriginAtCollapse);
            }
            let rho = self.density.c_minus.abs() * r.powf(self.params.beta);
            return Ok((rho, self.velocity.u_star));
        }
        if r == 0.0 {
            // the center of motion before/after collapse
            let omega = if t < 0.0 {
                self.density.omega0
            } else {
                self.density.omega0_prime
            };
            let rho = t.signum() * t.abs().powf(self.params.beta) * omega;
            return Ok((rho, 0.0));
        }
        if r < 0.0 {
            return Err(Error::Domain {
                xi: r,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let xi = r / t;
        let u = self.velocity.eval(xi)?;
        let rho = t.signum() * t.abs().powf(self.params.beta) * self.density.omega(xi)?;
        Ok((rho, u))
    }

    /// M(t; r_bar) = ∫_0^{r_bar} rho r^m dr, computed in the similarity
    /// variable so the steep profiles near collapse stay resolved:
    /// for t != 0, M = |t|^{beta+n} ∫ |Omega(xi)| |xi|^m d xi over the
    /// image of (0, r_bar], split at the branch boundaries.
    pub fn mass_integral(&self, t: f64, r_bar: f64) -> Result<QuadResult> {
        self.weighted_integral(t, r_bar, 0)
    }

    /// I_q(t; r_bar) = ∫_0^{r_bar} rho |u|^q r^m dr for q = 1, 2.
    pub fn moment_integral(&self, t: f64, r_bar: f64, q: u32) -> Result<QuadResult> {
        if q != 1 && q != 2 {
            return Err(Error::InvalidParams(format!("q must be 1 or 2, got {q}")));
        }
        self.weighted_integral(t, r_bar, q)
    }

    fn weighted_integral(&self, t: f64, r_bar: f64, q: u32) -> Result<QuadResult> {
        if !(r_bar > 0.0) {
            return Err(Error::InvalidParams(format!(
                "r_bar must be positive, got {r_bar}"
            )));
        }
        let p = &self.params;
        let bn = p.beta + p.nf();
        if t == 0.0 {
            let c = self.density.c_minus.abs() * self.velocity.u_star.abs().powi(q as i32);
            return Ok(QuadResult {
                value: c * r_bar.powf(bn) / bn,
                err: 0.0,
            });
        }
        let xi_edge = r_bar / t;
        let mut integrand = |xi: f64| -> Result<f64> {
            if xi == 0.0 {
                return Ok(0.0);
            }
            let om = self.density.omega(xi)?.abs();
            let w = if q == 0 {
                1.0
            } else {
                self.velocity.eval(xi)?.abs().powi(q as i32)
            };
            Ok(om * w * xi.abs().powi(p.m as i32))
        };
        // split points: branch boundaries inside the integration range
        let kink_lo = self.velocity.kink.xi_lo();
        let tilde_hi = self.velocity.tilde.xi_hi();
        let mut cuts: Vec<f64> = if t < 0.0 {
            [xi_edge, kink_lo, self.cp.xi_w, 0.0]
                .into_iter()
                .filter(|&x| x >= xi_edge && x <= 0.0)
                .collect()
        } else {
            [0.0, self.velocity.xi_s, tilde_hi, xi_edge]
                .into_iter()
                .filter(|&x| x >= 0.0 && x <= xi_edge)
                .collect()
        };
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut value = 0.0;
        let mut err = 0.0;
        for w in cuts.windows(2) {
            let r = quad::adaptive(
                &mut integrand,
                w[0],
                w[1],
                self.opts.quad_rtol,
                self.opts.quad_atol,
            )?;
            value += r.value;
            err += r.err;
        }
        let scale = t.abs().powf(bn);
        Ok(QuadResult {
            value: scale * value,
            err: scale * err,
        })
    }

    /// Total energy density E(t,r) = [rho u^2 / 2 + a^2 rho ln rho] r^m.
    pub fn energy_density(&self, t: f64, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::InvalidParams(format!(
                "energy density needs r > 0, got {r}"
            )));
        }
        let (rho, u) = self.evaluate(t, r)?;
        let a2 = self.params.a * self.params.a;
        Ok((0.5 * rho * u * u + a2 * rho * rho.ln()) * r.powi(self.params.m as i32))
    }

    /// Fault-injection clone: outer density amplitude scaled by (1 + eps).
    pub fn with_perturbed_outer_density(&self, eps: f64) -> Self {
        let mut out = self.clone();
        out.density = out.density.with_perturbed_outer(eps);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceKind {
    /// dr/dt = u - a
    CharacteristicMinus,
    /// dr/dt = u + a
    CharacteristicPlus,
    /// dr/dt = u
    Particle,
}

impl TraceKind {
    fn wave_offset(&self) -> f64 {
        match self {
            TraceKind::CharacteristicMinus => -1.0,
            TraceKind::CharacteristicPlus => 1.0,
            TraceKind::Particle => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TraceEvent {
    /// crossed {t=0} at radius r with the recorded speed
    CrossedCollapse { r: f64, speed: f64 },
    CrossedKinkLine { t: f64, r: f64 },
    CrossedShock { t: f64, r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Completed { t: f64 },
    /// the path ran into r = 0 (reported with its terminal slope)
    ReachedOrigin { t: f64, terminal_slope: f64 },
    /// characteristics are absorbed by the expanding shock
    EnteredShock { t: f64, r: f64 },
}

#[derive(Debug, Clone)]
pub struct PathTrace {
    pub kind: TraceKind,
    pub nodes: Vec<(f64, f64)>,
    pub speed_at_collapse: Option<f64>,
    pub termination: Termination,
    pub events: Vec<TraceEvent>,
}

const R_FLOOR: f64 = 1e-10;
const EVENT_TOL_T: f64 = 1e-10;

impl SimilaritySolution {
    /// Trace a characteristic (dr/dt = u ± a) or particle path (dr/dt = u)
    /// from (t0, r0) forward to t1, with event detection at {t=0}, the kink
    /// line r = xi_w t, and the shock line r = xi_s t. Characteristics
    /// terminate when they are absorbed by the shock; every path terminates
    /// if it reaches r = 0 (up to a small floor).
    pub fn trace(&self, kind: TraceKind, t0: f64, r0: f64, t1: f64) -> Result<PathTrace> {
        if !(r0 > 0.0) || !(t1 > t0) {
            return Err(Error::InvalidParams(format!(
                "trace needs r0 > 0 and t1 > t0, got r0={r0}, t0={t0}, t1={t1}"
            )));
        }
        let ca = kind.wave_offset() * self.params.a;
        let mut nodes = Vec::new();
        let mut events = Vec::new();
        let mut speed_at_collapse = None;

        let mut t = t0;
        let mut r = r0;
        nodes.push((t, r));
        // split the integration at t = 0 so the collapse crossing is exact
        let legs: Vec<(f64, f64)> = if t0 < 0.0 && t1 > 0.0 {
            vec![(t0, 0.0), (0.0, t1)]
        } else {
            vec![(t0, t1)]
        };
        let mut rhs = |tt: f64, rr: f64| -> Result<f64> {
            let (_, u) = self.evaluate(tt, rr.max(R_FLOOR))?;
            Ok(u + ca)
        };
        let h_base = (t1 - t0) / 4000.0;
        for (leg_start, leg_end) in legs {
            if t < leg_start {
                t = leg_start;
            }
            loop {
                if t >= leg_end {
                    break;
                }
                let h = h_base.min(leg_end - t);
                if h <= 0.0 {
                    break;
                }
                // RK4 step
                let r_next = {
                    let k1 = rhs(t, r)?;
                    let k2 = rhs(t + 0.5 * h, r + 0.5 * h * k1)?;
                    let k3 = rhs(t + 0.5 * h, r + 0.5 * h * k2)?;
                    let k4 = rhs(t + h, r + h * k3)?;
                    r + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                };
                let mut t_new = t + h;
                let mut r_new = r_next;

                // event: reached the origin
                if r_new <= R_FLOOR {
                    let (te, re) = bisect_event(&mut rhs, t, r, t_new, r_new, |_, rr| rr - R_FLOOR)?;
                    let slope = rhs(te, re.max(R_FLOOR))?;
                    nodes.push((te, re));
                    return Ok(PathTrace {
                        kind,
                        nodes,
                        speed_at_collapse,
                        termination: Termination::ReachedOrigin {
                            t: te,
                            terminal_slope: slope,
                        },
                        events,
                    });
                }
                // event: kink line r = xi_w t (only for t < 0)
                if t_new < 0.0 {
                    let kp = |tt: f64, rr: f64| rr - self.cp.xi_w * tt;
                    if kp(t, r) * kp(t_new, r_new) < 0.0 {
                        let (te, re) = bisect_event(&mut rhs, t, r, t_new, r_new, kp)?;
                        events.push(TraceEvent::CrossedKinkLine { t: te, r: re });
                    }
                }
                // event: shock line r = xi_s t (only for t > 0)
                if t_new > 0.0 {
                    let sp = |tt: f64, rr: f64| rr - self.velocity.xi_s * tt.max(0.0);
                    if sp(t.max(0.0), r) * sp(t_new, r_new) < 0.0 {
                        let (te, re) = bisect_event(&mut rhs, t.max(0.0), r, t_new, r_new, sp)?;
                        if kind == TraceKind::Particle {
                            events.push(TraceEvent::CrossedShock { t: te, r: re });
                            // restart on the inner side of the shock line;
                            // the field is discontinuous there
                            t_new = te;
                            r_new = re * (1.0 - 1e-12);
                        } else {
                            nodes.push((te, re));
                            return Ok(PathTrace {
                                kind,
                                nodes,
                                speed_at_collapse,
                                termination: Termination::EnteredShock { t: te, r: re },
                            events,
                            });
                        }
                    }
                }
                t = t_new;
                r = r_new;
                nodes.push((t, r));
            }
            if leg_end == 0.0 && t1 > 0.0 {
                // crossing the collapse time
                let speed = rhs(0.0, r)?;
                speed_at_collapse = Some(speed);
                events.push(TraceEvent::CrossedCollapse { r, speed });
            }
        }
        Ok(PathTrace {
            kind,
            nodes,
            speed_at_collapse,
            termination: Termination::Completed { t },
            events,
        })
    }
}

/// Bisect an event function g(t, r(t)) = 0 inside one step, re-integrating
/// the step with RK4 at each trial; tolerance is EVENT_TOL_T in t.
fn bisect_event(
    rhs: &mut dyn FnMut(f64, f64) -> Result<f64>,
    t0: f64,
    r0: f64,
    t1: f64,
    r1: f64,
    g: impl Fn(f64, f64) -> f64,
) -> Result<(f64, f64)> {
    let mut lo = (t0, r0);
    let mut hi = (t1, r1);
    let glo = g(lo.0, lo.1);
    for _ in 0..200 {
        if (hi.0 - lo.0).abs() < EVENT_TOL_T {
            break;
        }
        let tm = 0.5 * (lo.0 + hi.0);
        let h = tm - t0;
        let k1 = rhs(t0, r0)?;
        let k2 = rhs(t0 + 0.5 * h, r0 + 0.5 * h * k1)?;
        let k3 = rhs(t0 + 0.5 * h, r0 + 0.5 * h * k2)?;
        let k4 = rhs(tm, r0 + h * k3)?;
        let rm = r0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let gm = g(tm, rm);
        if glo * gm <= 0.0 {
            hi = (tm, rm);
        } else {
            lo = (tm, rm);
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::reference_solution;
    use crate::Error;

    #[test]
    fn collapse_closed_forms() {
        let sol = reference_solution();
        let (rho, u) = sol.evaluate(0.0, 1.0).unwrap();
        assert_eq!(rho, sol.density.c_minus.abs());
        assert_eq!(u, sol.velocity.u_star);
        let (rho2, _) = sol.evaluate(0.0, 0.25).unwrap();
        assert_eq!(rho2, sol.density.c_minus.abs() * 0.25f64.powf(sol.params.beta));
        assert!(matches!(
            sol.evaluate(0.0, 0.0),
            Err(Error::OriginAtCollapse)
        ));
    }

    #[test]
    fn density_limits_agree_across_collapse() {
        let sol = reference_solution();
        let mut gaps = Vec::new();
        for k in [6, 9, 12] {
            let t = 2f64.powi(-k);
            let rm = sol.evaluate(-t, 1.0).unwrap().0;
            let rp = sol.evaluate(t, 1.0).unwrap().0;
            gaps.push((rm - rp).abs());
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps.last().unwrap() / sol.density.c_minus.abs() < 1e-3);
    }

    #[test]
    fn evaluation_deep_in_the_kink_sector() {
        let sol = reference_solution();
        let (t, r) = (-1.0, 4.0); // xi = -4 < xi_w
        let (rho, u) = sol.evaluate(t, r).unwrap();
        assert_eq!(u, sol.velocity.kink.eval(-4.0).unwrap());
        assert_eq!(rho, -sol.density.kink.eval(-4.0).unwrap());
        assert!(rho > 0.0 && u < 0.0);
    }

    #[test]
    fn center_of_motion_values() {
        let sol = reference_solution();
        // rho(t, 0) = |Omega_0| |t|^beta for t < 0, u(t, 0) = 0
        let (rho, u) = sol.evaluate(-0.5, 0.0).unwrap();
        assert_eq!(u, 0.0);
        assert!((rho - 0.5f64.powf(-1.0)).abs() < 1e-12);
    }

    #[test]
    fn positivity_over_a_sample_grid() {
        let sol = reference_solution();
        for i in 0..30 {
            let t = -1.0 + 2.0 * i as f64 / 29.0;
            for j in 1..=20 {
                let r = 3.0 * j as f64 / 20.0;
                let (rho, u) = sol.evaluate(t, r).unwrap();
                assert!(rho > 0.0, "rho({t},{r}) = {rho}");
                assert!(u.is_finite());
            }
        }
    }

    #[test]
    fn mass_integral_closed_form_and_limit() {
        let sol = reference_solution();
        let closed = sol.density.c_minus.abs() / (sol.params.beta + sol.params.nf());
        let m0 = sol.mass_integral(0.0, 1.0).unwrap();
        assert_eq!(m0.value, closed);
        // t -> 0-: M approaches the closed form
        let mut prev = f64::INFINITY;
        for k in [4, 7, 10] {
            let m = sol.mass_integral(-(2f64.powi(-k)), 1.0).unwrap();
            let gap = (m.value - closed).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-3 * closed);
    }

    #[test]
    fn mass_integral_refinement_oracle() {
        let sol = reference_solution();
        let m = sol.mass_integral(-0.5, 1.0).unwrap();
        // refined tolerances must agree to 1e-7 relative
        let mut tight = (*sol).clone();
        tight.opts.quad_rtol = sol.opts.quad_rtol * 0.03;
        tight.opts.quad_atol = sol.opts.quad_atol * 0.03;
        let m2 = tight.mass_integral(-0.5, 1.0).unwrap();
        assert!(
            (m.value - m2.value).abs() < 1e-7 * m.value,
            "{} vs {}",
            m.value,
            m2.value
        );
        assert!(m.err < 1e-7 * m.value);
    }

    #[test]
    fn moment_integrals_closed_forms_and_ordering() {
        let sol = reference_solution();
        let bn = sol.params.beta + sol.params.nf();
        let c = sol.density.c_minus.abs();
        let us = sol.velocity.u_star.abs();
        let i1 = sol.moment_integral(0.0, 1.0, 1).unwrap();
        let i2 = sol.moment_integral(0.0, 1.0, 2).unwrap();
        assert!((i1.value - c * us / bn).abs() < 1e-14 * i1.value);
        assert!((i2.value - c * us * us / bn).abs() < 1e-14 * i2.value);
        assert!(sol.moment_integral(0.0, 1.0, 3).is_err());
        // |u| <= 1 on the relevant domain here, so I2 <= I1 pointwise
        let mut max_u: f64 = 0.0;
        for j in 1..=50 {
            let r = j as f64 / 50.0;
            max_u = max_u.max(sol.evaluate(-0.5, r).unwrap().1.abs());
        }
        assert!(max_u <= 1.0);
        let i1t = sol.moment_integral(-0.5, 1.0, 1).unwrap();
        let i2t = sol.moment_integral(-0.5, 1.0, 2).unwrap();
        assert!(i2t.value <= i1t.value);
    }

    #[test]
    fn energy_density_log_term_vanishes_at_unit_density() {
        // rescale Omega_0 so that rho(-1, 1) = 1 exactly; then
        // E = rho u^2 / 2 * r^m at that point
        let sol = reference_solution();
        let rho1 = sol.evaluate(-1.0, 1.0).unwrap().0;
        let scaled = SimilaritySolution {
            density: crate::density::build_density(
                &sol.velocity,
                sol.density.omega0 / rho1,
                &sol.opts,
            )
            .unwrap(),
            ..(*sol).clone()
        };
        let (rho, u) = scaled.evaluate(-1.0, 1.0).unwrap();
        assert!((rho - 1.0).abs() < 1e-13);
        let e = scaled.energy_density(-1.0, 1.0).unwrap();
        assert!((e - 0.5 * rho * u * u).abs() < 1e-12);
    }

    #[test]
    fn energy_locally_integrable_but_globally_unbounded() {
        let sol = reference_solution();
        // local integrability near r = 0 at collapse: dyadic partial sums of
        // \int E(0, r) dr converge (integrand ~ r^{beta+m} log r)
        let mut partials = Vec::new();
        let mut acc = 0.0;
        for k in (0..20).rev() {
            let lo = 2f64.powi(-(k + 1));
            let hi = 2f64.powi(-k);
            let mut piece = 0.0;
            let n = 32;
            for i in 0..n {
                let r = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
                piece += sol.energy_density(0.0, r).unwrap() * (hi - lo) / n as f64;
            }
            acc += piece;
            partials.push(piece.abs());
        }
        assert!(acc.is_finite());
        // dyadic pieces shrink toward r = 0 (partials[0] is the innermost)
        assert!(partials[0] < *partials.last().unwrap());
        // the integral diverges as R -> infinity: the density magnitude
        // grows like r^{beta+m} log r (negative at low mass densities)
        let e1: f64 = sol.energy_density(0.0, 10.0).unwrap();
        let e2: f64 = sol.energy_density(0.0, 100.0).unwrap();
        assert!(
            e2.abs() > 5.0 * e1.abs(),
            "energy density magnitude must keep growing in r: {e1} -> {e2}"
        );
    }

    #[test]
    fn critical_characteristic_is_invariant() {
        // along xi = xi_w: u - a = U_w - a = xi_w, so r = xi_w t is exact
        let sol = reference_solution();
        let t0 = -1.0;
        let r0 = sol.cp.xi_w * t0; // = 2
        let tr = sol
            .trace(TraceKind::CharacteristicMinus, t0, r0, -0.05)
            .unwrap();
        for (t, r) in &tr.nodes {
            assert!(
                (r - sol.cp.xi_w * t).abs() < 1e-8,
                "critical characteristic drifted at t={t}: r={r}"
            );
        }
    }

    #[test]
    fn particles_cross_collapse_with_speed_ustar() {
        let sol = reference_solution();
        let tr = sol.trace(TraceKind::Particle, -1.0, 0.6, 0.2).unwrap();
        let speed = tr.speed_at_collapse.expect("crossed t=0");
        assert!(
            (speed - sol.velocity.u_star).abs() < 1e-9,
            "speed {speed} vs U* {}",
            sol.velocity.u_star
        );
        assert!(matches!(tr.termination, Termination::Completed { .. }));
    }

    #[test]
    fn characteristics_above_critical_cross_at_positive_radius() {
        let sol = reference_solution();
        // start above the critical characteristic (kink sector)
        let tr = sol
            .trace(TraceKind::CharacteristicMinus, -1.0, 3.0, 0.05)
            .unwrap();
        let speed = tr.speed_at_collapse.expect("crossed t=0");
        assert!((speed - (sol.velocity.u_star - sol.params.a)).abs() < 1e-9);
        let r_at_zero = tr
            .events
            .iter()
            .find_map(|e| match e {
                TraceEvent::CrossedCollapse { r, .. } => Some(*r),
                _ => None,
            })
            .unwrap();
        assert!(r_at_zero > 0.0);
    }

    #[test]
    fn characteristics_below_critical_reach_origin_with_speed_minus_a() {
        let sol = reference_solution();
        let tr = sol
            .trace(TraceKind::CharacteristicMinus, -1.0, 1.0, 0.5)
            .unwrap();
        match tr.termination {
            Termination::ReachedOrigin { t, terminal_slope } => {
                assert!(t < 0.0, "must reach the origin before collapse");
                assert!(
                    (terminal_slope - (-sol.params.a)).abs() < 1e-6,
                    "terminal slope {terminal_slope}"
                );
            }
            other => panic!("expected origin termination, got {other:?}"),
        }
    }

    #[test]
    fn characteristics_disappear_into_the_shock() {
        let sol = reference_solution();
        // a 1-characteristic crossing collapse later meets r = xi_s t
        let tr = sol
            .trace(TraceKind::CharacteristicMinus, -1.0, 2.5, 4.0)
            .unwrap();
        match tr.termination {
            Termination::EnteredShock { t, r } => {
                assert!(t > 0.0);
                assert!((r - sol.velocity.xi_s * t).abs() < 1e-6);
            }
            other => panic!("expected shock absorption, got {other:?}"),
        }
    }

    #[test]
    fn no_particle_accumulation_at_the_center() {
        let sol = reference_solution();
        let mut crossings = Vec::new();
        for i in 1..=10 {
            let r0 = 0.1 * i as f64;
            let tr = sol.trace(TraceKind::Particle, -1.0, r0, 0.05).unwrap();
            let r = tr
                .events
                .iter()
                .find_map(|e| match e {
                    TraceEvent::CrossedCollapse { r, .. } => Some(*r),
                    _ => None,
                })
                .expect("particle must cross collapse");
            assert!(r > 0.0);
            crossings.push(r);
        }
        // order preserved up to collapse
        assert!(crossings.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn fixed_location_limits_exist_as_finite_numbers() {
        // requirement (B): u(t_k, 1) and rho(t_k, 1) are Cauchy as t_k -> 0
        let sol = reference_solution();
        for sign in [-1.0, 1.0] {
            let mut prev: Option<(f64, f64)> = None;
            let mut shrinking = true;
            let mut last_gap = f64::INFINITY;
            for k in 1..=14 {
                let t = sign * 2f64.powi(-k);
                let (rho, u) = sol.evaluate(t, 1.0).unwrap();
                if let Some((pr, pu)) = prev {
                    let gap = (rho - pr).abs() + (u - pu).abs();
                    if gap > last_gap * 1.5 {
                        shrinking = false;
                    }
                    last_gap = gap;
                }
                prev = Some((rho, u));
            }
            assert!(shrinking, "sequence not Cauchy on side {sign}");
            assert!(last_gap < 1e-3);
        }
    }

    #[test]
    fn blowup_signature_is_a_pure_power() {
        let sol = reference_solution();
        let c = sol.density.c_minus.abs();
        for i in 0..24 {
            let r = 10f64.powf(-6.0 + 6.0 * i as f64 / 23.0);
            let (rho, _) = sol.evaluate(0.0, r).unwrap();
            let scaled = rho * r.powf(-sol.params.beta);
            assert!(
                (scaled - c).abs() < 1e-12 * c,
                "rho(0,r) r^-beta = {scaled} vs |C_-| = {c}"
            );
        }
    }
}
