//! Construction of the three velocity branches and the reflected shock.
//!
//! The converging-diverging radial speed is assembled from three solutions
//! of the similarity velocity ODE:
//!
//! * `hat`:  the unique solution through the origin (slope `-beta/n` there),
//!   extended backward to the node P_w and forward to -P_w;
//! * `kink`: the unique solution leaving P_w along the fast eigendirection
//!   `(1, 1 - lambda_+)`, continued to xi -> -infinity where it tends to a
//!   finite limit U*;
//! * `tilde`: the solution approaching U* as xi -> +infinity, integrated
//!   inward until it meets the slow sonic line l_- at xi*.
//!
//! The expanding shock sits at the intersection `xi_s` of `tilde` with the
//! Hugoniot locus `H(xi) = xi + a^2/(hat(xi) - xi)` of the hat solution,
//! and satisfies the 2-shock entropy condition by construction.

use crate::branch::{Branch, Node, Tail, TailSide};
use crate::error::{Error, Result};
use crate::num::{rk, root};
use crate::similarity::{
    critical_points, ode_rhs_u, u_second_derivative, CriticalPointData, PhasePoint,
    SimilarityParams,
};
use serde::{Deserialize, Serialize};

/// Tolerances and truncation settings for the whole construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Relative / absolute tolerance of the adaptive ODE integrator.
    pub ode_rtol: f64,
    pub ode_atol: f64,
    /// Tolerance (in xi) for the shock root.
    pub root_tol: f64,
    /// Quadrature tolerances (matching constants, integrals).
    pub quad_rtol: f64,
    pub quad_atol: f64,
    /// Node departure distance, relative to |xi_w|.
    pub eps_node_rel: f64,
    /// Truncations, relative to |xi_w|: kink is integrated to
    /// -xi_min_factor*|xi_w|, tilde starts at +xi_max_factor*|xi_w|.
    pub xi_min_factor: f64,
    pub xi_max_factor: f64,
    /// Start of the density node integration, relative to x_s = 1/xi_s.
    pub x0_factor: f64,
    /// Grid size of the Hugoniot sign scan.
    pub scan_points: usize,
    /// Sample-spacing cap in the core region, relative to |xi_w|.
    pub h_core_rel: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            ode_rtol: 1e-10,
            ode_atol: 1e-12,
            root_tol: 1e-12,
            quad_rtol: 1e-11,
            quad_atol: 1e-14,
            eps_node_rel: 1e-7,
            xi_min_factor: 1e3,
            xi_max_factor: 1e3,
            x0_factor: 1e-6,
            scan_points: 10_000,
            h_core_rel: 0.01,
        }
    }
}

impl BuildOptions {
    fn rk(&self) -> rk::RkOptions {
        rk::RkOptions {
            rtol: self.ode_rtol,
            atol: self.ode_atol,
            ..rk::RkOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShockFamily {
    OneShock,
    TwoShock,
    Inadmissible,
}

/// Jump data at the reflected shock `xi = xi_s`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShockData {
    pub xi_bar: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    /// Density amplitudes; filled once the density profile is built.
    pub omega_minus: Option<f64>,
    pub omega_plus: Option<f64>,
    pub v_minus: f64,
    pub v_plus: f64,
    pub family: ShockFamily,
}

impl ShockData {
    /// Entropy margins (both positive for an admissible 2-shock):
    /// `U_- - (xi_s - a)` and `(xi_s - a) - U_+`.
    pub fn entropy_margins(&self, a: f64) -> (f64, f64) {
        let c = self.xi_bar - a;
        (self.u_minus - c, c - self.u_plus)
    }
}

/// The assembled piecewise similarity velocity.
#[derive(Debug, Clone)]
pub struct VelocityProfile {
    pub params: SimilarityParams,
    pub cp: CriticalPointData,
    /// Solution through the origin, on [xi_w, -xi_w].
    pub hat: Branch,
    /// Kink solution on [xi_min, xi_w], with the far-field tail attached.
    pub kink: Branch,
    /// Reflected-wave solution on [~xi*, xi_max], with the far-field tail.
    pub tilde: Branch,
    pub u_star: f64,
    pub xi_s: f64,
    pub xi_star: f64,
    pub shock: ShockData,
    /// Number of sign changes of `tilde - H` found by the scan. The paper
    /// only indicates numerically that H is monotone, so multiplicity is
    /// reported rather than assumed.
    pub hugoniot_crossings: usize,
    /// Whether the flow stagnates upstream of the shock (tilde(xi_s) > 0).
    pub stagnation: bool,
}

impl VelocityProfile {
    /// Piecewise evaluation of U(xi): kink for xi <= xi_w, hat for
    /// xi_w <= xi < xi_s, tilde for xi >= xi_s.
    pub fn eval(&self, xi: f64) -> Result<f64> {
        if xi <= self.cp.xi_w {
            self.kink.eval(xi)
        } else if xi < self.xi_s {
            self.hat.eval(xi)
        } else {
            self.tilde.eval(xi)
        }
    }

    pub fn eval_deriv(&self, xi: f64) -> Result<f64> {
        if xi <= self.cp.xi_w {
            self.kink.eval_deriv(xi)
        } else if xi < self.xi_s {
            self.hat.eval_deriv(xi)
        } else {
            self.tilde.eval_deriv(xi)
        }
    }
}

fn guard_slack(a: f64, xi: f64) -> f64 {
    1e-7 * (a + xi.abs())
}

/// Relative size (in |xi_w|) of the node vicinity where the quotient form of
/// the ODE is ill-conditioned; samples there carry cubic-only interpolation
/// data and are excluded from midpoint-residual checks.
const NODE_VICINITY_REL: f64 = 0.02;

/// Mark nodes selected by the predicate as cubic-only.
fn demote_to_cubic(nodes: &mut [Node], pred: impl Fn(&Node) -> bool) {
    for n in nodes.iter_mut() {
        if pred(n) {
            n.d2u = f64::NAN;
        }
    }
}

/// Step cap that tightens toward the critical nodes so the cubic-only
/// segments there stay short.
fn node_aware_cap(xi: f64, node_xis: &[f64], h_core: f64, floor: f64) -> f64 {
    let mut cap = h_core;
    for &nx in node_xis {
        cap = cap.min(0.02 * (xi - nx).abs());
    }
    cap.max(floor)
}

/// Build the hat branch: integrate the velocity ODE out of (0,0) backward to
/// P_w and forward to -P_w, terminating on entry to an eps-disc around each
/// node and connecting to the node exactly.
pub fn build_hat(params: &SimilarityParams, opts: &BuildOptions) -> Result<Branch> {
    let cp = critical_points(params);
    let p = *params;
    let eps_node = opts.eps_node_rel * cp.xi_w.abs();
    let h_core = opts.h_core_rel * cp.xi_w.abs();
    let mut f = |x: f64, y: f64| ode_rhs_u(PhasePoint::new(x, y), &p);
    let slope_node = 1.0 - cp.lambda_minus;

    // Backward leg, between omega (below) and l_+ (above).
    let (a, mu) = (params.a, params.mu);
    let admissible_back = move |xi: f64, u: f64| {
        let s = guard_slack(a, xi);
        u < xi + a + s && u > -mu * xi - s
    };
    let (xi_w, u_w) = (cp.xi_w, cp.u_w);
    let mut stop_back = move |s: &rk::Step| {
        let d2 = (s.x - xi_w) * (s.x - xi_w) + (s.y - u_w) * (s.y - u_w);
        if d2 <= eps_node * eps_node {
            rk::Control::Stop
        } else {
            rk::Control::Continue
        }
    };
    let h_floor = 2.0 * eps_node;
    let back = rk::integrate(
        &mut f,
        0.0,
        0.0,
        cp.xi_w,
        &opts.rk(),
        &|x| node_aware_cap(x, &[xi_w], h_core, h_floor),
        &admissible_back,
        &mut stop_back,
    )
    .map_err(|e| match e {
        Error::StepSizeUnderflow { x } => Error::NodeNotReached { xi: x, u: f64::NAN },
        other => other,
    })?;
    let stopped = back.last().unwrap();
    if (stopped.x - xi_w).hypot(stopped.y - u_w) > 2.0 * eps_node {
        return Err(Error::NodeNotReached {
            xi: stopped.x,
            u: stopped.y,
        });
    }

    // Forward leg, mirror wedge between l_- (below) and omega (above).
    let admissible_fwd = move |xi: f64, u: f64| {
        let s = guard_slack(a, xi);
        u > xi - a - s && u < -mu * xi + s
    };
    let mut stop_fwd = move |s: &rk::Step| {
        let d2 = (s.x + xi_w) * (s.x + xi_w) + (s.y + u_w) * (s.y + u_w);
        if d2 <= eps_node * eps_node {
            rk::Control::Stop
        } else {
            rk::Control::Continue
        }
    };
    let fwd = rk::integrate(
        &mut f,
        0.0,
        0.0,
        -cp.xi_w,
        &opts.rk(),
        &|x| node_aware_cap(x, &[-xi_w], h_core, h_floor),
        &admissible_fwd,
        &mut stop_fwd,
    )
    .map_err(|e| match e {
        Error::StepSizeUnderflow { x } => Error::NodeNotReached { xi: x, u: f64::NAN },
        other => other,
    })?;
    let stopped_f = fwd.last().unwrap();
    if (stopped_f.x + xi_w).hypot(stopped_f.y + u_w) > 2.0 * eps_node {
        return Err(Error::NodeNotReached {
            xi: stopped_f.x,
            u: stopped_f.y,
        });
    }

    let mut nodes = Vec::with_capacity(back.len() + fwd.len() + 2);
    nodes.push(Node {
        xi: cp.xi_w,
        u: cp.u_w,
        du: slope_node,
        d2u: f64::NAN,
    });
    for s in back.iter().skip(1).rev() {
        nodes.push(step_to_node(s, &p)?);
    }
    // the shared origin sample: U'' = 0 exactly by odd symmetry
    nodes.push(Node {
        xi: 0.0,
        u: 0.0,
        du: -p.beta / p.nf(),
        d2u: 0.0,
    });
    for s in fwd.iter().skip(1) {
        nodes.push(step_to_node(s, &p)?);
    }
    nodes.push(Node {
        xi: -cp.xi_w,
        u: -cp.u_w,
        du: slope_node,
        d2u: f64::NAN,
    });
    let vicinity = NODE_VICINITY_REL * cp.xi_w.abs();
    demote_to_cubic(&mut nodes, |n| {
        (n.xi - xi_w).abs() < vicinity || (n.xi + xi_w).abs() < vicinity
    });
    Ok(Branch::new(nodes, None))
}

fn step_to_node(s: &rk::Step, p: &SimilarityParams) -> Result<Node> {
    let d2u = u_second_derivative(PhasePoint::new(s.x, s.y), s.dy, p).unwrap_or(f64::NAN);
    Ok(Node {
        xi: s.x,
        u: s.y,
        du: s.dy,
        d2u,
    })
}

/// Closed form of the upper bound for U* obtained by integrating the
/// comparison inequality from xi = -infinity to xi_w:
///
/// ```text
/// U* < U_w + a^2 m \int_{-inf}^{xi_w} dxi / (xi (xi - (a + U_w)))
///    = U_w + a (m + beta) * ln(1+x)/x,   x = (m + 2 beta)/m,
/// ```
///
/// with the limit value 1 of `ln(1+x)/x` at x = 0 (the case beta = -m/2,
/// where a + U_w = 0 and the integrand degenerates to 1/xi^2).
pub fn ustar_bound(params: &SimilarityParams) -> f64 {
    let cp = critical_points(params);
    let (m, beta, a) = (params.mf(), params.beta, params.a);
    let x = (m + 2.0 * beta) / m;
    let ln1p_over_x = if x.abs() < 1e-14 {
        1.0 - 0.5 * x
    } else {
        x.ln_1p() / x
    };
    cp.u_w + a * (m + beta) * ln1p_over_x
}

/// Build the kink branch: start a node-departure distance eps along
/// -(1, 1-lambda_+) from P_w and integrate down to xi_min. The limit
/// U* = U_k(-inf) is estimated by Richardson extrapolation of
/// `U(xi) + a^2 beta / xi` at xi_min and xi_min/2 against the far-field
/// tail model.
pub fn build_kink(params: &SimilarityParams, opts: &BuildOptions) -> Result<(Branch, f64)> {
    let cp = critical_points(params);
    let p = *params;
    let eps_node = opts.eps_node_rel * cp.xi_w.abs();
    let h_core = opts.h_core_rel * cp.xi_w.abs();
    let xi_min = -opts.xi_min_factor * cp.xi_w.abs();
    let xi0 = cp.xi_w - eps_node;
    let u0 = cp.u_w - eps_node * (1.0 - cp.lambda_plus);

    let (a, mu) = (params.a, params.mu);
    let (xi_w, u_w) = (cp.xi_w, cp.u_w);
    let admissible = move |xi: f64, u: f64| {
        let s = guard_slack(a, xi);
        xi < xi_w + s && u > (-mu * xi - s).max(u_w - s)
    };
    let mut f = |x: f64, y: f64| ode_rhs_u(PhasePoint::new(x, y), &p);
    let steps = rk::integrate(
        &mut f,
        xi0,
        u0,
        xi_min,
        &opts.rk(),
        &|x| node_aware_cap(x, &[xi_w], h_core.max(0.005 * x.abs()), 2.0 * eps_node),
        &admissible,
        &mut |_| rk::Control::Continue,
    )?;

    let mut nodes: Vec<Node> = Vec::with_capacity(steps.len() + 1);
    for s in steps.iter().rev() {
        nodes.push(step_to_node(s, &p)?);
    }
    nodes.push(Node {
        xi: cp.xi_w,
        u: cp.u_w,
        du: 1.0 - cp.lambda_plus,
        d2u: f64::NAN,
    });
    let vicinity = NODE_VICINITY_REL * cp.xi_w.abs();
    demote_to_cubic(&mut nodes, |n| (n.xi - xi_w).abs() < vicinity);
    let mut branch = Branch::new(nodes, None);

    // U* by Richardson extrapolation: E(x) = U(x) + a^2 beta / x removes the
    // O(1/x) tail term; combining x and x/2 removes the O(1/x^2) term too.
    let a2b = params.a * params.a * params.beta;
    let e1 = branch.eval(xi_min)? + a2b / xi_min;
    let e2 = branch.eval(xi_min / 2.0)? + a2b / (xi_min / 2.0);
    let u_star = (4.0 * e1 - e2) / 3.0;
    if !(u_star < 0.0) {
        return Err(Error::AssumptionViolated { u_star });
    }
    branch.tail = Some(far_field_tail(params, u_star, TailSide::Left));
    Ok((branch, u_star))
}

/// Far-field tail of any solution with limit `u_star` at |xi| -> infinity:
/// `U(xi) = U* - a^2 beta / xi - a^2 U* (m + 2 beta) / (2 xi^2) + O(xi^-3)`.
fn far_field_tail(params: &SimilarityParams, u_star: f64, side: TailSide) -> Tail {
    let a2 = params.a * params.a;
    Tail {
        u_star,
        c1: -a2 * params.beta,
        c2: -0.5 * a2 * u_star * (params.mf() + 2.0 * params.beta),
        side,
    }
}

/// Build the tilde branch: start at xi_max on the far-field tail through U*
/// and integrate down; stop when the gap `w = U - xi + a` to the slow sonic
/// line closes to w_stop, and locate xi* from the local square-root model
/// `w^2(xi) = w_t^2 - a N_t (xi - xi_t)`.
pub fn build_tilde(
    params: &SimilarityParams,
    u_star: f64,
    opts: &BuildOptions,
) -> Result<(Branch, f64)> {
    if !(u_star < 0.0) {
        return Err(Error::AssumptionViolated { u_star });
    }
    let cp = critical_points(params);
    let p = *params;
    let h_core = opts.h_core_rel * cp.xi_w.abs();
    let xi_max = opts.xi_max_factor * cp.xi_w.abs();
    let tail = far_field_tail(params, u_star, TailSide::Right);
    let u0 = tail.eval(xi_max);
    let a = params.a;
    let w_stop = 1e-5 * a;

    // Below l_-: w < 0 throughout; refuse crossing.
    let admissible = move |xi: f64, u: f64| u - xi + a < 0.0;
    let mut f = |x: f64, y: f64| ode_rhs_u(PhasePoint::new(x, y), &p);
    let mut stop = move |s: &rk::Step| {
        if s.y - s.x + a >= -w_stop {
            rk::Control::Stop
        } else {
            rk::Control::Continue
        }
    };
    let x_end = 1e-3 * cp.xi_w.abs();
    let steps = rk::integrate(
        &mut f,
        xi_max,
        u0,
        x_end,
        &opts.rk(),
        &|x| h_core.max(0.005 * x.abs()),
        &admissible,
        &mut stop,
    )?;
    let last = *steps.last().unwrap();
    let w_t = last.y - last.x + a;
    if w_t < -10.0 * w_stop {
        // ran to x_end without approaching l_-
        return Err(Error::NoSonicCrossing { hi: -cp.xi_w });
    }
    let n_t = params.beta + params.mf() * last.y / last.x;
    let xi_star = last.x + w_t * w_t / (a * n_t);
    if !(xi_star > 0.0 && xi_star < -cp.xi_w) {
        return Err(Error::NoSonicCrossing { hi: -cp.xi_w });
    }

    let mut nodes: Vec<Node> = Vec::with_capacity(steps.len());
    for s in steps.iter().rev() {
        nodes.push(step_to_node(s, &p)?);
    }
    // near the slow sonic line the slope blows up and the quotient form of
    // the RHS is ill-conditioned; keep those segments cubic
    demote_to_cubic(&mut nodes, |n| (n.u - n.xi + a).abs() < 1e-2 * a);
    let branch = Branch::new(nodes, Some(tail));
    Ok((branch, xi_star))
}

/// Hugoniot locus of the hat solution: states reachable from
/// `U_- = hat(xi)` across a similarity jump at xi,
/// `H(xi) = xi + a^2 / (hat(xi) - xi)` for 0 < xi < -xi_w.
pub fn hugoniot(xi: f64, hat: &Branch, params: &SimilarityParams) -> Result<f64> {
    let cp = critical_points(params);
    if !(xi > 0.0 && xi <= -cp.xi_w) {
        return Err(Error::Domain {
            xi,
            lo: 0.0,
            hi: -cp.xi_w,
        });
    }
    let u = hat.eval(xi)?;
    Ok(xi + params.a * params.a / (u - xi))
}

/// Locate the reflected shock: the intersection of tilde with the Hugoniot
/// locus of hat. A dense sign scan precedes bracketed root refinement, and
/// all crossings are counted; the largest root is returned.
pub fn find_shock(
    hat: &Branch,
    tilde: &Branch,
    params: &SimilarityParams,
    opts: &BuildOptions,
) -> Result<(ShockData, usize)> {
    let cp = critical_points(params);
    let a = params.a;
    let lo = tilde.xi_lo() + 1e-9 * cp.xi_w.abs();
    let hi = -cp.xi_w * (1.0 - 1e-9);
    let mut g = |xi: f64| Ok(tilde.eval(xi)? - hugoniot(xi, hat, params)?);
    let brackets = root::scan_sign_changes(&mut g, lo, hi, opts.scan_points)?;
    if brackets.is_empty() {
        return Err(Error::NoBracket(format!(
            "tilde - H on ({lo}, {hi}): no intersection with the Hugoniot locus"
        )));
    }
    let count = brackets.len();
    let mut xi_s = f64::NEG_INFINITY;
    for (bl, bh) in &brackets {
        let r = root::brent(&mut g, *bl, *bh, opts.root_tol, 200)?;
        xi_s = xi_s.max(r);
    }

    let u_minus = hat.eval(xi_s)?;
    let u_plus = tilde.eval(xi_s)?;
    let v_minus = u_minus - xi_s;
    let v_plus = u_plus - xi_s;
    let family = if u_minus > xi_s - a && xi_s - a > u_plus {
        ShockFamily::TwoShock
    } else if u_minus > xi_s + a && xi_s + a > u_plus {
        ShockFamily::OneShock
    } else {
        ShockFamily::Inadmissible
    };
    if family != ShockFamily::TwoShock {
        return Err(Error::EntropyViolation { xi: xi_s });
    }
    Ok((
        ShockData {
            xi_bar: xi_s,
            u_minus,
            u_plus,
            omega_minus: None,
            omega_plus: None,
            v_minus,
            v_plus,
            family,
        },
        count,
    ))
}

/// Assemble the piecewise velocity profile from its branches.
pub fn assemble_velocity(
    params: &SimilarityParams,
    hat: Branch,
    kink: Branch,
    tilde: Branch,
    u_star: f64,
    xi_star: f64,
    shock: ShockData,
    hugoniot_crossings: usize,
) -> VelocityProfile {
    let stagnation = shock.u_plus > 0.0;
    VelocityProfile {
        params: *params,
        cp: critical_points(params),
        hat,
        kink,
        tilde,
        u_star,
        xi_s: shock.xi_bar,
        xi_star,
        shock,
        hugoniot_crossings,
        stagnation,
    }
}

/// Full velocity construction for one parameter set.
pub fn build_velocity(params: &SimilarityParams, opts: &BuildOptions) -> Result<VelocityProfile> {
    let hat = build_hat(params, opts)?;
    let (kink, u_star) = build_kink(params, opts)?;
    let (tilde, xi_star) = build_tilde(params, u_star, opts)?;
    let (shock, crossings) = find_shock(&hat, &tilde, params, opts)?;
    Ok(assemble_velocity(
        params, hat, kink, tilde, u_star, xi_star, shock, crossings,
    ))
}
