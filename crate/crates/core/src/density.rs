//! Construction of the density amplitude Omega(xi) in four pieces.
//!
//! All Omega integrations are carried out in ln|Omega|, so each piece keeps
//! its sign exactly: the log-density ODE is
//!
//! ```text
//! d ln|Omega| / d xi = F(xi) = -(U(xi) - xi) U'(xi) / a^2,
//! ```
//!
//! driven by an already-built velocity branch. The pieces are anchored as
//! follows: `hat_neg` at the free amplitude `Omega(0-) = Omega_0 < 0`,
//! `kink` at `Omega(xi_w)`, `tilde` (stored as D(x) = Omega(1/x)) at the
//! matching constant `C_+ = -C_-` demanded by continuity of the density
//! across collapse, and `hat_pos` at the Rankine-Hugoniot jump value behind
//! the shock. The far-field behaviour on both sides is
//! `|Omega(xi)| ~ |C| |xi|^beta exp(-gamma/xi)` with
//! `gamma = (m + beta) U*`.

use crate::branch::{Branch, Node, TailSide};
use crate::error::{Error, Result};
use crate::num::{quad, rk};
use crate::similarity::{critical_points, SimilarityParams};
use crate::velocity::{BuildOptions, ShockData, VelocityProfile};

/// One signed density piece, stored as ln|Omega| over a xi-interval.
#[derive(Debug, Clone)]
pub struct OmegaBranch {
    /// +1 or -1; Omega = sign * exp(L).
    pub sign: f64,
    log_abs: Branch,
    pub tail: Option<OmegaTail>,
}

/// Far-field model `|Omega(xi)| = c_abs |xi|^beta exp(-gamma/xi)`, anchored
/// so it is continuous with the sampled branch at the truncation point.
#[derive(Debug, Clone, Copy)]
pub struct OmegaTail {
    pub c_abs: f64,
    pub beta: f64,
    pub gamma: f64,
    pub side: TailSide,
}

impl OmegaTail {
    fn eval_abs(&self, xi: f64) -> f64 {
        self.c_abs * xi.abs().powf(self.beta) * (-self.gamma / xi).exp()
    }
}

impl OmegaBranch {
    pub fn xi_lo(&self) -> f64 {
        self.log_abs.xi_lo()
    }
    pub fn xi_hi(&self) -> f64 {
        self.log_abs.xi_hi()
    }

    pub fn eval(&self, xi: f64) -> Result<f64> {
        if let Some(t) = self.tail {
            let in_tail = match t.side {
                TailSide::Left => xi < self.xi_lo(),
                TailSide::Right => xi > self.xi_hi(),
            };
            if in_tail {
                return Ok(self.sign * t.eval_abs(xi));
            }
        }
        Ok(self.sign * self.log_abs.eval(xi)?.exp())
    }

    /// d ln|Omega| / d xi at xi (interpolated).
    pub fn log_deriv(&self, xi: f64) -> Result<f64> {
        self.log_abs.eval_deriv(xi)
    }

    pub fn nodes(&self) -> &[Node] {
        self.log_abs.nodes()
    }
}

/// The reflected-wave density piece, stored in x = 1/xi as D(x) = Omega(1/x)
/// on [x0, x_s]; below x0 the node model `C_+ x^{-beta} exp(-gamma x)` is
/// used.
#[derive(Debug, Clone)]
pub struct DBranch {
    log_abs: Branch,
    pub c_plus: f64,
    pub gamma: f64,
    pub x0: f64,
    pub x_s: f64,
    pub beta: f64,
}

impl DBranch {
    pub fn eval_x(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Err(Error::Domain {
                xi: x,
                lo: 0.0,
                hi: self.x_s,
            });
        }
        if x < self.x0 {
            return Ok(self.c_plus * x.powf(-self.beta) * (-self.gamma * x).exp());
        }
        Ok(self.log_abs.eval(x.min(self.x_s))?.exp())
    }

    pub fn eval_xi(&self, xi: f64) -> Result<f64> {
        self.eval_x(1.0 / xi)
    }

    pub fn nodes(&self) -> &[Node] {
        self.log_abs.nodes()
    }
}

/// The assembled piecewise density amplitude.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub params: SimilarityParams,
    pub xi_w: f64,
    pub xi_s: f64,
    pub x_s: f64,
    pub hat_neg: OmegaBranch,
    pub kink: OmegaBranch,
    pub tilde: DBranch,
    pub hat_pos: OmegaBranch,
    pub omega0: f64,
    pub omega_w: f64,
    pub c_minus: f64,
    pub c_minus_err: f64,
    pub c_plus: f64,
    pub omega0_prime: f64,
    pub omega_s_minus: f64,
    pub omega_s_plus: f64,
    /// Fitted far-field coefficient of F_k - beta/xi ~ gamma/xi^2.
    pub gamma_fit: f64,
    /// Its closed-form value (m + beta) U*.
    pub gamma_analytic: f64,
}

impl DensityProfile {
    /// Amplitude Omega(xi); the sgn(t)|t|^beta factor is applied by the
    /// flow-field evaluation.
    pub fn omega(&self, xi: f64) -> Result<f64> {
        if xi <= self.xi_w {
            self.kink.eval(xi)
        } else if xi <= 0.0 {
            self.hat_neg.eval(xi)
        } else if xi < self.xi_s {
            self.hat_pos.eval(xi)
        } else {
            self.tilde.eval_xi(xi)
        }
    }

    /// Fault-injection helper: scale the outer (tilde) piece by (1 + eps),
    /// leaving the inner state alone, so the Rankine-Hugoniot relations at
    /// the shock no longer close.
    pub fn with_perturbed_outer(mut self, eps: f64) -> Self {
        let scale = (1.0 + eps).ln();
        let nodes: Vec<Node> = self
            .tilde
            .log_abs
            .nodes()
            .iter()
            .map(|n| Node {
                u: n.u + scale,
                ..*n
            })
            .collect();
        self.tilde.log_abs = Branch::new(nodes, None);
        self.tilde.c_plus *= 1.0 + eps;
        self.omega_s_plus *= 1.0 + eps;
        self
    }
}

/// log-density RHS from a velocity branch: F(xi) = -(U - xi) U' / a^2.
fn log_rhs<'a>(u_branch: &'a Branch, params: &'a SimilarityParams) -> impl Fn(f64) -> Result<f64> + 'a {
    let a2 = params.a * params.a;
    move |xi: f64| {
        let u = u_branch.eval(xi)?;
        let du = u_branch.eval_deriv(xi)?;
        Ok(-(u - xi) * du / a2)
    }
}

/// Integrate d ln|Omega| / d xi = F from x_from to x_to. The integration
/// runs relative to the anchor value (starting from zero) so the adaptive
/// step sequence does not depend on the free amplitude; the anchor is added
/// back afterwards. This keeps Omega_0-scaling exactly linear.
fn integrate_log(
    f: &dyn Fn(f64) -> Result<f64>,
    x_from: f64,
    l_from: f64,
    x_to: f64,
    h_cap: &dyn Fn(f64) -> f64,
    opts: &BuildOptions,
) -> Result<Vec<Node>> {
    let mut rhs = |x: f64, _l: f64| f(x);
    let steps = rk::integrate(
        &mut rhs,
        x_from,
        0.0,
        x_to,
        &rk::RkOptions {
            rtol: opts.ode_rtol,
            atol: opts.ode_atol,
            ..rk::RkOptions::default()
        },
        h_cap,
        &|_, _| true,
        &mut |_| rk::Control::Continue,
    )?;
    let mut nodes: Vec<Node> = steps
        .iter()
        .map(|s| Node {
            xi: s.x,
            u: s.y + l_from,
            du: s.dy,
            d2u: f64::NAN,
        })
        .collect();
    if x_to < x_from {
        nodes.reverse();
    }
    Ok(nodes)
}

/// Solve the log-density ODE on [xi_w, 0] with Omega(0-) = Omega_0 < 0.
pub fn build_hat_neg(
    hat_u: &Branch,
    omega0: f64,
    params: &SimilarityParams,
    opts: &BuildOptions,
) -> Result<OmegaBranch> {
    if !(omega0 < 0.0) {
        return Err(Error::InvalidParams(format!(
            "Omega_0 must be negative, got {omega0}"
        )));
    }
    let cp = critical_points(params);
    let f = log_rhs(hat_u, params);
    let h_core = opts.h_core_rel * cp.xi_w.abs();
    let nodes = integrate_log(&f, 0.0, (-omega0).ln(), cp.xi_w, &|_| h_core, opts)?;
    // Omega < 0 with Omega' >= 0 requires F <= 0 on [xi_w, 0].
    for n in &nodes {
        if n.du > 1e-9 * (1.0 + n.du.abs()) {
            return Err(Error::SignViolation("hat_neg"));
        }
    }
    Ok(OmegaBranch {
        sign: -1.0,
        log_abs: Branch::new(nodes, None),
        tail: None,
    })
}

pub struct KinkTailFit {
    pub gamma: f64,
    pub spread: f64,
    pub exponent: f64,
}

/// Solve the log-density ODE on [xi_min, xi_w] with Omega(xi_w) = Omega_w,
/// and fit the inverse-square envelope of F_k - beta/xi over the last
/// decade of the domain.
pub fn build_kink_omega(
    kink_u: &Branch,
    omega_w: f64,
    params: &SimilarityParams,
    opts: &BuildOptions,
) -> Result<(OmegaBranch, KinkTailFit)> {
    if !(omega_w < 0.0) {
        return Err(Error::InvalidParams(format!(
            "Omega_w must be negative, got {omega_w}"
        )));
    }
    let cp = critical_points(params);
    let xi_min = -opts.xi_min_factor * cp.xi_w.abs();
    let f = log_rhs(kink_u, params);
    let h_core = opts.h_core_rel * cp.xi_w.abs();
    let nodes = integrate_log(
        &f,
        cp.xi_w,
        (-omega_w).ln(),
        xi_min,
        &|x| h_core.max(0.005 * x.abs()),
        opts,
    )?;
    // Omega_k < 0 and decreasing: F_k >= 0 on (-inf, xi_w).
    for n in &nodes {
        if n.du < -1e-9 * (1.0 + n.du.abs()) {
            return Err(Error::SignViolation("kink"));
        }
    }

    // Fit G(eta) = F_k(eta) - beta/eta ~ gamma / eta^2 on [xi_min, xi_min/10].
    let n_fit = 60;
    let mut cs = Vec::with_capacity(n_fit);
    let mut lgs = Vec::with_capacity(n_fit);
    for i in 0..n_fit {
        let s = i as f64 / (n_fit - 1) as f64;
        let eta = xi_min * 10f64.powf(-s);
        let g = f(eta)? - params.beta / eta;
        cs.push(g * eta * eta);
        if g.abs() > 0.0 {
            lgs.push((eta.abs().ln(), g.abs().ln()));
        }
    }
    let gamma = cs.iter().sum::<f64>() / cs.len() as f64;
    let spread = cs
        .iter()
        .map(|c| (c - gamma).abs())
        .fold(0.0f64, f64::max);
    // Log-log regression slope of |G|; must be close to -2.
    let exponent = -regression_slope(&lgs);
    if exponent < 1.7 {
        return Err(Error::TailDivergence {
            what: "F_k - beta/xi",
            fitted: exponent,
        });
    }

    let l_end = nodes[0].u;
    let c_abs = (l_end - params.beta * xi_min.abs().ln() + gamma / xi_min).exp();
    let branch = OmegaBranch {
        sign: -1.0,
        log_abs: Branch::new(nodes, None),
        tail: Some(OmegaTail {
            c_abs,
            beta: params.beta,
            gamma,
            side: TailSide::Left,
        }),
    };
    Ok((
        branch,
        KinkTailFit {
            gamma,
            spread,
            exponent,
        },
    ))
}

fn regression_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[derive(Debug, Clone, Copy)]
pub struct CMinus {
    pub value: f64,
    pub err: f64,
}

/// The matching constant of the kink density piece:
///
/// ```text
/// C_- = (Omega_w / |xi_w|^beta) exp( \int_{-inf}^{xi_w} (beta/eta - F_k) d eta ) < 0,
/// ```
///
/// with the improper integral split at xi_min and the tail bounded by the
/// fitted inverse-square envelope. The returned error bar combines the
/// quadrature estimate with the envelope spread over the truncated tail.
pub fn compute_c_minus(
    kink_u: &Branch,
    omega_w: f64,
    fit: &KinkTailFit,
    params: &SimilarityParams,
    opts: &BuildOptions,
) -> Result<CMinus> {
    let cp = critical_points(params);
    let xi_min = -opts.xi_min_factor * cp.xi_w.abs();
    let f = log_rhs(kink_u, params);
    let mut integrand = |eta: f64| Ok(params.beta / eta - f(eta)?);
    // near part directly; far part in s = 1/eta, where the integrand
    // (beta/eta - F_k)/s^2 ~ -gamma stays bounded and the interval is short
    let split = 16.0 * cp.xi_w;
    let near = quad::adaptive(
        &mut integrand,
        split.max(xi_min),
        cp.xi_w,
        opts.quad_rtol,
        opts.quad_atol,
    )?;
    let far = if xi_min < split {
        let mut g = |s: f64| {
            let eta = 1.0 / s;
            Ok((params.beta / eta - f(eta)?) / (s * s))
        };
        quad::adaptive(&mut g, 1.0 / split, 1.0 / xi_min, opts.quad_rtol, opts.quad_atol)?
    } else {
        quad::QuadResult::default()
    };
    let trunc = quad::QuadResult {
        value: near.value + far.value,
        err: near.err + far.err,
    };
    // beta/eta - F_k ~ -gamma/eta^2, so the tail integral is gamma/xi_min.
    let exponent = trunc.value + fit.gamma / xi_min;
    let c_abs = ((-omega_w) / cp.xi_w.abs().powf(params.beta)) * exponent.exp();
    let err_log = trunc.err + fit.spread / xi_min.abs();
    Ok(CMinus {
        value: -c_abs,
        err: c_abs * err_log.exp_m1().max(err_log),
    })
}

/// Solve the D-form log-density ODE on [x0, x_s], seeded with the node
/// behaviour `D(x0) = C_+ x0^{-beta} exp(-gamma x0)`, `gamma = (m+beta) U*`.
pub fn build_tilde_d(
    tilde_u: &Branch,
    c_plus: f64,
    u_star: f64,
    xi_s: f64,
    params: &SimilarityParams,
    opts: &BuildOptions,
) -> Result<DBranch> {
    if !(c_plus > 0.0) {
        return Err(Error::InvalidParams(format!(
            "C_+ must be positive, got {c_plus}"
        )));
    }
    let x_s = 1.0 / xi_s;
    let x0 = opts.x0_factor * x_s;
    let gamma = (params.mf() + params.beta) * u_star;
    let a2 = params.a * params.a;
    let g = move |x: f64| -> Result<f64> {
        let xi = 1.0 / x;
        let u = tilde_u.eval(xi)?;
        let du = tilde_u.eval_deriv(xi)?;
        Ok((u - xi) * du / (a2 * x * x))
    };
    let l0 = c_plus.ln() - params.beta * x0.ln() - gamma * x0;
    let nodes = integrate_log(&g, x0, l0, x_s, &|x| (0.01 * x).max(1e-10), opts)?;
    for n in &nodes {
        if n.du < -1e-9 * (1.0 + n.du.abs()) {
            return Err(Error::SignViolation("tilde"));
        }
    }
    Ok(DBranch {
        log_abs: Branch::new(nodes, None),
        c_plus,
        gamma,
        x0,
        x_s,
        beta: params.beta,
    })
}

/// Rankine-Hugoniot density jump at the shock: given the outer amplitude,
/// `Omega_- = ((U_+ - xi_s)^2 / a^2) Omega_+`, which exceeds Omega_+ because
/// the shock point lies below the slow sonic line.
pub fn rh_density_jump(shock: &ShockData, omega_plus: f64, params: &SimilarityParams) -> Result<f64> {
    let a2 = params.a * params.a;
    let v2 = shock.v_plus * shock.v_plus;
    if v2 <= a2 {
        return Err(Error::WeakJump);
    }
    Ok(v2 / a2 * omega_plus)
}

/// Solve the log-density ODE on (0, xi_s) backward from the post-shock
/// amplitude; returns the branch and the limit Omega_0' at xi = 0+.
pub fn build_hat_pos(
    hat_u: &Branch,
    omega_s_minus: f64,
    xi_s: f64,
    params: &SimilarityParams,
    opts: &BuildOptions,
) -> Result<(OmegaBranch, f64)> {
    if !(omega_s_minus > 0.0) {
        return Err(Error::InvalidParams(format!(
            "Omega(xi_s-) must be positive, got {omega_s_minus}"
        )));
    }
    let cp = critical_points(params);
    let f = log_rhs(hat_u, params);
    let h_core = opts.h_core_rel * cp.xi_w.abs();
    let nodes = integrate_log(&f, xi_s, omega_s_minus.ln(), 0.0, &|_| h_core, opts)?;
    for n in &nodes {
        if n.du < -1e-9 * (1.0 + n.du.abs()) {
            return Err(Error::SignViolation("hat_pos"));
        }
    }
    let omega0_prime = nodes[0].u.exp();
    Ok((
        OmegaBranch {
            sign: 1.0,
            log_abs: Branch::new(nodes, None),
            tail: None,
        },
        omega0_prime,
    ))
}

/// Build the complete density profile for a constructed velocity profile.
pub fn build_density(
    velocity: &VelocityProfile,
    omega0: f64,
    opts: &BuildOptions,
) -> Result<DensityProfile> {
    let params = velocity.params;
    let cp = velocity.cp;
    let hat_neg = build_hat_neg(&velocity.hat, omega0, &params, opts)?;
    let omega_w = hat_neg.eval(cp.xi_w)?;
    let (kink, fit) = build_kink_omega(&velocity.kink, omega_w, &params, opts)?;
    let c_minus = compute_c_minus(&velocity.kink, omega_w, &fit, &params, opts)?;
    let c_plus = -c_minus.value;
    let tilde = build_tilde_d(
        &velocity.tilde,
        c_plus,
        velocity.u_star,
        velocity.xi_s,
        &params,
        opts,
    )?;
    let omega_s_plus = tilde.eval_x(tilde.x_s)?;
    let omega_s_minus = rh_density_jump(&velocity.shock, omega_s_plus, &params)?;
    let (hat_pos, omega0_prime) = build_hat_pos(&velocity.hat, omega_s_minus, velocity.xi_s, &params, opts)?;
    if !(omega_s_minus > omega_s_plus && omega_s_plus > 0.0) {
        return Err(Error::SignViolation("shock jump ordering"));
    }
    Ok(DensityProfile {
        params,
        xi_w: cp.xi_w,
        xi_s: velocity.xi_s,
        x_s: tilde.x_s,
        hat_neg,
        kink,
        tilde,
        hat_pos,
        omega0,
        omega_w,
        c_minus: c_minus.value,
        c_minus_err: c_minus.err,
        c_plus,
        omega0_prime,
        omega_s_minus,
        omega_s_plus,
        gamma_fit: fit.gamma,
        gamma_analytic: (params.mf() + params.beta) * velocity.u_star,
    })
}
