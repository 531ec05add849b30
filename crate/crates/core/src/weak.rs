//! Numerical certification that the assembled similarity fields form a
//! radial weak solution.
//!
//! Four families of checks:
//!
//! * Rankine-Hugoniot and entropy conditions along the reflected shock,
//!   from the stored jump data and independently from one-sided field
//!   evaluations (the relative residual is t-invariant by similarity);
//! * continuity across collapse of `M(t; r_bar)` and the moments
//!   `I_q(t; r_bar)`, with one-sided limits extrapolated on a dyadic grid
//!   and compared to the closed forms `|C_-| r^{beta+n}/(beta+n)` and
//!   `|C_-||U*|^q r^{beta+n}/(beta+n)`;
//! * decay of the small-radius flux `delta^m \int rho(t, delta) dt`, with
//!   the fitted log-log slope compared against the predicted scaling
//!   `delta^{n+beta}(1 + |log delta|)` (or `1 + delta^{-(beta+1)}`);
//! * quadrature of the weak forms against a battery of compactly supported
//!   test functions, on meshes split along the kink line, the shock line,
//!   and {t=0}, with a graded inner region and divergence-theorem boundary
//!   cross-checks.

use crate::error::{Error, Result};
use crate::flow::SimilaritySolution;
use crate::num::quad;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// test functions
// ---------------------------------------------------------------------------

/// Polynomial bump b(s) = (1 - s^2)^3 on [-1, 1]; C^2 contact at the ends.
fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        q * q * q
    }
}

fn bump_deriv(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        -6.0 * s * q * q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum RadialKind {
    /// full bump on [lo, hi] with lo > 0
    Interior,
    /// half bump g(r) = b(r/hi) on [0, hi]; g(0) = 1
    HalfCover,
    /// (r/hi)^2 b(r/hi) on [0, hi]; vanishes at r = 0 (class C^1_0)
    OriginWeighted,
}

/// Tensor-product test function psi(t, r) = f(t) g(r) with polynomial bump
/// factors; supported on [t_lo, t_hi] x [r_lo, r_hi].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestFunction {
    pub name: String,
    pub t_lo: f64,
    pub t_hi: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    kind: RadialKind,
}

impl TestFunction {
    pub fn interior(name: &str, t_lo: f64, t_hi: f64, r_lo: f64, r_hi: f64) -> Self {
        assert!(r_lo > 0.0 && r_hi > r_lo && t_hi > t_lo);
        Self {
            name: name.into(),
            t_lo,
            t_hi,
            r_lo,
            r_hi,
            kind: RadialKind::Interior,
        }
    }

    pub fn covering_origin(name: &str, t_lo: f64, t_hi: f64, r_hi: f64) -> Self {
        Self {
            name: name.into(),
            t_lo,
            t_hi,
            r_lo: 0.0,
            r_hi,
            kind: RadialKind::HalfCover,
        }
    }

    pub fn origin_weighted(name: &str, t_lo: f64, t_hi: f64, r_hi: f64) -> Self {
        Self {
            name: name.into(),
            t_lo,
            t_hi,
            r_lo: 0.0,
            r_hi,
            kind: RadialKind::OriginWeighted,
        }
    }

    /// Whether psi(t, 0) = 0 for all t (the C^1_0 class; required by the
    /// momentum form).
    pub fn vanishes_at_origin(&self) -> bool {
        match self.kind {
            RadialKind::Interior => true,
            RadialKind::HalfCover => false,
            RadialKind::OriginWeighted => true,
        }
    }

    fn time_factor(&self, t: f64) -> (f64, f64) {
        let c = 0.5 * (self.t_lo + self.t_hi);
        let w = 0.5 * (self.t_hi - self.t_lo);
        let s = (t - c) / w;
        (bump(s), bump_deriv(s) / w)
    }

    fn radial_factor(&self, r: f64) -> (f64, f64) {
        match self.kind {
            RadialKind::Interior => {
                let c = 0.5 * (self.r_lo + self.r_hi);
                let w = 0.5 * (self.r_hi - self.r_lo);
                let s = (r - c) / w;
                (bump(s), bump_deriv(s) / w)
            }
            RadialKind::HalfCover => {
                let s = r / self.r_hi;
                (bump(s), bump_deriv(s) / self.r_hi)
            }
            RadialKind::OriginWeighted => {
                let s = r / self.r_hi;
                let (b, db) = (bump(s), bump_deriv(s));
                (
                    s * s * b,
                    (2.0 * s * b + s * s * db) / self.r_hi,
                )
            }
        }
    }

    pub fn eval(&self, t: f64, r: f64) -> f64 {
        self.time_factor(t).0 * self.radial_factor(r).0
    }

    pub fn d_dt(&self, t: f64, r: f64) -> f64 {
        self.time_factor(t).1 * self.radial_factor(r).0
    }

    pub fn d_dr(&self, t: f64, r: f64) -> f64 {
        self.time_factor(t).0 * self.radial_factor(r).1
    }
}

/// The standard battery: interior-smooth, shock-straddling, kink-straddling,
/// collapse-covering (general and C^1_0), origin-touching, and large-support
/// test functions, sized from the solution geometry.
pub fn standard_battery(sol: &SimilaritySolution, t_span: f64) -> Vec<TestFunction> {
    let xw = sol.cp.xi_w.abs();
    let xs = sol.velocity.xi_s;
    let t = t_span;
    vec![
        TestFunction::interior(
            "interior-smooth",
            -0.9 * t,
            -0.55 * t,
            0.1 * xw,
            0.45 * xw,
        ),
        TestFunction::interior(
            "shock-straddling",
            0.45 * t,
            0.95 * t,
            0.5 * xs * t,
            0.9 * xs * t,
        ),
        TestFunction::interior(
            "kink-straddling",
            -0.95 * t,
            -0.45 * t,
            0.5 * xw * t,
            0.9 * xw * t,
        ),
        TestFunction::covering_origin("collapse-covering", -0.5 * t, 0.5 * t, 0.6 * xw),
        TestFunction::origin_weighted("collapse-covering-c10", -0.5 * t, 0.5 * t, 0.6 * xw),
        TestFunction::origin_weighted("origin-touching-c10", -0.9 * t, -0.2 * t, 0.4 * xw),
        TestFunction::origin_weighted("large-support-c10", -0.95 * t, 0.95 * t, 1.4 * xw),
    ]
}

// ---------------------------------------------------------------------------
// Rankine-Hugoniot / entropy checks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhReport {
    pub tolerance: f64,
    /// relative residual of xi_s [[Omega]] = [[Omega U]]
    pub residual_mass: f64,
    /// relative residual of xi_s [[Omega U]] = [[Omega (U^2 + a^2)]]
    pub residual_momentum: f64,
    /// worst residual over the t-grid from one-sided field evaluations
    pub residual_fields: f64,
    pub per_t: Vec<(f64, f64)>,
    pub entropy_margin_inner: f64,
    pub entropy_margin_outer: f64,
    /// |V_+ V_- - a^2| / a^2
    pub vproduct_gap: f64,
    pub pass: bool,
}

/// Evaluate both jump conditions across r = xi_s t at each t of the grid.
pub fn check_rh(sol: &SimilaritySolution, t_grid: &[f64]) -> Result<RhReport> {
    let s = &sol.velocity.shock;
    let d = &sol.density;
    let a = sol.params.a;
    let a2 = a * a;
    let xi_s = s.xi_bar;
    let (om, op) = (d.omega_s_minus, d.omega_s_plus);
    let (um, up) = (s.u_minus, s.u_plus);

    let scale1 = xi_s.abs() * (om.abs() + op.abs()) + (om * um).abs() + (op * up).abs();
    let r1 = (xi_s * (op - om) - (op * up - om * um)).abs() / scale1;
    let scale2 = xi_s.abs() * ((om * um).abs() + (op * up).abs())
        + (op * (up * up + a2)).abs()
        + (om * (um * um + a2)).abs();
    let r2 = (xi_s * (op * up - om * um) - (op * (up * up + a2) - om * (um * um + a2))).abs()
        / scale2;

    let mut per_t = Vec::with_capacity(t_grid.len());
    let mut worst_fields: f64 = 0.0;
    for &t in t_grid {
        if !(t > 0.0) {
            return Err(Error::InvalidParams(format!(
                "RH t-grid must be positive, got {t}"
            )));
        }
        let r_s = xi_s * t;
        let eps = 1e-8 * r_s;
        let (rho_m, u_m) = sol.evaluate(t, r_s - eps)?;
        let (rho_p, u_p) = sol.evaluate(t, r_s + eps)?;
        let sc1 = xi_s.abs() * (rho_m + rho_p) + (rho_m * u_m).abs() + (rho_p * u_p).abs();
        let f1 = (xi_s * (rho_p - rho_m) - (rho_p * u_p - rho_m * u_m)).abs() / sc1;
        let sc2 = xi_s.abs() * ((rho_m * u_m).abs() + (rho_p * u_p).abs())
            + (rho_p * (u_p * u_p + a2)).abs()
            + (rho_m * (um * um + a2)).abs();
        let f2 = (xi_s * (rho_p * u_p - rho_m * u_m)
            - (rho_p * (u_p * u_p + a2) - rho_m * (u_m * u_m + a2)))
            .abs()
            / sc2;
        let f = f1.max(f2);
        per_t.push((t, f));
        worst_fields = worst_fields.max(f);
    }

    let (margin_inner, margin_outer) = s.entropy_margins(a);
    let vgap = (s.v_plus * s.v_minus - a2).abs() / a2;
    let tolerance = 1e-9;
    let pass = r1 <= tolerance
        && r2 <= tolerance
        && margin_inner > 0.0
        && margin_outer > 0.0
        && vgap <= 1e-10;
    Ok(RhReport {
        tolerance,
        residual_mass: r1,
        residual_momentum: r2,
        residual_fields: worst_fields,
        per_t,
        entropy_margin_inner: margin_inner,
        entropy_margin_outer: margin_outer,
        vproduct_gap: vgap,
        pass,
    })
}

// ---------------------------------------------------------------------------
// continuity across collapse
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub r_bar: f64,
    pub rel_tolerance: f64,
    /// extrapolated one-sided limits and closed forms, per quantity (M, I1, I2)
    pub limits_minus: [f64; 3],
    pub limits_plus: [f64; 3],
    pub closed_forms: [f64; 3],
    pub gaps: [f64; 3],
    pub error_bars: [f64; 3],
    pub max_closed_rel_dev: f64,
    pub pass: bool,
}

/// Richardson extrapolation of g(t) -> g(0) on the dyadic tail t_k = t0 2^-k:
/// removes O(t) and O(t^2); returns (limit, residual estimate).
fn dyadic_limit(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!(n >= 3);
    let r1a = 2.0 * values[n - 2] - values[n - 3];
    let r1b = 2.0 * values[n - 1] - values[n - 2];
    let r2 = (4.0 * r1b - r1a) / 3.0;
    (r2, (r2 - r1b).abs())
}

pub fn check_continuity(sol: &SimilaritySolution, r_bar: f64) -> Result<ContinuityReport> {
    let p = &sol.params;
    let bn = p.beta + p.nf();
    let c_abs = sol.density.c_minus.abs();
    let ustar = sol.velocity.u_star.abs();
    let closed = [
        c_abs * r_bar.powf(bn) / bn,
        c_abs * ustar * r_bar.powf(bn) / bn,
        c_abs * ustar * ustar * r_bar.powf(bn) / bn,
    ];

    let ks: Vec<i32> = (4..=11).collect();
    let mut limits_minus = [0.0; 3];
    let mut limits_plus = [0.0; 3];
    let mut bars = [0.0; 3];
    for (qi, q) in [0u32, 1, 2].into_iter().enumerate() {
        let mut vm = Vec::new();
        let mut vp = Vec::new();
        let mut qerr: f64 = 0.0;
        for &k in &ks {
            let t = 2f64.powi(-k);
            let m = sol.weighted(qi, q, -t, r_bar)?;
            let pl = sol.weighted(qi, q, t, r_bar)?;
            vm.push(m.value);
            vp.push(pl.value);
            qerr = qerr.max(m.err).max(pl.err);
        }
        let (lm, em) = dyadic_limit(&vm);
        let (lp, ep) = dyadic_limit(&vp);
        limits_minus[qi] = lm;
        limits_plus[qi] = lp;
        // combined bar: extrapolation residuals + quadrature + C_- error bar
        bars[qi] = em + ep + 2.0 * qerr + sol.density.c_minus_err / c_abs * closed[qi];
    }
    let gaps = [
        (limits_minus[0] - limits_plus[0]).abs(),
        (limits_minus[1] - limits_plus[1]).abs(),
        (limits_minus[2] - limits_plus[2]).abs(),
    ];
    let mut max_rel: f64 = 0.0;
    for i in 0..3 {
        max_rel = max_rel
            .max((limits_minus[i] - closed[i]).abs() / closed[i])
            .max((limits_plus[i] - closed[i]).abs() / closed[i]);
    }
    let rel_tolerance = 1e-5;
    let pass = (0..3).all(|i| gaps[i] <= bars[i].max(1e-12 * closed[i])) && max_rel <= rel_tolerance;
    Ok(ContinuityReport {
        r_bar,
        rel_tolerance,
        limits_minus,
        limits_plus,
        closed_forms: closed,
        gaps,
        error_bars: bars,
        max_closed_rel_dev: max_rel,
        pass,
    })
}

impl SimilaritySolution {
    fn weighted(&self, _qi: usize, q: u32, t: f64, r_bar: f64) -> Result<quad::QuadResult> {
        if q == 0 {
            self.mass_integral(t, r_bar)
        } else {
            self.moment_integral(t, r_bar, q)
        }
    }
}

// ---------------------------------------------------------------------------
// flux decay
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FluxReport {
    pub t_span: f64,
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    /// pairwise log-log slopes between consecutive deltas
    pub slopes: Vec<f64>,
    /// slopes of the predicted bound over the same pairs
    pub model_slopes: Vec<f64>,
    pub max_rel_slope_dev_last4: f64,
    pub slope_tolerance: f64,
    pub decays: bool,
    pub pass: bool,
}

/// delta^m \int_{-T}^{T} rho(t, delta) dt via the similarity substitution:
/// the integral equals delta^{n+beta} times four xi-integrals whose only
/// delta-dependence sits in the endpoints ±delta/T.
pub fn flux_at(sol: &SimilaritySolution, t_span: f64, delta: f64) -> Result<f64> {
    let p = &sol.params;
    let d = &sol.density;
    let v = &sol.velocity;
    let beta = p.beta;
    let rtol = sol.opts.quad_rtol.max(1e-12);
    let atol = sol.opts.quad_atol;
    let xi_w = sol.cp.xi_w;
    let xi_s = v.xi_s;
    let pow = -beta - 2.0;

    let mut total = 0.0;
    // negative side: xi in (-inf, -delta/T]
    let edge_n = -delta / t_span;
    let kink_lo = v.kink.xi_lo();
    {
        let mut f = |xi: f64| Ok(d.omega(xi)?.abs() * xi.abs().powf(pow));
        if edge_n > xi_w {
            total += quad::adaptive(&mut f, xi_w, edge_n, rtol, atol)?.value;
        }
        let cut = edge_n.min(xi_w);
        if cut > kink_lo {
            total += quad::adaptive(&mut f, kink_lo, cut, rtol, atol)?.value;
        }
        // far tail in s = 1/xi: the integrand |Omega(1/s)| |1/s|^{-beta-2} / s^2
        // tends to the bounded limit |C_-| e^{-gamma s} as s -> 0.
        let tail_cut = cut.min(kink_lo);
        let mut tail = |s: f64| {
            let xi = 1.0 / s;
            Ok(d.omega(xi)?.abs() * xi.abs().powf(pow) / (s * s))
        };
        total += quad::adaptive(&mut tail, 1.0 / tail_cut, 0.0, rtol, atol)?.value;
    }
    // positive side: xi in [delta/T, inf)
    let edge_p = delta / t_span;
    {
        let mut f = |xi: f64| Ok(d.omega(xi)?.abs() * xi.powf(pow));
        if edge_p < xi_s {
            total += quad::adaptive(&mut f, edge_p, xi_s, rtol, atol)?.value;
        }
        // tilde piece in x = 1/xi: \int_{xi_s}^{inf} Omega xi^{-beta-2} dxi
        //   = \int_0^{x_s} D(x) x^{beta} dx, bounded near x = 0.
        let x_hi = 1.0 / edge_p.max(xi_s);
        let mut g = |x: f64| Ok(d.tilde.eval_x(x)? * x.powf(beta));
        total += quad::adaptive(&mut g, 0.0, x_hi, rtol, atol)?.value;
    }
    Ok(delta.powf(p.nf() + beta) * total)
}

fn flux_model(beta: f64, nf: f64, delta: f64) -> f64 {
    if (beta + 1.0).abs() < 1e-12 {
        delta.powf(nf + beta) * (1.0 + delta.ln().abs())
    } else {
        delta.powf(nf + beta) * (1.0 + delta.powf(-(beta + 1.0)))
    }
}

pub fn check_flux(sol: &SimilaritySolution, t_span: f64, j_max: i32) -> Result<FluxReport> {
    let p = &sol.params;
    let mut deltas = Vec::new();
    let mut values = Vec::new();
    for j in 1..=j_max {
        let delta = 2f64.powi(-j);
        deltas.push(delta);
        values.push(flux_at(sol, t_span, delta)?);
    }
    let mut slopes = Vec::new();
    let mut model_slopes = Vec::new();
    for i in 0..values.len() - 1 {
        let s = (values[i] / values[i + 1]).ln() / (deltas[i] / deltas[i + 1]).ln();
        slopes.push(s);
        let m = (flux_model(p.beta, p.nf(), deltas[i]) / flux_model(p.beta, p.nf(), deltas[i + 1]))
            .ln()
            / (deltas[i] / deltas[i + 1]).ln();
        model_slopes.push(m);
    }
    let n = slopes.len();
    let mut max_dev: f64 = 0.0;
    for i in n.saturating_sub(4)..n {
        max_dev = max_dev.max((slopes[i] - model_slopes[i]).abs() / model_slopes[i].abs());
    }
    let decays = values.windows(2).all(|w| w[1] < w[0]) && values.iter().all(|v| *v > 0.0);
    let slope_tolerance = 0.10;
    let pass = decays && max_dev <= slope_tolerance;
    Ok(FluxReport {
        t_span,
        deltas,
        values,
        slopes,
        model_slopes,
        max_rel_slope_dev_last4: max_dev,
        slope_tolerance,
        decays,
        pass,
    })
}

// ---------------------------------------------------------------------------
// weak forms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeakForm {
    Mass,
    Momentum,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeakResidual {
    pub level: usize,
    /// the full space-time integral M(psi) or I(psi)
    pub value: f64,
    /// analytic bound on the untouched inner tail, added to |value| when
    /// reporting, so refinement strictly tightens the residual
    pub tail_bound: f64,
    /// integral of the absolute values of the integrand terms
    pub scale: f64,
    /// divergence-theorem cross-check at delta = 2^-level:
    /// |quadrature over r > delta + boundary flux term|
    pub identity_gap: f64,
    pub delta: f64,
}

impl WeakResidual {
    pub fn reported(&self) -> f64 {
        self.value.abs() + self.tail_bound
    }
}

struct FormIntegrand<'a> {
    sol: &'a SimilaritySolution,
    psi: &'a TestFunction,
    form: WeakForm,
}

impl FormIntegrand<'_> {
    /// (signed integrand, absolute scale integrand) at (t, r), including r^m.
    fn eval(&self, t: f64, r: f64) -> Result<(f64, f64)> {
        let (rho, u) = self.sol.evaluate(t, r)?;
        let rm = r.powi(self.sol.params.m as i32);
        let psi_t = self.psi.d_dt(t, r);
        let psi_r = self.psi.d_dr(t, r);
        match self.form {
            WeakForm::Mass => {
                let a = rho * psi_t;
                let b = rho * u * psi_r;
                Ok(((a + b) * rm, (a.abs() + b.abs()) * rm))
            }
            WeakForm::Momentum => {
                let a2 = self.sol.params.a * self.sol.params.a;
                let p = a2 * rho;
                let psi = self.psi.eval(t, r);
                let t1 = rho * u * psi_t;
                let t2 = rho * u * u * psi_r;
                let t3 = p * (psi_r + self.sol.params.mf() * psi / r);
                Ok((
                    (t1 + t2 + t3) * rm,
                    (t1.abs() + t2.abs() + t3.abs()) * rm,
                ))
            }
        }
    }

    /// Inner t-integral at fixed r over the psi support, split at the kink
    /// line, {t = 0}, and the shock line; fixed-order Gauss-Legendre per
    /// smooth piece.
    fn inner(&self, r: f64, order: usize) -> Result<(f64, f64)> {
        let xi_w = self.sol.cp.xi_w;
        let xi_s = self.sol.velocity.xi_s;
        let mut cuts = vec![self.psi.t_lo, self.psi.t_hi];
        for c in [r / xi_w, 0.0, r / xi_s] {
            if c > self.psi.t_lo && c < self.psi.t_hi {
                cuts.push(c);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let (xs, ws) = quad::gauss_legendre(order);
        let mut value = 0.0;
        let mut scale = 0.0;
        for w in cuts.windows(2) {
            let c = 0.5 * (w[0] + w[1]);
            let h = 0.5 * (w[1] - w[0]);
            for (x, wt) in xs.iter().zip(ws.iter()) {
                let (v, s) = self.eval(c + h * x, r)?;
                value += wt * h * v;
                scale += wt * h * s;
            }
        }
        Ok((value, scale))
    }

    /// Outer r-integral over [r_lo, r_hi] with n_bands uniform bands and
    /// breaks where the wave lines enter or leave the t-support.
    fn outer(&self, r_lo: f64, r_hi: f64, n_bands: usize, order: usize) -> Result<(f64, f64)> {
        if r_hi <= r_lo {
            return Ok((0.0, 0.0));
        }
        let xi_w = self.sol.cp.xi_w;
        let xi_s = self.sol.velocity.xi_s;
        let mut edges = vec![r_lo, r_hi];
        for c in [
            xi_w * self.psi.t_lo,
            xi_w * self.psi.t_hi,
            xi_s * self.psi.t_lo,
            xi_s * self.psi.t_hi,
        ] {
            if c > r_lo && c < r_hi {
                edges.push(c);
            }
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let (xs, ws) = quad::gauss_legendre(order);
        let mut value = 0.0;
        let mut scale = 0.0;
        for seg in edges.windows(2) {
            let bands = (n_bands as f64 * (seg[1] - seg[0]) / (r_hi - r_lo)).ceil() as usize;
            let bands = bands.max(1);
            for b in 0..bands {
                let lo = seg[0] + (seg[1] - seg[0]) * b as f64 / bands as f64;
                let hi = seg[0] + (seg[1] - seg[0]) * (b + 1) as f64 / bands as f64;
                let c = 0.5 * (lo + hi);
                let h = 0.5 * (hi - lo);
                for (x, wt) in xs.iter().zip(ws.iter()) {
                    let r = c + h * x;
                    let (v, s) = self.inner(r, order)?;
                    value += wt * h * v;
                    scale += wt * h * s;
                }
            }
        }
        Ok((value, scale))
    }
}

/// Evaluate one weak-form residual at the given refinement level.
///
/// The full space-time integral is computed as an iterated integral with a
/// geometrically graded inner region (depth grows with the level); the
/// untouched tail below the finest band is bounded analytically via the
/// r^{m+beta} envelope of the integrand and included in the reported
/// residual. The divergence-theorem identity over {r > delta} is evaluated
/// as a cross-check with delta = 2^-level.
pub fn weak_residual(
    sol: &SimilaritySolution,
    psi: &TestFunction,
    form: WeakForm,
    level: usize,
) -> Result<WeakResidual> {
    if form == WeakForm::Momentum && !psi.vanishes_at_origin() {
        return Err(Error::ClassViolation);
    }
    let fi = FormIntegrand { sol, psi, form };
    let order = 2 * level + 2;
    let n_bands = 3 * (1usize << level);
    let grade_depth = 5 * level;

    let (mut value, mut scale) = (0.0, 0.0);
    let mut tail_bound = 0.0;
    if psi.r_lo > 0.0 {
        let (v, s) = fi.outer(psi.r_lo, psi.r_hi, n_bands, order)?;
        value = v;
        scale = s;
    } else {
        // graded bands below r_hi/8 down to r_hi/8/2^depth, uniform above
        let r_mid = psi.r_hi / 8.0;
        let (v, s) = fi.outer(r_mid, psi.r_hi, n_bands, order)?;
        value += v;
        scale += s;
        let mut hi = r_mid;
        for _ in 0..grade_depth {
            let lo = 0.5 * hi;
            let (v, s) = fi.outer(lo, hi, 1, order)?;
            value += v;
            scale += s;
            hi = lo;
        }
        // integrand envelope K r^{m+beta} on the rest
        let p = &sol.params;
        let pow = p.mf() + p.beta;
        let mut k_est: f64 = 0.0;
        for f in [0.3, 0.7] {
            let r = hi * f;
            let (_, s) = fi.inner(r, order)?;
            k_est = k_est.max(s / r.powf(pow));
        }
        tail_bound = 1.5 * k_est * hi.powf(pow + 1.0) / (pow + 1.0);
    }

    // divergence-theorem identity on {r > delta}
    let delta = 2f64.powi(-(level as i32));
    let identity_gap = if delta < psi.r_hi {
        let (outer_v, _) = if delta <= psi.r_lo {
            (value, scale)
        } else {
            fi.outer(psi.r_lo.max(delta), psi.r_hi, n_bands, order)?
        };
        let boundary = boundary_flux_term(sol, psi, form, delta, order)?;
        (outer_v + boundary).abs()
    } else {
        0.0
    };

    Ok(WeakResidual {
        level,
        value,
        tail_bound,
        scale,
        identity_gap,
        delta,
    })
}

/// The boundary term of the divergence-theorem identities:
/// `delta^m \int (rho u psi)(t, delta) dt` for the mass form,
/// `delta^m \int ((rho u^2 + p) psi)(t, delta) dt` for the momentum form.
fn boundary_flux_term(
    sol: &SimilaritySolution,
    psi: &TestFunction,
    form: WeakForm,
    delta: f64,
    order: usize,
) -> Result<f64> {
    let xi_w = sol.cp.xi_w;
    let xi_s = sol.velocity.xi_s;
    let mut cuts = vec![psi.t_lo, psi.t_hi];
    for c in [delta / xi_w, 0.0, delta / xi_s] {
        if c > psi.t_lo && c < psi.t_hi {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let (xs, ws) = quad::gauss_legendre(order.max(10));
    let dm = delta.powi(sol.params.m as i32);
    let a2 = sol.params.a * sol.params.a;
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let c = 0.5 * (w[0] + w[1]);
        let h = 0.5 * (w[1] - w[0]);
        for (x, wt) in xs.iter().zip(ws.iter()) {
            let t = c + h * x;
            let (rho, u) = sol.evaluate(t, delta)?;
            let p = psi.eval(t, delta);
            let flux = match form {
                WeakForm::Mass => rho * u * p,
                WeakForm::Momentum => (rho * u * u + a2 * rho) * p,
            };
            acc += wt * h * flux;
        }
    }
    Ok(dm * acc)
}

// ---------------------------------------------------------------------------
// orchestration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationConfig {
    /// half-width of the time window used by the RH, flux, and weak checks
    pub t_span: f64,
    pub r_bar: f64,
    pub flux_j_max: i32,
    pub weak_levels: Vec<usize>,
    /// relative residual allowed at the finest weak level, times the scale
    pub weak_rel_tol: f64,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        Self {
            t_span: 1.0,
            r_bar: 1.0,
            flux_j_max: 12,
            weak_levels: vec![3, 4, 5, 6],
            weak_rel_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeakEntry {
    pub psi: String,
    pub form: WeakForm,
    pub levels: Vec<usize>,
    pub residuals: Vec<f64>,
    pub scales: Vec<f64>,
    pub identity_gaps: Vec<f64>,
    pub rel_final: f64,
    pub tolerance: f64,
    pub non_increasing: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub rh: RhReport,
    pub continuity: ContinuityReport,
    pub flux: FluxReport,
    pub weak: Vec<WeakEntry>,
    pub pass: bool,
}

/// Run every check and collect a structured report.
pub fn verify(sol: &SimilaritySolution, cfg: &VerificationConfig) -> Result<VerificationReport> {
    let t_grid: Vec<f64> = [0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|f| f * cfg.t_span)
        .collect();
    let rh = check_rh(sol, &t_grid)?;
    let continuity = check_continuity(sol, cfg.r_bar)?;
    let flux = check_flux(sol, cfg.t_span, cfg.flux_j_max)?;

    let battery = standard_battery(sol, cfg.t_span);
    let mut weak = Vec::new();
    for psi in &battery {
        for form in [WeakForm::Mass, WeakForm::Momentum] {
            if form == WeakForm::Momentum && !psi.vanishes_at_origin() {
                continue;
            }
            let mut residuals = Vec::new();
            let mut scales = Vec::new();
            let mut gaps = Vec::new();
            for &level in &cfg.weak_levels {
                let r = weak_residual(sol, psi, form, level)?;
                residuals.push(r.reported());
                scales.push(r.scale);
                gaps.push(r.identity_gap);
            }
            let scale_final = *scales.last().unwrap();
            let rel_final = residuals.last().unwrap() / scale_final;
            // refinement must shrink the residual overall; individual steps
            // may jitter once the field-interpolation plateau is reached
            let non_increasing =
                *residuals.last().unwrap() <= 0.5 * residuals[0] + 1e-10 * scale_final;
            // shock-straddling psi: the weak residual reduces to the jump
            // defect of the evaluated fields, so it must stay within 10x the
            // field-route RH residual
            let mut tolerance = cfg.weak_rel_tol;
            if psi.name == "shock-straddling" {
                tolerance = tolerance.min((10.0 * rh.residual_fields).max(1e-10));
            }
            let pass = rel_final <= tolerance && non_increasing;
            weak.push(WeakEntry {
                psi: psi.name.clone(),
                form,
                levels: cfg.weak_levels.clone(),
                residuals,
                scales,
                identity_gaps: gaps,
                rel_final,
                tolerance,
                non_increasing,
                pass,
            });
        }
    }

    let pass = rh.pass && continuity.pass && flux.pass && weak.iter().all(|w| w.pass);
    Ok(VerificationReport {
        schema: "isoflow-verification/1".into(),
        rh,
        continuity,
        flux,
        weak,
        pass,
    })
}

impl VerificationReport {
    /// Human-readable summary table.
    pub fn summary(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let mark = |p: bool| if p { "pass" } else { "FAIL" };
        writeln!(s, "{:<42} {:>12}  result", "check", "value").unwrap();
        writeln!(
            s,
            "{:<42} {:>12.3e}  {}",
            "rankine-hugoniot max residual",
            self.rh.residual_mass.max(self.rh.residual_momentum),
            mark(self.rh.pass)
        )
        .unwrap();
        writeln!(
            s,
            "{:<42} {:>12.3e}  (inner) / {:.3e} (outer)",
            "entropy margins", self.rh.entropy_margin_inner, self.rh.entropy_margin_outer
        )
        .unwrap();
        writeln!(
            s,
            "{:<42} {:>12.3e}  {}",
            "continuity max rel deviation",
            self.continuity.max_closed_rel_dev,
            mark(self.continuity.pass)
        )
        .unwrap();
        writeln!(
            s,
            "{:<42} {:>12.3e}  {}",
            "flux slope deviation (last 4)",
            self.flux.max_rel_slope_dev_last4,
            mark(self.flux.pass)
        )
        .unwrap();
        for w in &self.weak {
            writeln!(
                s,
                "{:<42} {:>12.3e}  {}",
                format!("weak {:?} [{}]", w.form, w.psi),
                w.rel_final,
                mark(w.pass)
            )
            .unwrap();
        }
        writeln!(s, "overall: {}", mark(self.pass)).unwrap();
        s
    }
}
