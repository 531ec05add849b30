//! Parameters, similarity ODEs, sonic-line geometry, and critical points for
//! radial isothermal similarity flow.
//!
//! With the similarity ansatz `rho = sgn(t)|t|^beta Omega(xi)`, `u = U(xi)`,
//! `xi = r/t`, the isothermal Euler system reduces to
//!
//! ```text
//! U'      = a^2 (beta + m U / xi) / ((U - xi)^2 - a^2)
//! ln|Omega|' = -(U - xi) U' / a^2
//! ```
//!
//! The velocity ODE has critical points at the origin and at
//! `±P_w = ±(xi_w, U_w)`, the intersections of the sonic lines
//! `l_± = {U = xi ± a}` with the zero-numerator line
//! `omega = {beta + m U / xi = 0}`. Everything downstream (branch
//! construction, shock fitting, density amplitudes) consumes the data
//! assembled here.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default relative band for "on the line" classifications.
pub const DEFAULT_BAND_TOL: f64 = 1e-12;

/// Problem parameters for one similarity flow.
///
/// `m` is the geometry exponent (1 = cylindrical, 2 = spherical), `n = m + 1`
/// the spatial dimension, `beta` the similarity exponent with
/// `-m < beta < 0`, and `a > 0` the isothermal sound speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityParams {
    pub m: u32,
    pub n: u32,
    pub beta: f64,
    pub a: f64,
    /// mu = beta / m, always in (-1, 0).
    pub mu: f64,
}

impl SimilarityParams {
    pub fn new(m: u32, beta: f64, a: f64) -> Result<Self> {
        if m != 1 && m != 2 {
            return Err(Error::InvalidParams(format!(
                "m must be 1 or 2, got {m} (other cases are rejected rather than guessed)"
            )));
        }
        let mf = m as f64;
        if !beta.is_finite() || beta <= -mf || beta >= 0.0 {
            return Err(Error::InvalidParams(format!(
                "beta out of (-{m}, 0): {beta}"
            )));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParams(format!("a must be positive, got {a}")));
        }
        let p = Self {
            m,
            n: m + 1,
            beta,
            a,
            mu: beta / mf,
        };
        debug_assert!(p.beta + mf > 0.0 && p.beta + p.n as f64 > 0.0);
        Ok(p)
    }

    #[inline]
    pub fn mf(&self) -> f64 {
        self.m as f64
    }

    #[inline]
    pub fn nf(&self) -> f64 {
        self.n as f64
    }
}

/// A point in the (xi, U) phase plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub xi: f64,
    pub u: f64,
}

impl PhasePoint {
    pub fn new(xi: f64, u: f64) -> Self {
        Self { xi, u }
    }
}

/// Critical point P_w with the linearization data of the velocity ODE.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticalPointData {
    pub xi_w: f64,
    pub u_w: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Departure direction (1, 1 - lambda_+): the kink solution leaves along it.
    pub dir_plus: (f64, f64),
    /// Departure direction (1, 1 - lambda_-): all other solutions leave along it.
    pub dir_minus: (f64, f64),
}

/// Closed forms for P_w and the eigenvalues of the linearization.
pub fn critical_points(p: &SimilarityParams) -> CriticalPointData {
    let (m, beta, a, mu) = (p.mf(), p.beta, p.a, p.mu);
    let xi_w = -a * m / (m + beta);
    let u_w = a * beta / (m + beta);
    let half_trace = 1.0 + 0.5 * m * (1.0 + mu);
    let radicand = half_trace * half_trace - 2.0 * m * (1.0 + mu) * (1.0 + mu);
    debug_assert!(radicand > 0.0);
    let root = radicand.sqrt();
    let lambda_plus = 0.5 * (half_trace + root);
    let lambda_minus = 0.5 * (half_trace - root);
    CriticalPointData {
        xi_w,
        u_w,
        lambda_plus,
        lambda_minus,
        dir_plus: (1.0, 1.0 - lambda_plus),
        dir_minus: (1.0, 1.0 - lambda_minus),
    }
}

/// Right-hand side of the similarity velocity ODE.
///
/// At the origin the unique solution through (0,0) has slope `-beta/n`; that
/// limiting value is returned so integrations can be anchored there. Any
/// other point on {xi = 0} is an error, as is a vanishing denominator away
/// from a critical point.
pub fn ode_rhs_u(pt: PhasePoint, p: &SimilarityParams) -> Result<f64> {
    let (xi, u) = (pt.xi, pt.u);
    let a2 = p.a * p.a;
    if xi == 0.0 {
        if u == 0.0 {
            return Ok(-p.beta / p.nf());
        }
        return Err(Error::OriginIndeterminate { u });
    }
    let num = p.beta + p.mf() * u / xi;
    let w = u - xi;
    let den = w * w - a2;
    let den_scale = w * w + a2;
    let num_scale = p.beta.abs() + (p.mf() * u / xi).abs() + 1.0;
    if den.abs() <= DEFAULT_BAND_TOL * den_scale {
        if num.abs() <= DEFAULT_BAND_TOL * num_scale {
            return Err(Error::AtCriticalPoint { xi, u });
        }
        return Err(Error::SonicSingularity { xi, u });
    }
    Ok(a2 * num / den)
}

/// Right-hand side of the log-density ODE, `d ln|Omega| / d xi`, given the
/// velocity slope `du` at the same point.
pub fn ode_rhs_log_omega(pt: PhasePoint, du: f64, p: &SimilarityParams) -> f64 {
    -(pt.u - pt.xi) * du / (p.a * p.a)
}

/// Partial derivatives (f_xi, f_u) of the velocity RHS; used for the quintic
/// interpolation data stored on branches.
pub fn ode_rhs_u_partials(pt: PhasePoint, p: &SimilarityParams) -> Result<(f64, f64)> {
    let (xi, u) = (pt.xi, pt.u);
    if xi == 0.0 {
        return Err(Error::OriginIndeterminate { u });
    }
    let a2 = p.a * p.a;
    let m = p.mf();
    let num = p.beta + m * u / xi;
    let w = u - xi;
    let den = w * w - a2;
    if den.abs() <= DEFAULT_BAND_TOL * (w * w + a2) {
        return Err(Error::SonicSingularity { xi, u });
    }
    let f_u = a2 * ((m / xi) * den - num * 2.0 * w) / (den * den);
    let f_xi = a2 * ((-m * u / (xi * xi)) * den + num * 2.0 * w) / (den * den);
    Ok((f_xi, f_u))
}

/// Second derivative of U along a solution through `pt` with slope `du`.
pub fn u_second_derivative(pt: PhasePoint, du: f64, p: &SimilarityParams) -> Result<f64> {
    if pt.xi == 0.0 && pt.u == 0.0 {
        // The solution through the origin is odd in xi.
        return Ok(0.0);
    }
    let (f_xi, f_u) = ode_rhs_u_partials(pt, p)?;
    Ok(f_xi + f_u * du)
}

/// Sign of a quantity relative to a tolerance band: -1, 0 (inside band), +1.
fn banded_sign(value: f64, scale: f64, band_tol: f64) -> i8 {
    if value.abs() <= band_tol * scale {
        0
    } else if value > 0.0 {
        1
    } else {
        -1
    }
}

/// Location of a phase point relative to the sonic lines l_± and the
/// zero-numerator line omega, plus membership in the region U
/// (left of P_w, above omega) used by the kink construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionInfo {
    /// sign of U - xi - a (0 = on l_+)
    pub sig_l_plus: i8,
    /// sign of U - xi + a (0 = on l_-)
    pub sig_l_minus: i8,
    /// sign of beta + m U / xi (0 = on omega)
    pub sig_omega: i8,
    pub in_u_region: bool,
}

pub fn classify_region(pt: PhasePoint, p: &SimilarityParams, band_tol: f64) -> RegionInfo {
    let (xi, u) = (pt.xi, pt.u);
    assert!(xi != 0.0, "classification requires xi != 0");
    let scale_l = u.abs() + xi.abs() + p.a;
    let omega_val = p.beta + p.mf() * u / xi;
    let scale_o = p.beta.abs() + (p.mf() * u / xi).abs() + 1.0;
    let cp = critical_points(p);
    RegionInfo {
        sig_l_plus: banded_sign(u - xi - p.a, scale_l, band_tol),
        sig_l_minus: banded_sign(u - xi + p.a, scale_l, band_tol),
        sig_omega: banded_sign(omega_val, scale_o, band_tol),
        in_u_region: xi < cp.xi_w && u > -p.mu * xi,
    }
}

/// Phase-plane symmetry of the velocity ODE: (xi, U) -> (-xi, -U).
pub fn mirror(samples: &[PhasePoint]) -> Vec<PhasePoint> {
    samples
        .iter()
        .map(|s| PhasePoint::new(-s.xi, -s.u))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: u32, beta: f64) -> SimilarityParams {
        SimilarityParams::new(m, beta, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SimilarityParams::new(3, -1.0, 1.0).is_err());
        assert!(SimilarityParams::new(2, -2.5, 1.0).is_err());
        assert!(SimilarityParams::new(2, 0.0, 1.0).is_err());
        assert!(SimilarityParams::new(2, -2.0, 1.0).is_err());
        assert!(SimilarityParams::new(2, -1.0, 0.0).is_err());
        assert!(SimilarityParams::new(2, -1.0, -1.0).is_err());
    }

    #[test]
    fn critical_point_closed_forms_m2() {
        let cp = critical_points(&params(2, -1.0));
        assert_eq!(cp.xi_w, -2.0);
        assert_eq!(cp.u_w, -1.0);
        // direct substitution into the eigenvalue formula
        assert!((cp.lambda_plus - 1.3090169943749475).abs() < 1e-12);
        assert!((cp.lambda_minus - 0.19098300562505255).abs() < 1e-12);
    }

    #[test]
    fn critical_point_closed_forms_m1() {
        let cp = critical_points(&params(1, -0.5));
        assert_eq!(cp.xi_w, -2.0);
        assert_eq!(cp.u_w, -1.0);
        assert!((cp.lambda_plus - 1.1403882032022076).abs() < 1e-6);
        assert!((cp.lambda_minus - 0.10961179679779245).abs() < 1e-6);
    }

    #[test]
    fn pw_lies_on_l_plus_and_omega() {
        for (m, beta) in [(2u32, -1.0), (1u32, -0.5), (2u32, -1.7), (1u32, -0.9)] {
            let p = params(m, beta);
            let cp = critical_points(&p);
            assert!(cp.xi_w < 0.0 && cp.u_w < 0.0);
            let info = classify_region(PhasePoint::new(cp.xi_w, cp.u_w), &p, DEFAULT_BAND_TOL);
            assert_eq!(info.sig_l_plus, 0, "P_w on l_+");
            assert_eq!(info.sig_omega, 0, "P_w on omega");
        }
    }

    #[test]
    fn node_inequalities_hold_over_parameter_sweep() {
        for m in [1u32, 2] {
            let mf = m as f64;
            for i in 1..200 {
                let beta = -mf * i as f64 / 200.0;
                let p = params(m, beta);
                let cp = critical_points(&p);
                let half_trace = 1.0 + 0.5 * mf * (1.0 + p.mu);
                let radicand = half_trace * half_trace - 2.0 * mf * (1.0 + p.mu) * (1.0 + p.mu);
                assert!(radicand > 0.0, "radicand positive at m={m} beta={beta}");
                assert!(
                    0.0 < cp.lambda_minus && cp.lambda_minus < cp.lambda_plus,
                    "unstable node at m={m} beta={beta}"
                );
                assert!(1.0 - cp.lambda_plus < 0.0);
                assert!(-p.mu < 1.0 - cp.lambda_minus && 1.0 - cp.lambda_minus < 1.0);
            }
        }
    }

    #[test]
    fn rhs_at_origin_anchor() {
        let p = params(2, -1.0);
        let slope = ode_rhs_u(PhasePoint::new(0.0, 0.0), &p).unwrap();
        assert!((slope - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            ode_rhs_u(PhasePoint::new(0.0, 0.5), &p),
            Err(Error::OriginIndeterminate { .. })
        ));
    }

    #[test]
    fn rhs_classifies_critical_point_and_sonic_line() {
        let p = params(2, -1.0);
        let cp = critical_points(&p);
        assert!(matches!(
            ode_rhs_u(PhasePoint::new(cp.xi_w, cp.u_w), &p),
            Err(Error::AtCriticalPoint { .. })
        ));
        // a point on l_- away from any critical point
        assert!(matches!(
            ode_rhs_u(PhasePoint::new(1.0, 0.0), &p),
            Err(Error::SonicSingularity { .. })
        ));
    }

    #[test]
    fn rhs_arithmetic_example() {
        let p = params(2, -1.0);
        let du = ode_rhs_u(PhasePoint::new(-4.0, -1.0), &p).unwrap();
        assert!((du - (-0.0625)).abs() < 1e-15);
    }

    #[test]
    fn log_omega_rhs_examples() {
        let p = params(2, -1.0);
        assert_eq!(ode_rhs_log_omega(PhasePoint::new(-3.0, 0.2), 0.0, &p), 0.0);
        assert_eq!(
            ode_rhs_log_omega(PhasePoint::new(0.0, 0.0), 1.0 / 3.0, &p),
            0.0
        );
        let v = ode_rhs_log_omega(PhasePoint::new(-4.0, -1.0), -0.0625, &p);
        assert!((v - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn log_omega_rhs_consistent_with_velocity_rhs() {
        // Omega ODE equals -(U - xi)/a^2 times the velocity RHS, exactly.
        let p = params(2, -1.3);
        for &(xi, u) in &[(-4.0, -1.0), (-0.7, -0.2), (3.0, 0.5), (-30.0, -0.4)] {
            let pt = PhasePoint::new(xi, u);
            let du = ode_rhs_u(pt, &p).unwrap();
            let lhs = ode_rhs_log_omega(pt, du, &p);
            let rhs = -(u - xi) / (p.a * p.a) * du;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rhs_symmetric_under_mirror() {
        let p = params(1, -0.8);
        for &(xi, u) in &[(-4.0, -1.0), (-0.3, -0.05), (2.5, 0.9), (-700.0, -0.2)] {
            let d1 = ode_rhs_u(PhasePoint::new(xi, u), &p).unwrap();
            let d2 = ode_rhs_u(PhasePoint::new(-xi, -u), &p).unwrap();
            assert_eq!(d1, d2, "mirror residual must vanish to machine precision");
        }
    }

    #[test]
    fn mirror_maps_pw_to_minus_pw() {
        let p = params(2, -1.0);
        let cp = critical_points(&p);
        let mirrored = mirror(&[
            PhasePoint::new(0.0, 0.0),
            PhasePoint::new(cp.xi_w, cp.u_w),
        ]);
        assert_eq!(mirrored[0], PhasePoint::new(0.0, 0.0));
        assert_eq!(mirrored[1], PhasePoint::new(-cp.xi_w, -cp.u_w));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rhs_mirror_symmetry(xi in -50.0f64..50.0, u in -5.0f64..5.0, beta in -1.9f64..-0.1) {
                let p = SimilarityParams::new(2, beta, 1.0).unwrap();
                prop_assume!(xi.abs() > 1e-6);
                let d1 = ode_rhs_u(PhasePoint::new(xi, u), &p);
                let d2 = ode_rhs_u(PhasePoint::new(-xi, -u), &p);
                match (d1, d2) {
                    (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                    (Err(_), Err(_)) => {}
                    _ => prop_assert!(false, "mirror points classified differently"),
                }
            }

            #[test]
            fn log_omega_matches_velocity_rhs_structure(
                xi in -50.0f64..50.0,
                u in -5.0f64..5.0,
                beta in -0.9f64..-0.1,
            ) {
                let p = SimilarityParams::new(1, beta, 1.0).unwrap();
                prop_assume!(xi.abs() > 1e-6);
                if let Ok(du) = ode_rhs_u(PhasePoint::new(xi, u), &p) {
                    let lhs = ode_rhs_log_omega(PhasePoint::new(xi, u), du, &p);
                    let rhs = -(u - xi) / (p.a * p.a) * du;
                    prop_assert_eq!(lhs, rhs);
                }
            }

            #[test]
            fn node_classification_over_admissible_parameters(
                m in 1u32..3,
                frac in 0.005f64..0.995,
            ) {
                let beta = -(m as f64) * frac;
                let p = SimilarityParams::new(m, beta, 1.0).unwrap();
                let cp = critical_points(&p);
                prop_assert!(cp.xi_w < 0.0 && cp.u_w < 0.0);
                prop_assert!(0.0 < cp.lambda_minus && cp.lambda_minus < cp.lambda_plus);
                prop_assert!(1.0 - cp.lambda_plus < 0.0);
                prop_assert!(-p.mu < 1.0 - cp.lambda_minus && 1.0 - cp.lambda_minus < 1.0);
            }
        }
    }

    #[test]
    fn region_classification_examples() {
        let p = params(2, -1.0);
        // inside the region U: -1 > -mu*xi = -2
        let info = classify_region(PhasePoint::new(-4.0, -1.0), &p, DEFAULT_BAND_TOL);
        assert!(info.in_u_region);
        assert_eq!(info.sig_l_plus, 1); // U - xi - a = 2 > 0
        let info2 = classify_region(PhasePoint::new(1.0, 0.0), &p, DEFAULT_BAND_TOL);
        assert_eq!(info2.sig_l_minus, 0); // on l_-
        assert!(!info2.in_u_region);
    }
}
