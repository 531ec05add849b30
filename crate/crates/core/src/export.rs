//! File formats: branch and field CSV exports, the solution manifest, and
//! the run configuration shared by the command-line frontend.

use crate::error::Result;
use crate::flow::{PathTrace, SimilaritySolution};
use crate::similarity::SimilarityParams;
use crate::velocity::BuildOptions;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Flat run configuration; file values are overridden by CLI flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub m: u32,
    pub beta: f64,
    pub a: f64,
    pub omega0: f64,
    pub ode_tol: f64,
    pub root_tol: f64,
    pub quad_tol: f64,
    pub xi_min_factor: f64,
    pub xi_max_factor: f64,
    pub x0_factor: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let o = BuildOptions::default();
        Self {
            m: 2,
            beta: -1.0,
            a: 1.0,
            omega0: -1.0,
            ode_tol: o.ode_rtol,
            root_tol: o.root_tol,
            quad_tol: o.quad_rtol,
            xi_min_factor: o.xi_min_factor,
            xi_max_factor: o.xi_max_factor,
            x0_factor: o.x0_factor,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> Result<SimilarityParams> {
        SimilarityParams::new(self.m, self.beta, self.a)
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            ode_rtol: self.ode_tol,
            ode_atol: self.ode_tol * 1e-2,
            root_tol: self.root_tol,
            quad_rtol: self.quad_tol,
            quad_atol: self.quad_tol * 1e-3,
            xi_min_factor: self.xi_min_factor,
            xi_max_factor: self.xi_max_factor,
            x0_factor: self.x0_factor,
            ..BuildOptions::default()
        }
    }

    pub fn build(&self) -> Result<SimilaritySolution> {
        SimilaritySolution::build(&self.params()?, self.omega0, &self.build_options())
    }

    fn comment_header(&self) -> String {
        format!(
            "# m={} beta={} a={} omega0={} ode_tol={} root_tol={} quad_tol={} xi_min_factor={} xi_max_factor={} x0_factor={}",
            self.m,
            self.beta,
            self.a,
            self.omega0,
            self.ode_tol,
            self.root_tol,
            self.quad_tol,
            self.xi_min_factor,
            self.xi_max_factor,
            self.x0_factor
        )
    }
}

/// Derived quantities recorded in the manifest; together with the config
/// they are everything needed to rebuild and re-evaluate the solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivedData {
    pub xi_w: f64,
    pub u_w: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub ustar_bound: f64,
    pub u_star: f64,
    pub xi_star: f64,
    pub xi_s: f64,
    pub x_s: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    pub omega_w: f64,
    pub omega_s_minus: f64,
    pub omega_s_plus: f64,
    pub c_minus: f64,
    pub c_minus_err: f64,
    pub c_plus: f64,
    pub omega0_prime: f64,
    pub gamma_fit: f64,
    pub stagnation: bool,
    pub hugoniot_crossings: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub config: RunConfig,
    pub derived: DerivedData,
}

pub fn manifest(sol: &SimilaritySolution, config: &RunConfig) -> Manifest {
    let v = &sol.velocity;
    let d = &sol.density;
    Manifest {
        schema: "isoflow-manifest/1".into(),
        config: config.clone(),
        derived: DerivedData {
            xi_w: sol.cp.xi_w,
            u_w: sol.cp.u_w,
            lambda_plus: sol.cp.lambda_plus,
            lambda_minus: sol.cp.lambda_minus,
            ustar_bound: crate::velocity::ustar_bound(&sol.params),
            u_star: v.u_star,
            xi_star: v.xi_star,
            xi_s: v.xi_s,
            x_s: d.x_s,
            u_minus: v.shock.u_minus,
            u_plus: v.shock.u_plus,
            v_minus: v.shock.v_minus,
            v_plus: v.shock.v_plus,
            omega_w: d.omega_w,
            omega_s_minus: d.omega_s_minus,
            omega_s_plus: d.omega_s_plus,
            c_minus: d.c_minus,
            c_minus_err: d.c_minus_err,
            c_plus: d.c_plus,
            omega0_prime: d.omega0_prime,
            gamma_fit: d.gamma_fit,
            stagnation: v.stagnation,
            hugoniot_crossings: v.hugoniot_crossings,
        },
    }
}

/// Velocity branches as CSV: columns xi, U, dU plus a branch tag; the header
/// comment carries the parameters and tolerances of the run.
pub fn velocity_csv(sol: &SimilaritySolution, config: &RunConfig) -> String {
    let mut s = String::new();
    writeln!(s, "{}", config.comment_header()).unwrap();
    writeln!(
        s,
        "# xi_w={} xi_s={} u_star={}",
        sol.cp.xi_w, sol.velocity.xi_s, sol.velocity.u_star
    )
    .unwrap();
    writeln!(s, "branch,xi,U,dU").unwrap();
    for (name, b) in [
        ("kink", &sol.velocity.kink),
        ("hat", &sol.velocity.hat),
        ("tilde", &sol.velocity.tilde),
    ] {
        for n in b.nodes() {
            writeln!(s, "{},{},{},{}", name, n.xi, n.u, n.du).unwrap();
        }
    }
    s
}

/// Density branches as CSV: xi, Omega, branch tag, and the sign factor of
/// `rho = sgn(t)|t|^beta Omega` on that branch.
pub fn density_csv(sol: &SimilaritySolution, config: &RunConfig) -> String {
    let d = &sol.density;
    let mut s = String::new();
    writeln!(s, "{}", config.comment_header()).unwrap();
    writeln!(
        s,
        "# omega0={} omega0_prime={} c_minus={} c_plus={}",
        d.omega0, d.omega0_prime, d.c_minus, d.c_plus
    )
    .unwrap();
    writeln!(s, "branch,sgn_t,xi,Omega").unwrap();
    for n in d.kink.nodes() {
        writeln!(s, "kink,-1,{},{}", n.xi, -n.u.exp()).unwrap();
    }
    for n in d.hat_neg.nodes() {
        writeln!(s, "hat_neg,-1,{},{}", n.xi, -n.u.exp()).unwrap();
    }
    for n in d.hat_pos.nodes() {
        writeln!(s, "hat_pos,+1,{},{}", n.xi, n.u.exp()).unwrap();
    }
    for n in d.tilde.nodes() {
        // stored in x = 1/xi
        writeln!(s, "tilde,+1,{},{}", 1.0 / n.xi, n.u.exp()).unwrap();
    }
    s
}

/// A field slice rho(t, .), u(t, .) on a uniform r-grid.
pub fn slice_csv(sol: &SimilaritySolution, t: f64, r_max: f64, samples: usize) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "t,r,rho,u").unwrap();
    for i in 1..=samples {
        let r = r_max * i as f64 / samples as f64;
        let (rho, u) = sol.evaluate(t, r)?;
        writeln!(s, "{},{},{},{}", t, r, rho, u).unwrap();
    }
    Ok(s)
}

pub fn trace_csv(trace: &PathTrace) -> String {
    let mut s = String::new();
    writeln!(s, "# kind={:?} termination={:?}", trace.kind, trace.termination).unwrap();
    if let Some(v) = trace.speed_at_collapse {
        writeln!(s, "# speed_at_collapse={v}").unwrap();
    }
    for e in &trace.events {
        writeln!(s, "# event={e:?}").unwrap();
    }
    writeln!(s, "t,r").unwrap();
    for (t, r) in &trace.nodes {
        writeln!(s, "{},{}", t, r).unwrap();
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}
