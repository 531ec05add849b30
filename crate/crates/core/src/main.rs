//! Command-line frontend: inspect critical-point data, sweep the similarity
//! exponent, construct and export solutions, evaluate field slices, run the
//! verification suite, trace characteristics and particles, and run the
//! finite-volume cross-check.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 construction failure.

use clap::{Args, Parser, Subcommand};
use isoflow::export::{self, RunConfig};
use isoflow::flow::TraceKind;
use isoflow::weak::{self, VerificationConfig};
use isoflow::{fv, ustar_bound, Error};
use rayon::prelude::*;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "isoflow", about = "converging-diverging isothermal similarity flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// geometry exponent (1 = cylindrical, 2 = spherical)
    #[arg(long)]
    m: Option<u32>,
    /// similarity exponent in (-m, 0)
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// sound speed
    #[arg(long)]
    a: Option<f64>,
    /// density amplitude at xi = 0- (negative)
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<f64>,
    /// ODE integrator relative tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// JSON config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonOpts {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(beta) = self.beta {
            cfg.beta = beta;
        }
        if let Some(a) = self.a {
            cfg.a = a;
        }
        if let Some(omega0) = self.omega0 {
            cfg.omega0 = omega0;
        }
        if let Some(tol) = self.tol {
            cfg.ode_tol = tol;
        }
        cfg.params()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the critical-point report for a parameter set
    Inspect {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Admissibility sweep over a beta-grid
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, allow_hyphen_values = true)]
        beta_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta_max: f64,
        #[arg(long, default_value_t = 17)]
        count: usize,
    },
    /// Construct the solution and export profile CSVs plus a manifest
    Construct {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Evaluate field slices rho(t,.), u(t,.)
    Eval {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, allow_hyphen_values = true, num_args = 1.., value_delimiter = ',', default_values_t = [-0.5f64, 0.5])]
        t: Vec<f64>,
        #[arg(long, default_value_t = 3.0)]
        r_max: f64,
        #[arg(long, default_value_t = 600)]
        samples: usize,
    },
    /// Run the verification suite; exit 1 if any check fails
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// perturb the outer density amplitude by this relative amount
        /// (fault injection; makes the RH check fail)
        #[arg(long, default_value_t = 0.0)]
        perturb_omega_plus: f64,
        /// run a reduced battery (faster; used for smoke testing)
        #[arg(long)]
        quick: bool,
    },
    /// Trace a characteristic or particle path
    Trace {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, value_parser = parse_kind, default_value = "particle")]
        kind: TraceKind,
        #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
        t0: f64,
        #[arg(long, default_value_t = 0.5)]
        r0: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
        t1: f64,
    },
    /// Finite-volume cross-check with a convergence table
    Fv {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [128usize, 256, 512])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        t_end: f64,
    },
}

fn parse_kind(s: &str) -> Result<TraceKind, String> {
    match s {
        "particle" => Ok(TraceKind::Particle),
        "char-minus" | "minus" => Ok(TraceKind::CharacteristicMinus),
        "char-plus" | "plus" => Ok(TraceKind::CharacteristicPlus),
        other => Err(format!(
            "unknown trace kind `{other}` (particle | char-minus | char-plus)"
        )),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParams(_) | Error::Domain { .. } | Error::ClassViolation => 2,
        _ => 3,
    }
}

fn fail(err: Error) -> ExitCode {
    let code = exit_code_for(&err);
    let json = serde_json::json!({
        "error": err.to_string(),
        "exit_code": code,
    });
    eprintln!("{json}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => fail(e),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Inspect { common } => {
            let cfg = common.resolve()?;
            let params = cfg.params()?;
            let cp = isoflow::critical_points(&params);
            let bound = ustar_bound(&params);
            println!("m = {}  n = {}  beta = {}  a = {}", params.m, params.n, params.beta, params.a);
            println!("xi_w = {}", cp.xi_w);
            println!("U_w = {}", cp.u_w);
            println!("lambda_plus = {}", cp.lambda_plus);
            println!("lambda_minus = {}", cp.lambda_minus);
            println!("dir_plus = (1, {})", cp.dir_plus.1);
            println!("dir_minus = (1, {})", cp.dir_minus.1);
            println!("ustar_bound = {bound}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            common,
            beta_min,
            beta_max,
            count,
        } => {
            let cfg = common.resolve()?;
            if count < 2 || beta_max <= beta_min {
                return Err(Error::InvalidParams(
                    "need beta_min < beta_max and count >= 2".into(),
                ));
            }
            let betas: Vec<f64> = (0..count)
                .map(|i| beta_min + (beta_max - beta_min) * i as f64 / (count - 1) as f64)
                .collect();
            let rows: Vec<String> = betas
                .par_iter()
                .map(|&beta| {
                    let mut row_cfg = cfg.clone();
                    row_cfg.beta = beta;
                    match row_cfg.params() {
                        Ok(p) => {
                            let bound = ustar_bound(&p);
                            match isoflow::build_velocity(&p, &row_cfg.build_options()) {
                                Ok(v) => format!(
                                    "{beta},{bound},{},{},{},",
                                    v.u_star,
                                    v.u_star < 0.0,
                                    v.xi_s
                                ),
                                Err(e) => format!("{beta},{bound},nan,false,nan,{e}"),
                            }
                        }
                        Err(e) => format!("{beta},nan,nan,false,nan,{e}"),
                    }
                })
                .collect();
            let mut csv = String::from("beta,ustar_bound,u_star,admissible,xi_s,note\n");
            for r in rows {
                csv.push_str(&r);
                csv.push('\n');
            }
            export::write_file(&common.out.join("sweep.csv"), &csv)?;
            println!("wrote {}", common.out.join("sweep.csv").display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Construct { common } => {
            let cfg = common.resolve()?;
            let sol = cfg.build()?;
            export::write_file(
                &common.out.join("velocity.csv"),
                &export::velocity_csv(&sol, &cfg),
            )?;
            export::write_file(
                &common.out.join("density.csv"),
                &export::density_csv(&sol, &cfg),
            )?;
            let manifest = export::manifest(&sol, &cfg);
            export::write_file(
                &common.out.join("manifest.json"),
                &serde_json::to_string_pretty(&manifest)?,
            )?;
            println!(
                "constructed: xi_s = {}, U* = {}, C_- = {}, Omega0' = {}",
                sol.velocity.xi_s, sol.velocity.u_star, sol.density.c_minus, sol.density.omega0_prime
            );
            println!("wrote {}", common.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            common,
            t,
            r_max,
            samples,
        } => {
            let cfg = common.resolve()?;
            let sol = cfg.build()?;
            for (i, &ti) in t.iter().enumerate() {
                let body = export::slice_csv(&sol, ti, r_max, samples)?;
                export::write_file(&common.out.join(format!("slice_{i}.csv")), &body)?;
            }
            println!("wrote {} slice(s) to {}", t.len(), common.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            common,
            perturb_omega_plus,
            quick,
        } => {
            let cfg = common.resolve()?;
            let mut sol = cfg.build()?;
            if perturb_omega_plus != 0.0 {
                sol = sol.with_perturbed_outer_density(perturb_omega_plus);
            }
            let vcfg = if quick {
                VerificationConfig {
                    weak_levels: vec![2, 3],
                    flux_j_max: 8,
                    ..VerificationConfig::default()
                }
            } else {
                VerificationConfig::default()
            };
            let report = weak::verify(&sol, &vcfg)?;
            export::write_file(
                &common.out.join("verification.json"),
                &serde_json::to_string_pretty(&report)?,
            )?;
            print!("{}", report.summary());
            if report.pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Trace {
            common,
            kind,
            t0,
            r0,
            t1,
        } => {
            let cfg = common.resolve()?;
            let sol = cfg.build()?;
            let trace = sol.trace(kind, t0, r0, t1)?;
            export::write_file(&common.out.join("trace.csv"), &export::trace_csv(&trace))?;
            println!("termination: {:?}", trace.termination);
            if let Some(v) = trace.speed_at_collapse {
                println!("speed at collapse: {v}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fv { common, n, t_end } => {
            let cfg = common.resolve()?;
            let sol = cfg.build()?;
            let rows = fv::convergence_study(&sol, &n, t_end)?;
            let mut csv = String::from("n,l1_rho,l1_rhou,rate_rho,rate_rhou\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n_cells,
                    r.l1_mass,
                    r.l1_mom,
                    r.rate_mass.map(|x| x.to_string()).unwrap_or_default(),
                    r.rate_mom.map(|x| x.to_string()).unwrap_or_default(),
                ));
            }
            export::write_file(&common.out.join("fv_convergence.csv"), &csv)?;
            // snapshot at the final time on the finest grid
            let n_max = *n.iter().max().unwrap_or(&512);
            let fv_cfg = fv::FvConfig::default_for(&sol, n_max, t_end);
            let mut state = fv::init_from_similarity(&sol, &fv_cfg)?;
            fv::advance(&mut state, &sol, &fv_cfg)?;
            let mut snap = String::from("r,rho,rhou,rho_exact,u_exact\n");
            let m = sol.params.m as i32;
            for i in 0..fv_cfg.n_cells {
                let r = fv_cfg.cell_center(i);
                let rm = r.powi(m);
                let (re, ue) = sol.evaluate(state.time, r)?;
                snap.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r,
                    state.q_mass[i] / rm,
                    state.q_mom[i] / rm,
                    re,
                    ue
                ));
            }
            export::write_file(&common.out.join("fv_snapshot.csv"), &snap)?;
            let front = fv::shock_front_position(&state, &sol, &fv_cfg);
            println!(
                "front at r = {front}, exact r = {}, |err|/dr = {:.2}",
                sol.velocity.xi_s * t_end,
                (front - sol.velocity.xi_s * t_end).abs() / fv_cfg.dr()
            );
            for r in &rows {
                println!(
                    "N = {:5}  L1(rho) = {:.6e}  rate = {}",
                    r.n_cells,
                    r.l1_mass,
                    r.rate_mass.map(|x| format!("{x:.3}")).unwrap_or_default()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
