//! Independent finite-volume cross-check.
//!
//! The quasi one-dimensional isothermal system
//!
//! ```text
//! (r^m rho)_t   + (r^m rho u)_r             = 0
//! (r^m rho u)_t + (r^m (rho u^2 + a^2 rho))_r = m r^{m-1} a^2 rho
//! ```
//!
//! is evolved with a first-order Godunov scheme (HLL two-wave solver, wave
//! speeds `min(u_L - a, u_R - a)` and `max(u_L + a, u_R + a)`, unsplit
//! cell-centered geometric source) from exact similarity data at `t_start`,
//! with exact-similarity Dirichlet traces in the ghost cells at both ends.
//! The domain excludes the origin so the blowup point sits outside the grid
//! and the interior weak-solution property is what gets tested.

use crate::error::{Error, Result};
use crate::flow::SimilaritySolution;

#[derive(Debug, Clone)]
pub struct FvConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub n_cells: usize,
    pub cfl: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl FvConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max > self.r_min) {
            return Err(Error::InvalidParams(format!(
                "need 0 < r_min < r_max, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidParams(format!(
                "CFL must be in (0,1), got {}",
                self.cfl
            )));
        }
        if self.n_cells < 64 {
            return Err(Error::InvalidParams(format!(
                "need at least 64 cells, got {}",
                self.n_cells
            )));
        }
        if !(self.t_end > self.t_start) {
            return Err(Error::InvalidParams("t_end must exceed t_start".into()));
        }
        Ok(())
    }

    /// Default domain for a given solution: inner edge at 0.05 |xi_w| so the
    /// geometric singularity is handled by exact boundary traces, outer edge
    /// far enough that the initial kink and the reflected shock stay inside.
    pub fn default_for(sol: &SimilaritySolution, n_cells: usize, t_end: f64) -> Self {
        let xw = sol.cp.xi_w.abs();
        Self {
            r_min: 0.05 * xw,
            r_max: 2.5 * xw,
            n_cells,
            cfl: 0.4,
            t_start: -1.0,
            t_end,
        }
    }

    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / self.n_cells as f64
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        self.r_min + (i as f64 + 0.5) * self.dr()
    }
}

/// Cell averages of the conserved densities (r^m rho, r^m rho u).
#[derive(Debug, Clone)]
pub struct FvState {
    pub time: f64,
    pub q_mass: Vec<f64>,
    pub q_mom: Vec<f64>,
}

/// 3-point Gauss average of the exact conserved fields over one cell.
fn exact_cell_avg(sol: &SimilaritySolution, t: f64, r_lo: f64, r_hi: f64) -> Result<(f64, f64)> {
    const X: [f64; 3] = [-0.7745966692414834, 0.0, 0.7745966692414834];
    const W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let c = 0.5 * (r_lo + r_hi);
    let h = 0.5 * (r_hi - r_lo);
    let m = sol.params.m as i32;
    let mut q1 = 0.0;
    let mut q2 = 0.0;
    for k in 0..3 {
        let r = c + h * X[k];
        let (rho, u) = sol.evaluate(t, r)?;
        let rm = r.powi(m);
        q1 += W[k] * rm * rho;
        q2 += W[k] * rm * rho * u;
    }
    Ok((0.5 * q1, 0.5 * q2))
}

/// Initialize the state from the exact similarity solution at t_start.
pub fn init_from_similarity(sol: &SimilaritySolution, cfg: &FvConfig) -> Result<FvState> {
    cfg.validate()?;
    if !(cfg.t_start < 0.0) {
        return Err(Error::InvalidParams(
            "the cross-check starts before collapse (t_start < 0)".into(),
        ));
    }
    let n = cfg.n_cells;
    let dr = cfg.dr();
    let mut q_mass = vec![0.0; n];
    let mut q_mom = vec![0.0; n];
    for i in 0..n {
        let r_lo = cfg.r_min + i as f64 * dr;
        let (q1, q2) = exact_cell_avg(sol, cfg.t_start, r_lo, r_lo + dr)?;
        q_mass[i] = q1;
        q_mom[i] = q2;
        if q1 <= 0.0 {
            return Err(Error::PositivityLoss {
                cell: i,
                t: cfg.t_start,
            });
        }
    }
    Ok(FvState {
        time: cfg.t_start,
        q_mass,
        q_mom,
    })
}

/// Isothermal flux f(rho, rho u) = (rho u, rho u^2 + a^2 rho).
#[inline]
fn phys_flux(rho: f64, mom: f64, a2: f64) -> (f64, f64) {
    let u = mom / rho;
    (mom, mom * u + a2 * rho)
}

/// HLL two-wave flux.
fn hll_flux(rho_l: f64, mom_l: f64, rho_r: f64, mom_r: f64, a: f64) -> (f64, f64) {
    let a2 = a * a;
    let u_l = mom_l / rho_l;
    let u_r = mom_r / rho_r;
    let s_l = (u_l - a).min(u_r - a);
    let s_r = (u_l + a).max(u_r + a);
    let (f_l0, f_l1) = phys_flux(rho_l, mom_l, a2);
    let (f_r0, f_r1) = phys_flux(rho_r, mom_r, a2);
    if s_l >= 0.0 {
        (f_l0, f_l1)
    } else if s_r <= 0.0 {
        (f_r0, f_r1)
    } else {
        let inv = 1.0 / (s_r - s_l);
        (
            (s_r * f_l0 - s_l * f_r0 + s_l * s_r * (rho_r - rho_l)) * inv,
            (s_r * f_l1 - s_l * f_r1 + s_l * s_r * (mom_r - mom_l)) * inv,
        )
    }
}

/// Advance the state to cfg.t_end. Ghost cells are filled from the exact
/// similarity solution each step; the CFL number is respected every step.
pub fn advance(state: &mut FvState, sol: &SimilaritySolution, cfg: &FvConfig) -> Result<()> {
    cfg.validate()?;
    let n = cfg.n_cells;
    let dr = cfg.dr();
    let m = sol.params.m as i32;
    let a = sol.params.a;
    let a2 = a * a;
    // primitive (rho, rho u) work arrays with two ghost cells
    let mut rho = vec![0.0; n + 2];
    let mut mom = vec![0.0; n + 2];
    let mut flux1 = vec![0.0; n + 1];
    let mut flux2 = vec![0.0; n + 1];

    while state.time < cfg.t_end {
        for i in 0..n {
            let rm = cfg.cell_center(i).powi(m);
            rho[i + 1] = state.q_mass[i] / rm;
            mom[i + 1] = state.q_mom[i] / rm;
        }
        // exact traces at the ghost centers
        let r_ghost_l = cfg.r_min - 0.5 * dr;
        let r_ghost_r = cfg.r_max + 0.5 * dr;
        let (rho_l, u_l) = sol.evaluate(state.time, r_ghost_l)?;
        let (rho_r, u_r) = sol.evaluate(state.time, r_ghost_r)?;
        rho[0] = rho_l;
        mom[0] = rho_l * u_l;
        rho[n + 1] = rho_r;
        mom[n + 1] = rho_r * u_r;

        let mut max_speed: f64 = 0.0;
        for i in 0..n + 2 {
            max_speed = max_speed.max((mom[i] / rho[i]).abs() + a);
        }
        let mut dt = cfg.cfl * dr / max_speed;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::CflViolation {
                dt,
                limit: dr / max_speed,
            });
        }
        if state.time + dt > cfg.t_end {
            dt = cfg.t_end - state.time;
        }

        for i in 0..n + 1 {
            let r_face = cfg.r_min + i as f64 * dr;
            let (f1, f2) = hll_flux(rho[i], mom[i], rho[i + 1], mom[i + 1], a);
            let rm = r_face.powi(m);
            flux1[i] = rm * f1;
            flux2[i] = rm * f2;
        }
        let lam = dt / dr;
        for i in 0..n {
            let r_c = cfg.cell_center(i);
            state.q_mass[i] -= lam * (flux1[i + 1] - flux1[i]);
            state.q_mom[i] -= lam * (flux2[i + 1] - flux2[i])
                - dt * sol.params.mf() * r_c.powi(m - 1) * a2 * rho[i + 1];
            if state.q_mass[i] <= 0.0 || !state.q_mass[i].is_finite() {
                return Err(Error::PositivityLoss {
                    cell: i,
                    t: state.time,
                });
            }
        }
        state.time += dt;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FvErrors {
    pub l1_mass: f64,
    pub l1_mom: f64,
}

/// L1 deviation of the cell averages from the exact solution at the state's
/// time, optionally excluding a window |r - r_excl| <= half_width.
pub fn compare_masked(
    state: &FvState,
    sol: &SimilaritySolution,
    cfg: &FvConfig,
    excl: Option<(f64, f64)>,
) -> Result<FvErrors> {
    let dr = cfg.dr();
    let mut e = FvErrors::default();
    for i in 0..cfg.n_cells {
        let r_lo = cfg.r_min + i as f64 * dr;
        if let Some((c, w)) = excl {
            if (cfg.cell_center(i) - c).abs() <= w {
                continue;
            }
        }
        let (q1, q2) = exact_cell_avg(sol, state.time, r_lo, r_lo + dr)?;
        e.l1_mass += (state.q_mass[i] - q1).abs() * dr;
        e.l1_mom += (state.q_mom[i] - q2).abs() * dr;
    }
    Ok(e)
}

/// L1 deviation over the whole domain.
pub fn compare(state: &FvState, sol: &SimilaritySolution, cfg: &FvConfig) -> Result<FvErrors> {
    compare_masked(state, sol, cfg, None)
}

/// Position of the captured shock front: the interface with the steepest
/// density jump in a window around the expected location.
pub fn shock_front_position(state: &FvState, sol: &SimilaritySolution, cfg: &FvConfig) -> f64 {
    let m = sol.params.m as i32;
    let expected = sol.velocity.xi_s * state.time;
    let window = 0.25 * (cfg.r_max - cfg.r_min);
    let mut best_i = 0;
    let mut best_jump = -1.0;
    for i in 0..cfg.n_cells - 1 {
        let r_face = cfg.r_min + (i as f64 + 1.0) * cfg.dr();
        if (r_face - expected).abs() > window {
            continue;
        }
        let rho_i = state.q_mass[i] / cfg.cell_center(i).powi(m);
        let rho_j = state.q_mass[i + 1] / cfg.cell_center(i + 1).powi(m);
        let jump = (rho_j - rho_i).abs();
        if jump > best_jump {
            best_jump = jump;
            best_i = i;
        }
    }
    cfg.r_min + (best_i as f64 + 1.0) * cfg.dr()
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub l1_mass: f64,
    pub l1_mom: f64,
    pub rate_mass: Option<f64>,
    pub rate_mom: Option<f64>,
}

/// Run the cross-check at a sequence of resolutions and report L1 errors
/// away from the shock together with observed convergence rates.
pub fn convergence_study(
    sol: &SimilaritySolution,
    ns: &[usize],
    t_end: f64,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &n in ns {
        let cfg = FvConfig::default_for(sol, n, t_end);
        let mut state = init_from_similarity(sol, &cfg)?;
        advance(&mut state, sol, &cfg)?;
        let excl = if t_end > 0.0 {
            Some((sol.velocity.xi_s * t_end, 0.15 * sol.cp.xi_w.abs()))
        } else {
            None
        };
        let e = compare_masked(&state, sol, &cfg, excl)?;
        let (rate_mass, rate_mom) = match rows.last() {
            Some(prev) => (
                Some((prev.l1_mass / e.l1_mass).log2()),
                Some((prev.l1_mom / e.l1_mom).log2()),
            ),
            None => (None, None),
        };
        rows.push(ConvergenceRow {
            n_cells: n,
            l1_mass: e.l1_mass,
            l1_mom: e.l1_mom,
            rate_mass,
            rate_mom,
        });
    }
    Ok(rows)
}
