//! Python bindings: the main types and operations of the similarity-flow
//! solver, exposed as the `isoflow_py` extension module.

use isoflow::export::RunConfig;
use isoflow::flow::{SimilaritySolution, TraceKind};
use isoflow::weak::{self, VerificationConfig};
use isoflow::{critical_points, ustar_bound, SimilarityParams};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: isoflow::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn params(m: u32, beta: f64, a: f64) -> PyResult<SimilarityParams> {
    SimilarityParams::new(m, beta, a).map_err(err)
}

/// Critical-point data for a parameter set.
#[pyfunction]
#[pyo3(signature = (m, beta, a = 1.0))]
fn critical_point_data(py: Python<'_>, m: u32, beta: f64, a: f64) -> PyResult<Py<PyDict>> {
    let p = params(m, beta, a)?;
    let cp = critical_points(&p);
    let d = PyDict::new(py);
    d.set_item("xi_w", cp.xi_w)?;
    d.set_item("u_w", cp.u_w)?;
    d.set_item("lambda_plus", cp.lambda_plus)?;
    d.set_item("lambda_minus", cp.lambda_minus)?;
    d.set_item("ustar_bound", ustar_bound(&p))?;
    Ok(d.into())
}

/// A constructed converging-diverging similarity solution.
#[pyclass(name = "Solution")]
struct PySolution {
    sol: SimilaritySolution,
}

#[pymethods]
impl PySolution {
    #[new]
    #[pyo3(signature = (m, beta, a = 1.0, omega0 = -1.0))]
    fn new(m: u32, beta: f64, a: f64, omega0: f64) -> PyResult<Self> {
        let cfg = RunConfig {
            m,
            beta,
            a,
            omega0,
            ..RunConfig::default()
        };
        Ok(Self {
            sol: cfg.build().map_err(err)?,
        })
    }

    #[getter]
    fn xi_w(&self) -> f64 {
        self.sol.cp.xi_w
    }
    #[getter]
    fn u_w(&self) -> f64 {
        self.sol.cp.u_w
    }
    #[getter]
    fn u_star(&self) -> f64 {
        self.sol.velocity.u_star
    }
    #[getter]
    fn xi_s(&self) -> f64 {
        self.sol.velocity.xi_s
    }
    #[getter]
    fn xi_star(&self) -> f64 {
        self.sol.velocity.xi_star
    }
    #[getter]
    fn c_minus(&self) -> f64 {
        self.sol.density.c_minus
    }
    #[getter]
    fn omega0_prime(&self) -> f64 {
        self.sol.density.omega0_prime
    }
    #[getter]
    fn stagnation(&self) -> bool {
        self.sol.velocity.stagnation
    }

    /// (rho, u) at a space-time point.
    fn evaluate(&self, t: f64, r: f64) -> PyResult<(f64, f64)> {
        self.sol.evaluate(t, r).map_err(err)
    }

    /// M(t; r_bar) = integral of rho r^m over (0, r_bar).
    fn mass_integral(&self, t: f64, r_bar: f64) -> PyResult<f64> {
        Ok(self.sol.mass_integral(t, r_bar).map_err(err)?.value)
    }

    fn moment_integral(&self, t: f64, r_bar: f64, q: u32) -> PyResult<f64> {
        Ok(self.sol.moment_integral(t, r_bar, q).map_err(err)?.value)
    }

    fn energy_density(&self, t: f64, r: f64) -> PyResult<f64> {
        self.sol.energy_density(t, r).map_err(err)
    }

    /// Trace a path; kind is "particle", "char-minus", or "char-plus".
    /// Returns the list of (t, r) nodes.
    fn trace(&self, kind: &str, t0: f64, r0: f64, t1: f64) -> PyResult<Vec<(f64, f64)>> {
        let k = match kind {
            "particle" => TraceKind::Particle,
            "char-minus" => TraceKind::CharacteristicMinus,
            "char-plus" => TraceKind::CharacteristicPlus,
            other => return Err(PyValueError::new_err(format!("unknown kind `{other}`"))),
        };
        Ok(self.sol.trace(k, t0, r0, t1).map_err(err)?.nodes)
    }

    /// Run the fast verification checks (RH, continuity, flux) and return
    /// a dict of headline residuals.
    fn verify_quick(&self, py: Python<'_>) -> PyResult<Py<PyDict>> {
        let rh = weak::check_rh(&self.sol, &[0.5, 1.0]).map_err(err)?;
        let cont = weak::check_continuity(&self.sol, 1.0).map_err(err)?;
        let flux = weak::check_flux(&self.sol, 1.0, 8).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("rh_residual", rh.residual_mass.max(rh.residual_momentum))?;
        d.set_item("rh_pass", rh.pass)?;
        d.set_item("continuity_rel_dev", cont.max_closed_rel_dev)?;
        d.set_item("continuity_pass", cont.pass)?;
        d.set_item("flux_slope_dev", flux.max_rel_slope_dev_last4)?;
        d.set_item("flux_pass", flux.pass)?;
        Ok(d.into())
    }

    /// Full verification report as a JSON string.
    fn verify_json(&self) -> PyResult<String> {
        let report = weak::verify(&self.sol, &VerificationConfig::default()).map_err(err)?;
        serde_json::to_string(&report)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// Admissibility sweep: one dict per beta with the bound and computed U*.
#[pyfunction]
#[pyo3(signature = (m, betas, a = 1.0))]
fn sweep(py: Python<'_>, m: u32, betas: Vec<f64>, a: f64) -> PyResult<Vec<Py<PyDict>>> {
    let mut out = Vec::with_capacity(betas.len());
    for beta in betas {
        let d = PyDict::new(py);
        d.set_item("beta", beta)?;
        match params(m, beta, a) {
            Ok(p) => {
                d.set_item("ustar_bound", ustar_bound(&p))?;
                match isoflow::build_velocity(&p, &Default::default()) {
                    Ok(v) => {
                        d.set_item("u_star", v.u_star)?;
                        d.set_item("xi_s", v.xi_s)?;
                        d.set_item("admissible", v.u_star < 0.0)?;
                    }
                    Err(e) => {
                        d.set_item("admissible", false)?;
                        d.set_item("note", e.to_string())?;
                    }
                }
            }
            Err(e) => {
                d.set_item("admissible", false)?;
                d.set_item("note", e.to_string())?;
            }
        }
        out.push(d.into());
    }
    Ok(out)
}

#[pymodule]
fn isoflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(critical_point_data, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
