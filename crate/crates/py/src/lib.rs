//! Python bindings: elliptic integrals, curve geometry, the steering law
//! and whole-scenario simulation.

use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use phasebal::cli::{self, RunSummary};
use phasebal::control;
use phasebal::curve::{self, PerimeterMode};
use phasebal::scenario::{parse_scenario, ScenarioFile};
use phasebal::sim;
use phasebal::specfun::{self, EllipticParam};
use phasebal::{AgentState, ControlGains, CurveSpec, Error, Orbit};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain { .. } | Error::Config(_) => PyValueError::new_err(e.to_string()),
        Error::Index { .. } => PyIndexError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn param(m: f64) -> PyResult<EllipticParam> {
    EllipticParam::new(m).map_err(to_py)
}

/// E(u | m), the incomplete elliptic integral of the second kind.
#[pyfunction]
fn ellint_e(u: f64, m: f64) -> PyResult<f64> {
    specfun::ellint_e_incomplete(u, param(m)?).map_err(to_py)
}

/// E(m) = E(π/2 | m).
#[pyfunction]
fn ellint_e_complete(m: f64) -> PyResult<f64> {
    Ok(specfun::ellint_e_complete(param(m)?))
}

/// E(u | m) by adaptive quadrature (slow reference).
#[pyfunction]
fn oracle_e(u: f64, m: f64) -> PyResult<f64> {
    specfun::oracle_e(u, param(m)?).map_err(to_py)
}

#[pyfunction]
fn carlson_rf(x: f64, y: f64, z: f64) -> PyResult<f64> {
    specfun::carlson_rf(x, y, z).map_err(to_py)
}

#[pyfunction]
fn carlson_rd(x: f64, y: f64, z: f64) -> PyResult<f64> {
    specfun::carlson_rd(x, y, z).map_err(to_py)
}

/// A circular or elliptical orbit. Angles are headings in radians.
#[pyclass(name = "Curve", frozen)]
struct PyCurve {
    orbit: Orbit,
}

fn parse_mode(mode: &str) -> PyResult<PerimeterMode> {
    match mode {
        "exact" => Ok(PerimeterMode::Exact),
        "ramanujan" => Ok(PerimeterMode::Ramanujan),
        other => Err(PyValueError::new_err(format!(
            "perimeter_mode must be 'exact' or 'ramanujan', got {other:?}"
        ))),
    }
}

impl PyCurve {
    fn spec(&self) -> &CurveSpec {
        self.orbit.spec()
    }
}

#[pymethods]
impl PyCurve {
    #[staticmethod]
    #[pyo3(signature = (r, perimeter_mode = "exact"))]
    fn circle(r: f64, perimeter_mode: &str) -> PyResult<Self> {
        let spec = CurveSpec::circle(r).map_err(to_py)?;
        Ok(PyCurve {
            orbit: Orbit::new(spec.with_perimeter_mode(parse_mode(perimeter_mode)?)),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (a, b, perimeter_mode = "exact"))]
    fn ellipse(a: f64, b: f64, perimeter_mode: &str) -> PyResult<Self> {
        let spec = CurveSpec::ellipse(a, b).map_err(to_py)?;
        Ok(PyCurve {
            orbit: Orbit::new(spec.with_perimeter_mode(parse_mode(perimeter_mode)?)),
        })
    }

    #[getter]
    fn axes(&self) -> (f64, f64) {
        self.spec().axes()
    }

    #[getter]
    fn perimeter(&self) -> f64 {
        self.orbit.perimeter()
    }

    /// Curve parameter t ∈ (−π, π] whose tangent points along `theta`.
    fn project(&self, theta: f64) -> f64 {
        curve::project(self.spec(), theta)
    }

    fn point(&self, t: f64) -> (f64, f64) {
        curve::point_on_curve(self.spec(), t)
    }

    fn curvature(&self, theta: f64) -> f64 {
        curve::curvature(self.spec(), theta)
    }

    /// Signed arc length σ of the point selected by `theta`.
    fn arc_length(&self, theta: f64) -> f64 {
        self.orbit.sigma_direct(curve::project(self.spec(), theta))
    }

    /// Curve phase ψ ∈ [0, 2π).
    fn phase(&self, theta: f64) -> f64 {
        self.orbit.phase(theta)
    }

    fn position_error(&self, x: f64, y: f64, theta: f64) -> (f64, f64) {
        curve::position_error(self.spec(), &AgentState::new(x, y, theta))
    }

    fn __repr__(&self) -> String {
        let (a, b) = self.spec().axes();
        if self.spec().is_circle() {
            format!("Curve.circle({a})")
        } else {
            format!("Curve.ellipse({a}, {b})")
        }
    }
}

/// Barrier gain `kc`, coupling gain `k` and boundary half-width `delta`.
#[pyclass(name = "Gains", frozen)]
struct PyGains {
    inner: ControlGains,
}

#[pymethods]
impl PyGains {
    #[new]
    #[pyo3(signature = (kc = control::DEFAULT_KC, k = control::DEFAULT_K, delta = 1.0))]
    fn new(kc: f64, k: f64, delta: f64) -> PyResult<Self> {
        Ok(PyGains {
            inner: ControlGains::new(kc, k, delta).map_err(to_py)?,
        })
    }

    #[getter]
    fn kc(&self) -> f64 {
        self.inner.kc
    }

    #[getter]
    fn k(&self) -> f64 {
        self.inner.k_coupling
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    fn __repr__(&self) -> String {
        format!("Gains(kc={}, k={}, delta={})", self.inner.kc, self.inner.k_coupling, self.inner.delta)
    }
}

fn states(raw: Vec<(f64, f64, f64)>) -> Vec<AgentState> {
    raw.into_iter().map(|(x, y, th)| AgentState::new(x, y, th)).collect()
}

/// Turn rate of agent `k` given every agent's (x, y, theta).
#[pyfunction]
fn turn_rate<'py>(
    py: Python<'py>,
    curve: &PyCurve,
    agents: Vec<(f64, f64, f64)>,
    k: usize,
    gains: &PyGains,
) -> PyResult<Bound<'py, PyDict>> {
    let out = control::turn_rate(&curve.orbit, &states(agents), k, &gains.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("u", out.u)?;
    d.set_item("zeta", out.zeta)?;
    d.set_item("barrier_term", out.barrier_term)?;
    d.set_item("coupling_term", out.coupling_term)?;
    d.set_item("e_norm", out.e_norm)?;
    d.set_item("psi", out.psi)?;
    d.set_item("kappa", out.kappa)?;
    Ok(d)
}

/// Closed-form ζ for a circle of radius `r`.
#[pyfunction]
fn zeta_circle(r: f64, agents: Vec<(f64, f64, f64)>, k: usize, gains: &PyGains) -> PyResult<f64> {
    let s = states(agents);
    let state = s.get(k).ok_or_else(|| PyIndexError::new_err(format!("agent {k} out of range")))?;
    let thetas: Vec<f64> = s.iter().map(|a| a.theta).collect();
    control::zeta_circle(r, state, &thetas, k, &gains.inner).map_err(to_py)
}

#[pyfunction]
fn order_parameter(psis: Vec<f64>) -> f64 {
    sim::order_parameter(&psis)
}

/// Initial |e| of every agent in a scenario JSON document; raises
/// ValueError listing the problems if the scenario is not runnable.
#[pyfunction]
fn validate_scenario(config: &str) -> PyResult<Vec<f64>> {
    let scenario = parse_scenario(config).map_err(to_py)?;
    let problems = sim::validate(&scenario);
    if !problems.is_empty() {
        let msg: Vec<String> = problems.iter().map(|p| p.to_string()).collect();
        return Err(PyValueError::new_err(msg.join("\n")));
    }
    Ok(sim::initial_errors(&scenario))
}

fn summary_dict<'py>(py: Python<'py>, s: &RunSummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("completed", s.completed)?;
    d.set_item("failure", s.failure.clone())?;
    d.set_item("steps", s.steps)?;
    d.set_item("final_time", s.final_time)?;
    d.set_item("final_order_parameter", s.final_order_parameter)?;
    d.set_item("final_max_e_norm", s.final_max_e_norm)?;
    d.set_item("max_e_norm", s.max_e_norm)?;
    d.set_item("min_margin", s.min_margin)?;
    d.set_item("mean_u_last_10s", s.mean_u_last_10s.clone())?;
    d.set_item("max_abs_zeta_last_10s", s.max_abs_zeta_last_10s)?;
    d.set_item("final_psi", s.final_psi.clone())?;
    d.set_item("pairwise_separations", s.pairwise_separations.clone())?;
    d.set_item("perimeter", s.perimeter)?;
    Ok(d)
}

/// (time, agent, x, y, theta, u, zeta, e_norm, psi)
type Row = (f64, usize, f64, f64, f64, f64, f64, f64, f64);

/// Simulate a scenario JSON document. Returns a summary dict with the
/// logged rows under "trajectory" as (time, agent, x, y, theta, u, zeta,
/// e_norm, psi) tuples. A boundary violation ends the run early and is
/// reported through "completed"/"failure" rather than raised.
#[pyfunction]
#[pyo3(signature = (config, t_final = None))]
fn run_scenario<'py>(py: Python<'py>, config: &str, t_final: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let mut scenario = parse_scenario(config).map_err(to_py)?;
    if let Some(t) = t_final {
        scenario.t_final = t;
    }
    let started = std::time::Instant::now();
    let log = py.detach(|| sim::run(&scenario)).map_err(to_py)?;
    let summary = RunSummary::new(&scenario, &log, started.elapsed().as_secs_f64());
    let d = summary_dict(py, &summary)?;
    let rows: Vec<Row> = log
        .rows
        .iter()
        .map(|r| (r.time, r.agent, r.x, r.y, r.theta, r.u, r.zeta, r.e_norm, r.psi))
        .collect();
    d.set_item("trajectory", rows)?;
    Ok(d)
}

/// Scenario JSON normalised through the parser (defaults filled in).
#[pyfunction]
fn normalize_scenario(config: &str) -> PyResult<String> {
    let file = ScenarioFile::from_json(config).map_err(to_py)?;
    let scenario = file.to_scenario().map_err(to_py)?;
    Ok(ScenarioFile::from_scenario(&scenario).to_json())
}

/// Time direct against interpolated arc length on `curve`.
#[pyfunction(name = "bench")]
#[pyo3(signature = (curve, calls = 100_000, grid = sim::DEFAULT_SIGMA_GRID))]
fn bench_sigma<'py>(py: Python<'py>, curve: &PyCurve, calls: usize, grid: usize) -> PyResult<Bound<'py, PyDict>> {
    let spec = *curve.spec();
    let r = py.detach(|| cli::run_bench(&spec, grid, calls)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("closed_form", r.closed_form)?;
    d.set_item("calls", r.calls)?;
    d.set_item("grid_size", r.grid_size)?;
    d.set_item("direct_ns_per_call", r.direct_ns_per_call)?;
    d.set_item("interp_ns_per_call", r.interp_ns_per_call)?;
    d.set_item("speedup", r.speedup)?;
    d.set_item("certified_max_error", r.certified_max_error)?;
    d.set_item("sweep_max_error", r.sweep_max_error)?;
    Ok(d)
}

#[pymodule]
fn phasebal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(ellint_e, m)?)?;
    m.add_function(wrap_pyfunction!(ellint_e_complete, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_e, m)?)?;
    m.add_function(wrap_pyfunction!(carlson_rf, m)?)?;
    m.add_function(wrap_pyfunction!(carlson_rd, m)?)?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PyGains>()?;
    m.add_function(wrap_pyfunction!(turn_rate, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_circle, m)?)?;
    m.add_function(wrap_pyfunction!(order_parameter, m)?)?;
    m.add_function(wrap_pyfunction!(validate_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(bench_sigma, m)?)?;
    Ok(())
}
