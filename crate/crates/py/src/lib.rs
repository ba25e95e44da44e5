//! Python bindings: scenarios, the exact/approximate/oracle wavefunction, the
//! grid simulator and the config-driven runner.

use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use stepswitch::composer::{ApproxMode, Composer};
use stepswitch::gridsim::{init_grid, GridParams, GridState};
use stepswitch::observables::{flux_at, omega_av_at};
use stepswitch::run::{parse_term, preset, run, RunConfig};
use stepswitch::transient::DEFAULT_TOL;
use stepswitch::{Error, Incidence};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Overflow { .. } | Error::NoConvergence { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_incidence(s: &str) -> PyResult<Incidence> {
    match s {
        "left" => Ok(Incidence::Left),
        "right" => Ok(Incidence::Right),
        _ => Err(PyValueError::new_err(format!(
            "incidence must be 'left' or 'right', got {s:?}"
        ))),
    }
}

/// Potential-step switch: mass (electron masses), energy and the old and new
/// step depths in eV.
#[pyclass(
    frozen,
    skip_from_py_object,
    name = "Scenario",
    module = "stepswitch_py"
)]
#[derive(Clone)]
struct PyScenario(stepswitch::Scenario);

#[pymethods]
impl PyScenario {
    #[new]
    #[pyo3(signature = (mass, e_q, v0_old, v0_new, incidence = "left"))]
    fn new(mass: f64, e_q: f64, v0_old: f64, v0_new: f64, incidence: &str) -> PyResult<Self> {
        let inc = parse_incidence(incidence)?;
        stepswitch::Scenario::new(mass, e_q, v0_old, v0_new, inc)
            .map(PyScenario)
            .map_err(py_err)
    }

    #[staticmethod]
    fn set_a() -> Self {
        PyScenario(stepswitch::Scenario::set_a())
    }

    #[staticmethod]
    fn set_b() -> Self {
        PyScenario(stepswitch::Scenario::set_b())
    }

    #[staticmethod]
    fn lowered_step() -> Self {
        PyScenario(stepswitch::Scenario::lowered_step())
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    #[getter]
    fn e_q(&self) -> f64 {
        self.0.e_q
    }

    #[getter]
    fn v0_old(&self) -> f64 {
        self.0.v0_old
    }

    #[getter]
    fn v0_new(&self) -> f64 {
        self.0.v0_new
    }

    #[getter]
    fn incidence(&self) -> &'static str {
        match self.0.incidence {
            Incidence::Left => "left",
            Incidence::Right => "right",
        }
    }

    /// Momenta (eV fs / nm) and amplitudes as a dict of complex numbers.
    fn momenta<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = self.0.momenta().map_err(py_err)?;
        let d = PyDict::new(py);
        for (k, v) in [
            ("q0", m.q0),
            ("p0", m.p0),
            ("p0_new", m.p0_new),
            ("r0_l", m.r0_l),
            ("t0_l", m.t0_l),
            ("r0_r", m.r0_r),
            ("t0_r", m.t0_r),
            ("rl", m.rl),
            ("tl", m.tl),
            ("rr", m.rr),
            ("tr", m.tr),
        ] {
            d.set_item(k, v)?;
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let s = &self.0;
        format!(
            "Scenario(mass={}, e_q={}, v0_old={}, v0_new={}, incidence='{}')",
            s.mass,
            s.e_q,
            s.v0_old,
            s.v0_new,
            self.incidence()
        )
    }
}

/// Wavefunction after the switch. Positions in nm, times in fs.
#[pyclass(frozen, name = "Solver", module = "stepswitch_py")]
struct PySolver(Composer);

#[pymethods]
impl PySolver {
    #[new]
    #[pyo3(signature = (scenario, tol = DEFAULT_TOL))]
    fn new(scenario: &PyScenario, tol: f64) -> PyResult<Self> {
        Ok(PySolver(
            Composer::new(&scenario.0).map_err(py_err)?.with_tol(tol),
        ))
    }

    fn exact(&self, x: f64, t: f64) -> PyResult<C64> {
        self.0.exact(x, t).map_err(py_err)
    }

    #[pyo3(signature = (x, t, dominant = false))]
    fn approx(&self, x: f64, t: f64, dominant: bool) -> PyResult<C64> {
        let mode = if dominant {
            ApproxMode::Dominant
        } else {
            ApproxMode::Full
        };
        self.0.approx(x, t, mode).map_err(py_err)
    }

    /// Direct contour quadrature; slow, for checking.
    fn oracle(&self, x: f64, t: f64) -> PyResult<C64> {
        self.0.oracle(x, t).map_err(py_err)
    }

    /// Sum of the branch-cut (I'') contributions.
    fn isecond(&self, x: f64, t: f64) -> PyResult<C64> {
        self.0.isecond_part(x, t).map_err(py_err)
    }

    /// A single weighted-out term such as `"1T"`, for `t > 0`.
    fn term(&self, label: &str, x: f64, t: f64) -> PyResult<C64> {
        let (j, alpha) = parse_term(label).map_err(py_err)?;
        let d = self
            .0
            .terms()
            .iter()
            .find(|d| d.j == j && d.alpha == alpha)
            .expect("all twelve terms are built");
        d.eval(x, t, DEFAULT_TOL).map_err(py_err)
    }

    fn initial(&self, x: f64) -> C64 {
        self.0.initial(x)
    }

    /// Long-time state including its time factor.
    fn longtime(&self, x: f64, t: f64) -> C64 {
        self.0.longtime_at(x, t)
    }

    fn density(&self, x: f64, t: f64) -> PyResult<f64> {
        Ok(self.exact(x, t)?.norm_sqr())
    }

    fn flux(&self, x: f64, t: f64) -> PyResult<f64> {
        let f = |x: f64, t: f64| self.0.exact(x, t);
        flux_at(&f, self.0.scenario.m(), x, t).map_err(py_err)
    }

    /// Local average frequency as hbar * omega in eV; None where psi vanishes.
    fn hbar_omega(&self, x: f64, t: f64) -> PyResult<Option<f64>> {
        let f = |x: f64, t: f64| self.0.exact(x, t);
        omega_av_at(&f, x, t).map_err(py_err)
    }

    /// Exact psi at every x for one time.
    fn profile(&self, xs: Vec<f64>, t: f64) -> PyResult<Vec<C64>> {
        xs.into_iter().map(|x| self.exact(x, t)).collect()
    }
}

/// Crank-Nicolson grid on [-L/2, L/2] started from the old stationary state.
#[pyclass(name = "Grid", module = "stepswitch_py")]
struct PyGrid(GridState);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (scenario, length, n, dt, closed = false))]
    fn new(scenario: &PyScenario, length: f64, n: usize, dt: f64, closed: bool) -> PyResult<Self> {
        let mut p = GridParams::new(length, n, dt);
        if closed {
            p = p.closed();
        }
        init_grid(&scenario.0, p).map(PyGrid).map_err(py_err)
    }

    #[pyo3(signature = (steps = 1))]
    fn step(&mut self, steps: usize) {
        for _ in 0..steps {
            self.0.step();
        }
    }

    #[getter]
    fn t(&self) -> f64 {
        self.0.t
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.dx
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.0.warnings.clone()
    }

    fn x(&self) -> Vec<f64> {
        (0..self.0.n()).map(|i| self.0.x(i)).collect()
    }

    fn psi(&self) -> Vec<C64> {
        self.0.psi.clone()
    }

    fn norm(&self) -> f64 {
        self.0.norm_sqr()
    }

    fn index_of(&self, x: f64) -> usize {
        self.0.index_of(x)
    }

    fn flux(&self, i: usize) -> PyResult<f64> {
        if i >= self.0.n() {
            return Err(PyValueError::new_err(format!(
                "node {i} outside 0..{}",
                self.0.n()
            )));
        }
        Ok(self.0.flux(i))
    }
}

#[pyfunction]
fn faddeeva(z: C64) -> PyResult<C64> {
    stepswitch::faddeeva::w(z).map_err(py_err)
}

/// Run a TOML configuration and return the manifest as JSON.
#[pyfunction]
#[pyo3(signature = (toml, out = None))]
fn run_config(toml: &str, out: Option<std::path::PathBuf>) -> PyResult<String> {
    let mut cfg = RunConfig::from_toml(toml).map_err(py_err)?;
    if out.is_some() {
        cfg.out = out;
    }
    let m = run(&cfg).map_err(py_err)?;
    serde_json::to_string_pretty(&m).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Built-in preset as TOML.
#[pyfunction]
fn preset_toml(name: &str) -> PyResult<String> {
    preset(name).and_then(|c| c.to_toml()).map_err(py_err)
}

#[pymodule]
fn stepswitch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PySolver>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(faddeeva, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(preset_toml, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
