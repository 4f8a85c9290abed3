//! Python bindings. Structured results come back as plain dicts and lists;
//! configuration objects are accepted as dicts with the same layout as the
//! JSON configs of the command-line tool.

use holderlab::balance_solver::{self, Manufactured, SolverConfig};
use holderlab::kinetic_geometry::{self as kg, Geometry, GridSolution, GridSpec, KineticBox};
use holderlab::matrix_decomp as md;
use holderlab::regularity_estimator::{self as re, Variant};
use holderlab::{FluxModel, FluxSpec};
use nalgebra::DMatrix;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn err(e: holderlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let s: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&s).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn geometry(name: &str) -> PyResult<Geometry> {
    match name {
        "cube" => Ok(Geometry::Cube),
        "ball" => Ok(Geometry::Ball),
        _ => Err(PyValueError::new_err(format!("unknown geometry {name:?}"))),
    }
}

#[pyclass(name = "Flux", frozen)]
struct PyFlux(FluxModel);

#[pymethods]
impl PyFlux {
    #[staticmethod]
    fn burgers(d: usize) -> PyResult<Self> {
        FluxModel::burgers(d).map(Self).map_err(err)
    }

    /// Components as ascending monomial coefficients.
    #[staticmethod]
    fn polynomial(components: Vec<Vec<f64>>) -> PyResult<Self> {
        FluxModel::polynomial(components).map(Self).map_err(err)
    }

    /// Component values on a uniform grid of `[0, 1]`.
    #[staticmethod]
    fn tabulated(values: Vec<Vec<f64>>) -> PyResult<Self> {
        FluxModel::tabulated(values).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_spec(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        let spec: FluxSpec = from_py(spec)?;
        FluxModel::from_spec(&spec).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval_deriv(&self, v: f64, k: usize) -> PyResult<Vec<f64>> {
        self.0.eval_deriv(v, k).map_err(err)
    }

    fn nonlinearity_measure(&self, tau: f64, xi: Vec<f64>, delta: f64) -> PyResult<f64> {
        self.0.nonlinearity_measure(tau, &xi, delta).map_err(err)
    }

    #[pyo3(signature = (n_directions, deltas, seed = 0))]
    fn fit_alpha<'py>(&self, py: Python<'py>, n_directions: usize, deltas: Vec<f64>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let report = self.0.fit_alpha(n_directions, &deltas, seed).map_err(err)?;
        to_py(py, &report)
    }

    fn wronskian(&self, v: f64) -> PyResult<Vec<Vec<f64>>> {
        self.0.wronskian(v).map(|m| rows(&m)).map_err(err)
    }

    #[pyo3(signature = (v, tol = 1e-10))]
    fn spanning_check<'py>(&self, py: Python<'py>, v: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.spanning_check(v, tol).map_err(err)?)
    }
}

#[pyfunction]
fn build_h(d: usize, h: f64) -> PyResult<Vec<Vec<f64>>> {
    md::build_h(d, h).map(|m| rows(&m.matrix)).map_err(err)
}

#[pyfunction]
fn invert_h(d: usize, h: f64) -> PyResult<Vec<Vec<f64>>> {
    let m = md::build_h(d, h).map_err(err)?;
    md::invert_h(&m).map(|m| rows(&m)).map_err(err)
}

#[pyfunction]
fn h_inverse_norm_certificate<'py>(py: Python<'py>, d: usize, h_list: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &md::h_inverse_norm_certificate(d, &h_list).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (flux, v, h, a, method = "improved", alpha = 1.0))]
fn decompose<'py>(py: Python<'py>, flux: &PyFlux, v: f64, h: f64, a: Vec<f64>, method: &str, alpha: f64) -> PyResult<Bound<'py, PyAny>> {
    let dec = match method {
        "improved" => md::decompose_improved(&flux.0, v, h, &a),
        "general" => md::decompose_general(&flux.0, v, h, &a, alpha),
        _ => return Err(PyValueError::new_err(format!("unknown method {method:?}"))),
    }
    .map_err(err)?;
    to_py(py, &dec)
}

#[pyclass(name = "Solution", frozen)]
struct PySolution(GridSolution);

#[pymethods]
impl PySolution {
    /// Build from row-major slices, one per time.
    #[new]
    fn new(shape: Vec<usize>, lower: Vec<f64>, dx: f64, times: Vec<f64>, slices: Vec<Vec<f64>>) -> PyResult<Self> {
        GridSolution::new(shape, lower, dx, times, slices).map(Self).map_err(err)
    }

    #[staticmethod]
    fn read(path: std::path::PathBuf) -> PyResult<Self> {
        GridSolution::read_binary(&path).map(Self).map_err(err)
    }

    fn write(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.0.write_binary(&path).map_err(err)
    }

    #[getter]
    fn shape(&self) -> Vec<usize> {
        self.0.shape().to_vec()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.dx()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times().to_vec()
    }

    fn slice(&self, t_index: usize) -> PyResult<Vec<f64>> {
        self.0.slice(t_index).map(<[f64]>::to_vec).map_err(err)
    }

    fn manifest<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.manifest())
    }
}

/// Run the finite-volume solver on a solver config dict.
#[pyfunction]
fn solve(py: Python<'_>, config: &Bound<'_, PyAny>) -> PyResult<PySolution> {
    let cfg: SolverConfig = from_py(config)?;
    py.detach(|| balance_solver::solve(&cfg)).map(PySolution).map_err(err)
}

/// Sample a manufactured solution, e.g. `{"kind": "riemann_rarefaction", "x0": 0.5}`.
#[pyfunction]
fn manufactured(kind: &Bound<'_, PyAny>, grid: &Bound<'_, PyAny>, times: Vec<f64>) -> PyResult<PySolution> {
    let kind: Manufactured = from_py(kind)?;
    let grid: GridSpec = from_py(grid)?;
    balance_solver::manufactured(&kind, &grid, &times).map(PySolution).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (sol, t_index, x, r, geometry = "cube"))]
fn h_r(sol: &PySolution, t_index: usize, x: Vec<f64>, r: f64, geometry: &str) -> PyResult<f64> {
    re::h_r(&sol.0, t_index, &x, r, self::geometry(geometry)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (sol, t_index, x, radii, geometry = "cube"))]
fn oscillation_profile<'py>(
    py: Python<'py>,
    sol: &PySolution,
    t_index: usize,
    x: Vec<f64>,
    radii: Vec<f64>,
    geometry: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let g = self::geometry(geometry)?;
    let p = py.detach(|| re::oscillation_profile(&sol.0, t_index, &x, &radii, g)).map_err(err)?;
    to_py(py, &p)
}

#[pyfunction]
#[pyo3(signature = (sol, t_index, gamma, sample_pairs = 10000, seed = 0))]
fn empirical_holder(sol: &PySolution, t_index: usize, gamma: f64, sample_pairs: usize, seed: u64) -> PyResult<f64> {
    re::empirical_holder(&sol.0, t_index, gamma, sample_pairs, seed).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (d, alpha = 1.0, tol = 1e-13, variant = "alpha_nonlinear", g_norm = 0.0))]
fn bootstrap<'py>(py: Python<'py>, d: usize, alpha: f64, tol: f64, variant: &str, g_norm: f64) -> PyResult<Bound<'py, PyAny>> {
    let variant: Variant = from_py(&variant.into_pyobject(py)?.into_any())?;
    to_py(py, &re::bootstrap_iterate(d, alpha, tol, variant, g_norm).map_err(err)?)
}

#[pyfunction]
fn holder_constant(c: f64, gamma: f64) -> PyResult<f64> {
    re::holder_constant(c, gamma).map_err(err)
}

#[pyfunction]
fn theory_constants<'py>(py: Python<'py>, g_norm: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &re::corollary_constants(g_norm).map_err(err)?)
}

/// Compare hypograph masses before and after free transport of a kinetic box
/// (`{"center", "radius", "v_lower", "width"}`).
#[pyfunction]
fn verify_transport_estimate<'py>(
    py: Python<'py>,
    sol: &PySolution,
    flux: &PyFlux,
    kbox: &Bound<'py, PyAny>,
    t0_index: usize,
    horizon: f64,
    g_bound: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let kbox: KineticBox = from_py(kbox)?;
    let c = kg::verify_transport_estimate(&sol.0, &flux.0, &kbox, t0_index, horizon, g_bound).map_err(err)?;
    to_py(py, &c)
}

#[pymodule]
pub fn pyholderlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFlux>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(build_h, m)?)?;
    m.add_function(wrap_pyfunction!(invert_h, m)?)?;
    m.add_function(wrap_pyfunction!(h_inverse_norm_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(manufactured, m)?)?;
    m.add_function(wrap_pyfunction!(h_r, m)?)?;
    m.add_function(wrap_pyfunction!(oscillation_profile, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_holder, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap, m)?)?;
    m.add_function(wrap_pyfunction!(holder_constant, m)?)?;
    m.add_function(wrap_pyfunction!(theory_constants, m)?)?;
    m.add_function(wrap_pyfunction!(verify_transport_estimate, m)?)?;
    Ok(())
}
