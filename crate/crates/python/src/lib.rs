//! Python module `pypolloss`: channel parameters, moments, output states,
//! Holevo information, capacity sweeps and the verification suite.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use polloss::coherent_channel::{self, CoherentEnsembleParams, HolevoSettings};
use polloss::density::{self, HermitianMatrix};
use polloss::noise_model::{self, ChannelParams, GaussianMoments, Integrator};
use polloss::qubit_channel::{self, LogicalQubit, OutputForm};
use polloss::sweep::CurvePoint;
use polloss::verify::{self, VerifyConfig};

create_exception!(pypolloss, PollossError, PyValueError);

fn to_py(e: polloss::Error) -> PyErr {
    PollossError::new_err(e.to_string())
}

type Matrix = Vec<Vec<Complex64>>;

fn rows(m: &HermitianMatrix) -> Matrix {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_rows(m: Matrix) -> PyResult<HermitianMatrix> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(PollossError::new_err("matrix must be square"));
    }
    HermitianMatrix::from_row_major(n, m.concat()).map_err(to_py)
}

/// Noise parameters (θ*, φ*, σ, x) of the correlated angle distribution.
#[pyclass(name = "ChannelParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyChannelParams(ChannelParams);

#[pymethods]
impl PyChannelParams {
    #[new]
    #[pyo3(signature = (theta_star = 0.0, phi_star = 0.0, sigma = 0.1, x = 0.0))]
    fn new(theta_star: f64, phi_star: f64, sigma: f64, x: f64) -> PyResult<Self> {
        ChannelParams::new(theta_star, phi_star, sigma, x).map(Self).map_err(to_py)
    }

    #[getter]
    fn theta_star(&self) -> f64 {
        self.0.theta_star()
    }
    #[getter]
    fn phi_star(&self) -> f64 {
        self.0.phi_star()
    }
    #[getter]
    fn sigma(&self) -> f64 {
        self.0.sigma()
    }
    #[getter]
    fn x(&self) -> f64 {
        self.0.x()
    }
    #[getter]
    fn periodicity_warning(&self) -> bool {
        self.0.periodicity_warning()
    }

    fn with_x(&self, x: f64) -> PyResult<Self> {
        self.0.with_x(x).map(Self).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "ChannelParams(theta_star={}, phi_star={}, sigma={}, x={})",
            self.0.theta_star(),
            self.0.phi_star(),
            self.0.sigma(),
            self.0.x()
        )
    }
}

#[pyclass(name = "GaussianMoments", frozen, get_all, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyMoments {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    epsilon: f64,
}

impl From<GaussianMoments> for PyMoments {
    fn from(m: GaussianMoments) -> Self {
        Self { a: m.a, b: m.b, c: m.c, d: m.d, e: m.e, epsilon: m.epsilon }
    }
}

#[pymethods]
impl PyMoments {
    fn as_tuple(&self) -> (f64, f64, f64, f64, f64, f64) {
        (self.a, self.b, self.c, self.d, self.e, self.epsilon)
    }

    fn __repr__(&self) -> String {
        format!(
            "GaussianMoments(a={}, b={}, c={}, d={}, e={}, epsilon={})",
            self.a, self.b, self.c, self.d, self.e, self.epsilon
        )
    }
}

#[pyclass(name = "HolevoResult", frozen, get_all, skip_from_py_object)]
pub struct PyHolevoResult {
    chi: f64,
    s_average: f64,
    mean_output_entropy: f64,
    evaluations: usize,
    intervals: usize,
    estimated_error: f64,
}

/// Closed-form Gaussian averages.
#[pyfunction]
fn moments(params: PyChannelParams) -> PyMoments {
    noise_model::moments_closed_form(&params.0).into()
}

/// Numerical moments: Gauss–Hermite with `nodes` per axis, or Monte Carlo
/// with `samples` draws. Returns `(moments, standard_errors or None)`.
#[pyfunction]
#[pyo3(signature = (params, nodes = None, samples = None, seed = 0))]
fn moments_oracle(
    py: Python<'_>,
    params: PyChannelParams,
    nodes: Option<usize>,
    samples: Option<usize>,
    seed: u64,
) -> PyResult<(PyMoments, Option<PyMoments>)> {
    let method = match (nodes, samples) {
        (Some(n), None) => Integrator::Quadrature { nodes: n },
        (None, Some(s)) => Integrator::MonteCarlo { samples: s, seed },
        _ => return Err(PollossError::new_err("give exactly one of `nodes` or `samples`")),
    };
    let est = py.detach(|| noise_model::moments_oracle(&params.0, method)).map_err(to_py)?;
    Ok((est.moments.into(), est.std_errors.map(Into::into)))
}

#[pyfunction]
fn epsilon(params: PyChannelParams) -> f64 {
    qubit_channel::epsilon(&params.0)
}

/// Classical capacity `1 - ε` of the dual-rail channel, in bits.
#[pyfunction]
fn erasure_capacity(params: PyChannelParams) -> f64 {
    qubit_channel::erasure_capacity(&params.0)
}

#[pyfunction]
fn ensemble_l(delta: f64) -> PyResult<f64> {
    let ens = CoherentEnsembleParams::new(delta).map_err(to_py)?;
    coherent_channel::ensemble_l(&ens).map(|l| l.value).map_err(to_py)
}

/// 5×5 output for a weak coherent input of amplitude `alpha` (|alpha| ≤ 0.5).
#[pyfunction]
fn coherent_output_state(params: PyChannelParams, alpha: Complex64) -> PyResult<Matrix> {
    let m = noise_model::moments_closed_form(&params.0);
    coherent_channel::output_state_closed_form(&m, alpha).map(|r| rows(r.matrix())).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, delta = coherent_channel::DEFAULT_DELTA))]
fn average_state(params: PyChannelParams, delta: f64) -> PyResult<Matrix> {
    let ens = CoherentEnsembleParams::new(delta).map_err(to_py)?;
    let m = noise_model::moments_closed_form(&params.0);
    coherent_channel::average_state(&m, &ens).map(|r| rows(r.matrix())).map_err(to_py)
}

/// 3×3 output for the dual-rail qubit `c0|0⟩_L + c1|1⟩_L`.
#[pyfunction]
#[pyo3(signature = (params, c0, c1, mean_rotation = false))]
fn qubit_output_state(params: PyChannelParams, c0: Complex64, c1: Complex64, mean_rotation: bool) -> PyResult<Matrix> {
    let psi = LogicalQubit::new(c0, c1).map_err(to_py)?;
    let form = if mean_rotation { OutputForm::MeanRotation } else { OutputForm::Exact };
    qubit_channel::channel_output(&params.0, &psi, form).map(|r| rows(r.matrix())).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, delta = coherent_channel::DEFAULT_DELTA, rel_tol = 1e-10))]
fn holevo_chi(py: Python<'_>, params: PyChannelParams, delta: f64, rel_tol: f64) -> PyResult<PyHolevoResult> {
    let ens = CoherentEnsembleParams::new(delta).map_err(to_py)?;
    let settings = HolevoSettings { rel_tol, ..HolevoSettings::default() };
    let r = py.detach(|| coherent_channel::holevo_chi(&params.0, &ens, settings)).map_err(to_py)?;
    Ok(PyHolevoResult {
        chi: r.chi,
        s_average: r.s_average,
        mean_output_entropy: r.mean_output_entropy,
        evaluations: r.evaluations,
        intervals: r.intervals,
        estimated_error: r.estimated_error,
    })
}

fn sweep_base(theta_star: f64, phi_star: f64, sigma_list: &[f64], x_grid: &[f64]) -> PyResult<ChannelParams> {
    let (Some(&s), Some(&x)) = (sigma_list.first(), x_grid.first()) else {
        return Err(PollossError::new_err("empty x grid or sigma list"));
    };
    ChannelParams::new(theta_star, phi_star, s, x).map_err(to_py)
}

fn triples(points: Vec<CurvePoint>) -> Vec<(f64, f64, f64)> {
    points.into_iter().map(|p| (p.x, p.sigma, p.value)).collect()
}

/// Holevo information over the grid, as `(x, sigma, chi)` rows in σ-major order.
#[pyfunction]
#[pyo3(signature = (sigma_list, x_grid, delta = coherent_channel::DEFAULT_DELTA, theta_star = 0.0, phi_star = 0.0))]
fn coherent_sweep(
    py: Python<'_>,
    sigma_list: Vec<f64>,
    x_grid: Vec<f64>,
    delta: f64,
    theta_star: f64,
    phi_star: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let base = sweep_base(theta_star, phi_star, &sigma_list, &x_grid)?;
    let ens = CoherentEnsembleParams::new(delta).map_err(to_py)?;
    py.detach(|| coherent_channel::sweep_x(&base, &ens, &x_grid, &sigma_list, HolevoSettings::default()))
        .map(triples)
        .map_err(to_py)
}

/// Erasure capacity over the grid, as `(x, sigma, capacity)` rows in σ-major order.
#[pyfunction]
#[pyo3(signature = (sigma_list, x_grid, theta_star = 0.0, phi_star = 0.0))]
fn qubit_sweep(
    sigma_list: Vec<f64>,
    x_grid: Vec<f64>,
    theta_star: f64,
    phi_star: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let base = sweep_base(theta_star, phi_star, &sigma_list, &x_grid)?;
    qubit_channel::sweep_x(&base, &x_grid, &sigma_list).map(triples).map_err(to_py)
}

/// Descending eigenvalues of a Hermitian matrix given as nested lists.
#[pyfunction]
fn eigenvalues(matrix: Matrix) -> PyResult<Vec<f64>> {
    density::eigenvalues(&from_rows(matrix)?, density::DEFAULT_EIGEN_TOL).map_err(to_py)
}

/// Von Neumann entropy in bits.
#[pyfunction]
fn von_neumann_entropy(matrix: Matrix) -> PyResult<f64> {
    density::von_neumann_entropy(&from_rows(matrix)?).map_err(to_py)
}

/// Runs the oracle cross-checks; returns `(all_passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (seed = 1, samples = 200_000, nodes = 40, cases = 1000))]
fn run_verify(py: Python<'_>, seed: u64, samples: usize, nodes: usize, cases: usize) -> PyResult<(bool, String)> {
    let config = VerifyConfig { seed, mc_samples: samples, quadrature_nodes: nodes, random_cases: cases };
    let report = py.detach(|| verify::run(&config)).map_err(to_py)?;
    Ok((report.passed(), report.to_string()))
}

/// Adds every class and function to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PollossError", m.py().get_type::<PollossError>())?;
    m.add_class::<PyChannelParams>()?;
    m.add_class::<PyMoments>()?;
    m.add_class::<PyHolevoResult>()?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(moments_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(erasure_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble_l, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_output_state, m)?)?;
    m.add_function(wrap_pyfunction!(average_state, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_output_state, m)?)?;
    m.add_function(wrap_pyfunction!(holevo_chi, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}

#[pymodule]
fn pypolloss(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
