//! Python bindings: instances, cost geometry, the penalty model and the three
//! solvers. Hit ids are 0-based on this side, as in the Rust API.

use pyo3::exceptions::{PyOSError, PyTimeoutError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use trackfind::formulation::{self, QuboModel};
use trackfind::generate::{generate_event, GeneratorConfig};
use trackfind::solve::{self, AnnealSchedule, ExactOptions, SolveReport};
use trackfind::{Error, Hit, Point};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        Error::Timeout => PyTimeoutError::new_err("time limit exceeded"),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Instance", module = "trackfind", frozen)]
struct PyInstance {
    inner: trackfind::Instance,
}

#[pymethods]
impl PyInstance {
    /// Generate a synthetic event with truth.
    #[staticmethod]
    #[pyo3(signature = (tracks, layers=7, seed=0, curvature=None, jitter=None, area_per_track=None))]
    fn generate(
        tracks: usize,
        layers: usize,
        seed: u64,
        curvature: Option<f64>,
        jitter: Option<f64>,
        area_per_track: Option<f64>,
    ) -> PyResult<Self> {
        let mut config = GeneratorConfig::new(tracks, seed);
        config.num_layers = layers;
        if let Some(v) = curvature {
            config.curvature = v;
        }
        if let Some(v) = jitter {
            config.jitter = v;
        }
        if let Some(v) = area_per_track {
            config.area_per_track = v;
        }
        Ok(Self { inner: generate_event(&config).map_err(to_py)? })
    }

    #[staticmethod]
    fn read(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Self { inner: trackfind::io::read_instance(path).map_err(to_py)? })
    }

    fn write(&self, path: std::path::PathBuf) -> PyResult<()> {
        trackfind::io::write_instance(&self.inner, path).map_err(to_py)
    }

    /// The instance in file form.
    fn to_text(&self) -> String {
        trackfind::io::format_instance(&self.inner)
    }

    #[getter]
    fn num_hits(&self) -> usize {
        self.inner.num_hits()
    }

    #[getter]
    fn num_layers(&self) -> usize {
        self.inner.num_layers()
    }

    #[getter]
    fn num_segments(&self) -> usize {
        self.inner.segments().len()
    }

    #[getter]
    fn num_triplets(&self) -> usize {
        self.inner.triplets().len()
    }

    /// `(layer, x, y, z)` per hit.
    fn hits(&self) -> Vec<(usize, f64, f64, f64)> {
        self.inner
            .hits()
            .iter()
            .map(|h| (h.layer, h.position[0], h.position[1], h.position[2]))
            .collect()
    }

    /// `(from, to)` per segment, in variable order.
    fn segments(&self) -> Vec<(usize, usize)> {
        self.inner.segments().iter().map(|s| (s.from, s.to)).collect()
    }

    #[getter]
    fn truth(&self) -> Option<Vec<Vec<usize>>> {
        self.inner.truth().map(<[_]>::to_vec)
    }

    fn true_cost(&self) -> PyResult<f64> {
        self.inner.true_cost().map_err(to_py)
    }

    fn truth_assignment(&self) -> PyResult<Vec<bool>> {
        self.inner.truth_assignment().map_err(to_py)
    }

    fn is_feasible(&self, x: Vec<bool>) -> PyResult<bool> {
        if x.len() != self.inner.segments().len() {
            return Err(to_py(Error::Dimension { expected: self.inner.segments().len(), actual: x.len() }));
        }
        Ok(formulation::check_feasible(&self.inner, &x).feasible)
    }

    fn decode(&self, x: Vec<bool>) -> PyResult<Vec<Vec<usize>>> {
        solve::decode_tracks(&self.inner, &x).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(layers={}, hits={}, segments={}, triplets={})",
            self.inner.num_layers(),
            self.inner.num_hits(),
            self.inner.segments().len(),
            self.inner.triplets().len()
        )
    }
}

#[pyclass(name = "QuboModel", module = "trackfind", frozen)]
struct PyQubo {
    inner: QuboModel,
}

#[pymethods]
impl PyQubo {
    #[getter]
    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    #[getter]
    fn offset(&self) -> f64 {
        self.inner.offset()
    }

    fn energy(&self, x: Vec<bool>) -> PyResult<f64> {
        self.inner.energy(&x).map_err(to_py)
    }

    fn cost_part(&self, x: Vec<bool>) -> PyResult<f64> {
        self.inner.cost_part(&x).map_err(to_py)
    }

    fn penalty_part(&self, x: Vec<bool>) -> PyResult<f64> {
        self.inner.penalty_part(&x).map_err(to_py)
    }

    /// Energy change from flipping `var`.
    fn flip_delta(&self, x: Vec<bool>, var: usize) -> PyResult<f64> {
        if x.len() != self.inner.num_vars() || var >= x.len() {
            return Err(PyValueError::new_err("assignment length or variable out of range"));
        }
        Ok(self.inner.flip_delta(&x, var))
    }
}

fn hit(id: usize, p: Point) -> Hit {
    Hit::new(id, id + 1, p)
}

/// Cosine of the turning angle at `j` between `i -> j` and `j -> k`.
#[pyfunction]
fn cos_beta(i: Point, j: Point, k: Point) -> PyResult<f64> {
    trackfind::cos_beta(&hit(0, i), &hit(1, j), &hit(2, k)).map_err(to_py)
}

#[pyfunction]
fn triplet_cost(i: Point, j: Point, k: Point) -> PyResult<f64> {
    trackfind::triplet_cost(&hit(0, i), &hit(1, j), &hit(2, k)).map_err(to_py)
}

#[pyfunction]
fn gap(computed: f64, reference: f64) -> PyResult<f64> {
    trackfind::bench::gap(computed, reference).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (instance, alpha=100.0, gamma=1.0))]
fn build_qubm(instance: &PyInstance, alpha: f64, gamma: f64) -> PyResult<PyQubo> {
    Ok(PyQubo { inner: formulation::build_qubm(&instance.inner, alpha, gamma).map_err(to_py)? })
}

fn report<'py>(py: Python<'py>, r: SolveReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("method", r.method)?;
    d.set_item("objective", r.objective)?;
    d.set_item("energy", r.energy)?;
    d.set_item("feasible", r.feasible)?;
    d.set_item("assignment", r.assignment)?;
    d.set_item("tracks", r.tracks)?;
    d.set_item("wall_time", r.wall_time)?;
    d.set_item("seed", r.seed)?;
    if let Some(raw) = r.raw {
        let rd = PyDict::new(py);
        rd.set_item("energy", raw.energy)?;
        rd.set_item("objective", raw.objective)?;
        rd.set_item("feasible", raw.feasible)?;
        rd.set_item("repaired", raw.repaired)?;
        d.set_item("raw", rd)?;
    } else {
        d.set_item("raw", py.None())?;
    }
    Ok(d)
}

/// Anneal the penalty model, repairing and decoding the result.
#[pyfunction]
#[pyo3(signature = (instance, alpha=100.0, gamma=1.0, seed=0, sweeps=100, restarts=10))]
fn simulated_annealing<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    alpha: f64,
    gamma: f64,
    seed: u64,
    sweeps: usize,
    restarts: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let schedule = AnnealSchedule { sweeps, restarts, seed, ..AnnealSchedule::default() };
    let inst = &instance.inner;
    let r = py
        .detach(|| {
            let model = formulation::build_qubm(inst, alpha, gamma)?;
            solve::anneal_instance(inst, &model, &schedule, None)
        })
        .map_err(to_py)?;
    report(py, r)
}

#[pyfunction]
#[pyo3(signature = (instance, alpha=100.0, max_hits_per_layer=solve::DEFAULT_EXACT_CAP))]
fn exact_search<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    alpha: f64,
    max_hits_per_layer: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let options = ExactOptions { max_hits_per_layer, ..ExactOptions::default() };
    let inst = &instance.inner;
    let r = py.detach(|| solve::exact_search_with(inst, alpha, &options)).map_err(to_py)?;
    report(py, r)
}

#[pyfunction]
#[pyo3(signature = (instance, alpha=100.0))]
fn greedy_baseline<'py>(py: Python<'py>, instance: &PyInstance, alpha: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = solve::greedy_baseline(&instance.inner, alpha).map_err(to_py)?;
    report(py, r)
}

#[pymodule]
#[pyo3(name = "trackfind")]
fn trackfind_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyQubo>()?;
    m.add_function(wrap_pyfunction!(cos_beta, m)?)?;
    m.add_function(wrap_pyfunction!(triplet_cost, m)?)?;
    m.add_function(wrap_pyfunction!(gap, m)?)?;
    m.add_function(wrap_pyfunction!(build_qubm, m)?)?;
    m.add_function(wrap_pyfunction!(simulated_annealing, m)?)?;
    m.add_function(wrap_pyfunction!(exact_search, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_baseline, m)?)?;
    Ok(())
}
