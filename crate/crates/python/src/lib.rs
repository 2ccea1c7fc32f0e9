//! Python bindings: fields, smoothing profiles, the Burgers right-hand sides and
//! the experiment harness.

use std::collections::HashMap;
use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use speclab::burgers;
use speclab::coefficient::PeriodicFn;
use speclab::diagnostics;
use speclab::fourier::{self, NodalField};
use speclab::harness::{self, Cell, RunOutcome, RunRecord};
use speclab::SpecError;

fn py_err(e: SpecError) -> PyErr {
    match e {
        SpecError::NonFinite { .. } | SpecError::OutOfDomain { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Fourier coefficients of a real trigonometric polynomial of degree N, ordered k = -N..N.
#[pyclass(name = "SpectralField", module = "speclab_py")]
struct PySpectralField {
    inner: fourier::SpectralField,
}

impl From<fourier::SpectralField> for PySpectralField {
    fn from(inner: fourier::SpectralField) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PySpectralField {
    #[new]
    fn new(coeffs: Vec<Complex64>) -> PyResult<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(PyValueError::new_err(format!("need an odd number of coefficients, got {}", coeffs.len())));
        }
        let degree = coeffs.len() / 2;
        let inner = fourier::SpectralField::from_coeffs(degree, coeffs).map_err(py_err)?;
        if inner.hermitian_defect() > 1e-12 * inner.max_abs_coeff().max(1.0) {
            return Err(PyValueError::new_err("coefficients are not those of a real function"));
        }
        Ok(Self { inner })
    }

    /// Discrete Fourier coefficients of samples on the 2N+1 equispaced grid.
    #[staticmethod]
    fn from_values(values: Vec<f64>) -> PyResult<Self> {
        if values.len().is_multiple_of(2) {
            return Err(PyValueError::new_err("the grid has an odd number of points"));
        }
        let nodal = NodalField::new(values.len() / 2, values).map_err(py_err)?;
        Ok(fourier::analyze(&nodal).into())
    }

    /// Projection of `a sin x`.
    #[staticmethod]
    fn sine(degree: usize, amplitude: f64) -> Self {
        PeriodicFn::sine(amplitude).projection(degree).into()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    fn coeff(&self, k: i64) -> Complex64 {
        self.inner.coeff(k)
    }

    /// Values on the 2N+1 grid.
    fn values(&self) -> PyResult<Vec<f64>> {
        Ok(fourier::synthesize(&self.inner).map_err(py_err)?.into_values())
    }

    /// Values on an arbitrary odd-length grid of at least 2N+1 points.
    fn values_on(&self, len: usize) -> PyResult<Vec<f64>> {
        if len.is_multiple_of(2) || len < 2 * self.inner.degree() + 1 {
            return Err(PyValueError::new_err(format!("grid of {len} points cannot carry degree {}", self.inner.degree())));
        }
        Ok(fourier::evaluate_on_grid(&self.inner, len))
    }

    fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    fn inner_product(&self, other: PyRef<'_, Self>) -> PyResult<f64> {
        if other.inner.degree() != self.inner.degree() {
            return Err(PyValueError::new_err("degrees differ"));
        }
        Ok(self.inner.inner(&other.inner))
    }

    fn resized(&self, degree: usize) -> Self {
        self.inner.resized(degree).into()
    }

    fn derivative(&self) -> Self {
        fourier::differentiate(&self.inner).into()
    }

    fn smoothed(&self, profile: PyRef<'_, PySmoothingProfile>) -> PyResult<Self> {
        Ok(fourier::apply_profile(&self.inner, &profile.inner).map_err(py_err)?.into())
    }

    fn total_variation(&self, oversample: Option<usize>) -> f64 {
        diagnostics::total_variation(&self.inner, oversample.unwrap_or(8))
    }

    fn __len__(&self) -> usize {
        self.inner.coeffs().len()
    }

    fn __repr__(&self) -> String {
        format!("SpectralField(degree={}, l2={:.6e})", self.inner.degree(), self.inner.l2_norm())
    }
}

/// Multiplier sequence applied to Fourier modes.
#[pyclass(name = "SmoothingProfile", module = "speclab_py")]
struct PySmoothingProfile {
    inner: fourier::SmoothingProfile,
}

#[pymethods]
impl PySmoothingProfile {
    #[staticmethod]
    fn identity(degree: usize) -> Self {
        Self { inner: fourier::SmoothingProfile::identity(degree) }
    }

    /// Smooth cutoff that vanishes beyond 2N/3.
    #[staticmethod]
    fn two_thirds(degree: usize) -> PyResult<Self> {
        Ok(Self { inner: fourier::SmoothingProfile::two_thirds(degree).map_err(py_err)? })
    }

    #[staticmethod]
    fn sharp_two_thirds(degree: usize) -> Self {
        Self { inner: fourier::SmoothingProfile::sharp_two_thirds(degree) }
    }

    #[staticmethod]
    #[pyo3(signature = (degree, order=1))]
    fn spectral_viscosity(degree: usize, order: u32) -> PyResult<Self> {
        Ok(Self { inner: fourier::SmoothingProfile::spectral_viscosity(degree, order).map_err(py_err)? })
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    /// Factors for k = -N..N.
    fn factors(&self) -> Vec<f64> {
        self.inner.factors().to_vec()
    }

    fn factor(&self, k: i64) -> f64 {
        self.inner.factor(k)
    }

    fn __repr__(&self) -> String {
        format!("SmoothingProfile({:?}, degree={})", self.inner.kind(), self.inner.degree())
    }
}

/// The mollifier on [0, 1]: 1 near 0, 0 from 2/3 on.
#[pyfunction]
fn mollifier(xi: f64) -> f64 {
    fourier::mollifier(xi)
}

/// `I_N f - P_N f` for the degree-M field `exact`.
#[pyfunction]
fn aliasing_error(exact: PyRef<'_, PySpectralField>, degree: usize) -> PyResult<PySpectralField> {
    Ok(fourier::aliasing_error(&exact.inner, degree).map_err(py_err)?.into())
}

/// Right-hand side of the Burgers semi-discretization `scheme`: spectral, two-thirds or sv.
#[pyfunction]
#[pyo3(signature = (u, scheme="spectral", order=1))]
fn burgers_rhs(u: PyRef<'_, PySpectralField>, scheme: &str, order: u32) -> PyResult<PySpectralField> {
    let n = u.inner.degree();
    let out = match scheme {
        "spectral" => burgers::rhs_spectral(&u.inner),
        "two-thirds" => burgers::BurgersScheme::two_thirds(n).and_then(|s| s.rhs(&u.inner)).map_err(py_err)?,
        "sv" => burgers::BurgersScheme::spectral_viscosity(n, order).and_then(|s| s.rhs(&u.inner)).map_err(py_err)?,
        other => return Err(PyValueError::new_err(format!("unknown scheme `{other}`"))),
    };
    Ok(out.into())
}

/// Godunov solution of Burgers from `a sin x`: returns (cell centers, cell averages).
#[pyfunction]
fn godunov_reference(amplitude: f64, t: f64, cells: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let r = burgers::godunov_reference(&PeriodicFn::sine(amplitude), t, cells).map_err(py_err)?;
    Ok((r.centers().collect(), r.values))
}

#[pyfunction]
fn experiments() -> Vec<(&'static str, &'static str)> {
    harness::Experiment::ALL.iter().map(|e| (e.name(), e.description())).collect()
}

fn resolve(experiment: Option<&str>, config: &str, overrides: Option<HashMap<String, String>>) -> PyResult<harness::ExperimentConfig> {
    let mut pairs: Vec<(String, String)> = overrides.unwrap_or_default().into_iter().collect();
    pairs.sort();
    let borrowed: Vec<(&str, String)> = pairs.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    harness::build_config(experiment, config, &borrowed).map_err(py_err)
}

/// Resolved configuration text: defaults, then `config`, then `overrides`.
#[pyfunction]
#[pyo3(signature = (experiment=None, config="", overrides=None))]
fn resolve_config(experiment: Option<&str>, config: &str, overrides: Option<HashMap<String, String>>) -> PyResult<String> {
    Ok(resolve(experiment, config, overrides)?.emit())
}

/// Result of one experiment run.
#[pyclass(name = "RunResult", module = "speclab_py")]
struct PyRunResult {
    record: RunRecord,
}

#[pymethods]
impl PyRunResult {
    #[getter]
    fn exit_code(&self) -> i32 {
        self.record.exit_code()
    }

    #[getter]
    fn outcome(&self) -> String {
        match &self.record.outcome {
            RunOutcome::Completed => "completed".into(),
            RunOutcome::BlowUp { run, t } => format!("blowup: {run} at t = {t}"),
        }
    }

    #[getter]
    fn config(&self) -> String {
        self.record.config.emit()
    }

    fn table_names(&self) -> Vec<String> {
        self.record.tables.iter().map(|t| t.name.clone()).collect()
    }

    /// A table as a dict of column name to list.
    fn table<'py>(&self, py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyDict>> {
        let t = self
            .record
            .tables
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))?;
        let d = PyDict::new(py);
        for (j, col) in t.columns.iter().enumerate() {
            let list = PyList::empty(py);
            for row in &t.rows {
                match &row[j] {
                    Cell::Int(i) => list.append(*i)?,
                    Cell::Float(x) => list.append(*x)?,
                    Cell::Text(s) => list.append(s.as_str())?,
                }
            }
            d.set_item(col, list)?;
        }
        Ok(d)
    }

    fn csv(&self, name: &str) -> PyResult<String> {
        self.record
            .tables
            .iter()
            .find(|t| t.name == name)
            .map(|t| t.to_csv())
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    /// Writes the tables and manifest to `dir`.
    fn write(&self, dir: PathBuf) -> PyResult<()> {
        self.record.write(&dir).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("RunResult({}, {} tables, {})", self.record.config.experiment.name(), self.record.tables.len(), self.outcome())
    }
}

/// Runs a registered experiment. The GIL is released while it runs.
#[pyfunction]
#[pyo3(signature = (experiment, config="", overrides=None))]
fn run_experiment(py: Python<'_>, experiment: &str, config: &str, overrides: Option<HashMap<String, String>>) -> PyResult<PyRunResult> {
    let cfg = resolve(Some(experiment), config, overrides)?;
    let record = py.detach(|| harness::run_experiment(&cfg)).map_err(py_err)?;
    Ok(PyRunResult { record })
}

#[pymodule]
pub fn speclab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectralField>()?;
    m.add_class::<PySmoothingProfile>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(mollifier, m)?)?;
    m.add_function(wrap_pyfunction!(aliasing_error, m)?)?;
    m.add_function(wrap_pyfunction!(burgers_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(godunov_reference, m)?)?;
    m.add_function(wrap_pyfunction!(experiments, m)?)?;
    m.add_function(wrap_pyfunction!(resolve_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
