//! Python bindings: configs, single runs, Gamma fits and the scaling helpers.

use pyo3::exceptions::{PyAttributeError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyFloat, PyInt, PyString};
use serde_json::{Map, Value};

use nelson_tunnel::runner::{analyze_times, simulate, FitOptions};
use nelson_tunnel::scaling::{deviation_crossover, scaled_config, ScalingSpec};
use nelson_tunnel::stats::{
    build_histogram, default_bins, fit_gamma_least_squares, fit_gamma_mle, gamma_moments, gamma_pdf, moments,
    wkb_time,
};
use nelson_tunnel::{BarrierSpec, Error, Profile, SimulationConfig, Weighting};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::AboveBarrier { .. } | Error::Domain(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py(py: Python<'_>, v: &Value) -> PyObject {
    match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_py(py),
        Value::Number(n) => match n.as_u64() {
            Some(u) => u.into_py(py),
            None => n.as_f64().unwrap_or(f64::NAN).into_py(py),
        },
        Value::String(s) => s.into_py(py),
        other => other.to_string().into_py(py),
    }
}

fn py_to_json(v: &Bound<'_, PyAny>) -> PyResult<Value> {
    if v.is_none() {
        Ok(Value::Null)
    } else if v.is_instance_of::<PyBool>() {
        Ok(Value::Bool(v.extract()?))
    } else if v.is_instance_of::<PyInt>() {
        Ok(Value::from(v.extract::<u64>()?))
    } else if v.is_instance_of::<PyFloat>() {
        Ok(serde_json::Number::from_f64(v.extract()?)
            .map(Value::Number)
            .ok_or_else(|| PyValueError::new_err("value must be finite"))?)
    } else if v.is_instance_of::<PyString>() {
        Ok(Value::String(v.extract()?))
    } else {
        Err(PyValueError::new_err("unsupported value type"))
    }
}

/// Simulation parameters. Fields are read and written as attributes.
#[pyclass(name = "Config")]
#[derive(Clone)]
struct PyConfig {
    inner: SimulationConfig,
}

impl PyConfig {
    fn fields(&self) -> Map<String, Value> {
        match serde_json::to_value(&self.inner) {
            Ok(Value::Object(m)) => m,
            _ => Map::new(),
        }
    }
}

const OPTIONAL_FIELDS: &[&str] = &["t_final", "bins", "output_dir"];

#[pymethods]
impl PyConfig {
    /// `profile` is "desk" or "paper".
    #[new]
    #[pyo3(signature = (profile = "desk"))]
    fn new(profile: &str) -> PyResult<Self> {
        let p = match profile {
            "desk" => Profile::Desk,
            "paper" => Profile::Paper,
            other => return Err(PyValueError::new_err(format!("unknown profile {other:?}"))),
        };
        Ok(Self { inner: SimulationConfig::profile(p) })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        SimulationConfig::from_text(text).map(|inner| Self { inner }).map_err(py_err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(py_err)
    }

    fn e0(&self) -> f64 {
        self.inner.e0()
    }

    fn kappa(&self) -> PyResult<f64> {
        self.inner.kappa().map_err(py_err)
    }

    fn tau_wkb(&self) -> PyResult<f64> {
        wkb_time(&self.inner.barrier().map_err(py_err)?, self.inner.e0()).map_err(py_err)
    }

    /// Field names.
    fn keys(&self) -> Vec<String> {
        let mut keys: Vec<String> = self.fields().keys().cloned().collect();
        for k in OPTIONAL_FIELDS {
            if !keys.iter().any(|x| x == k) {
                keys.push(k.to_string());
            }
        }
        keys
    }

    fn __getattr__(&self, py: Python<'_>, name: &str) -> PyResult<PyObject> {
        match self.fields().get(name) {
            Some(v) => Ok(json_to_py(py, v)),
            None if OPTIONAL_FIELDS.contains(&name) => Ok(py.None()),
            None => Err(PyAttributeError::new_err(format!("Config has no field {name:?}"))),
        }
    }

    fn __setattr__(&mut self, name: &str, value: &Bound<'_, PyAny>) -> PyResult<()> {
        let mut fields = self.fields();
        if !fields.contains_key(name) && !OPTIONAL_FIELDS.contains(&name) {
            return Err(PyAttributeError::new_err(format!("Config has no field {name:?}")));
        }
        let v = py_to_json(value)?;
        if v.is_null() {
            fields.remove(name);
        } else {
            fields.insert(name.to_string(), v);
        }
        self.inner = serde_json::from_value(Value::Object(fields)).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(())
    }

    fn __repr__(&self) -> String {
        format!("Config(d={}, v0={}, n_paths={}, seed={})", self.inner.d, self.inner.v0, self.inner.n_paths, self.inner.master_seed)
    }
}

/// Result of one simulation.
#[pyclass(name = "Run")]
struct PyRun {
    #[pyo3(get)]
    times: Vec<f64>,
    #[pyo3(get)]
    transmitted: usize,
    #[pyo3(get)]
    reflected: usize,
    #[pyo3(get)]
    undecided: usize,
    #[pyo3(get)]
    transmitted_fraction: f64,
    #[pyo3(get)]
    pde_transmitted_probability: f64,
    #[pyo3(get)]
    kappa_d: f64,
    #[pyo3(get)]
    tau_wkb: f64,
    #[pyo3(get)]
    t_final: f64,
    #[pyo3(get)]
    wall_clock: f64,
    summary: String,
}

#[pymethods]
impl PyRun {
    /// Full run summary as JSON.
    fn summary_json(&self) -> String {
        self.summary.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Run(transmitted={}, reflected={}, undecided={}, kappa_d={:.3})",
            self.transmitted, self.reflected, self.undecided, self.kappa_d
        )
    }
}

/// Propagates the packet and the sample paths to the final time.
#[pyfunction(name = "simulate")]
fn py_simulate(py: Python<'_>, config: &PyConfig) -> PyResult<PyRun> {
    let cfg = config.inner.clone();
    let out = py.allow_threads(|| simulate(&cfg)).map_err(py_err)?;
    let s = &out.summary;
    Ok(PyRun {
        transmitted: s.transmitted,
        reflected: s.reflected,
        undecided: s.undecided,
        transmitted_fraction: s.transmitted_fraction,
        pde_transmitted_probability: s.pde_transmitted_probability,
        kappa_d: s.kappa_d,
        tau_wkb: s.tau_wkb,
        t_final: s.diagnostics.t_final,
        wall_clock: out.wall_clock.as_secs_f64(),
        summary: serde_json::to_string_pretty(s).map_err(|e| PyRuntimeError::new_err(e.to_string()))?,
        times: out.times,
    })
}

/// Histogram, moments and both Gamma fits for a list of times, as JSON.
#[pyfunction]
#[pyo3(signature = (times, bins = None, n_bootstrap = 0, seed = 1))]
fn analyze(times: Vec<f64>, bins: Option<usize>, n_bootstrap: usize, seed: u64) -> PyResult<String> {
    let opts = FitOptions {
        bins,
        n_bootstrap,
        seed,
        ..FitOptions::from_config(&SimulationConfig::default())
    };
    serde_json::to_string_pretty(&analyze_times(&times, &opts)).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Returns `(alpha, beta)` for `P(tau) ~ tau^alpha exp(-tau/beta)`.
#[pyfunction]
#[pyo3(signature = (times, bins = None, poisson = false))]
fn fit_least_squares(times: Vec<f64>, bins: Option<usize>, poisson: bool) -> PyResult<(f64, f64)> {
    let hist = build_histogram(&times, bins.unwrap_or_else(|| default_bins(times.len()))).map_err(py_err)?;
    let w = if poisson { Weighting::Poisson } else { Weighting::Unweighted };
    fit_gamma_least_squares(&hist, w).map(|f| (f.alpha, f.beta)).map_err(py_err)
}

#[pyfunction]
fn fit_mle(times: Vec<f64>) -> PyResult<(f64, f64)> {
    fit_gamma_mle(&times).map(|f| (f.alpha, f.beta)).map_err(py_err)
}

#[pyfunction(name = "gamma_pdf")]
fn py_gamma_pdf(alpha: f64, beta: f64, tau: f64) -> PyResult<f64> {
    gamma_pdf(alpha, beta, tau).map_err(py_err)
}

/// `(mean, sd)` of the Gamma law.
#[pyfunction(name = "gamma_moments")]
fn py_gamma_moments(alpha: f64, beta: f64) -> PyResult<(f64, f64)> {
    gamma_moments(alpha, beta).map_err(py_err)
}

/// Sample `(mean, sd)`.
#[pyfunction(name = "moments")]
fn py_moments(times: Vec<f64>) -> PyResult<(f64, f64)> {
    moments(&times).map_err(py_err)
}

/// Stationary plane-wave transmission coefficient of the square barrier.
#[pyfunction]
#[pyo3(signature = (v0, d, e, m = 1.0, hbar = 1.0))]
fn plane_wave_transmission(v0: f64, d: f64, e: f64, m: f64, hbar: f64) -> PyResult<f64> {
    BarrierSpec::new(v0, d, m, hbar).and_then(|b| b.transmission(e)).map_err(py_err)
}

/// Config of the rescaled problem `X = x/eps`, `T = t/eps`.
#[pyfunction(name = "scaled_config")]
fn py_scaled_config(config: &PyConfig, epsilon: f64) -> PyResult<PyConfig> {
    let spec = ScalingSpec::new(epsilon, config.inner.clone()).map_err(py_err)?;
    scaled_config(&spec).map(|inner| PyConfig { inner }).map_err(py_err)
}

/// Crossover epsilon from `(epsilon, <tau~>, Delta tau~)` triples.
#[pyfunction(name = "deviation_crossover")]
fn py_deviation_crossover(points: Vec<(f64, f64, f64)>) -> PyResult<f64> {
    deviation_crossover(&points).map_err(py_err)
}

#[pymodule]
fn nelson_tunnel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(py_simulate, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(fit_least_squares, m)?)?;
    m.add_function(wrap_pyfunction!(fit_mle, m)?)?;
    m.add_function(wrap_pyfunction!(py_gamma_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(py_gamma_moments, m)?)?;
    m.add_function(wrap_pyfunction!(py_moments, m)?)?;
    m.add_function(wrap_pyfunction!(plane_wave_transmission, m)?)?;
    m.add_function(wrap_pyfunction!(py_scaled_config, m)?)?;
    m.add_function(wrap_pyfunction!(py_deviation_crossover, m)?)?;
    Ok(())
}
