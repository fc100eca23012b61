//! Python bindings: graphs, codes, noise sampling, the three decoders and
//! the experiment drivers.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qexpander::analysis::Classifier;
use qexpander::decoder::{
    color_generators, decode_beta, decode_parallel, decode_ratio, f0_steps, precompute_flips, Beta, Coloring,
    ConstantsLedger, FlipTable, Stopping, Variant,
};
use qexpander::harness::{run_cycles, run_invariant_audit, run_sweep, Experiment, ExperimentConfig, StoppingRule};
use qexpander::noise::{sample_error as sample, trial_rng, NoiseSpec};
use qexpander::{build_code, sample_biregular, BipartiteGraph, BitSet, CssCode, QubitLabel};

fn to_py(e: qexpander::Error) -> PyErr {
    match e {
        qexpander::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn bits(len: usize, indices: &[usize], what: &str) -> PyResult<BitSet> {
    if let Some(&i) = indices.iter().find(|&&i| i >= len) {
        return Err(PyValueError::new_err(format!("{what} index {i} out of range ({len})")));
    }
    let mut s = BitSet::new(len);
    for &i in indices {
        s.toggle(i);
    }
    Ok(s)
}

fn json_to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// `(d_A, d_B)`-biregular bipartite graph.
#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: BipartiteGraph,
}

#[pymethods]
impl PyGraph {
    /// Random biregular graph (configuration model, resampled until simple).
    #[staticmethod]
    #[pyo3(signature = (n_a, d_a=5, d_b=10, seed=1))]
    fn sample(n_a: usize, d_a: usize, d_b: usize, seed: u64) -> PyResult<Self> {
        Ok(PyGraph { inner: sample_biregular(n_a, d_a, d_b, seed).map_err(to_py)? })
    }

    /// The 3-bit repetition seed `[[1,1,0],[0,1,1]]`.
    #[staticmethod]
    fn toy() -> PyResult<Self> {
        let inner = BipartiteGraph::from_parity_check(&[vec![1, 1, 0], vec![0, 1, 1]]).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        Ok(PyGraph { inner: BipartiteGraph::read(path).map_err(to_py)? })
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        self.inner.write(path).map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn n_a(&self) -> usize {
        self.inner.n_a()
    }
    #[getter]
    fn n_b(&self) -> usize {
        self.inner.n_b()
    }
    #[getter]
    fn d_a(&self) -> usize {
        self.inner.d_a()
    }
    #[getter]
    fn d_b(&self) -> usize {
        self.inner.d_b()
    }

    fn left_neighbors(&self, a: usize) -> PyResult<Vec<usize>> {
        if a >= self.inner.n_a() {
            return Err(PyValueError::new_err(format!("left vertex {a} out of range")));
        }
        Ok(self.inner.left_neighbors(a).to_vec())
    }

    fn __repr__(&self) -> String {
        let g = &self.inner;
        format!("Graph(n_a={}, n_b={}, d_a={}, d_b={})", g.n_a(), g.n_b(), g.d_a(), g.d_b())
    }
}

/// Hypergraph-product CSS code of a seed graph.
#[pyclass(name = "Code", frozen)]
struct PyCode {
    inner: Arc<CssCode>,
}

#[pymethods]
impl PyCode {
    #[new]
    fn new(graph: &PyGraph) -> Self {
        PyCode { inner: Arc::new(build_code(&graph.inner)) }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }
    #[getter]
    fn num_checks(&self) -> usize {
        self.inner.num_checks()
    }
    #[getter]
    fn num_generators(&self) -> usize {
        self.inner.num_generators()
    }
    /// Number of logical qubits, from GF(2) ranks.
    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    /// Checks flipped by an X error on `error`.
    fn syndrome(&self, error: Vec<usize>) -> PyResult<Vec<usize>> {
        let e = bits(self.inner.n(), &error, "qubit")?;
        Ok(self.inner.syndrome(&e).to_indices())
    }

    fn check_support(&self, c: usize) -> PyResult<Vec<usize>> {
        if c >= self.inner.num_checks() {
            return Err(PyValueError::new_err(format!("check {c} out of range")));
        }
        Ok(self.inner.check_support(c).to_vec())
    }

    fn generator_support(&self, g: usize) -> PyResult<Vec<usize>> {
        if g >= self.inner.num_generators() {
            return Err(PyValueError::new_err(format!("generator {g} out of range")));
        }
        Ok(self.inner.generator_support(g).to_vec())
    }

    /// `("aa", alpha, a)` or `("bb", b, beta)`.
    fn label(&self, v: usize) -> PyResult<(&'static str, usize, usize)> {
        if v >= self.inner.n() {
            return Err(PyValueError::new_err(format!("qubit {v} out of range")));
        }
        Ok(match self.inner.label(v) {
            QubitLabel::LeftPair { alpha, a } => ("aa", alpha, a),
            QubitLabel::RightPair { b, beta } => ("bb", b, beta),
        })
    }

    /// Samples `(E, D)` from i.i.d. noise on RNG stream `stream` of `seed`.
    #[pyo3(signature = (p_phys, p_synd=0.0, seed=0, stream=0))]
    fn sample_error(&self, p_phys: f64, p_synd: f64, seed: u64, stream: u64) -> PyResult<(Vec<usize>, Vec<usize>)> {
        let spec = NoiseSpec::iid(p_phys, p_synd);
        spec.validate(self.inner.n(), self.inner.num_checks()).map_err(to_py)?;
        let (e, d) = sample(&spec, &self.inner, &mut trial_rng(seed, stream));
        Ok((e.to_indices(), d.to_indices()))
    }

    fn __repr__(&self) -> String {
        format!("Code(n={}, checks={})", self.inner.n(), self.inner.num_checks())
    }
}

/// Small-set-flip decoder with precomputed flip tables and coloring.
#[pyclass(name = "Decoder", frozen)]
struct PyDecoder {
    code: Arc<CssCode>,
    table: FlipTable,
    coloring: Coloring,
    classifier: Classifier,
    beta: Beta,
    ledger: ConstantsLedger,
}

#[pymethods]
impl PyDecoder {
    #[new]
    #[pyo3(signature = (code, beta="1/2", delta=0.025, c=18.0, gamma=0.1))]
    fn new(py: Python<'_>, code: &PyCode, beta: &str, delta: f64, c: f64, gamma: f64) -> PyResult<Self> {
        let beta: Beta = beta.parse().map_err(to_py)?;
        let code = code.inner.clone();
        let ledger = ConstantsLedger::new(code.d_a(), code.d_b(), delta, beta.value(), c, gamma);
        let (table, coloring, classifier) = py.detach(|| -> qexpander::Result<_> {
            let table = precompute_flips(&code)?;
            let coloring = color_generators(&table);
            let classifier = Classifier::new(&code);
            Ok((table, coloring, classifier))
        })
        .map_err(to_py)?;
        Ok(PyDecoder { code, table, coloring, classifier, beta, ledger })
    }

    #[getter]
    fn num_colors(&self) -> usize {
        self.coloring.num_colors()
    }

    #[getter]
    fn beta(&self) -> String {
        self.beta.to_string()
    }

    /// Decodes a syndrome given as check indices. Returns a dict with the
    /// correction, final syndrome, step counts and the text flip log.
    #[pyo3(signature = (syndrome, variant="beta", stopping="fixpoint"))]
    fn decode<'py>(
        &self,
        py: Python<'py>,
        syndrome: Vec<usize>,
        variant: &str,
        stopping: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let sigma = bits(self.code.num_checks(), &syndrome, "check")?;
        let variant: Variant = variant.parse().map_err(to_py)?;
        let stopping: StoppingRule = stopping.parse().map_err(to_py)?;
        let out = py
            .detach(|| -> qexpander::Result<_> {
                Ok(match variant {
                    Variant::Ratio => decode_ratio(&self.code, &self.table, &sigma),
                    Variant::Beta => decode_beta(&self.code, &self.table, &sigma, self.beta),
                    Variant::Parallel => {
                        let stopping = match stopping {
                            StoppingRule::Fixpoint => Stopping::Fixpoint,
                            StoppingRule::F0 => Stopping::F0Budget { steps: f0_steps(sigma.weight(), &self.ledger)? },
                        };
                        decode_parallel(&self.code, &self.table, &self.coloring, &sigma, self.beta, stopping)
                    }
                })
            })
            .map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("correction", out.correction.to_indices())?;
        d.set_item("final_syndrome", out.final_syndrome.to_indices())?;
        d.set_item("steps", out.steps)?;
        d.set_item("sweeps", out.sweeps)?;
        d.set_item("syndrome_trace", out.syndrome_trace.clone())?;
        d.set_item("flip_log", out.flip_log_text())?;
        Ok(d)
    }

    /// Outcome class of correcting `error` with `correction`:
    /// `(class, residual_weight)`.
    fn classify(&self, error: Vec<usize>, correction: Vec<usize>) -> PyResult<(&'static str, usize)> {
        let e = bits(self.code.n(), &error, "qubit")?;
        let e_hat = bits(self.code.n(), &correction, "qubit")?;
        let c = self.classifier.classify(&self.code, &e, &e_hat);
        Ok((c.class.as_str(), c.residual_weight))
    }
}

fn load_experiment(py: Python<'_>, config: PathBuf) -> PyResult<Experiment> {
    py.detach(|| {
        let (cfg, base) = ExperimentConfig::load(&config)?;
        Experiment::prepare(cfg, &base)
    })
    .map_err(to_py)
}

/// Runs the sweep described by a config file; returns the summary.
#[pyfunction]
fn sweep(py: Python<'_>, config: PathBuf) -> PyResult<Bound<'_, PyAny>> {
    let exp = load_experiment(py, config)?;
    let report = py.detach(|| run_sweep(&exp)).map_err(to_py)?;
    json_to_py(py, &report)
}

/// Runs the cycle experiment described by a config file; returns the summary.
#[pyfunction]
fn cycles(py: Python<'_>, config: PathBuf) -> PyResult<Bound<'_, PyAny>> {
    let exp = load_experiment(py, config)?;
    let report = py.detach(|| run_cycles(&exp)).map_err(to_py)?;
    json_to_py(py, &report)
}

/// Runs the invariant audit described by a config file; returns the summary
/// (its `passed` field is false on any violation).
#[pyfunction]
fn audit(py: Python<'_>, config: PathBuf) -> PyResult<Bound<'_, PyAny>> {
    let exp = load_experiment(py, config)?;
    let report = py.detach(|| run_invariant_audit(&exp)).map_err(to_py)?;
    json_to_py(py, &report)
}

#[pymodule]
fn pyqexpander(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyCode>()?;
    m.add_class::<PyDecoder>()?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(cycles, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    Ok(())
}
