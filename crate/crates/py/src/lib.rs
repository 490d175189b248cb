//! Python bindings: assertion algebra, scenario configs, runs and the
//! session game.

use friendcast::output::{self, CONVERGENCE_THRESHOLD};
use friendcast::{Error, KnowledgeBase};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn to_py(err: Error) -> PyErr {
    if err.is_config() {
        PyValueError::new_err(err.to_string())
    } else {
        PyOSError::new_err(err.to_string())
    }
}

/// One actor's instance of an assertion: knowledge in [0, 1], belief in [-1, 1].
#[pyclass(frozen, eq, from_py_object)]
#[derive(Clone, Copy, PartialEq)]
struct Assertion(friendcast::Assertion);

#[pymethods]
impl Assertion {
    #[new]
    fn new(knowledge: f64, belief: f64) -> PyResult<Self> {
        friendcast::Assertion::new(knowledge, belief)
            .map(Assertion)
            .map_err(to_py)
    }

    #[getter]
    fn knowledge(&self) -> f64 {
        self.0.knowledge()
    }

    #[getter]
    fn belief(&self) -> f64 {
        self.0.belief()
    }

    #[getter]
    fn value(&self) -> f64 {
        self.0.value()
    }

    fn __repr__(&self) -> String {
        format!(
            "Assertion(knowledge={}, belief={})",
            self.0.knowledge(),
            self.0.belief()
        )
    }
}

/// `x ⊕ y`.
#[pyfunction]
fn learn(x: Assertion, y: Assertion) -> Assertion {
    Assertion(friendcast::learn(x.0, y.0))
}

fn kb(assertions: &[Assertion]) -> KnowledgeBase {
    KnowledgeBase::new(assertions.iter().map(|a| a.0).collect())
}

/// Mean absolute value of a knowledge base.
#[pyfunction]
fn average_knowledge(assertions: Vec<Assertion>) -> PyResult<f64> {
    kb(&assertions).average_knowledge().map_err(to_py)
}

/// One tick of forgetting with remembrance `zeta`.
#[pyfunction]
fn forget(assertions: Vec<Assertion>, zeta: f64) -> PyResult<Vec<Assertion>> {
    let faded = kb(&assertions).forget(zeta).map_err(to_py)?;
    Ok(faded.iter().map(|a| Assertion(*a)).collect())
}

#[pyclass(frozen, from_py_object)]
#[derive(Clone, Copy)]
struct Personality(friendcast::Personality);

#[pymethods]
impl Personality {
    #[new]
    fn new(kappa: f64, rho: f64, pi: f64) -> PyResult<Self> {
        friendcast::Personality::new(kappa, rho, pi)
            .map(Personality)
            .map_err(to_py)
    }

    #[staticmethod]
    fn expert() -> Self {
        Personality(friendcast::Personality::EXPERT)
    }

    #[staticmethod]
    fn troll() -> Self {
        Personality(friendcast::Personality::TROLL)
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.0.rho
    }

    #[getter]
    fn pi(&self) -> f64 {
        self.0.pi
    }

    /// Utility for the given knowledge, reputation and popularity.
    fn utility(&self, knowledge: f64, reputation: f64, popularity: f64) -> f64 {
        self.0.combine(knowledge, reputation, popularity)
    }

    fn __repr__(&self) -> String {
        format!(
            "Personality(kappa={}, rho={}, pi={})",
            self.0.kappa, self.0.rho, self.0.pi
        )
    }
}

#[pyclass(from_py_object)]
#[derive(Clone)]
struct ScenarioConfig(friendcast::ScenarioConfig);

#[pymethods]
impl ScenarioConfig {
    #[new]
    fn new() -> Self {
        ScenarioConfig(friendcast::ScenarioConfig::default())
    }

    /// A built-in scenario by name.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        friendcast::ScenarioConfig::builtin(name)
            .map(ScenarioConfig)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(ScenarioConfig)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Overrides one parameter, given as text as on the command line.
    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        self.0.set_param(key, value).map_err(to_py)
    }

    fn validate(&self) -> PyResult<()> {
        self.0.validate().map_err(to_py)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.rng_seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.0.rng_seed = seed;
    }

    #[getter]
    fn n_steps(&self) -> u64 {
        self.0.n_steps
    }

    #[setter]
    fn set_n_steps(&mut self, steps: u64) {
        self.0.n_steps = steps;
    }

    #[getter]
    fn personality(&self) -> Personality {
        Personality(self.0.personality)
    }
}

/// Names of the built-in scenarios.
#[pyfunction]
fn scenarios() -> Vec<String> {
    friendcast::ScenarioConfig::builtins()
        .into_iter()
        .map(|c| c.name)
        .collect()
}

#[pyclass(frozen, get_all)]
struct Snapshot {
    step: u64,
    population_mean: f64,
    population_std: f64,
    population_mean_abs: f64,
    mean_value: Vec<f64>,
    mean_abs_value: Vec<f64>,
    popularity: Vec<f64>,
    reputation: Vec<f64>,
    histogram: Vec<u64>,
}

#[pyclass(frozen, get_all)]
struct RunResult {
    snapshots: Vec<Py<Snapshot>>,
    steps_to_threshold: Option<u64>,
    sender_send_rate: f64,
    feedback_rate: f64,
}

/// Runs a scenario to completion.
#[pyfunction]
fn run(py: Python<'_>, config: &ScenarioConfig) -> PyResult<RunResult> {
    config.0.validate().map_err(to_py)?;
    let cfg = config.0.clone();
    let out = py.detach(move || friendcast::run(&cfg)).map_err(to_py)?;
    let snapshots = out
        .snapshots
        .iter()
        .map(|s| {
            Py::new(
                py,
                Snapshot {
                    step: s.step,
                    population_mean: s.population_mean,
                    population_std: s.population_std,
                    population_mean_abs: s.population_mean_abs,
                    mean_value: s.mean_value.clone(),
                    mean_abs_value: s.mean_abs_value.clone(),
                    popularity: s.popularity.clone(),
                    reputation: s.reputation.clone(),
                    histogram: s.histogram.to_vec(),
                },
            )
        })
        .collect::<PyResult<Vec<_>>>()?;
    Ok(RunResult {
        snapshots,
        steps_to_threshold: output::steps_to_threshold(&out.snapshots, CONVERGENCE_THRESHOLD),
        sender_send_rate: out.stats.send_rate(),
        feedback_rate: out.stats.feedback_rate(),
    })
}

/// Payoffs of the session game, one row per profile in lexicographic order.
#[pyclass(frozen)]
struct PayoffTensor(friendcast::PayoffTensor);

#[pymethods]
impl PayoffTensor {
    #[new]
    fn new(n_receivers: usize, payoffs: Vec<Vec<f64>>) -> PyResult<Self> {
        friendcast::PayoffTensor::new(n_receivers, payoffs)
            .map(PayoffTensor)
            .map_err(to_py)
    }

    #[getter]
    fn n_receivers(&self) -> usize {
        self.0.n_receivers()
    }

    fn payoffs(&self, index: usize) -> PyResult<Vec<f64>> {
        if index >= self.0.n_profiles() {
            return Err(PyValueError::new_err(format!(
                "profile {index} out of range"
            )));
        }
        Ok((0..self.0.n_players())
            .map(|p| self.0.payoff_at(index, p))
            .collect())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// Pure equilibria, each rendered like `"S F-"`.
#[pyfunction]
fn find_pure_nash(tensor: &PayoffTensor) -> Vec<String> {
    friendcast::find_pure_nash(&tensor.0)
        .iter()
        .map(|p| p.to_string())
        .collect()
}

/// The profile the players settle on, rendered like `"S F-"`.
#[pyfunction]
fn select_profile(tensor: &PayoffTensor) -> String {
    friendcast::select_profile(&tensor.0).to_string()
}

#[pymodule]
fn friendcast_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Assertion>()?;
    m.add_class::<Personality>()?;
    m.add_class::<ScenarioConfig>()?;
    m.add_class::<Snapshot>()?;
    m.add_class::<RunResult>()?;
    m.add_class::<PayoffTensor>()?;
    m.add_function(wrap_pyfunction!(learn, m)?)?;
    m.add_function(wrap_pyfunction!(average_knowledge, m)?)?;
    m.add_function(wrap_pyfunction!(forget, m)?)?;
    m.add_function(wrap_pyfunction!(scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(find_pure_nash, m)?)?;
    m.add_function(wrap_pyfunction!(select_profile, m)?)?;
    Ok(())
}
