//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use rfl_core::edge::solve_mu;
use rfl_core::gates::{
    cnot_table as core_cnot_table, ideal_snl_efficiency as core_ideal_snl, run_gate, run_snl_cycle,
    GateScenario, InputKink, SnlCycle, SnlMode,
};
use rfl_core::ljj;
use rfl_core::scenario::{parse_scenario, GateSpec};
use rfl_core::sweep::{parse_sweep, run_sweep as core_run_sweep};
use rfl_core::UnitSystem;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Convert any serializable value to Python objects via the json module.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Kink energy in units of E_0 for a chain scaled by `s`.
#[pyfunction]
#[pyo3(signature = (v, s = 1.0))]
fn fluxon_energy(v: f64, s: f64) -> PyResult<f64> {
    ljj::fluxon_energy(v, s).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
#[pyo3(signature = (s, v_clk, mode = "fast", v_in = 0.4))]
fn ideal_snl_efficiency<'py>(
    py: Python<'py>,
    s: f64,
    v_clk: f64,
    mode: &str,
    v_in: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let m = match mode {
        "fast" => SnlMode::Fast,
        "slow" => SnlMode::Slow(v_in),
        other => {
            return Err(PyValueError::new_err(format!(
                "mode {other:?} is not fast or slow"
            )))
        }
    };
    let r = core_ideal_snl(s, v_clk, m).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("e_clk", r.e_clk)?;
    d.set_item("e_out", r.e_out)?;
    d.set_item("e_in", r.e_in)?;
    d.set_item("v_out", r.v_out)?;
    d.set_item("efficiency", r.efficiency)?;
    Ok(d.into_any())
}

/// Self-consistent edge-state solution for the IDSN lower termination.
#[pyfunction]
fn edge_model<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    let GateSpec::Idsn(p) = GateSpec::named("idsn", &UnitSystem::default()).map_err(err)? else {
        unreachable!("idsn preset");
    };
    let s = solve_mu(p.term_lower, &p.s2p).map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("mu_lambda", s.mu)?;
    d.set_item("omega_over_omega_j", s.omega_alpha / p.s2p.omega_j())?;
    d.set_item("c_alpha", s.effective.cj_alpha)?;
    d.set_item("i_alpha", s.effective.ic_alpha)?;
    Ok(d.into_any())
}

#[pyfunction]
fn cnot_table<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &core_cnot_table())
}

/// A named gate preset: one-bit (not), idsn, idsn-single-equivalent,
/// splitter or snl.
#[pyclass(frozen)]
struct Gate {
    name: String,
    gate: rfl_core::gates::Gate,
}

#[pymethods]
impl Gate {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let spec = GateSpec::named(name, &UnitSystem::default())
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self {
            name: name.to_string(),
            gate: spec.build().map_err(err)?,
        })
    }

    #[getter]
    fn inputs(&self) -> Vec<String> {
        self.gate.inputs.clone()
    }

    #[getter]
    fn outputs(&self) -> Vec<String> {
        self.gate.outputs.clone()
    }

    #[getter]
    fn nodes(&self) -> usize {
        self.gate.graph.node_count()
    }

    /// Run with one symbol per input chain (0 fluxon, 1 antifluxon, - none)
    /// and return the verdict.
    #[pyo3(signature = (inputs, v0 = 0.6, distance = 20.0, dx = 0.0))]
    fn run<'py>(
        &self,
        py: Python<'py>,
        inputs: &str,
        v0: f64,
        distance: f64,
        dx: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let symbols: Vec<char> = inputs.chars().collect();
        if symbols.len() != self.gate.inputs.len() {
            return Err(PyValueError::new_err(format!(
                "{} has {} inputs, got {inputs:?}",
                self.name,
                self.gate.inputs.len()
            )));
        }
        let mut kinks = Vec::new();
        for (k, (chain, sym)) in self.gate.inputs.iter().zip(symbols).enumerate() {
            let polarity = match sym {
                '0' => 1,
                '1' => -1,
                '-' => continue,
                other => {
                    return Err(PyValueError::new_err(format!(
                        "input symbol {other:?} is not 0, 1 or -"
                    )))
                }
            };
            kinks.push(InputKink {
                chain: chain.clone(),
                polarity,
                v: v0,
                distance: distance + if k == 1 { dx } else { 0.0 },
            });
        }
        let r = py
            .detach(|| run_gate(&self.gate, &GateScenario::new(kinks)))
            .map_err(err)?;
        to_py(py, &r.verdict)
    }

    /// Store a data bit in an SNL gate and clock it out.
    #[pyo3(signature = (bit = 0, v_clk = 0.6))]
    fn snl_cycle<'py>(&self, py: Python<'py>, bit: u8, v_clk: f64) -> PyResult<Bound<'py, PyAny>> {
        let cycle = SnlCycle {
            data_polarity: if bit == 0 { 1 } else { -1 },
            v_clk,
            ..SnlCycle::default()
        };
        let r = py
            .detach(|| run_snl_cycle(&self.gate, &cycle))
            .map_err(err)?;
        to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("Gate({:?})", self.name)
    }
}

/// Run a scenario given as TOML text and return the verdict.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, scenario: &str) -> PyResult<Bound<'py, PyAny>> {
    let sc = parse_scenario(scenario).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let gate = sc.gate.build().map_err(err)?;
    let r = py.detach(|| run_gate(&gate, &sc.run)).map_err(err)?;
    to_py(py, &r.verdict)
}

/// Run a margin sweep given as TOML text and return the report.
#[pyfunction]
#[pyo3(signature = (spec, jobs = None))]
fn sweep<'py>(py: Python<'py>, spec: &str, jobs: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let mut s = parse_sweep(spec).map_err(|e| PyValueError::new_err(e.to_string()))?;
    if let Some(j) = jobs {
        s.jobs = j;
    }
    let r = py.detach(|| core_run_sweep(&s)).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn rfl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Gate>()?;
    m.add_function(wrap_pyfunction!(fluxon_energy, m)?)?;
    m.add_function(wrap_pyfunction!(ideal_snl_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(edge_model, m)?)?;
    m.add_function(wrap_pyfunction!(cnot_table, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
