//! Python bindings: a `System` class wrapping the physical configuration,
//! with steady-state, evolution, trajectory, and sweep methods, plus the
//! entanglement measures as free functions on 4x4 matrices.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use jumpfb::dynamics::{asymptotic_state, evolve_scaled, steady_state, DensityMatrix};
use jumpfb::liouvillian::build;
use jumpfb::operators::{basis, ket, singlet_ket, Feedback, StateVector};
use jumpfb::sweeps::{refine_max, sweep, AxisSpec, Quantity, SweepSpec};
use jumpfb::trajectories::ensemble_average;
use jumpfb::{C64, Error as CoreError, SystemConfig};

fn core_err(e: CoreError) -> PyErr {
    match e {
        CoreError::InvalidConfig(msg) => PyValueError::new_err(msg),
        CoreError::InvalidState(msg) => PyValueError::new_err(msg),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn matrix_to_py(m: &nalgebra::Matrix4<C64>) -> Vec<Vec<C64>> {
    (0..4)
        .map(|i| (0..4).map(|j| m[(i, j)]).collect())
        .collect()
}

use jumpfb::nalgebra;

fn density_from_py(rho: Vec<Vec<C64>>) -> PyResult<DensityMatrix> {
    if rho.len() != 4 || rho.iter().any(|row| row.len() != 4) {
        return Err(PyValueError::new_err("rho must be a 4x4 matrix"));
    }
    let m = nalgebra::Matrix4::from_fn(|i, j| rho[i][j]);
    DensityMatrix::new(m).map_err(core_err)
}

fn parse_initial_pure(name: &str) -> PyResult<StateVector> {
    match name {
        "gg" => Ok(ket(basis::GG)),
        "ee" => Ok(ket(basis::EE)),
        "singlet" => Ok(singlet_ket()),
        other => Err(PyValueError::new_err(format!(
            "unknown pure initial state '{other}' (expected gg, ee, singlet)"
        ))),
    }
}

fn parse_initial_density(name: &str) -> PyResult<DensityMatrix> {
    match name {
        "gg" => Ok(DensityMatrix::ground()),
        "ee" => Ok(DensityMatrix::doubly_excited()),
        "singlet" => Ok(DensityMatrix::singlet()),
        "mixed" => Ok(DensityMatrix::maximally_mixed()),
        other => Err(PyValueError::new_err(format!(
            "unknown initial state '{other}' (expected gg, ee, singlet, mixed)"
        ))),
    }
}

fn linspace(t_final: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|i| t_final * i as f64 / (samples - 1).max(1) as f64)
        .collect()
}

/// Two driven, collectively damped qubits with jump-based feedback.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct System {
    config: SystemConfig,
}

#[pymethods]
impl System {
    #[new]
    #[pyo3(signature = (
        omega = 0.0,
        gamma_collective = 1.0,
        gamma1 = 0.0,
        gamma2 = 0.0,
        gamma_deph = 0.0,
        eta = 1.0,
        feedback = "none",
        feedback_strength = 0.0,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        omega: f64,
        gamma_collective: f64,
        gamma1: f64,
        gamma2: f64,
        gamma_deph: f64,
        eta: f64,
        feedback: &str,
        feedback_strength: f64,
    ) -> PyResult<Self> {
        let feedback = match feedback {
            "none" => Feedback::None,
            "collective" => Feedback::Collective { lambda: feedback_strength },
            "local" => Feedback::Local { lambda: feedback_strength },
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown feedback kind '{other}' (expected none, collective, local)"
                )))
            }
        };
        let config = SystemConfig {
            omega,
            gamma_collective,
            gamma1,
            gamma2,
            gamma_deph,
            eta,
            feedback,
        };
        config.validate().map_err(core_err)?;
        Ok(System { config })
    }

    fn __repr__(&self) -> String {
        format!("System({:?})", self.config)
    }

    /// The 16x16 generator acting on column-stacked density matrices.
    fn liouvillian(&self) -> PyResult<Vec<Vec<C64>>> {
        let l = build(&self.config).map_err(core_err)?;
        Ok((0..16)
            .map(|i| (0..16).map(|j| l.matrix()[(i, j)]).collect())
            .collect())
    }

    /// Stationary analysis: the state, its measures, and the null-space
    /// diagnostics.
    fn steady_state<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let l = build(&self.config).map_err(core_err)?;
        let result = steady_state(&l).map_err(core_err)?;
        let out = PyDict::new(py);
        out.set_item("rho", matrix_to_py(result.rho.matrix()))?;
        out.set_item("concurrence", jumpfb::concurrence(&result.rho).map_err(core_err)?)?;
        out.set_item("fidelity_to_singlet", jumpfb::fidelity_to_singlet(&result.rho))?;
        out.set_item("purity", jumpfb::purity(&result.rho))?;
        out.set_item("null_dimension", result.null_dimension)?;
        out.set_item("residual", result.residual)?;
        out.set_item("gap", result.gap)?;
        Ok(out)
    }

    /// Long-time limit of the evolution from a given initial state; selects
    /// the reachable branch when the stationary subspace is degenerate.
    #[pyo3(signature = (initial = "gg"))]
    fn asymptotic_state<'py>(&self, py: Python<'py>, initial: &str) -> PyResult<Bound<'py, PyDict>> {
        let l = build(&self.config).map_err(core_err)?;
        let rho0 = parse_initial_density(initial)?;
        let rho = asymptotic_state(&l, &rho0).map_err(core_err)?;
        let out = PyDict::new(py);
        out.set_item("rho", matrix_to_py(rho.matrix()))?;
        out.set_item("concurrence", jumpfb::concurrence(&rho).map_err(core_err)?)?;
        out.set_item("fidelity_to_singlet", jumpfb::fidelity_to_singlet(&rho))?;
        out.set_item("purity", jumpfb::purity(&rho))?;
        Ok(out)
    }

    /// Deterministic evolution sampled on a uniform grid; returns the times
    /// and the three measures per sample.
    #[pyo3(signature = (initial = "gg", t_final = 50.0, samples = 201))]
    fn evolve<'py>(
        &self,
        py: Python<'py>,
        initial: &str,
        t_final: f64,
        samples: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let l = build(&self.config).map_err(core_err)?;
        let rho0 = parse_initial_density(initial)?;
        let times = linspace(t_final, samples);
        let run = evolve_scaled(&l, &rho0, t_final, &times, self.config.rate_scale())
            .map_err(core_err)?;
        let mut concurrence = Vec::with_capacity(samples);
        let mut fidelity = Vec::with_capacity(samples);
        let mut purity = Vec::with_capacity(samples);
        for state in &run.states {
            concurrence.push(jumpfb::concurrence(state).map_err(core_err)?);
            fidelity.push(jumpfb::fidelity_to_singlet(state));
            purity.push(jumpfb::purity(state));
        }
        let out = PyDict::new(py);
        out.set_item("times", run.times)?;
        out.set_item("concurrence", concurrence)?;
        out.set_item("fidelity_to_singlet", fidelity)?;
        out.set_item("purity", purity)?;
        Ok(out)
    }

    /// Mean over `n` jump-unraveled trajectories seeded `base_seed + i`;
    /// bit-reproducible for fixed arguments.
    #[pyo3(signature = (initial = "gg", t_final = 20.0, dt = 0.005, n = 500, base_seed = 0, samples = 21))]
    #[allow(clippy::too_many_arguments)]
    fn trajectory_mean<'py>(
        &self,
        py: Python<'py>,
        initial: &str,
        t_final: f64,
        dt: f64,
        n: usize,
        base_seed: u64,
        samples: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let psi0 = parse_initial_pure(initial)?;
        let times = linspace(t_final, samples);
        let ensemble = ensemble_average(&self.config, &psi0, t_final, dt, &times, n, base_seed)
            .map_err(core_err)?;
        let mut mean_concurrence = Vec::with_capacity(samples);
        for state in &ensemble.mean_states {
            mean_concurrence.push(jumpfb::concurrence(state).map_err(core_err)?);
        }
        let out = PyDict::new(py);
        out.set_item("times", ensemble.times)?;
        out.set_item("mean_concurrence", mean_concurrence)?;
        out.set_item("stderr", ensemble.stderr)?;
        out.set_item("n", n)?;
        Ok(out)
    }

    /// Steady-state measure over a (omega, lambda) grid; `quantity` is one of
    /// "concurrence", "fidelity", "purity". Returns the grid, per-cell null
    /// dimensions, the grid argmax, and its golden-section refinement.
    #[pyo3(signature = (omega_axis, lambda_axis, quantity = "concurrence"))]
    fn sweep<'py>(
        &self,
        py: Python<'py>,
        omega_axis: (f64, f64, usize),
        lambda_axis: (f64, f64, usize),
        quantity: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let quantity = match quantity {
            "concurrence" => Quantity::SteadyConcurrence,
            "fidelity" => Quantity::SteadyFidelity,
            "purity" => Quantity::SteadyPurity,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown quantity '{other}' (expected concurrence, fidelity, purity)"
                )))
            }
        };
        let spec = SweepSpec {
            base: self.config,
            omega_axis: AxisSpec { min: omega_axis.0, max: omega_axis.1, count: omega_axis.2 },
            lambda_axis: AxisSpec { min: lambda_axis.0, max: lambda_axis.1, count: lambda_axis.2 },
            quantity,
        };
        let result = sweep(&spec).map_err(core_err)?;
        let out = PyDict::new(py);
        out.set_item("omegas", result.omegas.clone())?;
        out.set_item("lambdas", result.lambdas.clone())?;
        out.set_item("grid", result.grid.clone())?;
        let null_dimensions: Vec<Vec<usize>> = result
            .diagnostics
            .iter()
            .map(|row| row.iter().map(|d| d.null_dimension).collect())
            .collect();
        out.set_item("null_dimensions", null_dimensions)?;
        out.set_item("argmax", result.argmax)?;
        if result.argmax.is_some() {
            out.set_item("refined", refine_max(&result, &spec).map_err(core_err)?)?;
        } else {
            out.set_item("refined", py.None())?;
        }
        Ok(out)
    }
}

/// Wootters concurrence of a 4x4 density matrix (nested list of complex).
#[pyfunction]
fn concurrence(rho: Vec<Vec<C64>>) -> PyResult<f64> {
    jumpfb::concurrence(&density_from_py(rho)?).map_err(core_err)
}

/// Overlap with the antisymmetric Bell state.
#[pyfunction]
fn fidelity_to_singlet(rho: Vec<Vec<C64>>) -> PyResult<f64> {
    Ok(jumpfb::fidelity_to_singlet(&density_from_py(rho)?))
}

/// `Tr(rho^2)`.
#[pyfunction]
fn purity(rho: Vec<Vec<C64>>) -> PyResult<f64> {
    Ok(jumpfb::purity(&density_from_py(rho)?))
}

#[pymodule]
fn jumpfb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_to_singlet, m)?)?;
    m.add_function(wrap_pyfunction!(purity, m)?)?;
    Ok(())
}
