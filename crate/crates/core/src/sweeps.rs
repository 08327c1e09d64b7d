//! Parameter-grid scans over driving and feedback strength, optimum
//! refinement, and measure time series.
//!
//! Each cell builds the generator, solves for the stationary state, and
//! evaluates the requested measure. Cells whose null space is degenerate are
//! evaluated on the branch the dynamics reaches from the ground state
//! `|gg><gg|` (the exchange-symmetric configurations leave the dark singlet
//! disconnected, so the reachable branch is the one the quoted operating
//! points refer to); their diagnostics record the actual null dimension.

use rayon::prelude::*;

use crate::dynamics::{self, DensityMatrix};
use crate::entanglement;
use crate::error::{Error, Result};
use crate::liouvillian::{build, SystemConfig};
use crate::operators::Feedback;

/// Inclusive linear axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            return Err(Error::InvalidConfig(format!(
                "axis must satisfy min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.count < 2 {
            return Err(Error::InvalidConfig(format!(
                "axis needs at least 2 points, got {}",
                self.count
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }
}

/// Which steady-state measure a sweep records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    SteadyConcurrence,
    SteadyFidelity,
    SteadyPurity,
}

impl Quantity {
    fn evaluate(&self, rho: &DensityMatrix) -> f64 {
        match self {
            Quantity::SteadyConcurrence => {
                entanglement::concurrence(rho).unwrap_or(f64::NAN)
            }
            Quantity::SteadyFidelity => entanglement::fidelity_to_singlet(rho),
            Quantity::SteadyPurity => entanglement::purity(rho),
        }
    }
}

/// A two-axis scan over driving strength (omega) and feedback strength
/// (lambda), with all other parameters taken from `base`. The base feedback
/// kind determines which unitary the lambda axis controls.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: SystemConfig,
    pub omega_axis: AxisSpec,
    pub lambda_axis: AxisSpec,
    pub quantity: Quantity,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.omega_axis.validate()?;
        self.lambda_axis.validate()?;
        if matches!(self.base.feedback, Feedback::None) {
            return Err(Error::InvalidConfig(
                "sweep needs a feedback kind to scan over lambda".to_string(),
            ));
        }
        Ok(())
    }

    fn config_at(&self, omega: f64, lambda: f64) -> SystemConfig {
        let feedback = match self.base.feedback {
            Feedback::Collective { .. } => Feedback::Collective { lambda },
            Feedback::Local { .. } => Feedback::Local { lambda },
            Feedback::None => Feedback::None,
        };
        SystemConfig {
            omega,
            feedback,
            ..self.base
        }
    }
}

/// Per-cell stationary diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDiagnostic {
    pub null_dimension: usize,
    pub residual: f64,
}

/// Grid of measure values plus diagnostics; row index follows the omega
/// axis, column index the lambda axis.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub omegas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub grid: Vec<Vec<f64>>,
    pub diagnostics: Vec<Vec<CellDiagnostic>>,
    /// `(omega, lambda, value)` of the best usable cell; ties go to smaller
    /// omega, then smaller |lambda|.
    pub argmax: Option<(f64, f64, f64)>,
}

fn evaluate_cell(spec: &SweepSpec, omega: f64, lambda: f64) -> (f64, CellDiagnostic) {
    let failed = CellDiagnostic {
        null_dimension: 0,
        residual: f64::NAN,
    };
    let config = spec.config_at(omega, lambda);
    let l = match build(&config) {
        Ok(l) => l,
        Err(_) => return (f64::NAN, failed),
    };
    match dynamics::steady_state(&l) {
        Ok(ss) => {
            let diag = CellDiagnostic {
                null_dimension: ss.null_dimension,
                residual: ss.residual,
            };
            let branch = if ss.null_dimension == 1 {
                Some(ss.rho)
            } else {
                dynamics::asymptotic_state(&l, &DensityMatrix::ground()).ok()
            };
            match branch {
                Some(rho) => (spec.quantity.evaluate(&rho), diag),
                None => (f64::NAN, diag),
            }
        }
        Err(Error::NonPhysicalNullVector { null_dimension, .. }) => (
            f64::NAN,
            CellDiagnostic {
                null_dimension,
                residual: f64::NAN,
            },
        ),
        Err(_) => (f64::NAN, failed),
    }
}

/// Scan the grid. Cells are computed in parallel and assembled in row-major
/// order, so identical specs give identical results. Cell failures are
/// recorded in the diagnostics, not raised.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let omegas = spec.omega_axis.values();
    let lambdas = spec.lambda_axis.values();
    let cells: Vec<(f64, CellDiagnostic)> = (0..omegas.len() * lambdas.len())
        .into_par_iter()
        .map(|flat| {
            let i = flat / lambdas.len();
            let j = flat % lambdas.len();
            evaluate_cell(spec, omegas[i], lambdas[j])
        })
        .collect();

    let mut grid: Vec<Vec<f64>> = Vec::with_capacity(omegas.len());
    let mut diagnostics: Vec<Vec<CellDiagnostic>> = Vec::with_capacity(omegas.len());
    for i in 0..omegas.len() {
        let row = &cells[i * lambdas.len()..(i + 1) * lambdas.len()];
        grid.push(row.iter().map(|(v, _)| *v).collect());
        diagnostics.push(row.iter().map(|(_, d)| *d).collect());
    }

    let mut argmax: Option<(f64, f64, f64)> = None;
    for (i, &omega) in omegas.iter().enumerate() {
        for (j, &lambda) in lambdas.iter().enumerate() {
            let value: f64 = grid[i][j];
            if !value.is_finite() {
                continue;
            }
            let better = match argmax {
                None => true,
                Some((bo, bl, bv)) => {
                    value > bv
                        || (value == bv
                            && (omega < bo || (omega == bo && lambda.abs() < bl.abs())))
                }
            };
            if better {
                argmax = Some((omega, lambda, value));
            }
        }
    }

    Ok(SweepResult {
        omegas,
        lambdas,
        grid,
        diagnostics,
        argmax,
    })
}

/// Golden-section maximization on `[lo, hi]`. On plateaus the search keeps
/// the lower sub-interval, so ties drift toward the lower end of the axis.
fn golden_max(f: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    const INV_PHI2: f64 = 0.381_966_011_250_105_1;
    let mut c = lo + INV_PHI2 * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = lo + INV_PHI2 * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Alternating per-axis golden-section refinement around a starting point.
///
/// This is a local zoom into the argmax grid cell: each axis keeps a fixed
/// bracket of one grid spacing either side of the start (clipped to the
/// axis), and the line searches shrink their intervals below 1e-4 of that
/// original span. Rounds alternate until neither coordinate moves more than
/// the tolerance. The brackets never re-center, so the refinement cannot
/// wander away from the grid-scale optimum it was asked to sharpen.
fn refine_objective(
    f: &mut impl FnMut(f64, f64) -> f64,
    start: (f64, f64, f64),
    omega_axis: &AxisSpec,
    lambda_axis: &AxisSpec,
) -> (f64, f64, f64) {
    let (mut omega, mut lambda, mut value) = start;
    let bracket = |x: f64, axis: &AxisSpec| {
        ((x - axis.spacing()).max(axis.min), (x + axis.spacing()).min(axis.max))
    };
    let (omega_lo, omega_hi) = bracket(omega, omega_axis);
    let (lambda_lo, lambda_hi) = bracket(lambda, lambda_axis);
    let tol_o = 1e-4 * (omega_hi - omega_lo);
    let tol_l = 1e-4 * (lambda_hi - lambda_lo);
    for _ in 0..50 {
        let (omega_next, _) = golden_max(&mut |w| f(w, lambda), omega_lo, omega_hi, tol_o);
        let (lambda_next, value_next) =
            golden_max(&mut |l| f(omega_next, l), lambda_lo, lambda_hi, tol_l);
        let moved = (omega_next - omega).abs().max((lambda_next - lambda).abs());
        omega = omega_next;
        lambda = lambda_next;
        value = value_next;
        if moved < tol_o.max(tol_l) {
            break;
        }
    }
    (omega, lambda, value)
}

/// Refine the grid argmax by coordinate descent on the same cell objective
/// the sweep used. Errors when the sweep has no usable cell.
pub fn refine_max(result: &SweepResult, spec: &SweepSpec) -> Result<(f64, f64, f64)> {
    spec.validate()?;
    let start = result.argmax.ok_or(Error::EmptySweep)?;
    let mut objective = |omega: f64, lambda: f64| {
        let (value, _) = evaluate_cell(spec, omega, lambda);
        if value.is_finite() {
            value
        } else {
            f64::NEG_INFINITY
        }
    };
    Ok(refine_objective(
        &mut objective,
        start,
        &spec.omega_axis,
        &spec.lambda_axis,
    ))
}

/// Specification for one deterministic measure-vs-time run.
#[derive(Debug, Clone)]
pub struct TimeSeriesSpec {
    pub config: SystemConfig,
    pub initial: DensityMatrix,
    pub t_final: f64,
    pub samples: usize,
}

/// One row of a time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesPoint {
    pub t: f64,
    pub concurrence: f64,
    pub fidelity_to_singlet: f64,
    pub purity: f64,
}

/// Evolve and map every sampled state through the entanglement measures.
pub fn time_series(spec: &TimeSeriesSpec) -> Result<Vec<TimeSeriesPoint>> {
    if spec.samples < 2 {
        return Err(Error::InvalidConfig(format!(
            "time series needs at least 2 samples, got {}",
            spec.samples
        )));
    }
    let l = build(&spec.config)?;
    let times: Vec<f64> = (0..spec.samples)
        .map(|i| spec.t_final * i as f64 / (spec.samples - 1) as f64)
        .collect();
    let run = dynamics::evolve_scaled(
        &l,
        &spec.initial,
        spec.t_final,
        &times,
        spec.config.rate_scale(),
    )?;
    run.times
        .iter()
        .zip(&run.states)
        .map(|(&t, state)| {
            let report = entanglement::measures(state)?;
            Ok(TimeSeriesPoint {
                t,
                concurrence: report.concurrence,
                fidelity_to_singlet: report.fidelity_to_singlet,
                purity: report.purity,
            })
        })
        .collect()
}
