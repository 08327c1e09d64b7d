//! Deterministic propagation and stationary states.
//!
//! Evolution integrates the linear system `d vec(rho)/dt = L vec(rho)` with
//! classic fixed-step fourth-order stepping, verified by step halving.
//! Stationary states come from the full singular value decomposition of the
//! 16x16 generator; the null-space dimension is reported so callers can tell
//! a unique steady state from a degenerate stationary subspace.

use nalgebra::{DMatrix, DVector, Matrix4};

use crate::error::{Error, Result};
use crate::linalg;
use crate::liouvillian::{devectorize, vectorize, Superoperator, SuperoperatorMatrix};
use crate::operators::{basis, ket, singlet_ket, StateVector};
use crate::C64;

/// Relative singular-value threshold below which a direction counts as part
/// of the stationary null space. Chosen to separate the genuinely degenerate
/// configurations (no driving, exchange-symmetric dynamics) from the generic
/// unique case.
pub const NULL_SPACE_REL_TOL: f64 = 1e-10;

const TRACE_TOL: f64 = 1e-10;
const HERMITICITY_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = -1e-9;
const STEP_CHECK_TOL: f64 = 1e-8;
const MAX_HALVINGS: u32 = 6;

/// Physical state of the two qubits: Hermitian, unit trace, positive up to
/// numerical tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: Matrix4<C64>,
}

impl DensityMatrix {
    /// Validate and wrap a matrix.
    pub fn new(entries: Matrix4<C64>) -> Result<Self> {
        if !linalg::all_finite(&entries) {
            return Err(Error::InvalidState("non-finite entries".to_string()));
        }
        let herm = linalg::hermiticity_defect(&entries);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {herm:.3e})"
            )));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let min = linalg::hermitian_eigenvalues_ascending(&entries)[0];
        if min < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(DensityMatrix { entries })
    }

    /// Projector onto a pure state; the input is normalized first.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let norm = psi.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState(format!(
                "cannot normalize state with norm {norm}"
            )));
        }
        let unit = psi / C64::new(norm, 0.0);
        DensityMatrix::new(unit * unit.adjoint())
    }

    /// Both atoms in the ground state.
    pub fn ground() -> Self {
        DensityMatrix::from_pure(&ket(basis::GG)).unwrap()
    }

    /// Both atoms excited.
    pub fn doubly_excited() -> Self {
        DensityMatrix::from_pure(&ket(basis::EE)).unwrap()
    }

    /// The antisymmetric Bell state.
    pub fn singlet() -> Self {
        DensityMatrix::from_pure(&singlet_ket()).unwrap()
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix::new(Matrix4::identity() * C64::new(0.25, 0.0)).unwrap()
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.entries
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::hermitian_eigenvalues_ascending(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest eigenvalue and its normalized eigenvector; the weight is 1
    /// exactly when the state is pure.
    pub fn dominant_eigenvector(&self) -> (f64, StateVector) {
        let (eigs, vecs) = linalg::hermitian_eigen_ascending(&self.entries);
        let column: StateVector = vecs.column(3).into_owned();
        (eigs[3], column.normalize())
    }
}

/// Trace distance `||a - b||_1 / 2`: half the sum of the absolute eigenvalues
/// of the (Hermitian) difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let diff = a.matrix() - b.matrix();
    linalg::hermitian_eigenvalues_ascending(&diff)
        .iter()
        .map(|e| e.abs())
        .sum::<f64>()
        / 2.0
}

/// Sampled deterministic evolution.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// Sample times, in units of inverse collective decay rate.
    pub times: Vec<f64>,
    /// States at the sample times.
    pub states: Vec<DensityMatrix>,
    /// Total number of integrator steps in the accepted run.
    pub step_count: usize,
}

/// Integrate `d vec(rho)/dt = L vec(rho)`, inferring the rate scale from the
/// largest entry of `L`. See [`evolve_scaled`].
pub fn evolve(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_final: f64,
    sample_times: &[f64],
) -> Result<EvolutionResult> {
    evolve_scaled(l, rho0, t_final, sample_times, linalg::max_abs(l.matrix()))
}

/// Integrate with an explicit rate scale (largest rate in the generating
/// configuration). The base step is `min(0.01 / rate_scale, smallest sample
/// gap / 4)`; the run is accepted once halving the step moves every sampled
/// state by less than 1e-8 in max norm, with at most six halvings.
///
/// Sampled states are symmetrized as `(rho + rho^dag)/2` and renormalized to
/// unit trace; the integrator itself remains a pure linear map.
pub fn evolve_scaled(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_final: f64,
    sample_times: &[f64],
    rate_scale: f64,
) -> Result<EvolutionResult> {
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(Error::InvalidConfig(format!("t_final must be >= 0, got {t_final}")));
    }
    if sample_times.is_empty() {
        return Err(Error::InvalidConfig("sample_times must be non-empty".to_string()));
    }
    let sorted = sample_times.windows(2).all(|w| w[0] <= w[1]);
    if !sorted {
        return Err(Error::InvalidConfig("sample_times must be sorted".to_string()));
    }
    let lo = sample_times[0];
    let hi = *sample_times.last().unwrap();
    if lo < 0.0 || hi > t_final * (1.0 + 1e-12) {
        return Err(Error::InvalidConfig(format!(
            "sample_times must lie in [0, {t_final}]"
        )));
    }

    // Smallest positive gap, including the leading gap from t = 0.
    let mut min_gap = f64::INFINITY;
    let mut prev = 0.0;
    for &t in sample_times {
        let gap = t - prev;
        if gap > 0.0 {
            min_gap = min_gap.min(gap);
        }
        prev = t;
    }
    if !min_gap.is_finite() {
        // All samples at t = 0.
        let states = vec![*rho0; sample_times.len()];
        return Ok(EvolutionResult {
            times: sample_times.to_vec(),
            states,
            step_count: 0,
        });
    }

    let mut h = min_gap / 4.0;
    if rate_scale > 0.0 {
        h = h.min(0.01 / rate_scale);
    }

    let mut coarse = integrate_samples(l.matrix(), rho0, sample_times, h);
    let mut worst = f64::INFINITY;
    for halving in 1..=MAX_HALVINGS {
        h /= 2.0;
        let fine = integrate_samples(l.matrix(), rho0, sample_times, h);
        worst = coarse
            .states
            .iter()
            .zip(&fine.states)
            .map(|(a, b)| linalg::max_abs(&(a - b)))
            .fold(0.0, f64::max);
        if worst < STEP_CHECK_TOL {
            let states = fine
                .states
                .iter()
                .map(|m| DensityMatrix::new(*m))
                .collect::<Result<Vec<_>>>()?;
            return Ok(EvolutionResult {
                times: sample_times.to_vec(),
                states,
                step_count: fine.step_count,
            });
        }
        let _ = halving;
        coarse = fine;
    }
    Err(Error::StepRefinement {
        halvings: MAX_HALVINGS,
        worst,
    })
}

struct RawRun {
    states: Vec<Matrix4<C64>>,
    step_count: usize,
}

/// Fourth-order one-step matrix `sum_{k=0}^{4} (hL)^k / k!`, the classic
/// Runge-Kutta update specialized to an autonomous linear system.
fn rk4_step_matrix(l: &SuperoperatorMatrix, h: f64) -> SuperoperatorMatrix {
    let hl = l * C64::new(h, 0.0);
    let mut term = SuperoperatorMatrix::identity();
    let mut sum = SuperoperatorMatrix::identity();
    for k in 1..=4 {
        term = (hl * term) * C64::new(1.0 / k as f64, 0.0);
        sum += term;
    }
    sum
}

fn integrate_samples(
    l: &SuperoperatorMatrix,
    rho0: &DensityMatrix,
    sample_times: &[f64],
    h_target: f64,
) -> RawRun {
    let mut v = vectorize(rho0.matrix());
    let mut states = Vec::with_capacity(sample_times.len());
    let mut step_count = 0usize;
    let mut prev_t = 0.0;
    let mut cached: Option<(f64, SuperoperatorMatrix)> = None;
    for &t in sample_times {
        let gap = t - prev_t;
        if gap > 0.0 {
            let n = (gap / h_target).ceil().max(1.0) as usize;
            let h = gap / n as f64;
            let step = match &cached {
                Some((hc, m)) if *hc == h => *m,
                _ => {
                    let m = rk4_step_matrix(l, h);
                    cached = Some((h, m));
                    m
                }
            };
            for _ in 0..n {
                v = step * v;
            }
            step_count += n;
        }
        let m = linalg::hermitize(&devectorize(&v));
        let trace = m.trace().re;
        states.push(m / C64::new(trace, 0.0));
        prev_t = t;
    }
    RawRun { states, step_count }
}

/// Stationary analysis of a generator.
#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    /// The stationary state; for a degenerate null space, a canonical
    /// stationary mixture (see [`steady_state`]).
    pub rho: DensityMatrix,
    /// Number of singular values below the null-space threshold.
    pub null_dimension: usize,
    /// `||L vec(rho)||_2` of the returned state.
    pub residual: f64,
    /// Magnitude of the second-smallest singular value.
    pub gap: f64,
}

/// Compute the stationary state(s) of a trace-preserving generator via full
/// SVD, with the default null-space threshold.
///
/// With a one-dimensional null space the null vector is symmetrized and
/// trace-normalized. With a degenerate null space the returned state is the
/// trace-normalized orthogonal projection of the maximally mixed state onto
/// the stationary subspace: a deterministic, basis-independent combination
/// (individual SVD null vectors are only defined up to rotation, and need not
/// carry trace on their own). Callers should inspect `null_dimension`.
pub fn steady_state(l: &Superoperator) -> Result<SteadyStateResult> {
    steady_state_with_threshold(l, NULL_SPACE_REL_TOL)
}

/// [`steady_state`] with an explicit relative null-space threshold.
pub fn steady_state_with_threshold(l: &Superoperator, rel_tol: f64) -> Result<SteadyStateResult> {
    let defect = l.trace_preservation_defect();
    if defect > 1e-12 {
        return Err(Error::NotTracePreserving(defect));
    }
    let svd = l.matrix().svd(true, true);
    let sv = &svd.singular_values;
    let v_t = svd.v_t.as_ref().expect("requested V^H");
    let threshold = rel_tol * sv[0];
    let null_dimension = (0..16).filter(|&i| sv[i] < threshold).count();
    if null_dimension == 0 {
        return Err(Error::NoStationaryState { smallest: sv[15] });
    }
    let gap = sv[14];

    let m = if null_dimension == 1 {
        devectorize(&v_t.row(15).adjoint())
    } else {
        // Orthogonal projection of vec(I/4) onto the null space.
        let quarter_id = vectorize(&(Matrix4::identity() * C64::new(0.25, 0.0)));
        let mut acc = crate::liouvillian::VectorizedState::zeros();
        for i in (16 - null_dimension)..16 {
            let basis_vec = v_t.row(i).adjoint();
            let coeff = (basis_vec.adjoint() * quarter_id)[(0, 0)];
            acc += basis_vec * coeff;
        }
        devectorize(&acc)
    };
    let m = linalg::hermitize(&m);
    let trace = m.trace().re;
    if trace.abs() < 1e-12 {
        return Err(Error::NonPhysicalNullVector {
            min_eigenvalue: f64::NAN,
            null_dimension,
        });
    }
    let m = m / C64::new(trace, 0.0);
    let min_eigenvalue = linalg::hermitian_eigenvalues_ascending(&m)[0];
    if min_eigenvalue < -1e-8 {
        return Err(Error::NonPhysicalNullVector {
            min_eigenvalue,
            null_dimension,
        });
    }
    let residual = (l.matrix() * vectorize(&m)).norm();
    if residual > 1e-9 {
        return Err(Error::NoStationaryState { smallest: residual });
    }
    Ok(SteadyStateResult {
        rho: DensityMatrix::new(m)?,
        null_dimension,
        residual,
        gap,
    })
}

/// Long-time limit of the evolution started from `rho0`.
///
/// Equals the unique steady state when the null space is one-dimensional.
/// For a degenerate stationary subspace this selects the branch the dynamics
/// actually reaches from `rho0`, by projecting onto the null space along the
/// range of `L` (the spectral projector of the zero eigenvalue, built from
/// the right and left singular null bases).
pub fn asymptotic_state(l: &Superoperator, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let defect = l.trace_preservation_defect();
    if defect > 1e-12 {
        return Err(Error::NotTracePreserving(defect));
    }
    let svd = l.matrix().svd(true, true);
    let sv = &svd.singular_values;
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^H");
    let threshold = NULL_SPACE_REL_TOL * sv[0];
    let null: Vec<usize> = (0..16).filter(|&i| sv[i] < threshold).collect();
    if null.is_empty() {
        return Err(Error::NoStationaryState { smallest: sv[15] });
    }
    let k = null.len();

    // Solve (U_null^H V_null) c = U_null^H vec(rho0); the projected state is
    // V_null c. The small Gram matrix is invertible whenever the zero
    // eigenvalue is semisimple, which holds for these generators.
    let v0 = vectorize(rho0.matrix());
    let mut gram = DMatrix::<C64>::zeros(k, k);
    let mut rhs = DVector::<C64>::zeros(k);
    for (row, &i) in null.iter().enumerate() {
        let ui = u.column(i);
        for (col, &j) in null.iter().enumerate() {
            gram[(row, col)] = (ui.adjoint() * v_t.row(j).adjoint())[(0, 0)];
        }
        rhs[row] = (ui.adjoint() * v0)[(0, 0)];
    }
    let coeffs = gram.lu().solve(&rhs).ok_or_else(|| {
        Error::InvalidState("defective zero eigenvalue: spectral projector is singular".to_string())
    })?;
    let mut acc = crate::liouvillian::VectorizedState::zeros();
    for (col, &j) in null.iter().enumerate() {
        acc += v_t.row(j).adjoint() * coeffs[col];
    }
    let m = linalg::hermitize(&devectorize(&acc));
    let trace = m.trace().re;
    if trace.abs() < 1e-12 {
        return Err(Error::NonPhysicalNullVector {
            min_eigenvalue: f64::NAN,
            null_dimension: k,
        });
    }
    DensityMatrix::new(m / C64::new(trace, 0.0))
}
