//! Dense 16x16 superoperators for the master equations of the model.
//!
//! Density matrices are vectorized by column stacking: `vec(rho)[i + 4j] =
//! rho[(i, j)]`. All identities below are stated against the behavioral
//! contract `devectorize(S * vectorize(rho))`, so the stacking convention is
//! internal.

use nalgebra::{Matrix4, SMatrix, SVector};
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operators::{self, Feedback, Operator};
use crate::C64;

/// Matrix of a superoperator acting on vectorized 4x4 density matrices.
pub type SuperoperatorMatrix = SMatrix<C64, 16, 16>;
/// Column-stacked density matrix.
pub type VectorizedState = SVector<C64, 16>;

/// Column-stacking vectorization.
pub fn vectorize(rho: &Matrix4<C64>) -> VectorizedState {
    VectorizedState::from_fn(|k, _| rho[(k % 4, k / 4)])
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &VectorizedState) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| v[i + 4 * j])
}

/// Left multiplication `rho -> a rho` as a superoperator.
fn spre(a: &Operator) -> SuperoperatorMatrix {
    Operator::identity().kronecker(a)
}

/// Right multiplication `rho -> rho b` as a superoperator.
fn spost(b: &Operator) -> SuperoperatorMatrix {
    b.transpose().kronecker(&Operator::identity())
}

/// A 16x16 generator together with a human-readable list of its terms.
#[derive(Debug, Clone)]
pub struct Superoperator {
    matrix: SuperoperatorMatrix,
    labels: Vec<String>,
}

impl Superoperator {
    pub fn zero() -> Self {
        Superoperator {
            matrix: SuperoperatorMatrix::zeros(),
            labels: Vec::new(),
        }
    }

    pub fn from_parts(matrix: SuperoperatorMatrix, labels: Vec<String>) -> Self {
        Superoperator { matrix, labels }
    }

    pub fn matrix(&self) -> &SuperoperatorMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Apply to a density matrix: `devectorize(L vec(rho))`.
    pub fn apply(&self, rho: &Matrix4<C64>) -> Matrix4<C64> {
        devectorize(&(self.matrix * vectorize(rho)))
    }

    /// Scale by a real rate, annotating the label list.
    pub fn scaled(mut self, s: f64) -> Self {
        self.matrix *= C64::new(s, 0.0);
        for label in &mut self.labels {
            *label = format!("{s} * {label}");
        }
        self
    }

    /// Max-norm of the row vector `vec(I)^H L`; zero for a trace-preserving
    /// generator.
    pub fn trace_preservation_defect(&self) -> f64 {
        let id = vectorize(&Matrix4::identity());
        linalg::max_abs(&(id.adjoint() * self.matrix))
    }
}

impl Add for Superoperator {
    type Output = Superoperator;

    fn add(mut self, rhs: Superoperator) -> Superoperator {
        self += rhs;
        self
    }
}

impl AddAssign for Superoperator {
    fn add_assign(&mut self, rhs: Superoperator) {
        self.matrix += rhs.matrix;
        self.labels.extend(rhs.labels);
    }
}

/// Lindblad dissipator `D[c] rho = c rho c^dag - (c^dag c rho + rho c^dag c)/2`
/// as a superoperator.
pub fn dissipator(c: &Operator) -> Superoperator {
    let cdc = c.adjoint() * c;
    let matrix = c.conjugate().kronecker(c)
        - (spre(&cdc) + spost(&cdc)) * C64::new(0.5, 0.0);
    Superoperator {
        matrix,
        labels: vec!["D[c]".to_string()],
    }
}

/// Commutator term `rho -> -i [h, rho]`. Rejects non-Hermitian input.
pub fn hamiltonian_term(h: &Operator) -> Result<Superoperator> {
    let defect = linalg::hermiticity_defect(h);
    if defect > 1e-12 {
        return Err(Error::NotHermitian(defect));
    }
    let matrix = (spre(h) - spost(h)) * C64::new(0.0, -1.0);
    Ok(Superoperator {
        matrix,
        labels: vec!["-i [H, rho]".to_string()],
    })
}

/// Physical and control parameters of the model. All rates are in units of
/// the collective decay rate, which defaults to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Effective Rabi frequency of the collective driving.
    pub omega: f64,
    /// Collective decay rate; the unit of all rates and of inverse time.
    pub gamma_collective: f64,
    /// Spontaneous emission rate of atom 1.
    pub gamma1: f64,
    /// Spontaneous emission rate of atom 2.
    pub gamma2: f64,
    /// Local dephasing rate, applied symmetrically to both atoms.
    pub gamma_deph: f64,
    /// Detector efficiency in `[0, 1]`.
    pub eta: f64,
    pub feedback: Feedback,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            omega: 0.0,
            gamma_collective: 1.0,
            gamma1: 0.0,
            gamma2: 0.0,
            gamma_deph: 0.0,
            eta: 1.0,
            feedback: Feedback::None,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega", self.omega),
            ("gamma_collective", self.gamma_collective),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma_deph", self.gamma_deph),
            ("eta", self.eta),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite, got {value}")));
            }
        }
        if self.gamma_collective <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "gamma_collective must be positive, got {}",
                self.gamma_collective
            )));
        }
        for (name, value) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma_deph", self.gamma_deph),
        ] {
            if value < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be non-negative, got {value}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidConfig(format!(
                "eta must lie in [0, 1], got {}",
                self.eta
            )));
        }
        self.feedback.validate()
    }

    /// Largest rate in the configuration; sets integrator step sizes.
    pub fn rate_scale(&self) -> f64 {
        [
            self.omega.abs(),
            self.gamma_collective,
            self.gamma1,
            self.gamma2,
            self.gamma_deph,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Assemble the full generator for a configuration:
///
/// ```text
/// L = -i omega [Jx, .]
///     + Gamma eta     D[Ufb J-]
///     + Gamma (1-eta) D[J-]
///     + gamma1 D[sigma1] + gamma2 D[sigma2]
///     + gamma_deph (D[sigma1^dag sigma1] + D[sigma2^dag sigma2])
/// ```
///
/// With no feedback the unitary is the identity and the two collective terms
/// merge into `Gamma D[J-]`. Terms with zero weight are skipped, so the
/// `eta = 0` build is entry-wise identical to the no-feedback build.
pub fn build(config: &SystemConfig) -> Result<Superoperator> {
    config.validate()?;
    let atoms = operators::atomic_ops();
    let coll = operators::collective_ops();

    let mut total = Superoperator::zero();
    if config.omega != 0.0 {
        let mut h = hamiltonian_term(&(coll.j_x * C64::new(config.omega, 0.0)))?;
        h.labels = vec![format!("-i omega [Jx, rho], omega = {}", config.omega)];
        total += h;
    }

    let gamma = config.gamma_collective;
    let push = |total: &mut Superoperator, weight: f64, op: &Operator, label: String| {
        if weight > 0.0 {
            let mut term = dissipator(op).scaled(weight);
            term.labels = vec![label];
            *total += term;
        }
    };

    match config.feedback {
        Feedback::None => {
            push(&mut total, gamma, &coll.j_minus, format!("Gamma D[J-], Gamma = {gamma}"));
        }
        _ => {
            let u = operators::feedback_unitary(&config.feedback)?;
            push(
                &mut total,
                gamma * config.eta,
                &(u * coll.j_minus),
                format!("Gamma eta D[Ufb J-], Gamma eta = {}", gamma * config.eta),
            );
            push(
                &mut total,
                gamma * (1.0 - config.eta),
                &coll.j_minus,
                format!(
                    "Gamma (1-eta) D[J-], Gamma (1-eta) = {}",
                    gamma * (1.0 - config.eta)
                ),
            );
        }
    }

    push(
        &mut total,
        config.gamma1,
        &atoms.sigma1,
        format!("gamma1 D[sigma1], gamma1 = {}", config.gamma1),
    );
    push(
        &mut total,
        config.gamma2,
        &atoms.sigma2,
        format!("gamma2 D[sigma2], gamma2 = {}", config.gamma2),
    );
    if config.gamma_deph > 0.0 {
        let n1 = atoms.sigma1_dag * atoms.sigma1;
        let n2 = atoms.sigma2_dag * atoms.sigma2;
        push(
            &mut total,
            config.gamma_deph,
            &n1,
            format!("gamma_deph D[n1], gamma_deph = {}", config.gamma_deph),
        );
        push(
            &mut total,
            config.gamma_deph,
            &n2,
            format!("gamma_deph D[n2], gamma_deph = {}", config.gamma_deph),
        );
    }
    Ok(total)
}
