//! Fixed operator algebra of the two-qubit system.
//!
//! Basis convention, shared program-wide: product states are ordered
//! `|gg>, |ge>, |eg>, |ee>` with the single-qubit ordering `|g>, |e>` and
//! atom 1 as the *left* tensor factor, so `sigma1 = kron(sigma, I)`.

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

/// Operator on the two-qubit space.
pub type Operator = Matrix4<C64>;
/// Operator on a single qubit.
pub type SingleQubitOperator = Matrix2<C64>;
/// Pure two-qubit state.
pub type StateVector = Vector4<C64>;

/// Indices of the product basis kets.
pub mod basis {
    pub const GG: usize = 0;
    pub const GE: usize = 1;
    pub const EG: usize = 2;
    pub const EE: usize = 3;
}

const ONE: C64 = C64::new(1.0, 0.0);

/// Product basis ket by index.
pub fn ket(index: usize) -> StateVector {
    assert!(index < 4, "two-qubit basis index out of range");
    let mut v = StateVector::zeros();
    v[index] = ONE;
    v
}

/// Antisymmetric Bell state `(|ge> - |eg>)/sqrt(2)`, the dark state of the
/// collective decay channel.
pub fn singlet_ket() -> StateVector {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut v = StateVector::zeros();
    v[basis::GE] = s;
    v[basis::EG] = -s;
    v
}

/// Symmetric Bell state `(|ge> + |eg>)/sqrt(2)`.
pub fn symmetric_ket() -> StateVector {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut v = StateVector::zeros();
    v[basis::GE] = s;
    v[basis::EG] = s;
    v
}

/// Single-atom lowering operator `|g><e|`.
pub fn sigma() -> SingleQubitOperator {
    let mut m = SingleQubitOperator::zeros();
    m[(0, 1)] = ONE;
    m
}

/// Single-atom Pauli x, `sigma + sigma^dag`.
pub fn sigma_x() -> SingleQubitOperator {
    let s = sigma();
    s + s.adjoint()
}

/// Kronecker product embedding two single-qubit operators into the two-qubit
/// space; `a` acts on atom 1, `b` on atom 2.
pub fn kron(a: &SingleQubitOperator, b: &SingleQubitOperator) -> Operator {
    a.kronecker(b)
}

/// The single-atom lowering/raising operators embedded in the two-qubit space.
#[derive(Debug, Clone)]
pub struct AtomicOps {
    pub sigma1: Operator,
    pub sigma2: Operator,
    pub sigma1_dag: Operator,
    pub sigma2_dag: Operator,
}

pub fn atomic_ops() -> AtomicOps {
    let s = sigma();
    let id = SingleQubitOperator::identity();
    let sigma1 = kron(&s, &id);
    let sigma2 = kron(&id, &s);
    AtomicOps {
        sigma1_dag: sigma1.adjoint(),
        sigma2_dag: sigma2.adjoint(),
        sigma1,
        sigma2,
    }
}

/// Collective angular momentum operators.
#[derive(Debug, Clone)]
pub struct CollectiveOps {
    pub j_minus: Operator,
    pub j_plus: Operator,
    pub j_x: Operator,
}

pub fn collective_ops() -> CollectiveOps {
    let atoms = atomic_ops();
    let j_minus = atoms.sigma1 + atoms.sigma2;
    let j_plus = j_minus.adjoint();
    CollectiveOps {
        j_x: j_plus + j_minus,
        j_minus,
        j_plus,
    }
}

/// Feedback applied after each detected collective jump. The strength is the
/// dimensionless rotation angle of the feedback unitary, in radians; the
/// control pulse duration is absorbed into it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feedback {
    /// No control; the feedback unitary is the identity.
    None,
    /// Exchange-symmetric control `exp(-i lambda Jx)`.
    Collective { lambda: f64 },
    /// Control on atom 1 only, `exp(-i lambda sigma_x) (x) I`.
    Local { lambda: f64 },
}

impl Feedback {
    pub fn lambda(&self) -> Option<f64> {
        match *self {
            Feedback::None => None,
            Feedback::Collective { lambda } | Feedback::Local { lambda } => Some(lambda),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.lambda() {
            Some(lambda) if !lambda.is_finite() => Err(Error::InvalidConfig(format!(
                "feedback strength must be finite, got {lambda}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Feedback unitary for the given kind and strength.
///
/// The collective case is computed from the eigendecomposition of the
/// Hermitian `Jx`, which keeps the result unitary to roundoff. The local case
/// uses the closed form `cos(lambda) I - i sin(lambda) sigma_x` (valid since
/// `sigma_x^2 = I`) on atom 1.
pub fn feedback_unitary(feedback: &Feedback) -> Result<Operator> {
    feedback.validate()?;
    match *feedback {
        Feedback::None => Ok(Operator::identity()),
        Feedback::Collective { lambda } => {
            if lambda == 0.0 {
                return Ok(Operator::identity());
            }
            let jx = collective_ops().j_x;
            let eig = nalgebra::SymmetricEigen::new(jx);
            let phases =
                Operator::from_diagonal(&eig.eigenvalues.map(|e| C64::new(0.0, -lambda * e).exp()));
            Ok(eig.eigenvectors * phases * eig.eigenvectors.adjoint())
        }
        Feedback::Local { lambda } => {
            let u1 = SingleQubitOperator::identity() * C64::new(lambda.cos(), 0.0)
                - sigma_x() * C64::new(0.0, lambda.sin());
            Ok(kron(&u1, &SingleQubitOperator::identity()))
        }
    }
}

/// Unitary whose columns are the angular momentum states: the symmetric
/// triplet `|1> = |gg>`, `|2> = (|ge>+|eg>)/sqrt(2)`, `|3> = |ee>`, and the
/// antisymmetric singlet `|4> = (|ge>-|eg>)/sqrt(2)`.
pub fn dicke_basis() -> Operator {
    let mut u = Operator::zeros();
    u.set_column(0, &ket(basis::GG));
    u.set_column(1, &symmetric_ket());
    u.set_column(2, &ket(basis::EE));
    u.set_column(3, &singlet_ket());
    u
}

/// Conjugate an operator (or density matrix) into the angular momentum basis:
/// `U^dag A U`.
pub fn to_dicke(op: &Operator) -> Operator {
    let u = dicke_basis();
    u.adjoint() * op * u
}

/// Inverse of [`to_dicke`].
pub fn from_dicke(op: &Operator) -> Operator {
    let u = dicke_basis();
    u * op * u.adjoint()
}

/// Max-norm deviation of `U^dag U` from the identity.
pub fn unitarity_defect(u: &Operator) -> f64 {
    linalg::max_abs(&(u.adjoint() * u - Operator::identity()))
}
