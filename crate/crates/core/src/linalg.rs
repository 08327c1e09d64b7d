//! Small dense helpers shared across modules.

use nalgebra::{Dim, Matrix, Matrix4, RawStorage};

use crate::C64;

pub(crate) fn hermitize(m: &Matrix4<C64>) -> Matrix4<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub(crate) fn max_abs<R: Dim, C: Dim, S: RawStorage<C64, R, C>>(m: &Matrix<C64, R, C, S>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_defect(m: &Matrix4<C64>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub(crate) fn all_finite<R: Dim, C: Dim, S: RawStorage<C64, R, C>>(
    m: &Matrix<C64, R, C, S>,
) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigendecomposition of a Hermitian 4x4, eigenvalues ascending with matching
/// eigenvector columns. The input is symmetrized first so callers may pass
/// matrices that are Hermitian only up to roundoff.
pub(crate) fn hermitian_eigen_ascending(m: &Matrix4<C64>) -> ([f64; 4], Matrix4<C64>) {
    let eig = nalgebra::SymmetricEigen::new(hermitize(m));
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let mut values = [0.0; 4];
    let mut vectors = Matrix4::zeros();
    for (slot, &src) in order.iter().enumerate() {
        values[slot] = eig.eigenvalues[src];
        vectors.set_column(slot, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues only, ascending.
pub(crate) fn hermitian_eigenvalues_ascending(m: &Matrix4<C64>) -> [f64; 4] {
    hermitian_eigen_ascending(m).0
}
