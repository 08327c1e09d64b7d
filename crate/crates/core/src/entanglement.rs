//! Entanglement and state-quality measures.

use nalgebra::Matrix4;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg;
use crate::operators::singlet_ket;
use crate::C64;

/// The three scalar diagnostics used throughout the sweeps and time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureReport {
    pub concurrence: f64,
    pub fidelity_to_singlet: f64,
    pub purity: f64,
}

/// `sigma_y (x) sigma_y`, the spin-flip conjugation matrix (real).
fn spin_flip() -> Matrix4<C64> {
    let one = C64::new(1.0, 0.0);
    let mut y = Matrix4::zeros();
    y[(0, 3)] = -one;
    y[(1, 2)] = one;
    y[(2, 1)] = one;
    y[(3, 0)] = -one;
    y
}

/// Wootters concurrence: `max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))`
/// with `l_i` the decreasing eigenvalues of `rho (sy x sy) rho* (sy x sy)`.
///
/// The roots are taken from the Hermitian form: with `rho~ = Y rho* Y` and
/// both square roots PSD, `sqrt(rho) rho~ sqrt(rho) = A^dag A` for
/// `A = sqrt(rho~) sqrt(rho)`, so the `sqrt(l_i)` are the singular values of
/// `A`. Singular values carry no square-root noise amplification, which
/// keeps pure and rank-deficient states accurate to full precision.
/// Eigenvalues of `rho` above `-1e-8` are clipped to zero and the state
/// renormalized; anything more negative is an upstream bug and errors.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let (eigs, vecs) = linalg::hermitian_eigen_ascending(rho.matrix());
    if eigs[0] < -1e-8 {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {:.3e} in concurrence input",
            eigs[0]
        )));
    }
    // treat eigenvalues at roundoff scale as exact zeros so their square
    // roots do not inject sqrt(eps) noise
    let floor = 1e-13 * eigs[3].max(0.0);
    let clipped = eigs.map(|e| if e > floor { e } else { 0.0 });
    let total: f64 = clipped.iter().sum();
    let sqrt_weights = clipped.map(|e| (e / total).sqrt());

    let sqrt_rho = vecs
        * Matrix4::from_fn(|i, j| {
            if i == j {
                C64::new(sqrt_weights[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        * vecs.adjoint();

    // sqrt(rho~) = Y sqrt(rho)* Y since Y is real and unitary
    let y = spin_flip();
    let sqrt_rho_tilde = y * sqrt_rho.conjugate() * y;
    let svd = (sqrt_rho_tilde * sqrt_rho).svd(false, false);
    let s = svd.singular_values; // descending
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Overlap with the antisymmetric Bell state, `<4| rho |4>`.
pub fn fidelity_to_singlet(rho: &DensityMatrix) -> f64 {
    let target = singlet_ket();
    (target.adjoint() * rho.matrix() * target)[(0, 0)].re
}

/// `Tr(rho^2)`, between 1/4 (maximally mixed) and 1 (pure).
pub fn purity(rho: &DensityMatrix) -> f64 {
    (rho.matrix() * rho.matrix()).trace().re
}

/// All three measures at once.
pub fn measures(rho: &DensityMatrix) -> Result<MeasureReport> {
    Ok(MeasureReport {
        concurrence: concurrence(rho)?,
        fidelity_to_singlet: fidelity_to_singlet(rho),
        purity: purity(rho),
    })
}
