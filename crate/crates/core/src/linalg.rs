//! Small dense-matrix helpers shared by the solver and the oracle.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// (M + M^T) / 2.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest real part among the eigenvalues of a real square matrix.
pub fn max_real_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Factor a symmetric positive-semidefinite matrix as D = B B^T via its
/// eigendecomposition. Rank deficiency is fine (B keeps zero columns);
/// eigenvalues below -1e-10 * ||D|| are rejected.
pub fn psd_factor(d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let scale = d.norm();
    if scale == 0.0 {
        return Ok(DMatrix::zeros(d.nrows(), d.ncols()));
    }
    let eig = symmetrize(d).symmetric_eigen();
    let mut vals = eig.eigenvalues;
    for v in vals.iter_mut() {
        if *v < 0.0 {
            if *v < -1e-10 * scale {
                return Err(Error::IndefiniteDiffusion { eigenvalue: *v });
            }
            *v = 0.0;
        }
    }
    let sqrt = DMatrix::from_diagonal(&vals.map(f64::sqrt));
    Ok(eig.eigenvectors * sqrt)
}

/// Exact one-step discretization of du = A u dt + B dW with B B^T = D:
/// returns (Phi, Q) with Phi = exp(A dt) and Q = int_0^dt exp(As) D exp(A^T s) ds,
/// so that V(t + dt) = Phi V(t) Phi^T + Q.
///
/// Computed with one matrix exponential of the stacked 2n x 2n block matrix
/// [[-A, D], [0, A^T]] (Van Loan's method); valid for any A, stable or not.
pub fn discretize(a: &DMatrix<f64>, d: &DMatrix<f64>, dt: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut stacked = DMatrix::zeros(2 * n, 2 * n);
    stacked.view_mut((0, 0), (n, n)).copy_from(&(-a * dt));
    stacked.view_mut((0, n), (n, n)).copy_from(&(d * dt));
    stacked
        .view_mut((n, n), (n, n))
        .copy_from(&(a.transpose() * dt));
    let e = stacked.exp();
    let phi = e.view((n, n), (n, n)).transpose().into_owned();
    let q = &phi * e.view((0, n), (n, n));
    (phi, symmetrize(&q))
}
