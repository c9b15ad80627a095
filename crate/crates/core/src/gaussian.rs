//! Gaussian states over a quadrature basis and the observables read off them.
//!
//! Covariances are symmetrized moments in canonical scaling (vacuum =
//! (1/2) I). Reported quadrature variances follow the convention in which
//! vacuum has Var(X) = 1, i.e. twice the internal diagonal; `occupation`
//! and `log_negativity` are convention-independent.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::StateBasis;

/// Mean vector plus symmetrized covariance matrix over a labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    basis: StateBasis,
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(basis: StateBasis, mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let n = basis.dim();
        if mean.len() != n {
            return Err(Error::DimensionMismatch {
                what: "mean vector",
                expected: n,
                got: mean.len(),
            });
        }
        if covariance.nrows() != n || covariance.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "covariance matrix",
                expected: n,
                got: covariance.nrows().max(covariance.ncols()),
            });
        }
        Ok(Self {
            basis,
            mean,
            covariance: crate::linalg::symmetrize(&covariance),
        })
    }

    /// Vacuum on every mode: zero mean, covariance (1/2) I.
    pub fn vacuum(basis: StateBasis) -> Self {
        let n = basis.dim();
        Self {
            mean: DVector::zeros(n),
            covariance: DMatrix::identity(n, n) * 0.5,
            basis,
        }
    }

    /// Uncorrelated thermal state with one occupation per mode.
    pub fn thermal(basis: StateBasis, occupations: &[f64]) -> Result<Self> {
        if occupations.len() != basis.n_modes() {
            return Err(Error::DimensionMismatch {
                what: "occupations",
                expected: basis.n_modes(),
                got: occupations.len(),
            });
        }
        let n = basis.dim();
        let mut cov = DMatrix::zeros(n, n);
        for (m, occ) in occupations.iter().enumerate() {
            cov[(2 * m, 2 * m)] = occ + 0.5;
            cov[(2 * m + 1, 2 * m + 1)] = occ + 0.5;
        }
        Ok(Self {
            mean: DVector::zeros(n),
            covariance: cov,
            basis,
        })
    }

    pub fn basis(&self) -> &StateBasis {
        &self.basis
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Mean photon number of one mode:
    /// (V_xx + V_yy)/2 - 1/2 + (mean_x^2 + mean_y^2)/2.
    ///
    /// Roundoff slightly below zero (>= -1e-9) is clipped to 0.
    pub fn occupation(&self, mode: &str) -> Result<f64> {
        let (ix, iy) = self.basis.mode_indices(mode)?;
        let n = 0.5 * (self.covariance[(ix, ix)] + self.covariance[(iy, iy)]) - 0.5
            + 0.5 * (self.mean[ix] * self.mean[ix] + self.mean[iy] * self.mean[iy]);
        if (-1e-9..0.0).contains(&n) {
            return Ok(0.0);
        }
        Ok(n)
    }

    /// Variance of one quadrature in the reporting convention where vacuum
    /// has variance 1 (twice the internal covariance diagonal), including
    /// the mean's contribution to the second moment of the fluctuation-free
    /// value... the mean is *not* included: this is the spread only.
    pub fn quadrature_variance(&self, label: &str) -> Result<f64> {
        let i = self.basis.index_of(label)?;
        Ok(2.0 * self.covariance[(i, i)])
    }

    /// Restriction to a subset of modes (Gaussian partial trace).
    pub fn reduced(&self, modes: &[&str]) -> Result<Self> {
        let mut idx = Vec::with_capacity(2 * modes.len());
        for mode in modes {
            let (ix, iy) = self.basis.mode_indices(mode)?;
            idx.push(ix);
            idx.push(iy);
        }
        let k = idx.len();
        let mean = DVector::from_fn(k, |i, _| self.mean[idx[i]]);
        let cov = DMatrix::from_fn(k, k, |i, j| self.covariance[(idx[i], idx[j])]);
        let basis = StateBasis::from_modes(modes);
        Self::new(basis, mean, cov)
    }

    /// How far the state sits from satisfying the uncertainty relation
    /// V + (i/2) Omega >= 0: zero for physical states, else the magnitude of
    /// the most negative eigenvalue.
    pub fn physicality_defect(&self) -> f64 {
        let n = self.basis.dim();
        let omega = self.basis.symplectic_form();
        let h = DMatrix::from_fn(n, n, |i, j| {
            Complex::new(self.covariance[(i, j)], 0.5 * omega[(i, j)])
        });
        let min_eig = h.symmetric_eigen().eigenvalues.min();
        (-min_eig).max(0.0)
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.physicality_defect() <= tol
    }

    /// Logarithmic negativity of a two-mode partition,
    /// E_N = max(0, -ln 2 nu-tilde-minus), with nu-tilde-minus the smallest
    /// symplectic eigenvalue of the partially transposed covariance.
    ///
    /// E_N > 0 certifies entanglement between the two modes. This measure is
    /// our choice of entanglement quantifier; the underlying model does not
    /// prescribe one.
    pub fn log_negativity(&self, partition: (&str, &str)) -> Result<f64> {
        let tol = 1e-9 * self.covariance.norm().max(1.0);
        let defect = self.physicality_defect();
        if defect > tol {
            return Err(Error::UnphysicalState { defect });
        }
        let pair = self.reduced(&[partition.0, partition.1])?;
        // Partial transpose on the second mode: flip the sign of its Y
        // quadrature.
        let mut v = pair.covariance.clone();
        for k in 0..4 {
            v[(3, k)] = -v[(3, k)];
            v[(k, 3)] = -v[(k, 3)];
        }
        let nus = symplectic_eigenvalues(&v, &pair.basis.symplectic_form());
        let nu_min = nus.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((-(2.0 * nu_min).ln()).max(0.0))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&StateDoc::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StateDoc = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// Symplectic spectrum of a covariance matrix: the moduli of the (pairwise
/// imaginary) eigenvalues of Omega V, one value per mode.
pub fn symplectic_eigenvalues(v: &DMatrix<f64>, omega: &DMatrix<f64>) -> Vec<f64> {
    let m = omega * v;
    let mut abs_im: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.im.abs()).collect();
    abs_im.sort_by(f64::total_cmp);
    // Eigenvalues come in +/- i nu pairs; keep one per pair.
    abs_im.into_iter().skip(1).step_by(2).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct StateDoc {
    modes: Vec<String>,
    labels: Vec<String>,
    mean: Vec<f64>,
    /// Row-major covariance.
    covariance: Vec<Vec<f64>>,
}

impl From<&GaussianState> for StateDoc {
    fn from(s: &GaussianState) -> Self {
        Self {
            modes: s.basis.modes().to_vec(),
            labels: s.basis.labels().to_vec(),
            mean: s.mean.iter().copied().collect(),
            covariance: (0..s.covariance.nrows())
                .map(|i| {
                    (0..s.covariance.ncols())
                        .map(|j| s.covariance[(i, j)])
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<StateDoc> for GaussianState {
    type Error = Error;

    fn try_from(doc: StateDoc) -> Result<Self> {
        crate::system::check_unique_modes(&doc.modes)?;
        let basis = StateBasis::from_modes(&doc.modes);
        let n = basis.dim();
        if doc.covariance.len() != n || doc.covariance.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                what: "covariance matrix",
                expected: n,
                got: doc.covariance.len(),
            });
        }
        let mean = DVector::from_vec(doc.mean);
        let cov = DMatrix::from_fn(n, n, |i, j| doc.covariance[i][j]);
        GaussianState::new(basis, mean, cov)
    }
}
